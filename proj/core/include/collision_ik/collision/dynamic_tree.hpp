#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "collision_ik/collision/shapes.hpp"

namespace cik {

/// Incrementally balanced bounding volume hierarchy over AABB leaves.
/// Leaves carry a user value; internal boxes always enclose their children.
class DynamicAabbTree {
 public:
  static constexpr std::int32_t kNull = -1;

  /// Returns a proxy handle for the new leaf.
  std::int32_t insert(const Aabb& box, std::int64_t user);
  void remove(std::int32_t proxy);

  /// Replaces the leaf box. Reinserts only when `box` is not already
  /// contained in the stored one; the stored box is then `box` grown by
  /// `slack`. Returns true on reinsertion.
  bool update(std::int32_t proxy, const Aabb& box, double slack = 0.0);

  /// Calls `visit(user)` for each leaf whose box overlaps `box`.
  void query(const Aabb& box, const std::function<void(std::int64_t)>& visit) const;

  const Aabb& leaf_box(std::int32_t proxy) const { return nodes_[proxy].box; }
  std::int64_t leaf_user(std::int32_t proxy) const { return nodes_[proxy].user; }
  std::size_t leaf_count() const { return leaves_; }
  int height() const { return root_ == kNull ? 0 : nodes_[root_].height; }

  /// Structural check: parent links, heights, and that every ancestor box
  /// encloses its descendants.
  bool validate() const;

 private:
  struct Node {
    Aabb box;
    std::int32_t parent = kNull;
    std::int32_t child1 = kNull;
    std::int32_t child2 = kNull;
    std::int32_t height = -1;  // -1 free, 0 leaf
    std::int64_t user = 0;
    bool leaf() const { return child1 == kNull; }
  };

  std::int32_t allocate();
  void release(std::int32_t id);
  void insert_leaf(std::int32_t leaf);
  void remove_leaf(std::int32_t leaf);
  std::int32_t balance(std::int32_t a);
  void refit_upwards(std::int32_t start);
  bool validate_node(std::int32_t id) const;

  std::vector<Node> nodes_;
  std::vector<std::int32_t> free_;
  std::int32_t root_ = kNull;
  std::size_t leaves_ = 0;
};

}  // namespace cik

#include "collision_ik/collision/dynamic_tree.hpp"

#include <algorithm>
#include <cassert>

#include "collision_ik/error.hpp"

namespace cik {

std::int32_t DynamicAabbTree::allocate() {
  if (!free_.empty()) {
    const auto id = free_.back();
    free_.pop_back();
    nodes_[id] = Node{};
    nodes_[id].height = 0;
    return id;
  }
  nodes_.push_back(Node{});
  nodes_.back().height = 0;
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

void DynamicAabbTree::release(std::int32_t id) {
  nodes_[id].height = -1;
  free_.push_back(id);
}

std::int32_t DynamicAabbTree::insert(const Aabb& box, std::int64_t user) {
  const auto id = allocate();
  nodes_[id].box = box;
  nodes_[id].user = user;
  insert_leaf(id);
  ++leaves_;
  return id;
}

void DynamicAabbTree::remove(std::int32_t proxy) {
  if (proxy < 0 || proxy >= static_cast<std::int32_t>(nodes_.size()) || !nodes_[proxy].leaf() ||
      nodes_[proxy].height != 0)
    throw Error("DynamicAabbTree::remove: invalid proxy");
  remove_leaf(proxy);
  release(proxy);
  --leaves_;
}

bool DynamicAabbTree::update(std::int32_t proxy, const Aabb& box, double slack) {
  if (nodes_[proxy].box.contains(box)) return false;
  remove_leaf(proxy);
  nodes_[proxy].box = box.inflated(slack);
  insert_leaf(proxy);
  return true;
}

void DynamicAabbTree::insert_leaf(std::int32_t leaf) {
  if (root_ == kNull) {
    root_ = leaf;
    nodes_[leaf].parent = kNull;
    return;
  }
  const Aabb leaf_box = nodes_[leaf].box;

  // Descend by surface-area cost to find the best sibling.
  std::int32_t index = root_;
  while (!nodes_[index].leaf()) {
    const auto c1 = nodes_[index].child1;
    const auto c2 = nodes_[index].child2;
    const double area = nodes_[index].box.surface_area();
    const double combined = Aabb::merged(nodes_[index].box, leaf_box).surface_area();
    const double cost = 2.0 * combined;
    const double inherit = 2.0 * (combined - area);
    auto child_cost = [&](std::int32_t c) {
      const double merged = Aabb::merged(nodes_[c].box, leaf_box).surface_area();
      return nodes_[c].leaf() ? merged + inherit : merged - nodes_[c].box.surface_area() + inherit;
    };
    const double cost1 = child_cost(c1);
    const double cost2 = child_cost(c2);
    if (cost < cost1 && cost < cost2) break;
    index = cost1 < cost2 ? c1 : c2;
  }

  const std::int32_t sibling = index;
  const std::int32_t old_parent = nodes_[sibling].parent;
  const std::int32_t new_parent = allocate();
  nodes_[new_parent].parent = old_parent;
  nodes_[new_parent].box = Aabb::merged(leaf_box, nodes_[sibling].box);
  nodes_[new_parent].height = nodes_[sibling].height + 1;
  nodes_[new_parent].child1 = sibling;
  nodes_[new_parent].child2 = leaf;
  nodes_[sibling].parent = new_parent;
  nodes_[leaf].parent = new_parent;
  if (old_parent == kNull) {
    root_ = new_parent;
  } else if (nodes_[old_parent].child1 == sibling) {
    nodes_[old_parent].child1 = new_parent;
  } else {
    nodes_[old_parent].child2 = new_parent;
  }
  refit_upwards(nodes_[leaf].parent);
}

void DynamicAabbTree::remove_leaf(std::int32_t leaf) {
  if (leaf == root_) {
    root_ = kNull;
    return;
  }
  const auto parent = nodes_[leaf].parent;
  const auto grand = nodes_[parent].parent;
  const auto sibling = nodes_[parent].child1 == leaf ? nodes_[parent].child2 : nodes_[parent].child1;
  if (grand != kNull) {
    if (nodes_[grand].child1 == parent)
      nodes_[grand].child1 = sibling;
    else
      nodes_[grand].child2 = sibling;
    nodes_[sibling].parent = grand;
    release(parent);
    refit_upwards(grand);
  } else {
    root_ = sibling;
    nodes_[sibling].parent = kNull;
    release(parent);
  }
  nodes_[leaf].parent = kNull;
}

void DynamicAabbTree::refit_upwards(std::int32_t index) {
  while (index != kNull) {
    index = balance(index);
    auto& n = nodes_[index];
    n.height = 1 + std::max(nodes_[n.child1].height, nodes_[n.child2].height);
    n.box = Aabb::merged(nodes_[n.child1].box, nodes_[n.child2].box);
    index = n.parent;
  }
}

// Rotates the subtree at `a` if its children's heights differ by more than
// one. Returns the new subtree root.
std::int32_t DynamicAabbTree::balance(std::int32_t ia) {
  Node& a = nodes_[ia];
  if (a.leaf() || a.height < 2) return ia;
  const auto ib = a.child1;
  const auto ic = a.child2;
  const int diff = nodes_[ic].height - nodes_[ib].height;

  auto rotate = [&](std::int32_t up, std::int32_t other) {
    // `up` (a child of a) becomes the subtree root; its taller child stays
    // under it and the shorter is handed to a.
    Node& u = nodes_[up];
    const auto f = u.child1;
    const auto g = u.child2;
    u.child1 = ia;
    u.parent = nodes_[ia].parent;
    nodes_[ia].parent = up;
    if (u.parent != kNull) {
      if (nodes_[u.parent].child1 == ia)
        nodes_[u.parent].child1 = up;
      else
        nodes_[u.parent].child2 = up;
    } else {
      root_ = up;
    }
    const bool f_taller = nodes_[f].height > nodes_[g].height;
    const auto keep = f_taller ? f : g;
    const auto give = f_taller ? g : f;
    u.child2 = keep;
    if (nodes_[ia].child1 == up)
      nodes_[ia].child1 = give;
    else
      nodes_[ia].child2 = give;
    nodes_[give].parent = ia;
    Node& an = nodes_[ia];
    an.box = Aabb::merged(nodes_[other].box, nodes_[give].box);
    an.height = 1 + std::max(nodes_[other].height, nodes_[give].height);
    u.box = Aabb::merged(an.box, nodes_[keep].box);
    u.height = 1 + std::max(an.height, nodes_[keep].height);
    return up;
  };

  if (diff > 1) return rotate(ic, ib);
  if (diff < -1) return rotate(ib, ic);
  return ia;
}

void DynamicAabbTree::query(const Aabb& box, const std::function<void(std::int64_t)>& visit) const {
  if (root_ == kNull) return;
  std::vector<std::int32_t> stack;
  stack.reserve(64);
  stack.push_back(root_);
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[id];
    if (!n.box.overlaps(box)) continue;
    if (n.leaf()) {
      visit(n.user);
    } else {
      stack.push_back(n.child1);
      stack.push_back(n.child2);
    }
  }
}

bool DynamicAabbTree::validate_node(std::int32_t id) const {
  const Node& n = nodes_[id];
  if (n.leaf()) return n.height == 0 && n.child2 == kNull;
  const Node& c1 = nodes_[n.child1];
  const Node& c2 = nodes_[n.child2];
  if (c1.parent != id || c2.parent != id) return false;
  if (n.height != 1 + std::max(c1.height, c2.height)) return false;
  if (!n.box.contains(c1.box) || !n.box.contains(c2.box)) return false;
  return validate_node(n.child1) && validate_node(n.child2);
}

bool DynamicAabbTree::validate() const {
  if (root_ == kNull) return leaves_ == 0;
  if (nodes_[root_].parent != kNull) return false;
  std::size_t count = 0;
  for (const auto& n : nodes_)
    if (n.height == 0) ++count;
  return count == leaves_ && validate_node(root_);
}

}  // namespace cik

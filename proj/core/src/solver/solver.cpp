#include "collision_ik/solver/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "collision_ik/error.hpp"
#include "json_helpers.hpp"

namespace cik {

void SolverSettings::validate() const {
  if (max_iterations < 1) throw ValidationError("max_iterations", "must be at least 1");
  if (!(gradient_tolerance > 0.0)) throw ValidationError("gradient_tolerance", "must be positive");
  if (!(step_tolerance > 0.0)) throw ValidationError("step_tolerance", "must be positive");
  if (!(time_budget_us > 0.0)) throw ValidationError("time_budget_us", "must be positive");
  if (!(fd_step > 0.0)) throw ValidationError("fd_step", "must be positive");
  if (memory < 0) throw ValidationError("memory", "must be nonnegative");
}

SolverSettings parse_solver_settings(std::string_view document) {
  const auto doc = detail::parse_json(document);
  if (!doc.is_object()) throw ParseError("settings: expected an object");
  // Either top-level fields or a "solver" section.
  const auto& j = doc.contains("solver") ? doc.at("solver") : doc;
  SolverSettings s;
  s.max_iterations = detail::optional<int>(j, "max_iterations", "", s.max_iterations);
  s.gradient_tolerance = detail::optional<double>(j, "gradient_tolerance", "", s.gradient_tolerance);
  s.step_tolerance = detail::optional<double>(j, "step_tolerance", "", s.step_tolerance);
  s.time_budget_us = detail::optional<double>(j, "time_budget_us", "", s.time_budget_us);
  s.fd_step = detail::optional<double>(j, "fd_step", "", s.fd_step);
  s.memory = detail::optional<int>(j, "memory", "", s.memory);
  s.validate();
  return s;
}

SolverSettings load_solver_settings(const std::string& path) { return parse_solver_settings(detail::read_file(path)); }

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Tolerance:
      return "tolerance";
    case Termination::IterationCap:
      return "iteration_cap";
    case Termination::TimeBudget:
      return "time_budget";
  }
  return "unknown";
}

JointVector fd_gradient(const ScalarField& f, const JointVector& x, double h, const Bounds* bounds, double fx,
                        int* evaluations) {
  const Eigen::Index n = x.size();
  JointVector g(n);
  JointVector probe = x;
  int evals = 0;
  auto eval = [&](const JointVector& p) {
    ++evals;
    const double v = f(p);
    if (!std::isfinite(v)) throw NonFiniteError("fd_gradient: objective is not finite at a probe point");
    return v;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    double up = h, down = h;
    if (bounds) {
      up = std::min(h, bounds->upper[i] - x[i]);
      down = std::min(h, x[i] - bounds->lower[i]);
      up = std::max(up, 0.0);
      down = std::max(down, 0.0);
    }
    if (up + down <= 0.0) {
      g[i] = 0.0;
      continue;
    }
    double f_up, f_down;
    if (up > 0.0) {
      probe[i] = x[i] + up;
      f_up = eval(probe);
    } else {
      if (std::isnan(fx)) fx = eval(x);
      f_up = fx;
    }
    if (down > 0.0) {
      probe[i] = x[i] - down;
      f_down = eval(probe);
    } else {
      if (std::isnan(fx)) fx = eval(x);
      f_down = fx;
    }
    probe[i] = x[i];
    g[i] = (f_up - f_down) / (up + down);
  }
  if (evaluations) *evaluations += evals;
  return g;
}

Solver::Solver(SolverSettings settings) : settings_(settings) { settings_.validate(); }

JointVector Solver::direction(const JointVector& g, const std::vector<bool>& fixed) const {
  auto mask = [&](JointVector v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (fixed[i]) v[i] = 0.0;
    return v;
  };
  JointVector q = mask(g);
  if (pairs_.empty()) return -q;
  const std::size_t m = pairs_.size();
  std::vector<double> alpha(m), rho(m);
  for (std::size_t k = m; k-- > 0;) {
    const JointVector s = mask(pairs_[k].first);
    const JointVector y = mask(pairs_[k].second);
    const double sy = s.dot(y);
    rho[k] = sy > 0.0 ? 1.0 / sy : 0.0;
    alpha[k] = rho[k] * s.dot(q);
    q -= alpha[k] * y;
  }
  const JointVector s_last = mask(pairs_.back().first);
  const JointVector y_last = mask(pairs_.back().second);
  const double yy = y_last.squaredNorm();
  const double gamma = yy > 0.0 ? s_last.dot(y_last) / yy : 1.0;
  JointVector r = (gamma > 0.0 ? gamma : 1.0) * q;
  for (std::size_t k = 0; k < m; ++k) {
    const JointVector s = mask(pairs_[k].first);
    const JointVector y = mask(pairs_[k].second);
    const double beta = rho[k] * y.dot(r);
    r += s * (alpha[k] - beta);
  }
  return -mask(r);
}

SolveResult Solver::solve(const ScalarField& f, const JointVector& warm, const Bounds& bounds) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed_us = [&] { return std::chrono::duration<double, std::micro>(Clock::now() - start).count(); };

  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 40;
  constexpr double kFirstStep = 0.1;  // rad, max component of an uninformed first step

  SolveResult res;
  JointVector x = bounds.project(warm);
  double fx = f(x);
  res.evaluations = 1;
  if (!std::isfinite(fx)) throw NonFiniteError("solve: objective is not finite at the warm start");

  const Eigen::Index n = x.size();
  std::vector<bool> fixed(n, false);
  JointVector g_prev, s_prev;
  bool have_step = false;
  res.reason = Termination::IterationCap;

  int it = 0;
  for (; it < settings_.max_iterations; ++it) {
    if (elapsed_us() >= settings_.time_budget_us) {
      res.reason = Termination::TimeBudget;
      break;
    }
    JointVector g;
    try {
      g = fd_gradient(f, x, settings_.fd_step, &bounds, fx, &res.evaluations);
    } catch (const NonFiniteError&) {
      // x itself is finite; a probe beside it is not. Keep x.
      res.reason = Termination::Tolerance;
      break;
    }
    if (have_step) {
      const JointVector y = g - g_prev;
      const double sy = s_prev.dot(y);
      if (sy > 1e-12 * s_prev.norm() * y.norm() && sy > 0.0) {
        pairs_.emplace_back(s_prev, y);
        while (pairs_.size() > static_cast<std::size_t>(settings_.memory)) pairs_.pop_front();
      }
    }

    const JointVector pg = x - bounds.project(x - g);
    if (pg.lpNorm<Eigen::Infinity>() <= settings_.gradient_tolerance) {
      res.reason = Termination::Tolerance;
      break;
    }
    for (Eigen::Index i = 0; i < n; ++i)
      fixed[i] = (x[i] <= bounds.lower[i] && g[i] > 0.0) || (x[i] >= bounds.upper[i] && g[i] < 0.0);

    JointVector d = direction(g, fixed);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      pairs_.clear();
      d = direction(g, fixed);
      slope = g.dot(d);
    }
    double step = 1.0;
    if (pairs_.empty()) {
      const double dmax = d.lpNorm<Eigen::Infinity>();
      if (dmax > kFirstStep) step = kFirstStep / dmax;
    }

    bool accepted = false;
    bool tiny = false;
    JointVector x_new;
    double f_new = fx;
    for (int ls = 0; ls < kMaxBacktracks; ++ls) {
      x_new = bounds.project(x + step * d);
      if ((x_new - x).lpNorm<Eigen::Infinity>() <= settings_.step_tolerance) {
        tiny = true;
        break;
      }
      f_new = f(x_new);
      ++res.evaluations;
      if (std::isfinite(f_new) && f_new <= fx + kArmijo * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // A failed search on a stale model retries once from steepest descent.
      if (!pairs_.empty() && !tiny) {
        pairs_.clear();
        have_step = false;
        continue;
      }
      res.reason = Termination::Tolerance;
      break;
    }
    s_prev = x_new - x;
    g_prev = g;
    have_step = true;
    x = std::move(x_new);
    fx = f_new;
    if (s_prev.lpNorm<Eigen::Infinity>() <= settings_.step_tolerance) {
      res.reason = Termination::Tolerance;
      ++it;
      break;
    }
  }
  res.iterations = it;
  res.theta = std::move(x);
  res.value = fx;
  res.wall_us = elapsed_us();
  return res;
}

}  // namespace cik

#include "elastireg/solve/optimizer.hpp"

#include <cmath>
#include <deque>

namespace elastireg {

void OptimizerParams::validate() const {
  if (max_iterations < 1) throw InvalidInput("max_iterations must be positive");
  if (!(gradient_tolerance > 0.0)) throw InvalidInput("gradient_tolerance must be positive");
  if (!(function_tolerance > 0.0)) throw InvalidInput("function_tolerance must be positive");
  if (barrier_schedule.empty()) throw InvalidInput("barrier_schedule must not be empty");
  for (double mu : barrier_schedule) {
    if (!(mu >= 0.0)) throw InvalidInput("barrier weights must be nonnegative");
  }
  if (!(armijo > 0.0 && armijo < 1.0)) throw InvalidInput("armijo constant must be in (0,1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw InvalidInput("backtrack factor must be in (0,1)");
  if (max_backtracks < 1 || memory < 1 || multistart < 1) throw InvalidInput("optimizer counts must be positive");
  if (!(det_floor >= 0.0)) throw InvalidInput("det_floor must be nonnegative");
}

std::string to_string(OptimizeStatus s) {
  switch (s) {
    case OptimizeStatus::Converged: return "converged";
    case OptimizeStatus::Stalled: return "stalled";
    case OptimizeStatus::IterationCap: return "iteration_cap";
  }
  return "unknown";
}

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

} // namespace

OptimizeResult minimize_lbfgs_box(const Objective& f, const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& upper, const OptimizerParams& params,
                                  const std::function<void(const Eigen::VectorXd&)>& on_accept) {
  OptimizeResult r;
  r.x = project(x0, lower, upper);
  Eigen::VectorXd g(r.x.size());
  r.value = f(r.x, &g);
  if (!std::isfinite(r.value)) throw Degenerate("optimizer started at an infeasible point");
  r.trajectory.push_back(r.value);
  if (r.x.size() == 0) {
    r.status = OptimizeStatus::Converged;
    return r;
  }
  std::deque<Eigen::VectorXd> S, Y;
  int small_steps = 0;
  const Eigen::Index n = r.x.size();

  for (r.iterations = 0; r.iterations < params.max_iterations; ++r.iterations) {
    Eigen::VectorXd pg = g;
    std::vector<char> active(n, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((r.x[i] <= lower[i] && g[i] > 0) || (r.x[i] >= upper[i] && g[i] < 0)) {
        active[i] = 1;
        pg[i] = 0.0;
      }
    }
    if (pg.lpNorm<Eigen::Infinity>() <= params.gradient_tolerance) {
      r.status = OptimizeStatus::Converged;
      return r;
    }

    // Two-loop recursion restricted to free coordinates.
    Eigen::VectorXd q = pg;
    std::vector<double> a(S.size());
    for (int k = static_cast<int>(S.size()) - 1; k >= 0; --k) {
      a[k] = S[k].dot(q) / Y[k].dot(S[k]);
      q -= a[k] * Y[k];
      for (Eigen::Index i = 0; i < n; ++i) {
        if (active[i]) q[i] = 0.0;
      }
    }
    if (!S.empty()) q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double b = Y[k].dot(q) / Y[k].dot(S[k]);
      q += (a[k] - b) * S[k];
      for (Eigen::Index i = 0; i < n; ++i) {
        if (active[i]) q[i] = 0.0;
      }
    }
    Eigen::VectorXd d = -q;
    if (!(g.dot(d) < 0.0)) {
      S.clear();
      Y.clear();
      d = -pg;
    }

    bool accepted = false;
    Eigen::VectorXd x_new, g_new(n);
    double f_new = 0.0;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double t = 1.0;
      if (S.empty()) t = std::min(1.0, 1.0 / std::max(1e-300, d.lpNorm<Eigen::Infinity>()));
      for (int bt = 0; bt < params.max_backtracks; ++bt, t *= params.backtrack) {
        x_new = project(r.x + t * d, lower, upper);
        const double decrease = g.dot(x_new - r.x);
        if (!(decrease < 0.0)) continue;
        f_new = f(x_new, &g_new);
        if (std::isfinite(f_new) && f_new <= r.value + params.armijo * decrease) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (S.empty()) break;
        // Retry along the projected steepest descent direction.
        S.clear();
        Y.clear();
        d = -pg;
      }
    }
    if (!accepted) {
      r.status = OptimizeStatus::Stalled;
      return r;
    }

    const Eigen::VectorXd s = x_new - r.x;
    const Eigen::VectorXd yv = g_new - g;
    if (s.dot(yv) > 1e-12 * s.norm() * yv.norm()) {
      S.push_back(s);
      Y.push_back(yv);
      if (static_cast<int>(S.size()) > params.memory) {
        S.pop_front();
        Y.pop_front();
      }
    }
    const double change = std::abs(r.value - f_new);
    r.x = x_new;
    g = g_new;
    r.value = f_new;
    r.trajectory.push_back(f_new);
    if (on_accept) on_accept(r.x);
    small_steps = change <= params.function_tolerance * std::max(1.0, std::abs(f_new)) ? small_steps + 1 : 0;
    if (small_steps >= 3) {
      ++r.iterations;
      r.status = OptimizeStatus::Converged;
      return r;
    }
  }
  r.status = OptimizeStatus::IterationCap;
  return r;
}

} // namespace elastireg

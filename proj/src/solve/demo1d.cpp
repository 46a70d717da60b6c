#include "elastireg/solve/demo1d.hpp"

#include <algorithm>
#include <cmath>

namespace elastireg {

Convex1D Convex1D::default_psi() {
  return {[](double p) { return p + 1.0 / p - 2.0; }, [](double p) { return 1.0 - 1.0 / (p * p); },
          [](double p) { return 2.0 / (p * p * p); }};
}

namespace {

struct CellTerms {
  double f = 0.0;
  double g0 = 0.0, g1 = 0.0;
  double h00 = 0.0, h01 = 0.0, h11 = 0.0;
};

// int (1 + y') [mismatch] over a cell of length len where y runs linearly from y0 to y1.
// The mismatch set is {y >= b} when c1 = 1 and {y < b} when c1 = 0; its cost is its
// x-length plus its y-length.
CellTerms fidelity_cell(double y0, double y1, double len, bool c1_one, double b) {
  CellTerms t;
  const double D = y1 - y0;
  const bool full = c1_one ? y0 >= b : y1 <= b;
  const bool none = c1_one ? y1 <= b : y0 >= b;
  if (none) return t;
  if (full) {
    t.f = len + D;
    t.g0 = -1.0;
    t.g1 = 1.0;
    return t;
  }
  const double D2 = D * D, D3 = D2 * D;
  if (c1_one) {
    t.f = len * (y1 - b) / D + (y1 - b);
    t.g0 = len * (y1 - b) / D2;
    t.g1 = len * (b - y0) / D2 + 1.0;
    t.h00 = 2.0 * len * (y1 - b) / D3;
    t.h11 = -2.0 * len * (b - y0) / D3;
    t.h01 = len * (2.0 * b - y0 - y1) / D3;
  } else {
    t.f = len * (b - y0) / D + (b - y0);
    t.g0 = len * (b - y1) / D2 - 1.0;
    t.g1 = -len * (b - y0) / D2;
    t.h00 = 2.0 * len * (b - y1) / D3;
    t.h11 = 2.0 * len * (b - y0) / D3;
    t.h01 = -len * (2.0 * b - y0 - y1) / D3;
  }
  return t;
}

struct Problem {
  const Convex1D& Psi;
  double eps;
  int J;
  double h;
  double b;
  std::vector<char> c1_one;  // per cell

  double energy(const std::vector<double>& y) const {
    double e = 0.0;
    for (int k = 0; k < J; ++k) {
      const double D = y[k + 1] - y[k];
      if (!(D > 0.0)) return INFINITY;
      e += eps * h * Psi.value(D / h) + fidelity_cell(y[k], y[k + 1], h, c1_one[k], b).f;
    }
    return e;
  }

  // Gradient and tridiagonal Hessian (diag, off[k] couples k and k+1) over all nodes.
  void derivatives(const std::vector<double>& y, std::vector<double>& g, std::vector<double>& diag,
                   std::vector<double>& off) const {
    g.assign(J + 1, 0.0);
    diag.assign(J + 1, 0.0);
    off.assign(J, 0.0);
    for (int k = 0; k < J; ++k) {
      const double s = (y[k + 1] - y[k]) / h;
      const CellTerms f = fidelity_cell(y[k], y[k + 1], h, c1_one[k], b);
      const double gs = eps * Psi.d1(s), hs = eps * Psi.d2(s) / h;
      g[k] += f.g0 - gs;
      g[k + 1] += f.g1 + gs;
      diag[k] += f.h00 + hs;
      diag[k + 1] += f.h11 + hs;
      off[k] += f.h01 - hs;
    }
  }
};

// Solves the tridiagonal system restricted to free nodes; false if a pivot is not positive.
bool solve_tridiagonal(const std::vector<double>& diag, const std::vector<double>& off,
                       const std::vector<char>& free, double shift, const std::vector<double>& rhs,
                       std::vector<double>& x) {
  const std::size_t n = diag.size();
  std::vector<double> c(n, 0.0), d(n, 0.0);
  x.assign(n, 0.0);
  double prev_c = 0.0, prev_d = 0.0;
  bool prev_free = false;
  for (std::size_t k = 0; k < n; ++k) {
    if (!free[k]) {
      prev_free = false;
      continue;
    }
    const double lower = prev_free ? off[k - 1] : 0.0;
    const double pivot = diag[k] + shift - lower * prev_c;
    if (!(pivot > 1e-300)) return false;
    c[k] = (k + 1 < n && free[k + 1]) ? off[k] / pivot : 0.0;
    d[k] = (rhs[k] - lower * prev_d) / pivot;
    prev_c = c[k];
    prev_d = d[k];
    prev_free = true;
  }
  for (std::size_t k = n; k-- > 0;) {
    if (!free[k]) continue;
    x[k] = d[k] - ((k + 1 < n && free[k + 1]) ? c[k] * x[k + 1] : 0.0);
  }
  return true;
}

} // namespace

double energy_1d(const Convex1D& Psi, double eps, const Monotone1DMap& y, const Demo1DOptions& options) {
  double e = 0.0;
  const auto& X = y.grid();
  const auto& Y = y.values();
  for (std::size_t k = 0; k + 1 < X.size(); ++k) {
    const double len = X[k + 1] - X[k];
    e += eps * len * Psi.value(y.slope(k));
    // Split the cell at the jump of c1.
    std::vector<double> xs{X[k]};
    if (options.c1_jump > X[k] && options.c1_jump < X[k + 1]) xs.push_back(options.c1_jump);
    xs.push_back(X[k + 1]);
    for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
      const double y0 = Y[k] + y.slope(k) * (xs[s] - X[k]);
      const double y1 = Y[k] + y.slope(k) * (xs[s + 1] - X[k]);
      const bool one = 0.5 * (xs[s] + xs[s + 1]) < options.c1_jump;
      e += fidelity_cell(y0, y1, xs[s + 1] - xs[s], one, options.c2_jump).f;
    }
  }
  return e;
}

Demo1DResult demo_1d(const Convex1D& Psi, double eps, int J, const Demo1DOptions& options) {
  if (!(eps > 0.0)) throw InvalidInput("demo_1d needs eps > 0");
  if (J < 2) throw InvalidInput("demo_1d needs J >= 2");
  if (!(options.c1_jump > 0.0 && options.c1_jump < 1.0 && options.c2_jump > 0.0 && options.c2_jump < 1.0)) {
    throw InvalidInput("image jumps must lie in (0,1)");
  }
  if (std::abs(Psi.value(1.0)) > 1e-12) throw InvalidInput("Psi(1) must vanish");
  const double aJ = options.c1_jump * J;
  if (std::abs(aJ - std::round(aJ)) > 1e-9) throw InvalidInput("the jump of c1 must sit on a grid node");

  Problem pb{Psi, eps, J, 1.0 / J, options.c2_jump, std::vector<char>(J)};
  for (int k = 0; k < J; ++k) pb.c1_one[k] = (k + 0.5) * pb.h < options.c1_jump;

  std::vector<double> y(J + 1);
  for (int k = 0; k <= J; ++k) y[k] = static_cast<double>(k) / J;
  y[J] = 1.0;
  std::vector<char> pinned(J + 1, 0);
  for (int k = 1; k < J; ++k) pinned[k] = y[k] == pb.b;

  Demo1DResult out{Monotone1DMap::identity(J), 0.0, 0.0, 0.0, {}, {}, 0, false, {}};
  out.identity_energy = pb.energy(y);
  double E = out.identity_energy;
  out.trajectory.push_back(E);
  std::vector<double> g, diag, off, dir, trial;
  std::vector<char> free(J + 1, 0);

  // Releases the pinned node whose one-sided slope most strongly favours leaving the jump.
  auto try_release = [&] {
    int release = -1;
    double best = 1e-9, side = 0.0;
    for (int k = 1; k < J; ++k) {
      if (!pinned[k]) continue;
      const double delta = 1e-6 * pb.h;
      trial = y;
      trial[k] = y[k] + delta;
      const double dplus = (pb.energy(trial) - E) / delta;
      trial[k] = y[k] - delta;
      const double dminus = (E - pb.energy(trial)) / delta;
      if (-dplus > best) {
        best = -dplus;
        release = k;
        side = 1.0;
      }
      if (dminus > best) {
        best = dminus;
        release = k;
        side = -1.0;
      }
    }
    if (release < 0) return false;
    pinned[release] = 0;
    y[release] += side * 1e-9 * pb.h;
    E = pb.energy(y);
    return true;
  };

  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    for (int k = 1; k < J; ++k) free[k] = !pinned[k];
    pb.derivatives(y, g, diag, off);
    double gmax = 0.0;
    for (int k = 1; k < J; ++k) {
      if (free[k]) gmax = std::max(gmax, std::abs(g[k]));
    }
    if (gmax <= options.gradient_tolerance) {
      if (!try_release()) {
        out.converged = true;
        break;
      }
      continue;
    }

    std::vector<double> rhs(J + 1, 0.0);
    for (int k = 1; k < J; ++k) rhs[k] = free[k] ? -g[k] : 0.0;
    double shift = 0.0;
    double maxdiag = 0.0;
    for (int k = 1; k < J; ++k) maxdiag = std::max(maxdiag, std::abs(diag[k]));
    for (;;) {
      const bool ok = solve_tridiagonal(diag, off, free, shift, rhs, dir);
      double slope = 0.0;
      for (int k = 1; k < J; ++k) slope += g[k] * dir[k];
      if (ok && slope < 0.0) break;
      shift = std::max(10.0 * shift, 1e-10 * std::max(1.0, maxdiag));
    }

    // Largest step keeping the map increasing, then stop at the first node that reaches the jump.
    double tmax = 1.0;
    for (int k = 0; k < J; ++k) {
      const double D = y[k + 1] - y[k], rate = dir[k + 1] - dir[k];
      if (rate < 0.0) tmax = std::min(tmax, 0.9 * D / -rate);
    }
    bool accepted = false;
    double slope = 0.0;
    for (int k = 1; k < J; ++k) slope += g[k] * dir[k];
    for (double t = tmax; t > 1e-16; t *= 0.5) {
      double tc = t;
      int hit = -1;
      for (int k = 1; k < J; ++k) {
        if (!free[k] || y[k] == pb.b || dir[k] == 0.0) continue;
        const double tk = (pb.b - y[k]) / dir[k];
        if (tk > 0.0 && tk <= tc) {
          tc = tk;
          hit = k;
        }
      }
      trial = y;
      for (int k = 1; k < J; ++k) trial[k] += tc * dir[k];
      if (hit >= 0) trial[hit] = pb.b;
      const double Et = pb.energy(trial);
      if (Et <= E + 1e-4 * tc * slope) {
        y = trial;
        if (hit >= 0) pinned[hit] = 1;
        accepted = E - Et > 0.0 || hit >= 0;
        E = Et;
        break;
      }
    }
    out.trajectory.push_back(E);
    if (!accepted) {
      // No further decrease with the current active set.
      if (!try_release()) {
        out.converged = true;
        break;
      }
    }
  }

  std::vector<double> grid(J + 1);
  for (int k = 0; k <= J; ++k) grid[k] = static_cast<double>(k) / J;
  grid[J] = 1.0;
  out.map = Monotone1DMap(grid, y);
  out.energy = energy_1d(Psi, eps, out.map, options);

  const double a = options.c1_jump, bb = options.c2_jump;
  out.candidate_energy = eps * (a * Psi.value(bb / a) + (1.0 - a) * Psi.value((1.0 - bb) / (1.0 - a)));

  // Group runs of equal slopes.
  std::vector<double> run{out.map.slope(0)};
  for (int k = 1; k < J; ++k) {
    const double s = out.map.slope(k);
    if (std::abs(s - run.back()) > 1e-3 * std::max(1.0, std::abs(s))) {
      double mean = 0.0;
      for (double v : run) mean += v;
      out.slopes.push_back(mean / run.size());
      out.kinks.push_back(grid[k]);
      run.clear();
    }
    run.push_back(s);
  }
  double mean = 0.0;
  for (double v : run) mean += v;
  out.slopes.push_back(mean / run.size());
  return out;
}

} // namespace elastireg

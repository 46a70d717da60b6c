#include "elastireg/solve/morph.hpp"

#include <algorithm>
#include <cmath>

namespace elastireg {

double apply_rescale(Rescale P, double t) { return P == Rescale::Sqrt ? std::sqrt(std::max(0.0, t)) : t; }

double rescale_derivative(Rescale P, double t) {
  return P == Rescale::Sqrt ? 0.5 / std::sqrt(std::max(t, 1e-300)) : 1.0;
}

namespace {

void require_same_lattice(const GridImage& a, const GridImage& b) {
  if (a.nx() != b.nx() || a.ny() != b.ny() || a.channels() != b.channels() || (a.origin() - b.origin()).norm() > 0.0 ||
      (a.extent() - b.extent()).norm() > 0.0) {
    throw InvalidInput("morphing needs both images on the same lattice");
  }
}

double step_energy(const EnergySpec& spec, const GridImage& a, const GridImage& b, const MeshDeformation& y,
                   QuadratureRule rule) {
  const FirstOrderEnergy e(spec, a, b, y.mesh, rule);
  return e.value_and_gradient(y.positions, nullptr);
}

void refresh(const EnergySpec& spec, MorphSequence& s, const MorphOptions& o) {
  s.step_energies.resize(s.N);
  s.F_N = 0.0;
  for (int i = 0; i < s.N; ++i) {
    s.step_energies[i] = step_energy(spec, s.intensities[i], s.intensities[i + 1], s.maps[i], o.rule);
    s.F_N += apply_rescale(s.P, s.step_energies[i]);
  }
}

GridImage nearest(const GridImage& g) { return g.with_interpolation(Interpolation::Nearest); }

// Exact minimizer of the P'-weighted fidelity terms in frame k with its neighbours fixed.
GridImage optimal_frame(const EnergySpec& spec, const MorphSequence& s, int k, const MorphOptions& o) {
  const GridImage& cur = s.intensities[k];
  const int ch = cur.channels();
  const std::size_t pixels = static_cast<std::size_t>(cur.nx()) * cur.ny();
  std::vector<double> W(pixels, 0.0), T(pixels * ch, 0.0);
  const auto& quad = quadrature_points(o.rule);
  const bool mass = spec.fidelity.family == FidelitySpec::Family::MassForm;
  const double inv_eps = 1.0 / spec.fidelity.epsilon;

  auto accumulate = [&](int step, bool as_first) {
    const MeshDeformation& y = s.maps[step];
    const Mesh& mesh = *y.mesh;
    const GridImage& other = as_first ? s.intensities[step + 1] : s.intensities[step];
    const double scale = rescale_derivative(s.P, s.step_energies[step]) * inv_eps;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
      const auto& tri = mesh.triangles()[t];
      const double delta = y.det(t);
      for (const auto& qp : quad) {
        Vec2 x = Vec2::Zero(), z = Vec2::Zero();
        for (int v = 0; v < 3; ++v) {
          x += qp.barycentric[v] * mesh.nodes()[tri[v]];
          z += qp.barycentric[v] * y.positions[tri[v]];
        }
        const double w = scale * qp.weight * mesh.triangle_area(t);
        double weight, factor;
        Intensity value;
        if (as_first) {
          value = other.sample(z);
          weight = mass ? w * (1.0 + 1.0 / delta) : w * (1.0 + delta);
          factor = mass ? delta : 1.0;
        } else {
          value = other.sample(x);
          weight = mass ? w * (1.0 + 1.0 / delta) * delta * delta : w * (1.0 + delta);
          factor = mass ? 1.0 / delta : 1.0;
        }
        const auto [i, j] = cur.cell_of(as_first ? x : z);
        const std::size_t p = static_cast<std::size_t>(j) * cur.nx() + i;
        W[p] += weight;
        for (int c = 0; c < ch; ++c) T[p * ch + c] += weight * factor * value[c];
      }
    }
  };
  accumulate(k, true);
  accumulate(k - 1, false);

  std::vector<double> data = cur.data();
  for (std::size_t p = 0; p < pixels; ++p) {
    if (!(W[p] > 0.0)) continue;
    for (int c = 0; c < ch; ++c) data[p * ch + c] = std::clamp(T[p * ch + c] / W[p], 0.0, 1.0);
  }
  return GridImage(cur.origin(), cur.extent(), cur.nx(), cur.ny(), ch, std::move(data), Interpolation::Nearest);
}

} // namespace

std::shared_ptr<const Mesh> morph_mesh(const GridImage& c) {
  return std::make_shared<const Mesh>(build_grid_mesh(c.origin(), c.extent(), c.nx(), c.ny()));
}

double morph_F(const EnergySpec& spec, const GridImage& c, const GridImage& d, Rescale P,
               const OptimizerParams& params, QuadratureRule rule) {
  require_same_lattice(c, d);
  MorphOptions o;
  o.P = P;
  o.rule = rule;
  o.max_sweeps = 1;
  MorphSequence s = morph_descent(spec, linear_path(spec, c, d, 1, o), params, o);
  return s.F_N;
}

MorphSequence linear_path(const EnergySpec& spec, const GridImage& c, const GridImage& d, int N,
                          const MorphOptions& options) {
  require_same_lattice(c, d);
  if (N < 1) throw InvalidInput("morphing needs N >= 1");
  MorphSequence s;
  s.N = N;
  s.P = options.P;
  const auto mesh = morph_mesh(c);
  for (int k = 0; k <= N; ++k) {
    const double t = static_cast<double>(k) / N;
    std::vector<double> data(c.data().size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = (1.0 - t) * c.data()[i] + t * d.data()[i];
    if (k == 0) data = c.data();
    if (k == N) data = d.data();
    s.intensities.emplace_back(c.origin(), c.extent(), c.nx(), c.ny(), c.channels(), std::move(data),
                               Interpolation::Nearest);
  }
  for (int k = 0; k < N; ++k) s.maps.push_back(MeshDeformation::identity(mesh, c.lattice_rectangle()));
  refresh(spec, s, options);
  s.history.push_back(s.F_N);
  return s;
}

MorphSequence extend_sequence(const EnergySpec& spec, const MorphSequence& s, const MorphOptions& options) {
  MorphSequence out = s;
  out.N = s.N + 1;
  out.intensities.push_back(s.intensities.back());
  out.maps.push_back(MeshDeformation::identity(s.maps.front().mesh, s.maps.front().target));
  refresh(spec, out, options);
  out.history = {out.F_N};
  return out;
}

MorphSequence concatenate(const EnergySpec& spec, const MorphSequence& a, const MorphSequence& b,
                          const MorphOptions& options) {
  if (a.intensities.back().data() != b.intensities.front().data()) {
    throw InvalidInput("concatenated sequences must share the middle image");
  }
  MorphSequence out = a;
  out.N = a.N + b.N;
  out.intensities.insert(out.intensities.end(), b.intensities.begin() + 1, b.intensities.end());
  out.maps.insert(out.maps.end(), b.maps.begin(), b.maps.end());
  refresh(spec, out, options);
  out.history = {out.F_N};
  return out;
}

MorphSequence morph_descent(const EnergySpec& spec, MorphSequence s, const OptimizerParams& params,
                            const MorphOptions& options) {
  spec.validate();
  s.P = options.P;
  for (auto& img : s.intensities) img = nearest(img);
  refresh(spec, s, options);
  if (s.history.empty()) s.history.push_back(s.F_N);

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    const double before = s.F_N;
    // Intensity block, frame by frame.
    for (int k = 1; k < s.N; ++k) {
      MorphSequence trial = s;
      trial.intensities[k] = optimal_frame(spec, s, k, options);
      refresh(spec, trial, options);
      if (trial.F_N < s.F_N) {
        s = std::move(trial);
        s.history.push_back(s.F_N);
      }
    }
    // Map block: register bilinear copies, keep only improvements of the nearest-sampled energy.
    if (options.update_maps) {
      for (int i = 0; i < s.N; ++i) {
        if (s.step_energies[i] == 0.0) continue;
        RegisterOptions ro;
        ro.mesh = s.maps[i].mesh;
        ro.rule = options.rule;
        ro.initial = s.maps[i];
        try {
          const RegistrationResult r =
              register_images(spec, s.intensities[i].with_interpolation(Interpolation::Bilinear),
                              s.intensities[i + 1].with_interpolation(Interpolation::Bilinear), params, ro);
          const double e = step_energy(spec, s.intensities[i], s.intensities[i + 1], r.deformation, options.rule);
          if (e < s.step_energies[i]) {
            s.maps[i] = r.deformation;
            refresh(spec, s, options);
            s.history.push_back(s.F_N);
          }
        } catch (const Degenerate&) {
          // Barrier exhaustion on this step: keep the previous map.
        }
      }
    }
    if (before - s.F_N <= options.tolerance * std::max(1.0, std::abs(before))) break;
  }
  return s;
}

MorphSequence morph_sequence(const EnergySpec& spec, const GridImage& c, const GridImage& d, int N,
                             const OptimizerParams& params, const MorphOptions& options,
                             const MorphSequence* warm_start) {
  MorphSequence best = morph_descent(spec, linear_path(spec, c, d, N, options), params, options);
  if (warm_start) {
    if (warm_start->N != N) throw InvalidInput("warm start has a different number of steps");
    if (warm_start->intensities.front().data() != c.data() || warm_start->intensities.back().data() != d.data()) {
      throw InvalidInput("warm start does not connect the given images");
    }
    MorphSequence w = morph_descent(spec, *warm_start, params, options);
    if (w.F_N < best.F_N) best = std::move(w);
  }
  return best;
}

std::vector<double> estimate_rho(const EnergySpec& spec, const GridImage& c, const GridImage& d, int N_max,
                                 const OptimizerParams& params, const MorphOptions& options) {
  if (N_max < 1) throw InvalidInput("estimate_rho needs N_max >= 1");
  std::vector<double> out;
  MorphSequence prev = morph_sequence(spec, c, d, 1, params, options);
  out.push_back(prev.F_N);
  for (int N = 2; N <= N_max; ++N) {
    const MorphSequence warm = extend_sequence(spec, prev, options);
    prev = morph_sequence(spec, c, d, N, params, options, &warm);
    out.push_back(prev.F_N);
  }
  return out;
}

} // namespace elastireg

#include "cli.hpp"

#include "elastireg/energy/identities.hpp"
#include "elastireg/geometry/shear.hpp"
#include "elastireg/geometry/validation.hpp"
#include "elastireg/io/image_io.hpp"
#include "elastireg/io/mesh_csv.hpp"
#include "elastireg/io/spec_json.hpp"
#include "elastireg/solve/demo1d.hpp"
#include "elastireg/solve/landmarks.hpp"
#include "elastireg/solve/morph.hpp"
#include "elastireg/solve/part_matching.hpp"

#include <CLI11.hpp>
#include <omp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace elastireg {

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 0;
  std::optional<double> eps;
  std::optional<int> N;
  std::string matrix;
};

struct Context {
  Json cfg = Json::object();
  fs::path base;
  std::uint64_t seed = 1;
  fs::path out = "out";
  std::ostream* o = nullptr;
  std::shared_ptr<spdlog::logger> log;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Json section(const Context& c, const char* key) { return c.cfg.contains(key) ? c.cfg[key] : Json::object(); }

Interpolation parse_interp(const Json& j, const std::string& where) {
  if (!j.contains("interpolation")) return Interpolation::Nearest;
  const std::string s = j["interpolation"].is_string() ? j["interpolation"].get<std::string>() : "";
  if (s == "nearest") return Interpolation::Nearest;
  if (s == "bilinear") return Interpolation::Bilinear;
  throw InvalidInput("invalid value for " + where + ".interpolation (nearest or bilinear)");
}

GridImage load_image(const Context& c, const Json& j, const std::string& where) {
  require_known_keys(j, {"path", "constant", "resolution", "origin", "extent", "interpolation", "support"}, where);
  const Vec2 origin = j.contains("origin") ? parse_vec2(j["origin"], where + ".origin") : Vec2::Zero();
  const Vec2 extent = j.contains("extent") ? parse_vec2(j["extent"], where + ".extent") : Vec2::Ones();
  const Interpolation interp = parse_interp(j, where);
  std::optional<GridImage> img;
  if (j.contains("path") == j.contains("constant")) throw InvalidInput(where + " needs exactly one of path, constant");
  if (j.contains("path")) {
    if (!j["path"].is_string()) throw InvalidInput("invalid value for " + where + ".path");
    fs::path p = j["path"].get<std::string>();
    if (p.is_relative()) p = c.base / p;
    if (!fs::exists(p)) throw InvalidInput(where + ".path: file not found: " + p.string());
    img = read_image(p.string(), origin, extent, interp);
  } else {
    if (!j["constant"].is_number()) throw InvalidInput("invalid value for " + where + ".constant");
    if (!j.contains("resolution")) throw InvalidInput("missing " + where + ".resolution");
    const Vec2 r = parse_vec2(j["resolution"], where + ".resolution");
    Intensity v(1);
    v << j["constant"].get<double>();
    img = GridImage::constant(origin, extent, static_cast<int>(r.x()), static_cast<int>(r.y()), v, interp);
  }
  if (j.contains("support")) img = img->with_support(parse_domain(j["support"], where + ".support"));
  return *img;
}

std::pair<GridImage, GridImage> load_pair(const Context& c) {
  if (!c.cfg.contains("images")) throw InvalidInput("missing images");
  const Json& im = c.cfg["images"];
  require_known_keys(im, {"reference", "target"}, "images");
  if (!im.contains("reference")) throw InvalidInput("missing images.reference");
  if (!im.contains("target")) throw InvalidInput("missing images.target");
  return {load_image(c, im["reference"], "images.reference"), load_image(c, im["target"], "images.target")};
}

EnergySpec energy_spec(const Context& c, const Flags& f) {
  EnergySpec s = c.cfg.contains("energy") ? parse_energy_spec(c.cfg["energy"]) : EnergySpec{};
  if (f.eps) s.fidelity.epsilon = *f.eps;
  s.validate();
  return s;
}

OptimizerParams optimizer(const Context& c) {
  OptimizerParams p = c.cfg.contains("optimizer") ? parse_optimizer(c.cfg["optimizer"]) : OptimizerParams{};
  p.seed = c.seed;
  return p;
}

RegisterOptions mesh_options(const Context& c) {
  RegisterOptions o;
  const Json m = section(c, "mesh");
  require_known_keys(m, {"h", "grid_cells", "quadrature", "perturbation", "validate_each_iteration"}, "mesh");
  try {
    o.mesh_h = m.value("h", o.mesh_h);
    o.grid_cells = m.value("grid_cells", o.grid_cells);
    o.perturbation = m.value("perturbation", 0.0);
    o.validate_each_iteration = m.value("validate_each_iteration", false);
    const std::string q = m.value("quadrature", std::string("midpoint"));
    if (q == "midpoint") {
      o.rule = QuadratureRule::Midpoint;
    } else if (q == "three_point") {
      o.rule = QuadratureRule::ThreePoint;
    } else {
      throw InvalidInput("invalid value for mesh.quadrature (midpoint or three_point)");
    }
  } catch (const Json::exception&) {
    throw InvalidInput("invalid value in mesh block");
  }
  if (!(o.mesh_h > 0.0)) throw InvalidInput("mesh.h must be positive");
  if (o.grid_cells < 2) throw InvalidInput("mesh.grid_cells must be at least 2");
  return o;
}

int exit_code(OptimizeStatus s) { return s == OptimizeStatus::IterationCap ? 2 : 0; }

void prepare_output(const Context& c) { fs::create_directories(c.out); }

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p);
  if (!f) throw InvalidInput("cannot write " + p.string());
  f << s;
}

void write_trajectory(const fs::path& p, const std::vector<double>& t) {
  std::ostringstream s;
  s << "step,value\n";
  for (std::size_t k = 0; k < t.size(); ++k) s << k << ',' << num(t[k]) << '\n';
  write_text(p, s.str());
}

int finish_registration(const Context& c, const RegistrationResult& r, Json extra, const std::string& title) {
  write_deformation_csv((c.out / "deformation_nodes.csv").string(), (c.out / "deformation_triangles.csv").string(),
                        r.deformation);
  write_trajectory(c.out / "log.csv", r.trajectory);
  const ValidationReport rep = validate_homeomorphism(r.deformation);
  Json j = to_json(r.energy);
  j["status"] = to_string(r.status);
  j["iterations"] = r.iterations;
  j["valid_homeomorphism"] = rep.passed;
  for (auto& [k, v] : extra.items()) j[k] = v;
  write_json_file((c.out / "energy.json").string(), j);
  std::ostringstream s;
  s << title << ": " << to_string(r.status) << " after " << r.iterations << " iterations\n"
    << "  stored " << short_num(r.energy.stored) << ", fidelity " << short_num(r.energy.fidelity) << ", second order "
    << short_num(r.energy.second_order) << ", total " << short_num(r.energy.total) << "\n"
    << "  min det " << short_num(rep.min_det) << ", valid " << (rep.passed ? "yes" : "no") << "\n";
  write_text(c.out / "summary.txt", s.str());
  *c.o << s.str();
  return exit_code(r.status);
}

int cmd_register(const Context& c, const Flags& f) {
  const EnergySpec spec = energy_spec(c, f);
  const OptimizerParams params = optimizer(c);
  RegisterOptions opts = mesh_options(c);
  auto [P1, P2] = load_pair(c);
  prepare_output(c);
  c.log->info("registering {}x{} onto {}x{}", P1.nx(), P1.ny(), P2.nx(), P2.ny());
  const RegistrationResult r = register_images(spec, P1, P2, params, opts);
  return finish_registration(c, r, Json::object(), "register");
}

int cmd_register_2nd(const Context& c, const Flags&) {
  const SecondOrderSpec spec = c.cfg.contains("second_order") ? parse_second_order(c.cfg["second_order"]) : SecondOrderSpec{};
  const OptimizerParams params = optimizer(c);
  const RegisterOptions opts = mesh_options(c);
  auto [P1, P2] = load_pair(c);
  prepare_output(c);
  const RegistrationResult r = register_second_order(spec, P1, P2, params, opts);
  return finish_registration(c, r, Json::object(), "register-2nd");
}

LandmarkSet parse_landmarks(const Context& c) {
  if (!c.cfg.contains("landmarks") || !c.cfg["landmarks"].is_array()) throw InvalidInput("missing landmarks list");
  LandmarkSet lm;
  const Json& L = c.cfg["landmarks"];
  for (std::size_t i = 0; i < L.size(); ++i) {
    const std::string w = "landmarks[" + std::to_string(i) + "]";
    require_known_keys(L[i], {"p", "q", "boundary"}, w);
    if (!L[i].contains("p") || !L[i].contains("q")) throw InvalidInput(w + " needs p and q");
    Landmark l{parse_vec2(L[i]["p"], w + ".p"), parse_vec2(L[i]["q"], w + ".q"), false};
    if (L[i].contains("boundary")) {
      if (!L[i]["boundary"].is_boolean()) throw InvalidInput("invalid value for " + w + ".boundary");
      l.boundary = L[i]["boundary"].get<bool>();
    }
    lm.pairs.push_back(l);
  }
  return lm;
}

int cmd_register_landmarks(const Context& c, const Flags& f) {
  const EnergySpec spec = energy_spec(c, f);
  const OptimizerParams params = optimizer(c);
  const RegisterOptions opts = mesh_options(c);
  auto [P1, P2] = load_pair(c);
  const LandmarkSet lm = parse_landmarks(c);
  const LandmarkVerdict v = validate_landmarks(lm, P1.domain(), P2.domain());
  if (!v.passed) throw Infeasible("landmarks rejected: " + v.message);
  prepare_output(c);
  const LandmarkResult r = register_landmarks(spec, P1, P2, lm, params, opts);
  return finish_registration(c, r.registration, Json{{"landmark_residual", r.residual}, {"landmark_nodes", r.nodes}},
                             "register-landmarks");
}

AffineSearchSet parse_search(const Context& c) {
  const Json s = section(c, "search");
  require_known_keys(s, {"kind", "lambda_min", "lambda_max", "entry_min", "entry_max", "det_min", "scale_steps",
                         "angle_steps", "offset_steps", "top_k"},
                     "search");
  AffineSearchSet S;
  try {
    const std::string kind = s.value("kind", std::string("scaling"));
    if (kind == "scaling") {
      S = AffineSearchSet::scaling(s.value("lambda_min", 1.0), s.value("lambda_max", 1.0));
    } else if (kind == "rot_scale") {
      S = AffineSearchSet::rot_scale(s.value("lambda_min", 1.0), s.value("lambda_max", 1.0));
    } else if (kind == "general") {
      S = AffineSearchSet::general(s.value("entry_min", -2.0), s.value("entry_max", 2.0), s.value("det_min", 0.1));
    } else {
      throw InvalidInput("invalid value for search.kind (scaling, rot_scale or general)");
    }
    S.scale_steps = s.value("scale_steps", S.scale_steps);
    S.angle_steps = s.value("angle_steps", S.angle_steps);
    S.offset_steps = s.value("offset_steps", S.offset_steps);
    S.top_k = s.value("top_k", S.top_k);
  } catch (const Json::exception&) {
    throw InvalidInput("invalid value in search block");
  }
  S.validate();
  return S;
}

int cmd_match_part(const Context& c, const Flags& f) {
  const EnergySpec spec = energy_spec(c, f);
  const OptimizerParams params = optimizer(c);
  const RegisterOptions opts = mesh_options(c);
  const AffineSearchSet S = parse_search(c);
  auto [P1, P2] = load_pair(c);
  prepare_output(c);
  const PartMatchResult r = match_part(spec, P1, P2, S, params, opts);
  const Mat2& A = r.placement.A;
  Json extra{{"placement", {{"A", {{A(0, 0), A(0, 1)}, {A(1, 0), A(1, 1)}}}, {"a", {r.placement.a.x(), r.placement.a.y()}}}},
             {"placement_energy", r.placement_energy},
             {"evaluations", r.evaluations}};
  *c.o << "placement a = (" << short_num(r.placement.a.x()) << ", " << short_num(r.placement.a.y()) << "), A = ["
       << short_num(A(0, 0)) << " " << short_num(A(0, 1)) << "; " << short_num(A(1, 0)) << " " << short_num(A(1, 1))
       << "]\n";
  return finish_registration(c, r.registration, extra, "match-part");
}

MorphOptions morph_options(const Context& c, int& N, int& N_max) {
  const Json m = section(c, "morph");
  require_known_keys(m, {"N", "N_max", "rescale", "max_sweeps", "tolerance"}, "morph");
  MorphOptions o;
  try {
    N = m.value("N", N);
    N_max = m.value("N_max", N_max);
    o.max_sweeps = m.value("max_sweeps", o.max_sweeps);
    o.tolerance = m.value("tolerance", o.tolerance);
    const std::string r = m.value("rescale", std::string("identity"));
    if (r == "identity") {
      o.P = Rescale::Identity;
    } else if (r == "sqrt") {
      o.P = Rescale::Sqrt;
    } else {
      throw InvalidInput("invalid value for morph.rescale (identity or sqrt)");
    }
  } catch (const Json::exception&) {
    throw InvalidInput("invalid value in morph block");
  }
  o.rule = mesh_options(c).rule;
  return o;
}

int cmd_morph(const Context& c, const Flags& f) {
  const EnergySpec spec = energy_spec(c, f);
  const OptimizerParams params = optimizer(c);
  int N = 4, N_max = 8;
  const MorphOptions o = morph_options(c, N, N_max);
  if (f.N) N = *f.N;
  if (N < 1) throw InvalidInput("morph N must be at least 1");
  auto [c1, c2] = load_pair(c);
  prepare_output(c);
  const MorphSequence s = morph_sequence(spec, c1, c2, N, params, o);
  fs::create_directories(c.out / "frames");
  for (std::size_t k = 0; k < s.intensities.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu", k);
    write_pgm((c.out / "frames" / (std::string(name) + ".pgm")).string(), s.intensities[k]);
    write_image_csv((c.out / "frames" / (std::string(name) + ".csv")).string(), s.intensities[k]);
  }
  write_trajectory(c.out / "log.csv", s.history);
  write_json_file((c.out / "morph.json").string(), Json{{"N", s.N},
                                                        {"F_N_upper_bound", s.F_N},
                                                        {"step_energies", s.step_energies},
                                                        {"history", s.history}});
  std::ostringstream out;
  out << "morph: N = " << s.N << ", F_N <= " << short_num(s.F_N) << " (upper bound; domain area "
      << short_num(c1.domain().area()) << ")\n";
  write_text(c.out / "summary.txt", out.str());
  *c.o << out.str();
  return 0;
}

int cmd_estimate_rho(const Context& c, const Flags& f) {
  const EnergySpec spec = energy_spec(c, f);
  const OptimizerParams params = optimizer(c);
  int N = 4, N_max = 8;
  const MorphOptions o = morph_options(c, N, N_max);
  if (f.N) N_max = *f.N;
  if (N_max < 1) throw InvalidInput("estimate-rho N_max must be at least 1");
  auto [c1, c2] = load_pair(c);
  prepare_output(c);
  const std::vector<double> F = estimate_rho(spec, c1, c2, N_max, params, o);
  std::ostringstream csv, out;
  csv << "N,F_N_upper_bound\n";
  out << "estimate-rho (all values are upper bounds):\n";
  for (std::size_t k = 0; k < F.size(); ++k) {
    csv << k + 1 << ',' << num(F[k]) << '\n';
    out << "  F_" << k + 1 << " <= " << short_num(F[k]) << "\n";
  }
  out << "  rho <= " << short_num(F.back()) << "\n";
  write_text(c.out / "rho.csv", csv.str());
  write_text(c.out / "summary.txt", out.str());
  *c.o << out.str();
  return 0;
}

int cmd_demo1d(const Context& c, const Flags& f) {
  const Json d = section(c, "demo1d");
  require_known_keys(d, {"eps", "J", "c1_jump", "c2_jump"}, "demo1d");
  double eps = 1e-3;
  int J = 512;
  Demo1DOptions o;
  try {
    eps = d.value("eps", eps);
    J = d.value("J", J);
    o.c1_jump = d.value("c1_jump", o.c1_jump);
    o.c2_jump = d.value("c2_jump", o.c2_jump);
  } catch (const Json::exception&) {
    throw InvalidInput("invalid value in demo1d block");
  }
  if (f.eps) eps = *f.eps;
  if (f.N) J = *f.N;
  const Convex1D psi = Convex1D::default_psi();
  const Demo1DResult r = demo_1d(psi, eps, J, o);
  prepare_output(c);
  write_map1d_csv((c.out / "map.csv").string(), r.map);
  write_trajectory(c.out / "log.csv", r.trajectory);
  write_json_file((c.out / "demo1d.json").string(), Json{{"eps", eps},
                                                          {"J", J},
                                                          {"energy", r.energy},
                                                          {"identity_energy", r.identity_energy},
                                                          {"candidate_energy", r.candidate_energy},
                                                          {"slopes", r.slopes},
                                                          {"kinks", r.kinks},
                                                          {"iterations", r.iterations},
                                                          {"converged", r.converged}});
  std::ostringstream out;
  out << "demo-1d: eps = " << short_num(eps) << ", J = " << J << "\n"
      << "  minimum energy " << short_num(r.energy) << " (identity " << short_num(r.identity_energy) << ")\n"
      << "  two-slope candidate 1/2 eps (Psi(3/2) + Psi(1/2)) = " << short_num(r.candidate_energy) << "\n"
      << "  detected " << r.slopes.size() << " slopes:";
  for (double s : r.slopes) out << " " << short_num(s);
  out << "\n  kinks at:";
  for (double k : r.kinks) out << " " << short_num(k);
  out << "\n";
  write_text(c.out / "summary.txt", out.str());
  *c.o << out.str();
  return r.converged ? 0 : 2;
}

int cmd_verify(const Context& c, const Flags& f) {
  EnergySpec spec;
  if (c.cfg.contains("energy")) {
    spec = energy_spec(c, f);
  } else {
    spec.fidelity.family = FidelitySpec::Family::MassForm;
    if (f.eps) spec.fidelity.epsilon = *f.eps;
  }
  const Json v = section(c, "verify");
  require_known_keys(v, {"trials"}, "verify");
  int trials = 1000;
  try {
    trials = v.value("trials", trials);
  } catch (const Json::exception&) {
    throw InvalidInput("invalid value for verify.trials");
  }
  if (trials < 1) throw InvalidInput("verify.trials must be positive");
  const std::vector<CheckResult> checks = verify_spec(spec, trials, c.seed);
  prepare_output(c);
  Json arr = Json::array();
  bool ok = true;
  std::ostringstream out;
  out << "verify (" << trials << " trials, seed " << c.seed << "):\n";
  for (const auto& ch : checks) {
    arr.push_back({{"name", ch.name}, {"deviation", ch.deviation}, {"threshold", ch.threshold}, {"passed", ch.passed}});
    ok = ok && ch.passed;
    out << "  " << (ch.passed ? "ok     " : "FAILED ") << ch.name << ": " << short_num(ch.deviation) << " (threshold "
        << short_num(ch.threshold) << ")\n";
  }
  write_json_file((c.out / "verify.json").string(), Json{{"spec", to_json(spec)}, {"checks", arr}, {"passed", ok}});
  write_text(c.out / "summary.txt", out.str());
  *c.o << out.str();
  return ok ? 0 : 1;
}

Eigen::MatrixXd parse_square(const std::string& text, const std::string& where) {
  std::istringstream in(text);
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InvalidInput(where + ": malformed number '" + tok + "'");
    }
  }
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
  if (n < 1 || static_cast<std::size_t>(n * n) != v.size()) throw InvalidInput(where + " must list n*n entries row by row");
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) M(i, j) = v[static_cast<std::size_t>(i) * n + j];
  }
  return M;
}

Eigen::MatrixXd json_matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InvalidInput(where + " must be a list of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != n) throw InvalidInput(where + " must be square");
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!j[i][k].is_number()) throw InvalidInput(where + " entries must be numbers");
      M(i, k) = j[i][k].get<double>();
    }
  }
  return M;
}

int cmd_decompose_shears(const Context& c, const Flags& f) {
  const Json s = section(c, "shear");
  require_known_keys(s, {"matrix", "frame"}, "shear");
  Eigen::MatrixXd M;
  if (!f.matrix.empty()) {
    M = parse_square(f.matrix, "--matrix");
  } else if (s.contains("matrix")) {
    M = json_matrix(s["matrix"], "shear.matrix");
  } else {
    throw InvalidInput("missing --matrix or shear.matrix");
  }
  const Eigen::MatrixXd frame =
      s.contains("frame") ? json_matrix(s["frame"], "shear.frame") : Eigen::MatrixXd::Identity(M.rows(), M.rows());
  const std::vector<ShearFactor> factors = shear_decompose(M, frame);
  const double recon = (shear_product(factors, static_cast<int>(M.rows())) - M).cwiseAbs().maxCoeff();
  double ortho = 0.0;
  Json arr = Json::array();
  for (const auto& fac : factors) {
    ortho = std::max(ortho, std::abs(fac.p.dot(fac.nu)));
    arr.push_back({{"p", std::vector<double>(fac.p.data(), fac.p.data() + fac.p.size())},
                   {"nu", std::vector<double>(fac.nu.data(), fac.nu.data() + fac.nu.size())},
                   {"frame_index", fac.frame_index}});
  }
  prepare_output(c);
  write_json_file((c.out / "shears.json").string(),
                  Json{{"factors", arr}, {"reconstruction_error", recon}, {"orthogonality_residual", ortho}});
  std::ostringstream out;
  out << "decompose-shears: " << factors.size() << " factors\n";
  for (std::size_t k = 0; k < factors.size(); ++k) {
    out << "  " << k << ": p = [";
    for (Eigen::Index i = 0; i < factors[k].p.size(); ++i) out << (i ? " " : "") << short_num(factors[k].p[i]);
    out << "], nu = [";
    for (Eigen::Index i = 0; i < factors[k].nu.size(); ++i) out << (i ? " " : "") << short_num(factors[k].nu[i]);
    out << "]\n";
  }
  out << "  reconstruction error " << short_num(recon) << ", orthogonality residual " << short_num(ortho) << "\n";
  write_text(c.out / "summary.txt", out.str());
  *c.o << out.str();
  return recon <= 1e-8 ? 0 : 1;
}

spdlog::level::level_enum log_level() {
  const char* env = std::getenv("ELASTIREG_LOG");
  if (!env) return spdlog::level::warn;
  const std::string s = env;
  if (s == "debug") return spdlog::level::debug;
  if (s == "info") return spdlog::level::info;
  if (s == "error") return spdlog::level::err;
  if (s == "off" || s == "quiet") return spdlog::level::off;
  return spdlog::level::warn;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Elastic image registration toolkit"};
  app.require_subcommand(1);
  Flags flags;
  std::uint64_t seed = 0;
  double eps = 0.0;
  int N = 0;
  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON run configuration");
    sub->add_option("--seed", seed, "random seed (overrides the config)");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--threads", flags.threads, "worker threads (0 keeps the default)");
    sub->add_option("--eps", eps, "fidelity weight epsilon (demo-1d: stored-energy weight)");
    sub->add_option("--N", N, "number of morphing steps (demo-1d: grid cells)");
    sub->add_option("--matrix", flags.matrix, "square matrix, entries row by row");
  };
  const std::vector<std::pair<std::string, std::string>> commands{
      {"register", "free-boundary registration"},
      {"register-landmarks", "registration with landmark constraints"},
      {"match-part", "detect the template as an affine part of the scene"},
      {"morph", "discrete morphing sequence and F_N"},
      {"estimate-rho", "table of F_N upper bounds"},
      {"register-2nd", "registration with the second-order functional"},
      {"demo-1d", "one-dimensional example with a kinked minimizer"},
      {"verify", "algebraic checks of an energy specification"},
      {"decompose-shears", "factor an SL(n) matrix into shears"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    subs.push_back(app.add_subcommand(name, help));
    add_flags(subs.back());
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 1;
  }

  auto logger = spdlog::get("elastireg");
  if (!logger) logger = spdlog::stderr_color_mt("elastireg");
  logger->set_level(log_level());

  std::string command;
  CLI::App* chosen = nullptr;
  for (std::size_t k = 0; k < subs.size(); ++k) {
    if (subs[k]->parsed()) {
      command = commands[k].first;
      chosen = subs[k];
    }
  }
  if (chosen->count("--seed")) flags.seed = seed;
  if (chosen->count("--eps")) flags.eps = eps;
  if (chosen->count("--N")) flags.N = N;

  try {
    Context c;
    c.o = &out;
    c.log = logger;
    if (!flags.config.empty()) {
      c.cfg = read_json_file(flags.config);
      c.base = fs::path(flags.config).parent_path();
      require_known_keys(c.cfg, {"seed", "threads", "output", "energy", "optimizer", "images", "mesh", "landmarks",
                                 "search", "morph", "second_order", "demo1d", "shear", "verify"},
                         "config");
    }
    try {
      c.seed = c.cfg.value("seed", std::uint64_t{1});
      if (c.cfg.contains("output")) c.out = c.cfg["output"].get<std::string>();
      if (c.cfg.contains("threads") && flags.threads == 0) flags.threads = c.cfg["threads"].get<int>();
    } catch (const Json::exception&) {
      throw InvalidInput("invalid value for config.seed, config.output or config.threads");
    }
    if (flags.seed) c.seed = *flags.seed;
    if (!flags.out.empty()) c.out = flags.out;
    if (flags.threads < 0) throw InvalidInput("--threads must be nonnegative");
    if (flags.threads > 0) omp_set_num_threads(flags.threads);
    logger->info("command {} seed {} output {}", command, c.seed, c.out.string());

    if (command == "register") return cmd_register(c, flags);
    if (command == "register-landmarks") return cmd_register_landmarks(c, flags);
    if (command == "match-part") return cmd_match_part(c, flags);
    if (command == "morph") return cmd_morph(c, flags);
    if (command == "estimate-rho") return cmd_estimate_rho(c, flags);
    if (command == "register-2nd") return cmd_register_2nd(c, flags);
    if (command == "demo-1d") return cmd_demo1d(c, flags);
    if (command == "verify") return cmd_verify(c, flags);
    return cmd_decompose_shears(c, flags);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace elastireg

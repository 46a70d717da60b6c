#include "elastireg/io/spec_json.hpp"

#include <cstdio>
#include <fstream>

namespace elastireg {

namespace {

template <class T>
T get(const Json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw InvalidInput("invalid value for " + where + "." + key);
  }
}

void require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + " must be a JSON object");
}

} // namespace

void require_known_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  require_object(j, where);
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw InvalidInput("unknown key '" + key + "' in " + where);
  }
}

Vec2 parse_vec2(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InvalidInput(where + " must be a pair of numbers");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

HFunction parse_hfunction(const Json& j, int n, const std::string& where) {
  if (j.is_string()) {
    const std::string f = j.get<std::string>();
    if (f == "standard") return HFunction::standard(n);
    if (f == "normalized") return HFunction::normalized();
    if (f == "quadratic_well") return HFunction::quadratic_well();
    throw InvalidInput("unknown h family '" + f + "' in " + where);
  }
  require_known_keys(j, {"a", "b", "c", "d"}, where);
  for (const char* k : {"a", "b", "c", "d"}) {
    if (!j.contains(k)) throw InvalidInput("missing " + where + "." + k);
  }
  return HFunction::custom(get<double>(j, "a", where, 0), get<double>(j, "b", where, 0), get<double>(j, "c", where, 0),
                           get<double>(j, "d", where, 0));
}

EnergySpec parse_energy_spec(const Json& j, const std::string& where) {
  require_known_keys(j, {"stored", "fidelity", "n"}, where);
  EnergySpec s;
  s.n = get<int>(j, "n", where, 2);
  s.stored.h = HFunction::standard(s.n);
  if (j.contains("stored")) {
    const Json& st = j["stored"];
    const std::string w = where + ".stored";
    require_known_keys(st, {"family", "alpha", "h"}, w);
    const std::string fam = get<std::string>(st, "family", w, "iso_power");
    if (fam == "iso_power") {
      s.stored.family = StoredEnergySpec::Family::IsoPower;
      s.stored.alpha = get<double>(st, "alpha", w, 2.0);
      s.stored.h = HFunction::standard(s.n);
    } else if (fam == "det_only") {
      if (st.contains("alpha")) throw InvalidInput(w + ".alpha is not used by det_only");
      s.stored = StoredEnergySpec::det_only(HFunction::normalized());
    } else {
      throw InvalidInput("unknown " + w + ".family '" + fam + "'");
    }
    if (st.contains("h")) s.stored.h = parse_hfunction(st["h"], s.n, w + ".h");
  }
  if (j.contains("fidelity")) {
    const Json& fi = j["fidelity"];
    const std::string w = where + ".fidelity";
    require_known_keys(fi, {"family", "epsilon"}, w);
    const std::string fam = get<std::string>(fi, "family", w, "g_form");
    if (fam == "g_form") {
      s.fidelity.family = FidelitySpec::Family::GForm;
    } else if (fam == "mass_form") {
      s.fidelity.family = FidelitySpec::Family::MassForm;
    } else {
      throw InvalidInput("unknown " + w + ".family '" + fam + "'");
    }
    s.fidelity.epsilon = get<double>(fi, "epsilon", w, 1.0);
  }
  s.validate();
  return s;
}

OptimizerParams parse_optimizer(const Json& j, const std::string& where) {
  require_known_keys(j, {"max_iterations", "gradient_tolerance", "function_tolerance", "barrier_schedule", "armijo",
                         "backtrack", "max_backtracks", "memory", "multistart", "det_floor"},
                     where);
  OptimizerParams p;
  p.max_iterations = get<int>(j, "max_iterations", where, p.max_iterations);
  p.gradient_tolerance = get<double>(j, "gradient_tolerance", where, p.gradient_tolerance);
  p.function_tolerance = get<double>(j, "function_tolerance", where, p.function_tolerance);
  p.barrier_schedule = get<std::vector<double>>(j, "barrier_schedule", where, p.barrier_schedule);
  p.armijo = get<double>(j, "armijo", where, p.armijo);
  p.backtrack = get<double>(j, "backtrack", where, p.backtrack);
  p.max_backtracks = get<int>(j, "max_backtracks", where, p.max_backtracks);
  p.memory = get<int>(j, "memory", where, p.memory);
  p.multistart = get<int>(j, "multistart", where, p.multistart);
  p.det_floor = get<double>(j, "det_floor", where, p.det_floor);
  p.validate();
  return p;
}

SecondOrderSpec parse_second_order(const Json& j, const std::string& where) {
  require_known_keys(j, {"h", "m", "n"}, where);
  SecondOrderSpec s;
  s.n = get<int>(j, "n", where, 2);
  s.m = get<double>(j, "m", where, 2.0);
  if (j.contains("h")) s.h = parse_hfunction(j["h"], s.n, where + ".h");
  s.validate();
  return s;
}

Domain2 parse_domain(const Json& j, const std::string& where) {
  require_known_keys(j, {"rectangle", "polygon", "disk"}, where);
  if (j.size() != 1) throw InvalidInput(where + " must have exactly one of rectangle, polygon, disk");
  if (j.contains("rectangle")) {
    const Json& r = j["rectangle"];
    require_known_keys(r, {"origin", "extent"}, where + ".rectangle");
    const Vec2 o = r.contains("origin") ? parse_vec2(r["origin"], where + ".rectangle.origin") : Vec2::Zero();
    if (!r.contains("extent")) throw InvalidInput("missing " + where + ".rectangle.extent");
    const Vec2 e = parse_vec2(r["extent"], where + ".rectangle.extent");
    return Domain2::rectangle(e.x(), e.y(), o);
  }
  if (j.contains("polygon")) {
    const Json& p = j["polygon"];
    if (!p.is_array()) throw InvalidInput(where + ".polygon must be a list of points");
    std::vector<Vec2> v;
    for (std::size_t i = 0; i < p.size(); ++i) v.push_back(parse_vec2(p[i], where + ".polygon[" + std::to_string(i) + "]"));
    return Domain2::polygon(std::move(v));
  }
  const Json& d = j["disk"];
  const std::string w = where + ".disk";
  require_known_keys(d, {"center", "radius", "segments"}, w);
  const Vec2 c = d.contains("center") ? parse_vec2(d["center"], w + ".center") : Vec2::Zero();
  return Domain2::disk(c, get<double>(d, "radius", w, 1.0), get<int>(d, "segments", w, 64));
}

Json to_json(const EnergyBreakdown& e) {
  return Json{{"stored", e.stored}, {"fidelity", e.fidelity}, {"second_order", e.second_order}, {"total", e.total}};
}

Json to_json(const HFunction& h) { return Json{{"a", h.a}, {"b", h.b}, {"c", h.c}, {"d", h.d}}; }

Json to_json(const EnergySpec& s) {
  Json stored{{"family", s.stored.family == StoredEnergySpec::Family::IsoPower ? "iso_power" : "det_only"},
              {"h", to_json(s.stored.h)}};
  if (s.stored.family == StoredEnergySpec::Family::IsoPower) stored["alpha"] = s.stored.alpha;
  return Json{{"stored", stored},
              {"fidelity",
               {{"family", s.fidelity.family == FidelitySpec::Family::GForm ? "g_form" : "mass_form"},
                {"epsilon", s.fidelity.epsilon}}},
              {"n", s.n}};
}

Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot read config " + path);
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot write " + path);
  f << j.dump(2) << '\n';
}

} // namespace elastireg

#pragma once

#include "elastireg/energy/functional.hpp"
#include "elastireg/energy/second_order.hpp"
#include "elastireg/solve/optimizer.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>

namespace elastireg {

using Json = nlohmann::json;

/// Throws InvalidInput naming `where` and the first key not in `allowed`.
void require_known_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

HFunction parse_hfunction(const Json& j, int n, const std::string& where);
EnergySpec parse_energy_spec(const Json& j, const std::string& where = "energy");
OptimizerParams parse_optimizer(const Json& j, const std::string& where = "optimizer");
SecondOrderSpec parse_second_order(const Json& j, const std::string& where = "second_order");
Domain2 parse_domain(const Json& j, const std::string& where);
Vec2 parse_vec2(const Json& j, const std::string& where);

Json to_json(const EnergyBreakdown& e);
Json to_json(const EnergySpec& s);
Json to_json(const HFunction& h);

/// Reads and parses a JSON file; parse errors become InvalidInput.
Json read_json_file(const std::string& path);
/// Pretty-printed with shortest round-trip number formatting.
void write_json_file(const std::string& path, const Json& j);

} // namespace elastireg

#pragma once

// JSON state format:
//   {"shape": [{"label":"A","dim":4},{"label":"E","dim":2}],
//    "matrix": [[[re,im], ...], ...]}
// Row-major; complex entries as [re, im] pairs.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qdecouple/qmat.hpp"

namespace qdecouple {

nlohmann::json shape_to_json(const SystemShape& shape);
SystemShape shape_from_json(const nlohmann::json& j);

nlohmann::json operator_to_json(const Operator& op);
/// Throws Error(Parse) on malformed documents.
Operator operator_from_json(const nlohmann::json& j);

/// Parses and validates a density operator; malformed input raises
/// Error(Parse), a matrix that is not a state raises Error(InvariantViolation).
DensityOperator read_state(const std::filesystem::path& path);
DensityOperator parse_state(const std::string& text);

std::string dump_state(const DensityOperator& rho);
void write_state(const std::filesystem::path& path, const DensityOperator& rho);

}  // namespace qdecouple

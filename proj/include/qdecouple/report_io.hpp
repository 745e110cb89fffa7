#pragma once

// JSON and CSV renderings of the report types. JSON numbers keep full
// double precision; CSV cells use 12 significant digits.

#include <string>
#include <vector>

#include <json.hpp>

#include "qdecouple/bounds.hpp"
#include "qdecouple/decoupling.hpp"
#include "qdecouple/distill.hpp"
#include "qdecouple/divergences.hpp"
#include "qdecouple/verify.hpp"

namespace qdecouple {

/// Finite doubles as numbers; infinities and NaN as the strings "inf",
/// "-inf" and "nan".
nlohmann::json number_to_json(double x);

nlohmann::json to_json(const divergences::DivergenceValue& v);
nlohmann::json to_json(const decoupling::DecouplingSplit& s);
nlohmann::json to_json(const decoupling::DeltaEstimate& e);
nlohmann::json to_json(const decoupling::EllEstimate& e, double eps, double confidence_k);
nlohmann::json to_json(const bounds::BoundReport& r, bool include_grid = false);
nlohmann::json to_json(const distill::DistillReport& r);
nlohmann::json to_json(const verify::SuiteResult& r);

/// %.12g with '.' as the decimal point regardless of locale.
std::string csv_number(double x);

/// Header plus one row per divisor: dimC,mean,stderr,samples,seed.
std::string delta_table_csv(const std::vector<decoupling::DeltaEstimate>& rows);

/// Header epsilon,delta,c,lower_bits,upper_bits,valid_lower,valid_upper.
std::string sweep_csv_header();
std::string sweep_csv_rows(double eps, const std::vector<bounds::GridPoint>& grid);

}  // namespace qdecouple

#include "qdecouple/report_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace qdecouple {

using nlohmann::json;

json number_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

namespace {

const char* status_name(divergences::Status s) {
  switch (s) {
    case divergences::Status::Finite: return "finite";
    case divergences::Status::PlusInfinity: return "+inf";
    case divergences::Status::MinusInfinity: return "-inf";
  }
  return "finite";
}

}  // namespace

json to_json(const divergences::DivergenceValue& v) {
  json out{{"value", number_to_json(v.value)},
           {"status", status_name(v.status)},
           {"epsilon", v.epsilon},
           {"resolution", v.resolution},
           {"commuting", v.commuting}};
  if (v.log_threshold) out["log_threshold"] = number_to_json(*v.log_threshold);
  if (v.achiever) {
    out["test_alpha"] = v.achiever->alpha;
    out["test_beta"] = v.achiever->beta;
  }
  if (v.degenerate_crossing) out["degenerate_crossing"] = true;
  return out;
}

json to_json(const decoupling::DecouplingSplit& s) {
  return {{"dimA", s.dim_a()}, {"dimA1", s.dim_a1}, {"dimC", s.dim_c}, {"dimE", s.dim_e}};
}

json to_json(const decoupling::DeltaEstimate& e) {
  return {{"mean", e.mean},
          {"stderr", e.std_error},
          {"samples", e.samples},
          {"seed", e.seed},
          {"split", to_json(e.split)}};
}

json to_json(const decoupling::EllEstimate& e, double eps, double confidence_k) {
  json rows = json::array();
  for (const auto& r : e.table) rows.push_back(to_json(r));
  return {{"epsilon", eps},
          {"confidence_k", confidence_k},
          {"ell_conservative", e.ell_conservative},
          {"ell_optimistic", e.ell_optimistic},
          {"table", rows}};
}

json to_json(const bounds::BoundReport& r, bool include_grid) {
  json out{{"lower_bits", number_to_json(r.lower_bits)},
           {"upper_bits", number_to_json(r.upper_bits)},
           {"valid_lower", r.valid_lower},
           {"valid_upper", r.valid_upper},
           {"params",
            {{"epsilon", r.params.eps},
             {"delta_lower", r.params.delta_lower},
             {"delta_upper", r.params.delta_upper},
             {"c", r.params.c},
             {"nu", r.params.nu},
             {"spec_tolerance", r.params.spec_tolerance},
             {"log2_dimA", r.params.log2_a}}},
           {"notes", r.notes}};
  if (include_grid) {
    json grid = json::array();
    for (const auto& p : r.grid)
      grid.push_back({{"delta", p.delta},
                      {"c", p.c},
                      {"lower_bits", p.valid_lower ? number_to_json(p.lower_bits) : json(nullptr)},
                      {"upper_bits", p.valid_upper ? number_to_json(p.upper_bits) : json(nullptr)},
                      {"valid_lower", p.valid_lower},
                      {"valid_upper", p.valid_upper}});
    out["grid"] = grid;
  }
  return out;
}

json to_json(const distill::DistillReport& r) {
  return {{"oneshot_bits", number_to_json(r.oneshot_bits)},
          {"params",
           {{"epsilon", r.params.eps},
            {"delta", r.params.delta},
            {"nu", r.params.nu},
            {"conditioning", r.params.conditioning}}},
          {"purification_rank", r.purification_rank},
          {"notes", r.notes}};
}

json to_json(const verify::SuiteResult& r) {
  return {{"suite", r.name},
          {"seed", r.seed},
          {"instances", r.instances},
          {"checks", r.checks},
          {"passed", r.passed},
          {"ok", r.ok()},
          {"worst_violation", number_to_json(r.worst_violation)},
          {"failures", r.failures}};
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string delta_table_csv(const std::vector<decoupling::DeltaEstimate>& rows) {
  std::ostringstream os;
  os << "dimC,mean,stderr,samples,seed\n";
  for (const auto& r : rows)
    os << r.split.dim_c << ',' << csv_number(r.mean) << ',' << csv_number(r.std_error) << ','
       << r.samples << ',' << r.seed << '\n';
  return os.str();
}

std::string sweep_csv_header() {
  return "epsilon,delta,c,lower_bits,upper_bits,valid_lower,valid_upper\n";
}

std::string sweep_csv_rows(double eps, const std::vector<bounds::GridPoint>& grid) {
  std::ostringstream os;
  for (const auto& p : grid)
    os << csv_number(eps) << ',' << csv_number(p.delta) << ',' << csv_number(p.c) << ','
       << (p.valid_lower ? csv_number(p.lower_bits) : "") << ','
       << (p.valid_upper ? csv_number(p.upper_bits) : "") << ',' << (p.valid_lower ? 1 : 0)
       << ',' << (p.valid_upper ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace qdecouple

#include "qdecouple/state_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qdecouple {

using nlohmann::json;

json shape_to_json(const SystemShape& shape) {
  json out = json::array();
  for (const auto& f : shape.factors()) out.push_back({{"label", f.label}, {"dim", f.dim}});
  return out;
}

SystemShape shape_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::Parse, "\"shape\" must be a non-empty array");
  std::vector<Factor> factors;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("label") || !item.contains("dim") ||
        !item["label"].is_string() || !item["dim"].is_number_integer())
      throw Error(ErrorKind::Parse, "shape entries need a string \"label\" and integer \"dim\"");
    factors.push_back({item["label"].get<std::string>(), item["dim"].get<int>()});
  }
  try {
    return SystemShape(std::move(factors));
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

json operator_to_json(const Operator& op) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < op.matrix.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < op.matrix.cols(); ++c)
      row.push_back({op.matrix(r, c).real(), op.matrix(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return {{"shape", shape_to_json(op.shape)}, {"matrix", std::move(rows)}};
}

Operator operator_from_json(const json& j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("matrix"))
    throw Error(ErrorKind::Parse, "state document needs \"shape\" and \"matrix\"");
  SystemShape shape = shape_from_json(j["shape"]);
  const auto& rows = j["matrix"];
  const auto d = static_cast<std::size_t>(shape.total_dim());
  if (!rows.is_array() || rows.size() != d)
    throw Error(ErrorKind::Parse, "\"matrix\" must have " + std::to_string(d) + " rows");
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || row.size() != d)
      throw Error(ErrorKind::Parse, "row " + std::to_string(r) + " must have " +
                                        std::to_string(d) + " entries");
    for (std::size_t c = 0; c < d; ++c) {
      const auto& z = row[c];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
        throw Error(ErrorKind::Parse, "matrix entries must be [re, im] pairs");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  return {std::move(m), std::move(shape)};
}

DensityOperator parse_state(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  auto op = operator_from_json(j);
  return DensityOperator(std::move(op.matrix), std::move(op.shape));
}

DensityOperator read_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open state file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_state(buf.str());
}

std::string dump_state(const DensityOperator& rho) {
  // Written by hand so every entry carries 17 significant digits.
  std::ostringstream os;
  os << "{\"shape\": " << shape_to_json(rho.shape()).dump() << ", \"matrix\": [";
  char buf[64];
  const auto& m = rho.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << (r ? ",\n  [" : "\n  [");
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", m(r, c).real(), m(r, c).imag());
      os << (c ? ", " : "") << buf;
    }
    os << ']';
  }
  os << "\n]}\n";
  return os.str();
}

void write_state(const std::filesystem::path& path, const DensityOperator& rho) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write state file " + path.string());
  out << dump_state(rho);
}

}  // namespace qdecouple

#include "qstrotter/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qst::jsonio {

namespace {

using nlohmann::json;

double number_at(const json& j, const char* name) {
  if (!j.is_number())
    throw std::invalid_argument(std::string(name) +
                                ": expected a finite number");
  return j.get<double>();
}

numkit::Complex complex_at(const json& j, const char* name) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument(std::string(name) +
                                ": complex entries are [re, im] pairs");
  return {number_at(j[0], name), number_at(j[1], name)};
}

const json& member(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end())
    throw std::invalid_argument(std::string("missing field \"") + key + "\"");
  return *it;
}

}  // namespace

nlohmann::json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const nlohmann::json& j, Eigen::Index rows,
                         Eigen::Index cols, const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw std::invalid_argument(std::string(name) + ": expected " +
                                std::to_string(rows) + " rows");
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument(std::string(name) + ": row " +
                                  std::to_string(i) + " must have " +
                                  std::to_string(cols) + " entries");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_at(row[k], name);
  }
  return m;
}

nlohmann::json vector_to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back({v(i).real(), v(i).imag()});
  return out;
}

CVector vector_from_json(const nlohmann::json& j, Eigen::Index size,
                         const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size)
    throw std::invalid_argument(std::string(name) + ": expected " +
                                std::to_string(size) + " entries");
  CVector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = complex_at(j[i], name);
  return v;
}

nlohmann::json generator_to_json(const ito::BlockGenerator& f) {
  json j;
  j["d_h"] = f.dim_h;
  j["d_k"] = f.dim_k;
  j["K"] = matrix_to_json(f.K);
  j["M"] = matrix_to_json(f.M);
  j["L"] = matrix_to_json(f.L);
  j["C"] = matrix_to_json(f.C);
  return j;
}

ito::BlockGenerator generator_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw std::invalid_argument("generator: expected a JSON object");
  const json& dh = member(j, "d_h");
  const json& dk = member(j, "d_k");
  if (!dh.is_number_integer() || !dk.is_number_integer())
    throw std::invalid_argument("generator: d_h and d_k must be integers");
  ito::BlockGenerator f;
  f.dim_h = dh.get<int>();
  f.dim_k = dk.get<int>();
  if (f.dim_h < 1 || f.dim_k < 0)
    throw std::invalid_argument("generator: bad dimensions");
  const Eigen::Index n = f.noise_dim();
  f.K = matrix_from_json(member(j, "K"), f.dim_h, f.dim_h, "K");
  f.M = matrix_from_json(member(j, "M"), f.dim_h, n, "M");
  f.L = matrix_from_json(member(j, "L"), n, f.dim_h, "L");
  f.C = matrix_from_json(member(j, "C"), n, n, "C");
  f.validate();
  return f;
}

nlohmann::json step_to_json(const sim::StepFunction& s) {
  json j;
  j["breaks"] = s.breaks;
  json vals = json::array();
  for (const auto& v : s.values) vals.push_back(vector_to_json(v));
  j["values"] = std::move(vals);
  return j;
}

sim::StepFunction step_from_json(const nlohmann::json& j, int dim_k) {
  if (!j.is_object())
    throw std::invalid_argument("step function: expected a JSON object");
  sim::StepFunction s;
  const json& breaks = member(j, "breaks");
  if (!breaks.is_array())
    throw std::invalid_argument("step function: breaks must be an array");
  for (const auto& b : breaks) s.breaks.push_back(number_at(b, "breaks"));
  const json& values = member(j, "values");
  if (!values.is_array() || values.size() != s.breaks.size() + 1)
    throw std::invalid_argument(
        "step function: need one more value than breaks");
  for (const auto& v : values)
    s.values.push_back(vector_from_json(v, dim_k, "values"));
  s.validate();
  return s;
}

nlohmann::json parse_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t stop =
        e.byte > 0 ? std::min(text.size(), e.byte - 1) : 0;
    for (std::size_t i = 0; i < stop; ++i)
      if (text[i] == '\n') ++line;
    throw std::invalid_argument(where + ":" + std::to_string(line) + ": " +
                                e.what());
  }
}

nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

ito::BlockGenerator load_generator(const std::string& path) {
  const nlohmann::json j = parse_file(path);
  try {
    return generator_from_json(j);
  } catch (const std::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

}  // namespace qst::jsonio

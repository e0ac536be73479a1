// Copyright 2026 The til Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "til/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "til/errors.hpp"

namespace til {

namespace {

std::string join_items(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

Json real_rows(const Matrix& m, bool imag) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

Index read_index(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError({std::string("missing field \"") + key + "\""});
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw InputError({std::string("field \"") + key + "\" must be a positive integer"});
  }
  return static_cast<Index>(v.get<long long>());
}

void read_part(const Json& j, const char* key, Index rows, Index cols, Matrix& m, bool imag,
               std::vector<std::string>& errors) {
  if (!j.contains(key)) {
    if (imag) return;  // "im" may be omitted for real matrices
    errors.push_back(std::string("missing field \"") + key + "\"");
    return;
  }
  const Json& a = j.at(key);
  if (!a.is_array() || static_cast<Index>(a.size()) != rows) {
    errors.push_back(std::string("field \"") + key + "\" must have " + std::to_string(rows) +
                     " rows");
    return;
  }
  for (Index i = 0; i < rows; ++i) {
    const Json& row = a.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      errors.push_back(std::string("field \"") + key + "\" row " + std::to_string(i) +
                       " must have " + std::to_string(cols) + " entries");
      return;
    }
    for (Index k = 0; k < cols; ++k) {
      const Json& x = row.at(static_cast<std::size_t>(k));
      if (!x.is_number()) {
        errors.push_back(std::string("field \"") + key + "\" entry (" + std::to_string(i) + "," +
                         std::to_string(k) + ") is not a number");
        return;
      }
      const double v = x.get<double>();
      if (imag)
        m(i, k).imag(v);
      else
        m(i, k).real(v);
    }
  }
}

template <typename F>
auto prefixed(const std::string& prefix, F&& f, std::vector<std::string>& errors)
    -> std::optional<decltype(f())> {
  try {
    return f();
  } catch (const InputError& e) {
    for (const auto& item : e.items()) errors.push_back(prefix + ": " + item);
  } catch (const std::exception& e) {
    errors.push_back(prefix + ": " + e.what());
  }
  return std::nullopt;
}

}  // namespace

InputError::InputError(std::vector<std::string> items)
    : std::runtime_error(join_items(items)), items_(std::move(items)) {}

Json matrix_to_json(const Matrix& m) {
  Json j;
  if (m.rows() == m.cols()) {
    j["dim"] = m.rows();
  } else {
    j["rows"] = m.rows();
    j["cols"] = m.cols();
  }
  j["re"] = real_rows(m, false);
  j["im"] = real_rows(m, true);
  return j;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_object()) throw InputError({"matrix must be a JSON object"});
  Index rows = 0;
  Index cols = 0;
  if (j.contains("dim")) {
    rows = cols = read_index(j, "dim");
  } else {
    rows = read_index(j, "rows");
    cols = read_index(j, "cols");
  }
  Matrix m = Matrix::Zero(rows, cols);
  std::vector<std::string> errors;
  read_part(j, "re", rows, cols, m, false, errors);
  read_part(j, "im", rows, cols, m, true, errors);
  if (!errors.empty()) throw InputError(errors);
  return m;
}

HermitianMatrix hermitian_from_json(const Json& j) {
  const Matrix m = matrix_from_json(j);
  if (m.rows() != m.cols()) throw InputError({"matrix must be square"});
  try {
    return HermitianMatrix(m);
  } catch (const ValidationError& e) {
    throw InputError({e.what()});
  }
}

Json channel_to_json(const Channel& n) {
  Json j;
  j["dim_in"] = n.dim_in();
  j["dim_out"] = n.dim_out();
  Json ops = Json::array();
  for (const Matrix& k : n.kraus()) ops.push_back(matrix_to_json(k));
  j["kraus"] = std::move(ops);
  return j;
}

Channel channel_from_json(const Json& j) {
  if (!j.is_object()) throw InputError({"channel must be a JSON object"});
  std::vector<std::string> errors;
  const auto din = prefixed("dim_in", [&] { return read_index(j, "dim_in"); }, errors);
  const auto dout = prefixed("dim_out", [&] { return read_index(j, "dim_out"); }, errors);
  std::vector<Matrix> ops;
  if (!j.contains("kraus") || !j.at("kraus").is_array() || j.at("kraus").empty()) {
    errors.push_back("kraus: must be a non-empty array of matrices");
  } else {
    for (std::size_t k = 0; k < j.at("kraus").size(); ++k) {
      auto m = prefixed("kraus[" + std::to_string(k) + "]",
                        [&] { return matrix_from_json(j.at("kraus").at(k)); }, errors);
      if (m) ops.push_back(std::move(*m));
    }
  }
  if (!errors.empty()) throw InputError(errors);
  try {
    return Channel(*din, *dout, std::move(ops));
  } catch (const std::exception& e) {
    throw InputError({e.what()});
  }
}

Json instance_to_json(const Instance& inst) {
  Json j;
  j["sigma"] = matrix_to_json(inst.sigma.matrix());
  j["tau"] = matrix_to_json(inst.tau.matrix());
  j["channel"] = channel_to_json(inst.channel);
  j["seed"] = inst.seed;
  if (inst.params) j["params"] = *inst.params;
  return j;
}

Instance instance_from_json(const Json& j) {
  if (!j.is_object()) throw InputError({"instance must be a JSON object"});
  std::vector<std::string> errors;
  const auto field = [&](const char* key) -> const Json* {
    if (!j.contains(key)) {
      errors.push_back(std::string(key) + ": missing");
      return nullptr;
    }
    return &j.at(key);
  };
  const Json* js = field("sigma");
  const Json* jt = field("tau");
  const Json* jc = field("channel");
  std::optional<PsdMatrix> sigma;
  std::optional<DensityMatrix> tau;
  std::optional<Channel> channel;
  if (js) sigma = prefixed("sigma", [&] { return PsdMatrix(hermitian_from_json(*js)); }, errors);
  if (jt) {
    tau = prefixed("tau", [&] { return DensityMatrix(PsdMatrix(hermitian_from_json(*jt))); },
                   errors);
  }
  if (jc) channel = prefixed("channel", [&] { return channel_from_json(*jc); }, errors);
  std::uint64_t seed = 0;
  if (j.contains("seed")) {
    const Json& js_seed = j.at("seed");
    if (js_seed.is_number_unsigned() ||
        (js_seed.is_number_integer() && js_seed.get<std::int64_t>() >= 0)) {
      seed = j.at("seed").get<std::uint64_t>();
    } else {
      errors.push_back("seed: must be a nonnegative integer");
    }
  }
  if (sigma && tau && sigma->dim() != tau->dim()) {
    errors.push_back("tau: dimension differs from sigma");
  } else if (sigma && tau && !support_contained(*tau, *sigma)) {
    errors.push_back(
        "tau: supp(tau) is not contained in supp(sigma), which the recovery map requires");
  }
  if (sigma && channel && channel->dim_in() != sigma->dim()) {
    errors.push_back("channel: dim_in differs from the dimension of sigma");
  }
  if (!errors.empty()) throw InputError(errors);
  Instance inst{*sigma, *tau, *channel, seed, std::nullopt};
  if (j.contains("params")) inst.params = j.at("params");
  return inst;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError({"cannot open " + path});
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError({path + ": " + e.what()});
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError({"cannot write " + path});
  out << text;
  if (!out) throw InputError({"write failed for " + path});
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace til

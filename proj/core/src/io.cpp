// Copyright 2026 The qldp Authors
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

#include "qldp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace qldp::io {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    throw ValidationError(std::string(what) + ": malformed JSON");
  }
  return doc;
}

double number_field(const json& node, const char* what) {
  if (!node.is_number()) {
    throw ValidationError(std::string(what) + ": expected a number");
  }
  const double value = node.get<double>();
  if (!std::isfinite(value)) {
    throw ValidationError(std::string(what) + ": non-finite value");
  }
  return value;
}

Operator matrix_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("entries")) {
    throw ValidationError("matrix: expected {\"dim\", \"entries\"}");
  }
  if (!doc["dim"].is_number_integer() || doc["dim"].get<std::int64_t>() < 1) {
    throw ValidationError("matrix: dim must be a positive integer");
  }
  const Index dim = doc["dim"].get<Index>();
  const json& entries = doc["entries"];
  if (!entries.is_array() ||
      entries.size() != static_cast<std::size_t>(dim * dim)) {
    throw ValidationError("matrix: expected exactly dim^2 entries");
  }

  CMatrix m(dim, dim);
  std::size_t flat = 0;
  for (const json& entry : entries) {
    if (!entry.is_array() || entry.size() != 2) {
      throw ValidationError("matrix: entries must be [re, im] pairs");
    }
    const double re = number_field(entry[0], "matrix entry");
    const double im = number_field(entry[1], "matrix entry");
    m(static_cast<Index>(flat / dim), static_cast<Index>(flat % dim)) =
        Complex(re, im);
    ++flat;
  }
  return Operator(std::move(m));
}

json matrix_to_json(const Operator& op) {
  json entries = json::array();
  const CMatrix& m = op.mat();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      entries.push_back({m(r, c).real(), m(r, c).imag()});
    }
  }
  return json{{"dim", op.dim()}, {"entries", std::move(entries)}};
}

Povm povm_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("effects")) {
    throw ValidationError("povm: expected {\"dim\", \"effects\"[, \"labels\"]}");
  }
  if (!doc["dim"].is_number_integer() || doc["dim"].get<std::int64_t>() < 1) {
    throw ValidationError("povm: dim must be a positive integer");
  }
  const Index dim = doc["dim"].get<Index>();
  if (!doc["effects"].is_array() || doc["effects"].empty()) {
    throw ValidationError("povm: effects must be a nonempty array");
  }

  std::vector<Operator> effects;
  effects.reserve(doc["effects"].size());
  for (const json& node : doc["effects"]) {
    Operator effect = matrix_from_json(node);
    if (effect.dim() != dim) {
      throw ValidationError("povm: effect dimension disagrees with dim");
    }
    effects.push_back(std::move(effect));
  }

  std::vector<double> labels;
  if (doc.contains("labels")) {
    if (!doc["labels"].is_array()) {
      throw ValidationError("povm: labels must be an array");
    }
    for (const json& node : doc["labels"]) {
      labels.push_back(number_field(node, "povm label"));
    }
  }
  return Povm(std::move(effects), std::move(labels));
}

Povm povm_from_ref(const json& node, const std::filesystem::path& base_dir,
                   const char* what) {
  if (node.is_string()) {
    std::filesystem::path path = node.get<std::string>();
    if (path.is_relative() && !base_dir.empty()) {
      path = base_dir / path;
    }
    return load_povm(path);
  }
  if (node.is_object()) {
    return povm_from_json(node);
  }
  throw ValidationError(std::string(what) +
                        ": povm must be a file path or an inline object");
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot read file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ValidationError("cannot open file for writing: " + path.string());
  }
  out << contents;
  if (!out) {
    throw ValidationError("failed writing file: " + path.string());
  }
}

Operator parse_matrix(const std::string& text) {
  return matrix_from_json(parse_json(text, "matrix"));
}

std::string format_matrix(const Operator& op) {
  return matrix_to_json(op).dump(2) + "\n";
}

DensityMatrix parse_density_matrix(const std::string& text) {
  return DensityMatrix(parse_matrix(text).mat());
}

Povm parse_povm(const std::string& text) {
  return povm_from_json(parse_json(text, "povm"));
}

std::string format_povm(const Povm& m) {
  json effects = json::array();
  for (const auto& effect : m.effects()) {
    effects.push_back(matrix_to_json(effect));
  }
  json doc{{"dim", m.dim()}, {"labels", m.labels()}, {"effects", std::move(effects)}};
  return doc.dump(2) + "\n";
}

ProductState parse_product_state(const std::string& text) {
  const json doc = parse_json(text, "product state");
  if (doc.is_object() && doc.contains("registers")) {
    if (!doc["registers"].is_array() || doc["registers"].empty()) {
      throw ValidationError("product state: registers must be a nonempty array");
    }
    std::vector<DensityMatrix> registers;
    registers.reserve(doc["registers"].size());
    for (const json& node : doc["registers"]) {
      registers.emplace_back(matrix_from_json(node).mat());
    }
    return ProductState(std::move(registers));
  }
  // A bare matrix doubles as a one-register product state.
  std::vector<DensityMatrix> registers;
  registers.emplace_back(matrix_from_json(doc).mat());
  return ProductState(std::move(registers));
}

QsqQueryPlan parse_qsq_plan(const std::string& text,
                            const std::filesystem::path& base_dir) {
  const json doc = parse_json(text, "query plan");
  if (!doc.is_object() || !doc.contains("queries") || !doc["queries"].is_array() ||
      doc["queries"].empty()) {
    throw ValidationError("query plan: expected {\"queries\": [...]}");
  }
  QsqQueryPlan plan;
  for (const json& node : doc["queries"]) {
    if (!node.is_object() || !node.contains("povm") || !node.contains("tau")) {
      throw ValidationError("query plan: each query needs \"povm\" and \"tau\"");
    }
    const double tau = number_field(node["tau"], "query tau");
    if (!(tau > 0.0)) {
      throw ValidationError("query plan: tau must be positive");
    }
    plan.queries.push_back({povm_from_ref(node["povm"], base_dir, "query plan"), tau});
  }
  return plan;
}

QldpQueryPlan parse_qldp_plan(const std::string& text,
                              const std::filesystem::path& base_dir,
                              std::optional<double> default_epsilon) {
  const json doc = parse_json(text, "query plan");
  if (!doc.is_object() || !doc.contains("queries") || !doc["queries"].is_array() ||
      doc["queries"].empty()) {
    throw ValidationError("query plan: expected {\"queries\": [...]}");
  }
  QldpQueryPlan plan;
  for (const json& node : doc["queries"]) {
    if (!node.is_object() || !node.contains("povm") || !node.contains("register")) {
      throw ValidationError(
          "query plan: each query needs \"register\" and \"povm\"");
    }
    if (!node["register"].is_number_integer() ||
        node["register"].get<std::int64_t>() < 0) {
      throw ValidationError("query plan: register must be a nonnegative integer");
    }
    double epsilon;
    if (node.contains("epsilon")) {
      epsilon = number_field(node["epsilon"], "query epsilon");
    } else if (default_epsilon.has_value()) {
      epsilon = *default_epsilon;
    } else {
      throw ValidationError(
          "query plan: query omits \"epsilon\" and no default was given");
    }
    if (epsilon < 0.0) {
      throw ValidationError("query plan: epsilon must be nonnegative");
    }
    plan.queries.push_back({node["register"].get<std::size_t>(),
                            povm_from_ref(node["povm"], base_dir, "query plan"),
                            epsilon});
  }
  return plan;
}

Operator load_matrix(const std::filesystem::path& path) {
  return parse_matrix(read_file(path));
}

DensityMatrix load_density_matrix(const std::filesystem::path& path) {
  return parse_density_matrix(read_file(path));
}

Povm load_povm(const std::filesystem::path& path) {
  return parse_povm(read_file(path));
}

ProductState load_product_state(const std::filesystem::path& path) {
  return parse_product_state(read_file(path));
}

QsqQueryPlan load_qsq_plan(const std::filesystem::path& path) {
  return parse_qsq_plan(read_file(path), path.parent_path());
}

QldpQueryPlan load_qldp_plan(const std::filesystem::path& path,
                             std::optional<double> default_epsilon) {
  return parse_qldp_plan(read_file(path), path.parent_path(), default_epsilon);
}

std::string format_double(double value) {
  char buffer[40];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

}  // namespace qldp::io

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

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "qldp/learning.hpp"
#include "qldp/protocols.hpp"

// JSON file formats. Parsing is strict: wrong entry counts, non-finite
// values, or type mismatches raise ValidationError.
//
//   matrix        {"dim": d, "entries": [[re, im], ...]}   row-major, d^2 entries
//   povm          {"dim": d, "labels": [l1..lk], "effects": [matrix, ...]}
//                 ("labels" optional; defaults to 1..k)
//   product state {"registers": [matrix, ...]}  (a bare matrix = 1 register)
//   query plan    {"queries": [{"povm": file-or-inline, "tau": t}
//                              | {"register": j, "povm": ..., "epsilon": e}]}

namespace qldp::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

Operator parse_matrix(const std::string& text);
std::string format_matrix(const Operator& op);

DensityMatrix parse_density_matrix(const std::string& text);

Povm parse_povm(const std::string& text);
std::string format_povm(const Povm& m);

ProductState parse_product_state(const std::string& text);

/// Plan files may reference POVMs by path; relative paths resolve against
/// `base_dir` (the plan file's directory).
QsqQueryPlan parse_qsq_plan(const std::string& text,
                            const std::filesystem::path& base_dir = {});

/// `default_epsilon` fills queries that omit their own declaration.
QldpQueryPlan parse_qldp_plan(const std::string& text,
                              const std::filesystem::path& base_dir = {},
                              std::optional<double> default_epsilon = std::nullopt);

Operator load_matrix(const std::filesystem::path& path);
DensityMatrix load_density_matrix(const std::filesystem::path& path);
Povm load_povm(const std::filesystem::path& path);
ProductState load_product_state(const std::filesystem::path& path);
QsqQueryPlan load_qsq_plan(const std::filesystem::path& path);
QldpQueryPlan load_qldp_plan(const std::filesystem::path& path,
                             std::optional<double> default_epsilon = std::nullopt);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace qldp::io

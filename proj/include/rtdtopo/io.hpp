// Copyright 2026 The rtdtopo Authors
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
#include <iosfwd>
#include <string>
#include <vector>

#include "rtdtopo/core.hpp"
#include "rtdtopo/fewshot.hpp"

namespace rtdtopo {

// Parsed CSV with a mandatory header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index by exact name, or -1.
  int column(const std::string& name) const;
};

CsvTable parse_csv(std::istream& in, const std::string& source_name);
CsvTable read_csv(const std::filesystem::path& path);

/// Numeric columns become coordinates; a column named `label` is ignored.
PointCloud load_point_cloud_csv(const std::filesystem::path& path);

/// Header `label,e0,...`. With class_count < 0 it is max(label) + 1.
EmbeddingDataset load_embeddings_csv(const std::filesystem::path& path,
                                     int class_count = -1);

/// Header `class,e0,...`, rows for classes 0..K-1 in order.
Matrix load_class_matrix_csv(const std::filesystem::path& path);
BaseClassifier load_classifier_csv(const std::filesystem::path& path);

void write_embeddings_csv(std::ostream& out, const EmbeddingDataset& ds);
void write_class_matrix_csv(std::ostream& out, const Matrix& m);
void write_metrics_csv(std::ostream& out, const std::vector<EpochMetrics>& history);

/// Shortest representation that reads back to the same double.
std::string format_double(double v);

struct Manifest {
  std::filesystem::path train;
  std::filesystem::path test;
  std::filesystem::path base;
  std::filesystem::path output_dir;
  TrainConfig config;
};

/// Relative paths resolve against the manifest's directory. Unknown config
/// keys are rejected.
Manifest load_manifest(const std::filesystem::path& path);
std::string manifest_to_json(const Manifest& manifest);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace rtdtopo

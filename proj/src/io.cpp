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

#include "rtdtopo/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rtdtopo/errors.hpp"

namespace rtdtopo {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int integer_cell(double v, const std::string& what, std::size_t row) {
  if (v != std::floor(v) || v < 0 || v > 1e9) {
    throw DataError(what + " on data row " + std::to_string(row + 1) +
                    " is not a non-negative integer");
  }
  return static_cast<int>(v);
}

// Splits `label,e0,...` style tables into the integer key column and the rest.
std::pair<std::vector<int>, Matrix> keyed_matrix(const CsvTable& t, const std::string& key,
                                                 const std::string& source) {
  if (t.header.empty() || t.header[0] != key) {
    throw DataError(source + ": first column must be named '" + key + "'");
  }
  if (t.header.size() < 2) throw DataError(source + ": no embedding columns");
  if (t.rows.empty()) throw DataError(source + ": no data rows");
  const std::size_t d = t.header.size() - 1;
  Matrix m(t.rows.size(), d);
  std::vector<int> keys;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    keys.push_back(integer_cell(t.rows[r][0], source + ": " + key, r));
    std::copy(t.rows[r].begin() + 1, t.rows[r].end(), m.row(r).begin());
  }
  return {std::move(keys), std::move(m)};
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable parse_csv(std::istream& in, const std::string& source_name) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw DataError(source_name + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " columns, found " +
                      std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      double v = 0.0;
      const auto* end = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(cell.data(), end, v);
      if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw DataError(source_name + ":" + std::to_string(line_no) + ": '" + cell +
                        "' is not a finite number");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw DataError(source_name + ": missing header row");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_csv(in, path.string());
}

PointCloud load_point_cloud_csv(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  const int label = t.column("label");
  const std::size_t d = t.header.size() - (label >= 0 ? 1 : 0);
  if (d == 0) throw DataError(path.string() + ": no coordinate columns");
  if (t.rows.empty()) throw DataError(path.string() + ": no points");
  Matrix m(t.rows.size(), d);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::size_t c = 0;
    for (std::size_t k = 0; k < t.header.size(); ++k) {
      if (static_cast<int>(k) != label) m(r, c++) = t.rows[r][k];
    }
  }
  return PointCloud(std::move(m));
}

EmbeddingDataset load_embeddings_csv(const std::filesystem::path& path, int class_count) {
  auto [labels, m] = keyed_matrix(read_csv(path), "label", path.string());
  if (class_count < 0) class_count = *std::max_element(labels.begin(), labels.end()) + 1;
  try {
    return EmbeddingDataset(std::move(m), std::move(labels), class_count);
  } catch (const InvalidArgument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Matrix load_class_matrix_csv(const std::filesystem::path& path) {
  auto [classes, m] = keyed_matrix(read_csv(path), "class", path.string());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (classes[k] != static_cast<int>(k)) {
      throw DataError(path.string() + ": rows must list classes 0..K-1 in order; row " +
                      std::to_string(k + 1) + " has class " + std::to_string(classes[k]));
    }
  }
  return m;
}

BaseClassifier load_classifier_csv(const std::filesystem::path& path) {
  try {
    return BaseClassifier(load_class_matrix_csv(path));
  } catch (const InvalidArgument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_embeddings_csv(std::ostream& out, const EmbeddingDataset& ds) {
  out << "label";
  for (std::size_t k = 0; k < ds.dim(); ++k) out << ",e" << k;
  out << '\n';
  for (std::size_t r = 0; r < ds.size(); ++r) {
    out << ds.labels[r];
    for (double v : ds.embeddings.row(r)) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_class_matrix_csv(std::ostream& out, const Matrix& m) {
  out << "class";
  for (std::size_t k = 0; k < m.cols(); ++k) out << ",e" << k;
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << r;
    for (double v : m.row(r)) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_metrics_csv(std::ostream& out, const std::vector<EpochMetrics>& history) {
  out << "epoch,l_ce,l_rtd,l_total,train_acc\n";
  for (const auto& m : history) {
    out << m.epoch << ',' << format_double(m.ce) << ',' << format_double(m.rtd) << ','
        << format_double(m.total) << ',' << format_double(m.train_accuracy) << '\n';
  }
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  const auto dir = path.parent_path();
  auto resolve = [&](const char* key) -> std::filesystem::path {
    if (!j.contains(key) || !j[key].is_string()) {
      throw DataError(path.string() + ": missing string field '" + key + "'");
    }
    std::filesystem::path p = j[key].get<std::string>();
    return p.is_absolute() ? p : dir / p;
  };

  static const std::set<std::string> kTopKeys{"train", "test", "base", "output_dir", "config"};
  for (const auto& [key, value] : j.items()) {
    if (!kTopKeys.count(key)) throw DataError(path.string() + ": unknown field '" + key + "'");
  }

  Manifest m;
  m.train = resolve("train");
  m.test = resolve("test");
  m.base = resolve("base");
  m.output_dir = resolve("output_dir");
  if (j.contains("config")) {
    const auto& c = j["config"];
    if (!c.is_object()) throw DataError(path.string() + ": 'config' must be an object");
    try {
      for (const auto& [key, value] : c.items()) {
        auto& cfg = m.config;
        if (key == "shots") cfg.shots = value.get<int>();
        else if (key == "epochs") cfg.epochs = value.get<int>();
        else if (key == "lr") cfg.lr = value.get<double>();
        else if (key == "lambda") cfg.lambda = value.get<double>();
        else if (key == "alpha") cfg.alpha = value.get<double>();
        else if (key == "logit_scale") cfg.logit_scale = value.get<double>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else if (key == "lambda_search") cfg.lambda_search = value.get<bool>();
        else if (key == "target_ratio_band") {
          const auto band = value.get<std::vector<double>>();
          if (band.size() != 2) throw DataError("target_ratio_band needs two values");
          cfg.band_lower = band[0];
          cfg.band_upper = band[1];
        } else {
          throw DataError("unknown config field '" + key + "'");
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": bad config value: " + e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  try {
    m.config.validate();
  } catch (const InvalidArgument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return m;
}

std::string manifest_to_json(const Manifest& m) {
  const auto& c = m.config;
  nlohmann::ordered_json j;
  j["train"] = m.train.string();
  j["test"] = m.test.string();
  j["base"] = m.base.string();
  j["output_dir"] = m.output_dir.string();
  j["config"] = {{"shots", c.shots},
                 {"epochs", c.epochs},
                 {"lr", c.lr},
                 {"lambda", c.lambda},
                 {"alpha", c.alpha},
                 {"logit_scale", c.logit_scale},
                 {"seed", c.seed},
                 {"lambda_search", c.lambda_search},
                 {"target_ratio_band", {c.band_lower, c.band_upper}}};
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_for_write(path);
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace rtdtopo

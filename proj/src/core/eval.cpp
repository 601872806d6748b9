// Copyright 2026 The elvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace elvc {
namespace {

FeatureMatrix as_mcc(const FeatureMatrix& f, const MccConfig& mcc) {
  return f.kind == FeatureKind::kLms ? mcc_from_logmel(f, mcc) : f;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

double utterance_mcd(const FeatureMatrix& converted, const FeatureMatrix& target, const MccConfig& mcc) {
  if (converted.kind != target.kind) {
    throw Error(Errc::kShapeError, "converted and target features are of different kinds");
  }
  const FeatureMatrix a = as_mcc(converted, mcc);
  const FeatureMatrix b = as_mcc(target, mcc);
  if (a.frames() == 0 || b.frames() == 0) throw Error(Errc::kShapeError, "empty feature sequence");
  return dtw(cost_matrix_mcc(a, b)).mean_cost();
}

EvalReport evaluate_corpus(const std::vector<EvalPair>& pairs, const std::string& label, const MccConfig& mcc) {
  if (pairs.empty()) throw Error(Errc::kEmptyDataset, "no utterances to evaluate");
  EvalReport r;
  r.label = label;
  for (const auto& p : pairs) {
    r.utt_ids.push_back(p.utt_id);
    r.mcd_db.push_back(utterance_mcd(p.converted, p.target, mcc));
  }
  {
    double sum = 0.0;
    for (double v : r.mcd_db) sum += v;
    r.mean = sum / static_cast<double>(r.mcd_db.size());
    double var = 0.0;
    for (double v : r.mcd_db) var += (v - r.mean) * (v - r.mean);
    r.stdev = std::sqrt(var / static_cast<double>(r.mcd_db.size()));
  }
  return r;
}

void merge_external(EvalReport& report, const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw Error(Errc::kNotFound, csv.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::kParseError, csv.string() + ": empty file");
  const auto header = split_csv(line);
  if (header.empty() || header[0] != "utt_id") {
    throw Error(Errc::kParseError, csv.string() + ": first column must be utt_id");
  }
  for (std::size_t c = 1; c < header.size(); ++c) report.extra_columns.push_back(header[c]);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw Error(Errc::kParseError, csv.string() + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(header.size()) + " columns");
    }
    for (std::size_t c = 1; c < cells.size(); ++c) report.extra[header[c]][cells[0]] = cells[c];
  }
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "utt_id,mcd_db";
  for (const auto& c : report.extra_columns) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < report.count(); ++i) {
    out << report.utt_ids[i] << ',' << format_double(report.mcd_db[i]);
    for (const auto& c : report.extra_columns) {
      const auto& col = report.extra.at(c);
      const auto it = col.find(report.utt_ids[i]);
      out << ',' << (it == col.end() ? "" : it->second);
    }
    out << '\n';
  }
  return out.str();
}

std::string report_summary(const EvalReport& report) {
  std::ostringstream out;
  out << "method: " << (report.label.empty() ? "-" : report.label) << '\n'
      << "utterances: " << report.count() << '\n'
      << "MCD (dB): " << format_double(report.mean) << " +/- " << format_double(report.stdev) << '\n';
  return out.str();
}

}  // namespace elvc

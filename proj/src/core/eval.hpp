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

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "align.hpp"
#include "audio_io.hpp"

namespace elvc {

// Mean frame MCD along the DTW path between two LMS or MCC sequences. LMS
// inputs are converted to MCC first.
double utterance_mcd(const FeatureMatrix& converted, const FeatureMatrix& target,
                     const MccConfig& mcc = {});

struct EvalPair {
  std::string utt_id;
  FeatureMatrix converted;
  FeatureMatrix target;
};

struct EvalReport {
  std::string label;
  std::vector<std::string> utt_ids;
  std::vector<double> mcd_db;
  double mean = 0.0;
  double stdev = 0.0;  // population standard deviation
  // Externally computed columns (e.g. SER, MOS) keyed by column then utt_id.
  std::vector<std::string> extra_columns;
  std::map<std::string, std::map<std::string, std::string>> extra;

  std::size_t count() const noexcept { return mcd_db.size(); }
};

EvalReport evaluate_corpus(const std::vector<EvalPair>& pairs, const std::string& label,
                           const MccConfig& mcc = {});

// Joins columns from a CSV whose first column is utt_id.
void merge_external(EvalReport& report, const std::filesystem::path& csv);

// "utt_id,mcd_db[,extra...]" with one row per utterance.
std::string report_csv(const EvalReport& report);
std::string report_summary(const EvalReport& report);

}  // namespace elvc

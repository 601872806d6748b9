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
#include <functional>
#include <string>
#include <vector>

#include "config.hpp"
#include "eval.hpp"

namespace elvc {

enum class AlignMethod { kDtwMcc, kDtwLip, kDtwWsola };

const char* align_method_name(AlignMethod m) noexcept;
AlignMethod parse_align_method(const std::string& name);

using LogFn = std::function<void(const std::string&)>;

// Corpus manifest: CSV with header
//   utt_id,el_wav,nl_wav[,el_landmarks,nl_landmarks[,el_visual]]
// Relative paths resolve against the manifest's directory; optional cells
// may be empty.
struct CorpusEntry {
  std::string utt_id;
  std::filesystem::path el_wav, nl_wav, el_landmarks, nl_landmarks, el_visual;
};

std::vector<CorpusEntry> read_corpus_manifest(const std::filesystem::path& path);

// Writes, per utterance, into out_dir:
//   <id>.src.elf1  EL log-mel (source), <id>.tgt.elf1 warped NL log-mel,
//   <id>.vis.elf1  EL visual features at acoustic rate (when available),
//   <id>.path.csv  alignment path,
// plus list.txt (utterance order) and prepare_summary.csv.
void prepare_corpus(const std::vector<CorpusEntry>& corpus, AlignMethod method, const PipelineConfig& cfg,
                    const std::filesystem::path& out_dir, const LogFn& log = {});

std::vector<std::string> read_utterance_list(const std::filesystem::path& dir);

// Trains from a prepared directory and writes a checkpoint (plus
// loss_history.csv) into checkpoint_dir.
TrainResult train_from_dir(const std::filesystem::path& prepared_dir, ModelMode mode, const PipelineConfig& cfg,
                           const std::filesystem::path& checkpoint_dir, const LogFn& log = {});

// Converts <id>.src.elf1 (+ <id>.vis.elf1) for every listed utterance into
// out_dir/<id>.lms.elf1.
void convert_dir(const std::filesystem::path& checkpoint_dir, const std::filesystem::path& input_dir,
                 const std::filesystem::path& out_dir, std::size_t jobs = 1);

// Pairs every converted_dir/<id>.lms.elf1 with target_dir/<id>.tgt.elf1 (or
// <id>.lms.elf1). 80-dim matrices are treated as log-mel, others as MCC.
EvalReport eval_dirs(const std::filesystem::path& converted_dir, const std::filesystem::path& target_dir,
                     const std::string& label, const PipelineConfig& cfg);

void write_path_csv(const AlignmentPath& path, const std::filesystem::path& file);
AlignmentPath read_path_csv(const std::filesystem::path& file);

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace elvc

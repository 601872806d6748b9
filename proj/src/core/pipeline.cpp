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

#include "pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "error.hpp"
#include "visual.hpp"

namespace elvc {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(Errc::kIoError, "cannot write " + file.string());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Matrix head_rows(const Matrix& m, std::size_t rows) {
  if (rows >= m.rows()) return m;
  Matrix out(rows, m.cols());
  std::copy(m.data().begin(), m.data().begin() + static_cast<std::ptrdiff_t>(rows * m.cols()), out.data().begin());
  return out;
}

struct Prepared {
  Matrix src, tgt;
  std::optional<LayeredFeatureSet> visual;
  AlignmentPath path;
  std::vector<std::string> warnings;
};

Prepared prepare_one(const CorpusEntry& e, AlignMethod method, const PipelineConfig& cfg) {
  Prepared out;
  const Waveform el = read_wav(e.el_wav);
  Waveform nl = read_wav(e.nl_wav);
  const auto& fc = cfg.features;
  const FeatureMatrix el_lms = log_mel_spectrogram(el, fc.stft, fc.mel);

  if (method == AlignMethod::kDtwLip) {
    if (e.el_landmarks.empty() || e.nl_landmarks.empty()) {
      throw Error(Errc::kNotFound, e.utt_id + ": dtw-lip needs el_landmarks and nl_landmarks");
    }
    const FeatureMatrix nl_lms = log_mel_spectrogram(nl, fc.stft, fc.mel);
    const auto el_lm = read_landmarks(e.el_landmarks);
    const auto nl_lm = read_landmarks(e.nl_landmarks);
    if (el_lm.empty() || nl_lm.empty()) throw Error(Errc::kEmptyInput, e.utt_id + ": empty landmark file");
    const AlignmentPath video = align_dtw_lip(el_lm, nl_lm, cfg.dtw);
    const std::size_t n_src = std::min(el_lms.frames(), kAcousticFramesPerVideoFrame * el_lm.size());
    const std::size_t n_tgt = std::min(nl_lms.frames(), kAcousticFramesPerVideoFrame * nl_lm.size());
    if (n_src != el_lms.frames() || n_src != kAcousticFramesPerVideoFrame * el_lm.size() ||
        n_tgt != nl_lms.frames() || n_tgt != kAcousticFramesPerVideoFrame * nl_lm.size()) {
      out.warnings.push_back(e.utt_id + ": audio/video lengths differ; truncated to " + std::to_string(n_src) +
                             " source and " + std::to_string(n_tgt) + " target frames");
    }
    out.src = head_rows(el_lms.data, n_src);
    out.path = clip_path(video, n_src, n_tgt);
    out.tgt = apply_warp(out.path, head_rows(nl_lms.data, n_tgt));
  } else {
    if (method == AlignMethod::kDtwWsola) nl = stretch_to_length(nl, el.size(), cfg.wsola);
    const FeatureMatrix nl_lms = log_mel_spectrogram(nl, fc.stft, fc.mel);
    out.path = dtw(cost_matrix_mcc(mcc_from_logmel(el_lms, fc.mcc), mcc_from_logmel(nl_lms, fc.mcc)), cfg.dtw);
    out.src = el_lms.data;
    out.tgt = apply_warp(out.path, nl_lms.data);
  }

  if (!e.el_visual.empty()) {
    out.visual = upsample_to_audio(read_feature_file(e.el_visual), out.src.rows());
  } else if (!e.el_landmarks.empty()) {
    out.visual = upsample_to_audio(landmark_features(read_landmarks(e.el_landmarks)), out.src.rows());
  }
  return out;
}

}  // namespace

const char* align_method_name(AlignMethod m) noexcept {
  switch (m) {
    case AlignMethod::kDtwMcc: return "dtw-mcc";
    case AlignMethod::kDtwLip: return "dtw-lip";
    case AlignMethod::kDtwWsola: return "dtw-wsola";
  }
  return "unknown";
}

AlignMethod parse_align_method(const std::string& name) {
  for (auto m : {AlignMethod::kDtwMcc, AlignMethod::kDtwLip, AlignMethod::kDtwWsola}) {
    if (name == align_method_name(m)) return m;
  }
  throw Error(Errc::kConfigError, "unknown alignment method '" + name + "'");
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<CorpusEntry> read_corpus_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kNotFound, path.string());
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& cell) -> fs::path {
    if (cell.empty()) return {};
    const fs::path p(cell);
    return p.is_absolute() ? p : base / p;
  };

  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::kParseError, path.string() + ": empty manifest");
  const auto header = split(line, ',');
  if (header.size() < 3 || header[0] != "utt_id" || header[1] != "el_wav" || header[2] != "nl_wav") {
    throw Error(Errc::kParseError, path.string() + ": header must start with utt_id,el_wav,nl_wav");
  }
  std::vector<CorpusEntry> corpus;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw Error(Errc::kParseError, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(header.size()) + " columns");
    }
    CorpusEntry e;
    for (std::size_t c = 0; c < header.size(); ++c) {
      const auto& h = header[c];
      if (h == "utt_id") e.utt_id = cells[c];
      else if (h == "el_wav") e.el_wav = resolve(cells[c]);
      else if (h == "nl_wav") e.nl_wav = resolve(cells[c]);
      else if (h == "el_landmarks") e.el_landmarks = resolve(cells[c]);
      else if (h == "nl_landmarks") e.nl_landmarks = resolve(cells[c]);
      else if (h == "el_visual") e.el_visual = resolve(cells[c]);
      else throw Error(Errc::kParseError, path.string() + ": unknown column '" + h + "'");
    }
    if (e.utt_id.empty() || e.utt_id.find_first_of("/\\.") != std::string::npos) {
      throw Error(Errc::kParseError, path.string() + ":" + std::to_string(line_no) +
                                         ": utt_id must be non-empty without '/', '\\' or '.'");
    }
    corpus.push_back(std::move(e));
  }
  if (corpus.empty()) throw Error(Errc::kEmptyDataset, path.string() + ": no utterances");

  // Validate every referenced file before any stage runs.
  for (const auto& e : corpus) {
    for (const auto* p : {&e.el_wav, &e.nl_wav, &e.el_landmarks, &e.nl_landmarks, &e.el_visual}) {
      if (!p->empty() && !fs::is_regular_file(*p)) {
        throw Error(Errc::kNotFound, e.utt_id + ": " + p->string());
      }
    }
  }
  return corpus;
}

void write_path_csv(const AlignmentPath& path, const fs::path& file) {
  std::string text;
  for (const auto& [i, j] : path.pairs) text += std::to_string(i) + "," + std::to_string(j) + "\n";
  write_text(file, text);
}

AlignmentPath read_path_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::kNotFound, file.string());
  AlignmentPath p;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2) throw Error(Errc::kParseError, file.string() + ": bad path row '" + line + "'");
    try {
      p.pairs.emplace_back(std::stoull(cells[0]), std::stoull(cells[1]));
    } catch (const std::exception&) {
      throw Error(Errc::kParseError, file.string() + ": bad path row '" + line + "'");
    }
  }
  return p;
}

void prepare_corpus(const std::vector<CorpusEntry>& corpus, AlignMethod method, const PipelineConfig& cfg,
                    const fs::path& out_dir, const LogFn& log) {
  cfg.validate();
  if (corpus.empty()) throw Error(Errc::kEmptyDataset, "empty corpus");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::kIoError, "cannot create " + out_dir.string());

  std::vector<Prepared> results(corpus.size());
  parallel_for(corpus.size(), cfg.jobs, [&](std::size_t i) {
    results[i] = prepare_one(corpus[i], method, cfg);
    const auto& r = results[i];
    const auto stem = out_dir / corpus[i].utt_id;
    write_matrix_file(r.src, stem.string() + ".src.elf1");
    write_matrix_file(r.tgt, stem.string() + ".tgt.elf1");
    if (r.visual) write_feature_file(*r.visual, stem.string() + ".vis.elf1");
    write_path_csv(r.path, stem.string() + ".path.csv");
  });

  std::string list, summary = "utt_id,method,src_frames,path_len,total_cost,mean_cost\n";
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& r = results[i];
    if (log)
      for (const auto& w : r.warnings) log("warning: " + w);
    list += corpus[i].utt_id + "\n";
    summary += corpus[i].utt_id + "," + align_method_name(method) + "," + std::to_string(r.src.rows()) + "," +
               std::to_string(r.path.pairs.size()) + "," + fmt(r.path.total_cost) + "," +
               fmt(r.path.mean_cost()) + "\n";
  }
  write_text(out_dir / "list.txt", list);
  write_text(out_dir / "prepare_summary.csv", summary);
}

std::vector<std::string> read_utterance_list(const fs::path& dir) {
  std::ifstream in(dir / "list.txt");
  if (!in) throw Error(Errc::kNotFound, (dir / "list.txt").string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  if (ids.empty()) throw Error(Errc::kEmptyDataset, (dir / "list.txt").string() + " lists no utterances");
  return ids;
}

TrainResult train_from_dir(const fs::path& prepared_dir, ModelMode mode, const PipelineConfig& cfg,
                           const fs::path& checkpoint_dir, const LogFn& log) {
  cfg.validate();
  const auto ids = read_utterance_list(prepared_dir);
  std::vector<TrainingExample> data;
  for (const auto& id : ids) {
    const auto stem = (prepared_dir / id).string();
    TrainingExample ex;
    ex.acoustic = read_matrix_file(stem + ".src.elf1");
    ex.target = read_matrix_file(stem + ".tgt.elf1");
    if (uses_visual(mode)) {
      const fs::path vis = stem + ".vis.elf1";
      if (!fs::exists(vis)) throw Error(Errc::kNotFound, vis.string() + " (needed by " + model_mode_name(mode) + ")");
      ex.visual = read_feature_file(vis);
    }
    data.push_back(std::move(ex));
  }

  ModelConfig mc = cfg.model;
  mc.mode = mode;
  mc.acoustic_dim = data.front().acoustic.cols();
  mc.output_dim = data.front().target.cols();
  if (uses_visual(mode)) {
    mc.visual_dim = data.front().visual->dim();
    mc.visual_layers = data.front().visual->num_layers();
  }
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  TrainResult result = train(data, tc, mc, [&](std::size_t epoch, double loss) {
    if (log) log("epoch " + std::to_string(epoch + 1) + " loss " + fmt(loss));
  });

  save_checkpoint(result.model, checkpoint_dir.string());
  std::string hist = "epoch,loss\n";
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
    hist += std::to_string(e + 1) + "," + fmt(result.loss_history[e]) + "\n";
  }
  write_text(checkpoint_dir / "loss_history.csv", hist);
  return result;
}

void convert_dir(const fs::path& checkpoint_dir, const fs::path& input_dir, const fs::path& out_dir,
                 std::size_t jobs) {
  const Model model = load_checkpoint(checkpoint_dir.string());
  const auto ids = read_utterance_list(input_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::kIoError, "cannot create " + out_dir.string());
  parallel_for(ids.size(), jobs, [&](std::size_t i) {
    const auto stem = (input_dir / ids[i]).string();
    FeatureMatrix src;
    src.data = read_matrix_file(stem + ".src.elf1");
    src.kind = src.data.cols() == kLmsDim ? FeatureKind::kLms : FeatureKind::kOther;
    FeatureMatrix out;
    if (uses_visual(model.config.mode)) {
      const auto vis = read_feature_file(stem + ".vis.elf1");
      out = convert(model, src, &vis);
    } else {
      out = convert(model, src, nullptr);
    }
    write_matrix_file(out.data, out_dir / (ids[i] + ".lms.elf1"));
  });
  std::string list;
  for (const auto& id : ids) list += id + "\n";
  write_text(out_dir / "list.txt", list);
}

EvalReport eval_dirs(const fs::path& converted_dir, const fs::path& target_dir, const std::string& label,
                     const PipelineConfig& cfg) {
  if (!fs::is_directory(converted_dir)) throw Error(Errc::kNotFound, converted_dir.string());
  if (!fs::is_directory(target_dir)) throw Error(Errc::kNotFound, target_dir.string());
  const std::string suffix = ".lms.elf1";
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(converted_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      ids.push_back(name.substr(0, name.size() - suffix.size()));
    }
  }
  std::sort(ids.begin(), ids.end());
  if (ids.empty()) throw Error(Errc::kEmptyDataset, converted_dir.string() + " has no *.lms.elf1 files");

  auto load = [](const fs::path& p) {
    FeatureMatrix f;
    f.data = read_matrix_file(p);
    f.kind = f.data.cols() == kLmsDim ? FeatureKind::kLms : FeatureKind::kMcc;
    return f;
  };
  std::vector<EvalPair> pairs(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    fs::path tgt = target_dir / (ids[i] + ".tgt.elf1");
    if (!fs::exists(tgt)) tgt = target_dir / (ids[i] + suffix);
    if (!fs::exists(tgt)) throw Error(Errc::kNotFound, "no target features for " + ids[i] + " in " + target_dir.string());
    pairs[i] = {ids[i], load(converted_dir / (ids[i] + suffix)), load(tgt)};
  }
  return evaluate_corpus(pairs, label, cfg.features.mcc);
}

}  // namespace elvc

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

// elvc: command-line front end over the elvc C API.

#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "elvc/elvc.h"

namespace {

struct CommandError {
  elvc_status status;
  std::string message;
};

void check(elvc_status s) {
  if (s != ELVC_OK) throw CommandError{s, elvc_last_error()};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ConfigPtr = std::unique_ptr<elvc_config, Deleter<elvc_config, elvc_config_free>>;
using WavePtr = std::unique_ptr<elvc_waveform, Deleter<elvc_waveform, elvc_waveform_free>>;
using FeatPtr = std::unique_ptr<elvc_features, Deleter<elvc_features, elvc_features_free>>;
using LandmarksPtr = std::unique_ptr<elvc_landmarks, Deleter<elvc_landmarks, elvc_landmarks_free>>;
using PathPtr = std::unique_ptr<elvc_path, Deleter<elvc_path, elvc_path_free>>;
using ModelPtr = std::unique_ptr<elvc_model, Deleter<elvc_model, elvc_model_free>>;
using ReportPtr = std::unique_ptr<elvc_report, Deleter<elvc_report, elvc_report_free>>;

void log_to_stderr(const char* msg, void*) { std::fprintf(stderr, "%s\n", msg); }

WavePtr load_wav(const std::string& path) {
  elvc_waveform* w = nullptr;
  check(elvc_wav_read(path.c_str(), &w));
  return WavePtr(w);
}

FeatPtr load_features(const std::string& path) {
  elvc_features* f = nullptr;
  check(elvc_features_read(path.c_str(), &f));
  return FeatPtr(f);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw CommandError{ELVC_ERR_IO, "IoError: cannot write " + path};
}

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::vector<std::string> overrides;
};

ConfigPtr build_config(const Globals& g) {
  elvc_config* raw = nullptr;
  if (g.config_path.empty()) {
    check(elvc_config_create(&raw));
  } else {
    check(elvc_config_load(g.config_path.c_str(), &raw));
  }
  ConfigPtr cfg(raw);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw CommandError{ELVC_ERR_CONFIG, "ConfigError: --set expects key=value, got '" + kv + "'"};
    }
    check(elvc_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
  }
  if (g.seed) check(elvc_config_set(cfg.get(), "seed", std::to_string(*g.seed).c_str()));
  if (g.jobs) check(elvc_config_set(cfg.get(), "jobs", std::to_string(*g.jobs).c_str()));
  check(elvc_config_validate(cfg.get()));
  return cfg;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electrolaryngeal-to-natural speech alignment, feature fusion and conversion toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(elvc_version()));

  Globals g;
  app.add_option("--config", g.config_path, "Pipeline config file (section.key=value lines)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Random seed (overrides config)");
  app.add_option("--jobs", g.jobs, "Worker threads for per-utterance stages")->check(CLI::PositiveNumber);
  app.add_option("--set", g.overrides, "Config override key=value (repeatable)");
  app.fallthrough();

  // features
  auto* features = app.add_subcommand("features", "Extract log-mel (and optionally MCC) features from a WAV");
  std::string feat_in, feat_lms, feat_mcc;
  features->add_option("input", feat_in, "Input 16 kHz mono WAV")->required()->check(CLI::ExistingFile);
  features->add_option("--lms", feat_lms, "Output log-mel ELF1 file");
  features->add_option("--mcc", feat_mcc, "Output MCC ELF1 file");

  // stretch
  auto* stretch = app.add_subcommand("stretch", "WSOLA time-scale modification");
  std::string st_in, st_target, st_out;
  std::optional<double> st_alpha;
  stretch->add_option("--input", st_in, "Input WAV")->required()->check(CLI::ExistingFile);
  auto* tgt_opt = stretch->add_option("--target-wav", st_target, "Match this file's length")->check(CLI::ExistingFile);
  auto* alpha_opt = stretch->add_option("--alpha", st_alpha, "Stretch factor (output/input length)");
  tgt_opt->excludes(alpha_opt);
  stretch->add_option("--output", st_out, "Output WAV")->required();

  // align
  auto* align = app.add_subcommand("align", "Align an EL/NL pair and write the path as CSV");
  std::string al_method = "dtw-mcc", al_el, al_nl, al_out = "path.csv", al_stretched, al_summary;
  align->add_option("--method", al_method, "dtw-mcc | dtw-lip | dtw-wsola")
      ->check(CLI::IsMember({"dtw-mcc", "dtw-lip", "dtw-wsola"}));
  align->add_option("el", al_el, "EL input (WAV, or landmark CSV for dtw-lip)")->required()->check(CLI::ExistingFile);
  align->add_option("nl", al_nl, "NL input (WAV, or landmark CSV for dtw-lip)")->required()->check(CLI::ExistingFile);
  align->add_option("--output", al_out, "Path CSV (rows i,j)");
  align->add_option("--stretched", al_stretched, "dtw-wsola: write the length-matched NL WAV here");
  align->add_option("--summary", al_summary, "Summary file (default: <output>.summary.txt)");

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Align a corpus and write the paired training set");
  std::string pr_manifest, pr_method = "dtw-wsola", pr_out;
  prepare->add_option("--manifest", pr_manifest, "Corpus CSV: utt_id,el_wav,nl_wav[,el_landmarks,nl_landmarks[,el_visual]]");
  prepare->add_option("--align-method", pr_method, "dtw-mcc | dtw-lip | dtw-wsola")
      ->check(CLI::IsMember({"dtw-mcc", "dtw-lip", "dtw-wsola"}));
  prepare->add_option("--output", pr_out, "Output directory");

  // train
  auto* train = app.add_subcommand("train", "Train a conversion model on a prepared set");
  std::string tr_data, tr_mode = "audio_only", tr_out;
  std::optional<std::size_t> tr_epochs;
  train->add_option("--data", tr_data, "Prepared directory")->required()->check(CLI::ExistingDirectory);
  train->add_option("--mode", tr_mode, "audio_only | multimodal | multimodal_ft")
      ->check(CLI::IsMember({"audio_only", "multimodal", "multimodal_ft"}));
  train->add_option("--output", tr_out, "Checkpoint directory")->required();
  train->add_option("--epochs", tr_epochs, "Epochs (overrides train.epochs)");

  // convert
  auto* convert = app.add_subcommand("convert", "Convert source features with a trained model");
  std::string cv_ckpt, cv_in, cv_out, cv_acoustic, cv_visual;
  convert->add_option("--checkpoint", cv_ckpt, "Checkpoint directory")->required()->check(CLI::ExistingDirectory);
  convert->add_option("--input", cv_in, "Prepared directory (uses list.txt)");
  convert->add_option("--acoustic", cv_acoustic, "Single source log-mel ELF1 file")->check(CLI::ExistingFile);
  convert->add_option("--visual", cv_visual, "Visual ELF1 for --acoustic (acoustic frame rate)")->check(CLI::ExistingFile);
  convert->add_option("--output", cv_out, "Output directory, or file with --acoustic")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "MCD report between converted and target features");
  std::string ev_conv, ev_tgt, ev_out = "report.csv", ev_label, ev_merge, ev_summary;
  eval->add_option("--converted", ev_conv, "Directory of <id>.lms.elf1")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--target", ev_tgt, "Directory of <id>.tgt.elf1 or <id>.lms.elf1")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--output", ev_out, "Report CSV");
  eval->add_option("--label", ev_label, "Method label for the summary");
  eval->add_option("--merge-external", ev_merge, "CSV of externally computed metrics keyed by utt_id")->check(CLI::ExistingFile);
  eval->add_option("--summary", ev_summary, "Summary text file (default: <output>.summary.txt)");

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of every trainable layer kind");
  std::size_t gc_configs = 20;
  gradcheck->add_option("--configs", gc_configs, "Random configurations per model mode")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    const ConfigPtr cfg = build_config(g);

    if (*features) {
      if (feat_lms.empty() && feat_mcc.empty()) {
        std::fprintf(stderr, "error: give --lms and/or --mcc\n");
        return ELVC_ERR_INVALID_ARGUMENT;
      }
      const auto w = load_wav(feat_in);
      elvc_features* lms = nullptr;
      check(elvc_log_mel(cfg.get(), w.get(), &lms));
      const FeatPtr lms_ptr(lms);
      if (!feat_lms.empty()) check(elvc_features_write(lms, feat_lms.c_str()));
      if (!feat_mcc.empty()) {
        elvc_features* mcc = nullptr;
        check(elvc_mcc(cfg.get(), lms, &mcc));
        const FeatPtr mcc_ptr(mcc);
        check(elvc_features_write(mcc, feat_mcc.c_str()));
      }
    } else if (*stretch) {
      if (st_target.empty() && !st_alpha) {
        std::fprintf(stderr, "error: give --target-wav or --alpha\n");
        return ELVC_ERR_INVALID_ARGUMENT;
      }
      const auto w = load_wav(st_in);
      elvc_waveform* out = nullptr;
      if (!st_target.empty()) {
        const auto t = load_wav(st_target);
        check(elvc_stretch_to_length(cfg.get(), w.get(), elvc_waveform_length(t.get()), &out));
      } else {
        check(elvc_stretch(cfg.get(), w.get(), *st_alpha, &out));
      }
      const WavePtr out_ptr(out);
      check(elvc_wav_write(out, st_out.c_str()));
    } else if (*align) {
      elvc_align_method method{};
      check(elvc_parse_align_method(al_method.c_str(), &method));
      elvc_path* raw_path = nullptr;
      std::size_t n = 0, m = 0;
      if (method == ELVC_ALIGN_DTW_LIP) {
        elvc_landmarks *el = nullptr, *nl = nullptr;
        check(elvc_landmarks_read(al_el.c_str(), &el));
        const LandmarksPtr el_ptr(el);
        check(elvc_landmarks_read(al_nl.c_str(), &nl));
        const LandmarksPtr nl_ptr(nl);
        check(elvc_align_dtw_lip(cfg.get(), el, nl, &raw_path));
        n = 4 * elvc_landmarks_frames(el);
        m = 4 * elvc_landmarks_frames(nl);
      } else {
        const auto el = load_wav(al_el);
        const auto nl = load_wav(al_nl);
        if (method == ELVC_ALIGN_DTW_WSOLA) {
          elvc_waveform* stretched = nullptr;
          check(elvc_align_dtw_wsola(cfg.get(), el.get(), nl.get(), &stretched, &raw_path));
          const WavePtr st_ptr(stretched);
          if (!al_stretched.empty()) check(elvc_wav_write(stretched, al_stretched.c_str()));
        } else {
          check(elvc_align_dtw_mcc(cfg.get(), el.get(), nl.get(), &raw_path));
        }
      }
      const PathPtr path(raw_path);
      const std::size_t len = elvc_path_length(path.get());
      if (method != ELVC_ALIGN_DTW_LIP && len > 0) {
        check(elvc_path_pair(path.get(), len - 1, &n, &m));
        ++n;
        ++m;
      }
      check(elvc_path_write_csv(path.get(), al_out.c_str()));
      const double total = elvc_path_total_cost(path.get());
      const std::string summary = "method=" + al_method + "\nsource_frames=" + std::to_string(n) +
                                  "\ntarget_frames=" + std::to_string(m) + "\npath_length=" + std::to_string(len) +
                                  "\ntotal_cost=" + fmt(total) +
                                  "\nmean_cost=" + fmt(len ? total / static_cast<double>(len) : 0.0) + "\n";
      write_text(al_summary.empty() ? al_out + ".summary.txt" : al_summary, summary);
      std::fprintf(stderr, "%s: total cost %s over %zu pairs\n", al_method.c_str(), fmt(total).c_str(), len);
    } else if (*prepare) {
      if (pr_manifest.empty() || pr_out.empty()) {
        std::fprintf(stderr, "error: prepare needs --manifest and --output (or paths.* in the config)\n");
        return ELVC_ERR_CONFIG;
      }
      elvc_align_method method{};
      check(elvc_parse_align_method(pr_method.c_str(), &method));
      check(elvc_prepare(cfg.get(), pr_manifest.c_str(), method, pr_out.c_str(), log_to_stderr, nullptr));
    } else if (*train) {
      if (tr_epochs) check(elvc_config_set(cfg.get(), "train.epochs", std::to_string(*tr_epochs).c_str()));
      elvc_mode mode{};
      check(elvc_parse_mode(tr_mode.c_str(), &mode));
      check(elvc_train(cfg.get(), tr_data.c_str(), mode, tr_out.c_str(), log_to_stderr, nullptr));
    } else if (*convert) {
      if (!cv_acoustic.empty()) {
        elvc_model* raw = nullptr;
        check(elvc_model_load(cv_ckpt.c_str(), &raw));
        const ModelPtr model(raw);
        const auto acoustic = load_features(cv_acoustic);
        FeatPtr visual;
        if (!cv_visual.empty()) visual = load_features(cv_visual);
        elvc_features* out = nullptr;
        check(elvc_model_convert(model.get(), acoustic.get(), visual.get(), &out));
        const FeatPtr out_ptr(out);
        check(elvc_features_write(out, cv_out.c_str()));
      } else if (!cv_in.empty()) {
        check(elvc_convert_dir(cfg.get(), cv_ckpt.c_str(), cv_in.c_str(), cv_out.c_str()));
      } else {
        std::fprintf(stderr, "error: convert needs --input DIR or --acoustic FILE\n");
        return ELVC_ERR_INVALID_ARGUMENT;
      }
    } else if (*eval) {
      elvc_report* raw = nullptr;
      check(elvc_eval_dirs(cfg.get(), ev_conv.c_str(), ev_tgt.c_str(), ev_label.c_str(), &raw));
      const ReportPtr report(raw);
      if (!ev_merge.empty()) check(elvc_report_merge_external(report.get(), ev_merge.c_str()));
      check(elvc_report_write_csv(report.get(), ev_out.c_str()));
      const std::string summary = elvc_report_summary(report.get());
      write_text(ev_summary.empty() ? ev_out + ".summary.txt" : ev_summary, summary);
      std::fprintf(stderr, "%s", summary.c_str());
    } else if (*gradcheck) {
      const std::uint64_t seed = g.seed.value_or(1);
      elvc_gradcheck_row rows[8];
      std::size_t count = 0;
      int all_pass = 0;
      check(elvc_gradcheck(seed, gc_configs, rows, 8, &count, &all_pass));
      std::printf("%-8s %8s %8s %14s %s\n", "kind", "configs", "entries", "max_rel_err", "result");
      for (std::size_t i = 0; i < count; ++i) {
        std::printf("%-8s %8zu %8zu %14.3e %s\n", rows[i].kind, rows[i].configs, rows[i].entries,
                    rows[i].max_rel_error, rows[i].pass ? "PASS" : "FAIL");
      }
      return all_pass ? 0 : 1;
    }
  } catch (const CommandError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return static_cast<int>(e.status);
  }
  return 0;
}

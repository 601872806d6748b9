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

#include "elvc/elvc.h"

#include <algorithm>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "align.hpp"
#include "audio_io.hpp"
#include "config.hpp"
#include "dsp.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "gradcheck.hpp"
#include "model.hpp"
#include "pipeline.hpp"
#include "visual.hpp"
#include "wsola.hpp"

struct elvc_config {
  elvc::PipelineConfig cfg;
  std::string text;
};
struct elvc_waveform {
  elvc::Waveform w;
};
struct elvc_features {
  elvc::LayeredFeatureSet set;
};
struct elvc_landmarks {
  elvc::LandmarkSequence seq;
};
struct elvc_path {
  elvc::AlignmentPath path;
};
struct elvc_model {
  elvc::Model model;
};
struct elvc_report {
  elvc::EvalReport report;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
elvc_status guarded(F&& fn) noexcept {
  try {
    fn();
    return ELVC_OK;
  } catch (const elvc::Error& e) {
    g_last_error = e.what();
    return static_cast<elvc_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return ELVC_ERR_INTERNAL;
}

template <typename... Ptrs>
void require(const Ptrs*... ptrs) {
  if (((ptrs == nullptr) || ...)) throw elvc::Error(elvc::Errc::kInvalidArgument, "null argument");
}

const elvc::PipelineConfig& config_or_default(const elvc_config* cfg) {
  static const elvc::PipelineConfig defaults;
  return cfg ? cfg->cfg : defaults;
}

elvc::LogFn make_log(elvc_log_fn log, void* user) {
  if (!log) return {};
  return [log, user](const std::string& msg) { log(msg.c_str(), user); };
}

elvc::FeatureMatrix as_feature_matrix(const elvc_features* f, elvc::FeatureKind kind_if_80) {
  if (f->set.num_layers() != 1) {
    throw elvc::Error(elvc::Errc::kShapeError,
                      "expected a single-layer feature set, got " + std::to_string(f->set.num_layers()));
  }
  elvc::FeatureMatrix m;
  m.data = f->set.layers.front();
  m.kind = m.data.cols() == elvc::kLmsDim ? kind_if_80 : elvc::FeatureKind::kOther;
  return m;
}

template <typename T>
T* wrap(T value) {
  return new T(std::move(value));
}

elvc_features* wrap_matrix(elvc::Matrix m, const std::string& name = {}) {
  auto* f = new elvc_features;
  f->set.layers.push_back(std::move(m));
  f->set.extractor_name = name;
  return f;
}

constexpr elvc::AlignMethod to_method(elvc_align_method m) {
  switch (m) {
    case ELVC_ALIGN_DTW_LIP: return elvc::AlignMethod::kDtwLip;
    case ELVC_ALIGN_DTW_WSOLA: return elvc::AlignMethod::kDtwWsola;
    default: return elvc::AlignMethod::kDtwMcc;
  }
}

constexpr elvc::ModelMode to_mode(elvc_mode m) {
  switch (m) {
    case ELVC_MODE_MULTIMODAL: return elvc::ModelMode::kMultimodal;
    case ELVC_MODE_MULTIMODAL_FT: return elvc::ModelMode::kMultimodalFt;
    default: return elvc::ModelMode::kAudioOnly;
  }
}

void check_enum(int value, int max) {
  if (value < 0 || value > max) throw elvc::Error(elvc::Errc::kInvalidArgument, "enum value out of range");
}

}  // namespace

extern "C" {

const char* elvc_version(void) { return "0.1.0"; }

const char* elvc_status_name(elvc_status status) {
  if (status == ELVC_OK) return "Ok";
  if (status == ELVC_ERR_INTERNAL) return "Internal";
  if (status >= ELVC_ERR_NOT_FOUND && status <= ELVC_ERR_INVALID_ARGUMENT) {
    return elvc::errc_name(static_cast<elvc::Errc>(status));
  }
  return "Unknown";
}

const char* elvc_last_error(void) { return g_last_error.c_str(); }

elvc_status elvc_parse_align_method(const char* name, elvc_align_method* out) {
  return guarded([&] {
    require(name, out);
    *out = static_cast<elvc_align_method>(elvc::parse_align_method(name));
  });
}

elvc_status elvc_parse_mode(const char* name, elvc_mode* out) {
  return guarded([&] {
    require(name, out);
    *out = static_cast<elvc_mode>(elvc::parse_model_mode(name));
  });
}

// ---- config ----

elvc_status elvc_config_create(elvc_config** out) {
  return guarded([&] {
    require(out);
    *out = new elvc_config;
  });
}

elvc_status elvc_config_load(const char* path, elvc_config** out) {
  return guarded([&] {
    require(path, out);
    auto c = std::make_unique<elvc_config>();
    c->cfg = elvc::load_config(path);
    *out = c.release();
  });
}

elvc_status elvc_config_set(elvc_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, key, value);
    elvc::PipelineConfig next = cfg->cfg;
    elvc::set_config_value(next, key, value);
    cfg->cfg = std::move(next);
  });
}

elvc_status elvc_config_validate(const elvc_config* cfg) {
  return guarded([&] {
    require(cfg);
    cfg->cfg.validate();
  });
}

const char* elvc_config_text(elvc_config* cfg) {
  if (!cfg) return "";
  cfg->text = elvc::config_to_text(cfg->cfg);
  return cfg->text.c_str();
}

void elvc_config_free(elvc_config* cfg) { delete cfg; }

// ---- waveforms ----

elvc_status elvc_waveform_create(const double* samples, size_t count, int sample_rate, elvc_waveform** out) {
  return guarded([&] {
    require(out);
    if (count > 0) require(samples);
    if (sample_rate <= 0) throw elvc::Error(elvc::Errc::kInvalidArgument, "sample rate must be positive");
    elvc::Waveform w;
    w.samples.assign(samples, samples + count);
    w.sample_rate = sample_rate;
    *out = wrap(elvc_waveform{std::move(w)});
  });
}

elvc_status elvc_wav_read(const char* path, elvc_waveform** out) {
  return guarded([&] {
    require(path, out);
    *out = wrap(elvc_waveform{elvc::read_wav(path)});
  });
}

elvc_status elvc_wav_write(const elvc_waveform* w, const char* path) {
  return guarded([&] {
    require(w, path);
    elvc::write_wav(w->w, path);
  });
}

size_t elvc_waveform_length(const elvc_waveform* w) { return w ? w->w.size() : 0; }
int elvc_waveform_sample_rate(const elvc_waveform* w) { return w ? w->w.sample_rate : 0; }
const double* elvc_waveform_samples(const elvc_waveform* w) { return w ? w->w.samples.data() : nullptr; }
void elvc_waveform_free(elvc_waveform* w) { delete w; }

// ---- features ----

elvc_status elvc_features_create(size_t layers, size_t frames, size_t dim, const double* data,
                                 elvc_features** out) {
  return guarded([&] {
    require(data, out);
    auto f = std::make_unique<elvc_features>();
    const size_t per_layer = frames * dim;
    for (size_t l = 0; l < layers; ++l) {
      f->set.layers.emplace_back(frames, dim, std::vector<double>(data + l * per_layer, data + (l + 1) * per_layer));
    }
    f->set.validate();
    *out = f.release();
  });
}

elvc_status elvc_features_read(const char* path, elvc_features** out) {
  return guarded([&] {
    require(path, out);
    *out = wrap(elvc_features{elvc::read_feature_file(path)});
  });
}

elvc_status elvc_features_write(const elvc_features* f, const char* path) {
  return guarded([&] {
    require(f, path);
    elvc::write_feature_file(f->set, path);
  });
}

void elvc_features_shape(const elvc_features* f, size_t* layers, size_t* frames, size_t* dim) {
  if (layers) *layers = f ? f->set.num_layers() : 0;
  if (frames) *frames = f ? f->set.frames() : 0;
  if (dim) *dim = f ? f->set.dim() : 0;
}

const double* elvc_features_layer(const elvc_features* f, size_t layer) {
  if (!f || layer >= f->set.num_layers()) return nullptr;
  return f->set.layers[layer].data().data();
}

void elvc_features_free(elvc_features* f) { delete f; }

// ---- acoustic features ----

elvc_status elvc_log_mel(const elvc_config* cfg, const elvc_waveform* w, elvc_features** out) {
  return guarded([&] {
    require(w, out);
    const auto& c = config_or_default(cfg).features;
    *out = wrap_matrix(elvc::log_mel_spectrogram(w->w, c.stft, c.mel).data, "lms");
  });
}

elvc_status elvc_mcc(const elvc_config* cfg, const elvc_features* lms, elvc_features** out) {
  return guarded([&] {
    require(lms, out);
    const auto m = as_feature_matrix(lms, elvc::FeatureKind::kLms);
    *out = wrap_matrix(elvc::mcc_from_logmel(m, config_or_default(cfg).features.mcc).data, "mcc");
  });
}

elvc_status elvc_frame_mcd(const double* a, const double* b, size_t dim, double* out_db) {
  return guarded([&] {
    require(a, b, out_db);
    *out_db = elvc::frame_mcd({a, dim}, {b, dim});
  });
}

// ---- WSOLA ----

elvc_status elvc_stretch(const elvc_config* cfg, const elvc_waveform* w, double alpha, elvc_waveform** out) {
  return guarded([&] {
    require(w, out);
    *out = wrap(elvc_waveform{elvc::stretch(w->w, alpha, config_or_default(cfg).wsola)});
  });
}

elvc_status elvc_stretch_to_length(const elvc_config* cfg, const elvc_waveform* w, size_t target,
                                   elvc_waveform** out) {
  return guarded([&] {
    require(w, out);
    *out = wrap(elvc_waveform{elvc::stretch_to_length(w->w, target, config_or_default(cfg).wsola)});
  });
}

// ---- landmarks ----

elvc_status elvc_landmarks_read(const char* path, elvc_landmarks** out) {
  return guarded([&] {
    require(path, out);
    *out = wrap(elvc_landmarks{elvc::read_landmarks(path)});
  });
}

size_t elvc_landmarks_frames(const elvc_landmarks* lm) { return lm ? lm->seq.size() : 0; }

elvc_status elvc_landmark_features(const elvc_landmarks* lm, elvc_features** out) {
  return guarded([&] {
    require(lm, out);
    *out = wrap(elvc_features{elvc::landmark_features(lm->seq)});
  });
}

void elvc_landmarks_free(elvc_landmarks* lm) { delete lm; }

// ---- alignment ----

elvc_status elvc_dtw(const double* cost, size_t n, size_t m, size_t band, elvc_path** out) {
  return guarded([&] {
    require(out);
    if (n == 0 || m == 0) throw elvc::Error(elvc::Errc::kEmptyInput, "cost matrix is empty");
    require(cost);
    elvc::CostMatrix c{elvc::Matrix(n, m, std::vector<double>(cost, cost + n * m))};
    elvc::DtwOptions opts;
    if (band > 0) opts.band = band;
    *out = wrap(elvc_path{elvc::dtw(c, opts)});
  });
}

elvc_status elvc_align_dtw_mcc(const elvc_config* cfg, const elvc_waveform* el, const elvc_waveform* nl,
                               elvc_path** out) {
  return guarded([&] {
    require(el, nl, out);
    const auto& c = config_or_default(cfg);
    *out = wrap(elvc_path{elvc::align_dtw_mcc(el->w, nl->w, c.features, c.dtw)});
  });
}

elvc_status elvc_align_dtw_lip(const elvc_config* cfg, const elvc_landmarks* el, const elvc_landmarks* nl,
                               elvc_path** out) {
  return guarded([&] {
    require(el, nl, out);
    *out = wrap(elvc_path{elvc::align_dtw_lip(el->seq, nl->seq, config_or_default(cfg).dtw)});
  });
}

elvc_status elvc_align_dtw_wsola(const elvc_config* cfg, const elvc_waveform* el, const elvc_waveform* nl,
                                 elvc_waveform** stretched_nl, elvc_path** out) {
  return guarded([&] {
    require(el, nl, out);
    const auto& c = config_or_default(cfg);
    auto result = elvc::align_dtw_wsola(el->w, nl->w, c.features, c.wsola, c.dtw);
    std::unique_ptr<elvc_waveform> stretched(wrap(elvc_waveform{std::move(result.stretched_nl)}));
    *out = wrap(elvc_path{std::move(result.path)});
    if (stretched_nl) *stretched_nl = stretched.release();
  });
}

size_t elvc_path_length(const elvc_path* p) { return p ? p->path.pairs.size() : 0; }

elvc_status elvc_path_pair(const elvc_path* p, size_t k, size_t* i, size_t* j) {
  return guarded([&] {
    require(p, i, j);
    if (k >= p->path.pairs.size()) throw elvc::Error(elvc::Errc::kIndexOutOfBounds, "path index");
    *i = p->path.pairs[k].first;
    *j = p->path.pairs[k].second;
  });
}

double elvc_path_total_cost(const elvc_path* p) { return p ? p->path.total_cost : 0.0; }

elvc_status elvc_path_write_csv(const elvc_path* p, const char* path) {
  return guarded([&] {
    require(p, path);
    elvc::write_path_csv(p->path, path);
  });
}

elvc_status elvc_apply_warp(const elvc_path* p, const elvc_features* target, elvc_features** out) {
  return guarded([&] {
    require(p, target, out);
    const auto t = as_feature_matrix(target, elvc::FeatureKind::kLms);
    *out = wrap_matrix(elvc::apply_warp(p->path, t.data), target->set.extractor_name);
  });
}

void elvc_path_free(elvc_path* p) { delete p; }

// ---- pipeline ----

elvc_status elvc_prepare(const elvc_config* cfg, const char* manifest, elvc_align_method method,
                         const char* out_dir, elvc_log_fn log, void* user) {
  return guarded([&] {
    require(manifest, out_dir);
    check_enum(method, ELVC_ALIGN_DTW_WSOLA);
    const auto corpus = elvc::read_corpus_manifest(manifest);
    elvc::prepare_corpus(corpus, to_method(method), config_or_default(cfg), out_dir, make_log(log, user));
  });
}

elvc_status elvc_train(const elvc_config* cfg, const char* prepared_dir, elvc_mode mode, const char* checkpoint_dir,
                       elvc_log_fn log, void* user) {
  return guarded([&] {
    require(prepared_dir, checkpoint_dir);
    check_enum(mode, ELVC_MODE_MULTIMODAL_FT);
    elvc::train_from_dir(prepared_dir, to_mode(mode), config_or_default(cfg), checkpoint_dir, make_log(log, user));
  });
}

elvc_status elvc_convert_dir(const elvc_config* cfg, const char* checkpoint_dir, const char* input_dir,
                             const char* out_dir) {
  return guarded([&] {
    require(checkpoint_dir, input_dir, out_dir);
    elvc::convert_dir(checkpoint_dir, input_dir, out_dir, config_or_default(cfg).jobs);
  });
}

elvc_status elvc_eval_dirs(const elvc_config* cfg, const char* converted_dir, const char* target_dir,
                           const char* label, elvc_report** out) {
  return guarded([&] {
    require(converted_dir, target_dir, out);
    *out = wrap(elvc_report{elvc::eval_dirs(converted_dir, target_dir, label ? label : "", config_or_default(cfg)), {}});
  });
}

// ---- models ----

elvc_status elvc_model_load(const char* checkpoint_dir, elvc_model** out) {
  return guarded([&] {
    require(checkpoint_dir, out);
    *out = wrap(elvc_model{elvc::load_checkpoint(checkpoint_dir)});
  });
}

elvc_status elvc_model_save(const elvc_model* m, const char* checkpoint_dir) {
  return guarded([&] {
    require(m, checkpoint_dir);
    elvc::save_checkpoint(m->model, checkpoint_dir);
  });
}

elvc_mode elvc_model_mode(const elvc_model* m) {
  return m ? static_cast<elvc_mode>(m->model.config.mode) : ELVC_MODE_AUDIO_ONLY;
}

elvc_status elvc_model_fusion_weights(const elvc_model* m, double* weights, size_t capacity, size_t* count) {
  return guarded([&] {
    require(m, count);
    const auto w = m->model.fusion.weights();
    *count = w.size();
    if (capacity > 0) require(weights);
    std::copy_n(w.begin(), std::min(capacity, w.size()), weights);
  });
}

elvc_status elvc_model_convert(const elvc_model* m, const elvc_features* acoustic, const elvc_features* visual,
                               elvc_features** out) {
  return guarded([&] {
    require(m, acoustic, out);
    const auto a = as_feature_matrix(acoustic, elvc::FeatureKind::kLms);
    const auto result = elvc::convert(m->model, a, visual ? &visual->set : nullptr);
    *out = wrap_matrix(result.data, "lms");
  });
}

void elvc_model_free(elvc_model* m) { delete m; }

// ---- reports ----

size_t elvc_report_count(const elvc_report* r) { return r ? r->report.count() : 0; }
double elvc_report_mean(const elvc_report* r) { return r ? r->report.mean : 0.0; }
double elvc_report_stdev(const elvc_report* r) { return r ? r->report.stdev : 0.0; }

elvc_status elvc_report_utterance(const elvc_report* r, size_t k, const char** utt_id, double* mcd_db) {
  return guarded([&] {
    require(r, utt_id, mcd_db);
    if (k >= r->report.count()) throw elvc::Error(elvc::Errc::kIndexOutOfBounds, "report row");
    *utt_id = r->report.utt_ids[k].c_str();
    *mcd_db = r->report.mcd_db[k];
  });
}

elvc_status elvc_report_merge_external(elvc_report* r, const char* csv_path) {
  return guarded([&] {
    require(r, csv_path);
    elvc::merge_external(r->report, csv_path);
  });
}

elvc_status elvc_report_write_csv(const elvc_report* r, const char* path) {
  return guarded([&] {
    require(r, path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << elvc::report_csv(r->report);
    if (!out) throw elvc::Error(elvc::Errc::kIoError, std::string("cannot write ") + path);
  });
}

const char* elvc_report_summary(elvc_report* r) {
  if (!r) return "";
  r->summary = elvc::report_summary(r->report);
  return r->summary.c_str();
}

void elvc_report_free(elvc_report* r) { delete r; }

// ---- gradcheck ----

elvc_status elvc_gradcheck(uint64_t seed, size_t configs, elvc_gradcheck_row* rows, size_t capacity, size_t* count,
                           int* all_pass) {
  return guarded([&] {
    require(count, all_pass);
    elvc::GradcheckOptions opts;
    opts.seed = seed;
    if (configs > 0) opts.configs = configs;
    const auto report = elvc::run_gradcheck(opts);
    static constexpr const char* kKinds[] = {"conv1d", "gru", "linear", "fusion", "ft_gru"};
    *count = report.rows.size();
    *all_pass = report.all_pass ? 1 : 0;
    if (capacity > 0) require(rows);
    for (size_t i = 0; i < std::min(capacity, report.rows.size()); ++i) {
      const auto& row = report.rows[i];
      const char* kind = "unknown";
      for (const char* k : kKinds) {
        if (row.kind == k) kind = k;
      }
      rows[i] = {kind, row.configs, row.entries, row.max_rel_error, row.pass ? 1 : 0};
    }
  });
}

}  // extern "C"

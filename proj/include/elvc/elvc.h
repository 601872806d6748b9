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

/* C interface to the elvc alignment, feature and conversion toolkit.
 *
 * Every function returns an elvc_status. On failure, elvc_last_error()
 * returns a message for the most recent failing call on the calling thread.
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function; *_free accepts NULL. Output handles are written
 * only on success. Pointers returned by accessors stay valid until the owning
 * handle is freed or mutated.
 */
#ifndef ELVC_ELVC_H_
#define ELVC_ELVC_H_

#include <stddef.h>
#include <stdint.h>

#if defined(ELVC_BUILDING_LIBRARY)
#define ELVC_API __attribute__((visibility("default")))
#else
#define ELVC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum elvc_status {
  ELVC_OK = 0,
  ELVC_ERR_NOT_FOUND = 1,
  ELVC_ERR_UNSUPPORTED_FORMAT = 2,
  ELVC_ERR_BAD_SAMPLE_RATE = 3,
  ELVC_ERR_IO = 4,
  ELVC_ERR_PARSE = 5,
  ELVC_ERR_BAD_MAGIC = 6,
  ELVC_ERR_TRUNCATED_FILE = 7,
  ELVC_ERR_SHAPE = 8,
  ELVC_ERR_INPUT_TOO_SHORT = 9,
  ELVC_ERR_EMPTY_INPUT = 10,
  ELVC_ERR_INDEX_OUT_OF_BOUNDS = 11,
  ELVC_ERR_BAD_DIM = 12,
  ELVC_ERR_EMPTY_DATASET = 13,
  ELVC_ERR_MODE_MISMATCH = 14,
  ELVC_ERR_CONFIG = 15,
  ELVC_ERR_INVALID_ARGUMENT = 16,
  ELVC_ERR_INTERNAL = 100
} elvc_status;

typedef enum elvc_align_method {
  ELVC_ALIGN_DTW_MCC = 0,
  ELVC_ALIGN_DTW_LIP = 1,
  ELVC_ALIGN_DTW_WSOLA = 2
} elvc_align_method;

typedef enum elvc_mode {
  ELVC_MODE_AUDIO_ONLY = 0,
  ELVC_MODE_MULTIMODAL = 1,
  ELVC_MODE_MULTIMODAL_FT = 2
} elvc_mode;

typedef struct elvc_config elvc_config;
typedef struct elvc_waveform elvc_waveform;
typedef struct elvc_features elvc_features;
typedef struct elvc_landmarks elvc_landmarks;
typedef struct elvc_path elvc_path;
typedef struct elvc_model elvc_model;
typedef struct elvc_report elvc_report;

typedef void (*elvc_log_fn)(const char* message, void* user);

ELVC_API const char* elvc_version(void);
ELVC_API const char* elvc_status_name(elvc_status status);
ELVC_API const char* elvc_last_error(void);

/* Name <-> enum helpers ("dtw-mcc", "audio_only", ...). */
ELVC_API elvc_status elvc_parse_align_method(const char* name, elvc_align_method* out);
ELVC_API elvc_status elvc_parse_mode(const char* name, elvc_mode* out);

/* ---- Pipeline configuration (flat "section.key=value" text). ---- */
ELVC_API elvc_status elvc_config_create(elvc_config** out);
ELVC_API elvc_status elvc_config_load(const char* path, elvc_config** out);
ELVC_API elvc_status elvc_config_set(elvc_config* cfg, const char* key, const char* value);
ELVC_API elvc_status elvc_config_validate(const elvc_config* cfg);
ELVC_API const char* elvc_config_text(elvc_config* cfg);
ELVC_API void elvc_config_free(elvc_config* cfg);

/* ---- Waveforms: 16 kHz mono PCM16 WAV. ---- */
ELVC_API elvc_status elvc_waveform_create(const double* samples, size_t count, int sample_rate,
                                          elvc_waveform** out);
ELVC_API elvc_status elvc_wav_read(const char* path, elvc_waveform** out);
ELVC_API elvc_status elvc_wav_write(const elvc_waveform* w, const char* path);
ELVC_API size_t elvc_waveform_length(const elvc_waveform* w);
ELVC_API int elvc_waveform_sample_rate(const elvc_waveform* w);
ELVC_API const double* elvc_waveform_samples(const elvc_waveform* w);
ELVC_API void elvc_waveform_free(elvc_waveform* w);

/* ---- Layered feature sets ("ELF1" files). A single matrix is L = 1. ---- */
ELVC_API elvc_status elvc_features_create(size_t layers, size_t frames, size_t dim, const double* data,
                                          elvc_features** out);
ELVC_API elvc_status elvc_features_read(const char* path, elvc_features** out);
ELVC_API elvc_status elvc_features_write(const elvc_features* f, const char* path);
ELVC_API void elvc_features_shape(const elvc_features* f, size_t* layers, size_t* frames, size_t* dim);
ELVC_API const double* elvc_features_layer(const elvc_features* f, size_t layer);
ELVC_API void elvc_features_free(elvc_features* f);

/* ---- Acoustic features. ---- */
ELVC_API elvc_status elvc_log_mel(const elvc_config* cfg, const elvc_waveform* w, elvc_features** out);
ELVC_API elvc_status elvc_mcc(const elvc_config* cfg, const elvc_features* lms, elvc_features** out);
ELVC_API elvc_status elvc_frame_mcd(const double* a, const double* b, size_t dim, double* out_db);

/* ---- WSOLA time-scale modification. ---- */
ELVC_API elvc_status elvc_stretch(const elvc_config* cfg, const elvc_waveform* w, double alpha,
                                  elvc_waveform** out);
ELVC_API elvc_status elvc_stretch_to_length(const elvc_config* cfg, const elvc_waveform* w, size_t target,
                                            elvc_waveform** out);

/* ---- Lip landmarks (CSV, 40 columns per row). ---- */
ELVC_API elvc_status elvc_landmarks_read(const char* path, elvc_landmarks** out);
ELVC_API size_t elvc_landmarks_frames(const elvc_landmarks* lm);
ELVC_API elvc_status elvc_landmark_features(const elvc_landmarks* lm, elvc_features** out);
ELVC_API void elvc_landmarks_free(elvc_landmarks* lm);

/* ---- Alignment. ---- */
/* Row-major n x m non-negative cost matrix; band 0 means unconstrained. */
ELVC_API elvc_status elvc_dtw(const double* cost, size_t n, size_t m, size_t band, elvc_path** out);
ELVC_API elvc_status elvc_align_dtw_mcc(const elvc_config* cfg, const elvc_waveform* el, const elvc_waveform* nl,
                                        elvc_path** out);
ELVC_API elvc_status elvc_align_dtw_lip(const elvc_config* cfg, const elvc_landmarks* el,
                                        const elvc_landmarks* nl, elvc_path** out);
ELVC_API elvc_status elvc_align_dtw_wsola(const elvc_config* cfg, const elvc_waveform* el,
                                          const elvc_waveform* nl, elvc_waveform** stretched_nl,
                                          elvc_path** out);
ELVC_API size_t elvc_path_length(const elvc_path* p);
ELVC_API elvc_status elvc_path_pair(const elvc_path* p, size_t k, size_t* i, size_t* j);
ELVC_API double elvc_path_total_cost(const elvc_path* p);
ELVC_API elvc_status elvc_path_write_csv(const elvc_path* p, const char* path);
ELVC_API elvc_status elvc_apply_warp(const elvc_path* p, const elvc_features* target, elvc_features** out);
ELVC_API void elvc_path_free(elvc_path* p);

/* ---- Directory-level pipeline stages. ---- */
ELVC_API elvc_status elvc_prepare(const elvc_config* cfg, const char* manifest, elvc_align_method method,
                                  const char* out_dir, elvc_log_fn log, void* user);
ELVC_API elvc_status elvc_train(const elvc_config* cfg, const char* prepared_dir, elvc_mode mode,
                                const char* checkpoint_dir, elvc_log_fn log, void* user);
ELVC_API elvc_status elvc_convert_dir(const elvc_config* cfg, const char* checkpoint_dir, const char* input_dir,
                                      const char* out_dir);
ELVC_API elvc_status elvc_eval_dirs(const elvc_config* cfg, const char* converted_dir, const char* target_dir,
                                    const char* label, elvc_report** out);

/* ---- Trained models. ---- */
ELVC_API elvc_status elvc_model_load(const char* checkpoint_dir, elvc_model** out);
ELVC_API elvc_status elvc_model_save(const elvc_model* m, const char* checkpoint_dir);
ELVC_API elvc_mode elvc_model_mode(const elvc_model* m);
/* Copies up to `capacity` softmax fusion weights; *count receives the total. */
ELVC_API elvc_status elvc_model_fusion_weights(const elvc_model* m, double* weights, size_t capacity,
                                               size_t* count);
/* visual may be NULL for audio-only models; it must be at acoustic frame rate. */
ELVC_API elvc_status elvc_model_convert(const elvc_model* m, const elvc_features* acoustic,
                                        const elvc_features* visual, elvc_features** out);
ELVC_API void elvc_model_free(elvc_model* m);

/* ---- Evaluation reports. ---- */
ELVC_API size_t elvc_report_count(const elvc_report* r);
ELVC_API double elvc_report_mean(const elvc_report* r);
ELVC_API double elvc_report_stdev(const elvc_report* r);
ELVC_API elvc_status elvc_report_utterance(const elvc_report* r, size_t k, const char** utt_id, double* mcd_db);
ELVC_API elvc_status elvc_report_merge_external(elvc_report* r, const char* csv_path);
ELVC_API elvc_status elvc_report_write_csv(const elvc_report* r, const char* path);
ELVC_API const char* elvc_report_summary(elvc_report* r);
ELVC_API void elvc_report_free(elvc_report* r);

/* ---- Finite-difference gradient verification. ---- */
typedef struct elvc_gradcheck_row {
  const char* kind; /* static string: conv1d, gru, linear, fusion, ft_gru */
  size_t configs;
  size_t entries;
  double max_rel_error;
  int pass;
} elvc_gradcheck_row;

ELVC_API elvc_status elvc_gradcheck(uint64_t seed, size_t configs, elvc_gradcheck_row* rows, size_t capacity,
                                    size_t* count, int* all_pass);

#ifdef __cplusplus
}
#endif

#endif /* ELVC_ELVC_H_ */

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

#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"
#include "random.hpp"

namespace elvc {
namespace {

namespace fs = std::filesystem;

Matrix concat_cols(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t t = 0; t < a.rows(); ++t) {
    auto dst = out.row(t);
    std::copy(a.row(t).begin(), a.row(t).end(), dst.begin());
    std::copy(b.row(t).begin(), b.row(t).end(), dst.begin() + static_cast<std::ptrdiff_t>(a.cols()));
  }
  return out;
}

Matrix slice_cols(const Matrix& m, std::size_t first, std::size_t count) {
  Matrix out(m.rows(), count);
  for (std::size_t t = 0; t < m.rows(); ++t) {
    const auto src = m.row(t);
    std::copy(src.begin() + static_cast<std::ptrdiff_t>(first),
              src.begin() + static_cast<std::ptrdiff_t>(first + count), out.row(t).begin());
  }
  return out;
}

void flatten_into(const std::vector<Matrix>& grads, ParamGrads& out) {
  for (const auto& g : grads) out.push_back(g.data());
}

std::vector<Matrix> zeros_like(const Layer& l) {
  std::vector<Matrix> g;
  for (const auto& p : l.params) g.emplace_back(p.rows(), p.cols());
  return g;
}

}  // namespace

const char* model_mode_name(ModelMode mode) noexcept {
  switch (mode) {
    case ModelMode::kAudioOnly: return "audio_only";
    case ModelMode::kMultimodal: return "multimodal";
    case ModelMode::kMultimodalFt: return "multimodal_ft";
  }
  return "unknown";
}

ModelMode parse_model_mode(const std::string& name) {
  for (auto m : {ModelMode::kAudioOnly, ModelMode::kMultimodal, ModelMode::kMultimodalFt}) {
    if (name == model_mode_name(m)) return m;
  }
  throw Error(Errc::kConfigError, "unknown model mode '" + name + "'");
}

void ModelConfig::validate() const {
  if (acoustic_dim == 0 || output_dim == 0) throw Error(Errc::kBadDim, "acoustic/output dims must be positive");
  if (uses_visual(mode) && visual_dim == 0) {
    throw Error(Errc::kBadDim, std::string(model_mode_name(mode)) + " needs visual_dim > 0");
  }
  if (uses_visual(mode) && visual_layers == 0) throw Error(Errc::kBadDim, "visual_layers must be positive");
  if (conv_channels > 0 && kernel % 2 == 0) throw Error(Errc::kBadDim, "Conv1D kernel must be odd");
}

std::vector<Model::ParamView> Model::parameters() {
  std::vector<ParamView> views;
  for (std::size_t li = 0; li < trunk.size(); ++li) {
    auto names = trunk[li].param_names();
    for (std::size_t p = 0; p < trunk[li].params.size(); ++p) {
      views.push_back({"trunk." + std::to_string(li) + "." + names[p], trunk[li].spec.kind, false, false,
                       trunk[li].params[p].data()});
    }
  }
  if (ft_gru) {
    auto names = ft_gru->param_names();
    for (std::size_t p = 0; p < ft_gru->params.size(); ++p) {
      views.push_back({"ft_gru." + names[p], LayerKind::kGru, false, true, ft_gru->params[p].data()});
    }
  }
  if (uses_visual(config.mode)) {
    views.push_back({"fusion.logits", LayerKind::kLinear, true, false, fusion.logits});
  }
  return views;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : trunk)
    for (const auto& p : l.params) n += p.size();
  if (ft_gru)
    for (const auto& p : ft_gru->params) n += p.size();
  if (uses_visual(config.mode)) n += fusion.logits.size();
  return n;
}

Model build_model(const ModelConfig& cfg) {
  cfg.validate();
  Model m;
  m.config = cfg;
  std::size_t dim = cfg.trunk_input_dim();
  if (cfg.conv_channels > 0) {
    m.trunk.push_back(Layer::zeros({LayerKind::kConv1D, dim, cfg.conv_channels, cfg.kernel}));
    m.trunk.push_back(Layer::zeros({LayerKind::kRelu, cfg.conv_channels, cfg.conv_channels, 0}));
    dim = cfg.conv_channels;
  }
  if (cfg.gru_hidden > 0) {
    m.trunk.push_back(Layer::zeros({LayerKind::kGru, dim, cfg.gru_hidden, 0}));
    dim = cfg.gru_hidden;
  }
  m.trunk.push_back(Layer::zeros({LayerKind::kLinear, dim, cfg.output_dim, 0}));
  if (cfg.mode == ModelMode::kMultimodalFt) {
    m.ft_gru = Layer::zeros({LayerKind::kGru, cfg.visual_dim, cfg.visual_dim, 0});
  }
  m.fusion = FusionWeights(uses_visual(cfg.mode) ? cfg.visual_layers : 1);
  return m;
}

void initialize(Model& model, std::uint64_t seed) {
  Rng rng(seed);
  model.seed = seed;
  auto init_layer = [&](Layer& l) {
    std::size_t fan_in = l.spec.in_dim;
    if (l.spec.kind == LayerKind::kConv1D) fan_in *= l.spec.kernel;
    if (l.spec.kind == LayerKind::kGru) fan_in = l.spec.out_dim;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t p = 0; p < l.params.size(); ++p) {
      const bool is_bias = l.params[p].rows() == 1;
      for (double& v : l.params[p].data()) v = is_bias ? 0.0 : rng.uniform(-bound, bound);
    }
  };
  for (auto& l : model.trunk) init_layer(l);
  if (model.ft_gru) init_layer(*model.ft_gru);
  std::fill(model.fusion.logits.begin(), model.fusion.logits.end(), 0.0);
}

namespace {

void zero_rows_from(Matrix& m, std::size_t from) {
  for (std::size_t t = from; t < m.rows(); ++t)
    for (std::size_t d = 0; d < m.cols(); ++d) m(t, d) = 0.0;
}

}  // namespace

Matrix forward(const Model& model, const Matrix& acoustic, const LayeredFeatureSet* visual,
               ForwardCache* cache, std::size_t valid) {
  const auto& cfg = model.config;
  if (acoustic.cols() != cfg.acoustic_dim) {
    throw Error(Errc::kShapeError, "acoustic input has " + std::to_string(acoustic.cols()) +
                                       " dims, model expects " + std::to_string(cfg.acoustic_dim));
  }
  if (acoustic.rows() == 0) throw Error(Errc::kShapeError, "empty acoustic input");
  if (uses_visual(cfg.mode) != (visual != nullptr)) {
    throw Error(Errc::kModeMismatch, std::string(model_mode_name(cfg.mode)) +
                                         (visual ? " takes no visual input" : " requires visual input"));
  }

  Matrix x = acoustic;
  if (visual) {
    visual->validate();
    if (visual->frames() != acoustic.rows() || visual->dim() != cfg.visual_dim ||
        visual->num_layers() != model.fusion.logits.size()) {
      throw Error(Errc::kShapeError, "visual input is " + std::to_string(visual->num_layers()) + "x" +
                                         std::to_string(visual->frames()) + "x" +
                                         std::to_string(visual->dim()) + ", model expects " +
                                         std::to_string(model.fusion.logits.size()) + "x" +
                                         std::to_string(acoustic.rows()) + "x" +
                                         std::to_string(cfg.visual_dim));
    }
    Matrix vis = weighted_sum(*visual, model.fusion);
    if (model.ft_gru) vis = layer_forward(*model.ft_gru, vis, cache ? &cache->ft : nullptr);
    x = concat_cols(acoustic, vis);
    if (cache) cache->visual = *visual;
  }

  valid = std::min(valid, acoustic.rows());
  if (cache) {
    cache->trunk.assign(model.trunk.size(), {});
    cache->valid = valid;
  }
  for (std::size_t i = 0; i < model.trunk.size(); ++i) {
    if (model.trunk[i].spec.kind == LayerKind::kConv1D) zero_rows_from(x, valid);
    x = layer_forward(model.trunk[i], x, cache ? &cache->trunk[i] : nullptr);
  }
  return x;
}

ParamGrads backward(const Model& model, const ForwardCache& cache, const Matrix& grad_out) {
  std::vector<std::vector<Matrix>> trunk_grads;
  for (const auto& l : model.trunk) trunk_grads.push_back(zeros_like(l));

  Matrix g = grad_out;
  for (std::size_t i = model.trunk.size(); i-- > 0;) {
    g = layer_backward(model.trunk[i], cache.trunk[i], g, trunk_grads[i]);
    if (model.trunk[i].spec.kind == LayerKind::kConv1D) zero_rows_from(g, cache.valid);
  }

  ParamGrads out;
  for (const auto& tg : trunk_grads) flatten_into(tg, out);

  if (uses_visual(model.config.mode)) {
    Matrix gvis = slice_cols(g, model.config.acoustic_dim, model.config.visual_dim);
    if (model.ft_gru) {
      auto ft_grads = zeros_like(*model.ft_gru);
      gvis = layer_backward(*model.ft_gru, cache.ft, gvis, ft_grads);
      flatten_into(ft_grads, out);
    }
    out.push_back(weighted_sum_logit_grad(cache.visual, model.fusion, gvis));
  }
  return out;
}

ParamGrads zero_grads(const Model& model) {
  ParamGrads g;
  for (const auto& l : model.trunk)
    for (const auto& p : l.params) g.emplace_back(p.size(), 0.0);
  if (model.ft_gru)
    for (const auto& p : model.ft_gru->params) g.emplace_back(p.size(), 0.0);
  if (uses_visual(model.config.mode)) g.emplace_back(model.fusion.logits.size(), 0.0);
  return g;
}

FeatureMatrix convert(const Model& model, const FeatureMatrix& acoustic, const LayeredFeatureSet* visual) {
  acoustic.validate();
  if (uses_visual(model.config.mode) != (visual != nullptr)) {
    throw Error(Errc::kModeMismatch, std::string(model_mode_name(model.config.mode)) +
                                         (visual ? " takes no visual input" : " requires visual input"));
  }
  FeatureMatrix out;
  out.frame_shift_s = acoustic.frame_shift_s;
  if (visual) {
    const LayeredFeatureSet normalized = model.norm ? apply_norm_stats(*visual, *model.norm) : *visual;
    out.data = forward(model, acoustic.data, &normalized, nullptr);
  } else {
    out.data = forward(model, acoustic.data, nullptr, nullptr);
  }
  out.kind = out.data.cols() == kLmsDim ? FeatureKind::kLms : FeatureKind::kOther;
  return out;
}

// Checkpoint layout: <dir>/manifest.txt plus one single-layer ELF1 file per
// tensor, and norm_stats.elf1 when normalization was fitted.
void save_checkpoint(const Model& model, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::kIoError, "cannot create checkpoint directory " + dir);
  const fs::path root(dir);
  const auto& c = model.config;

  std::ostringstream man;
  man << "format=elvc-checkpoint-1\n"
      << "mode=" << model_mode_name(c.mode) << "\n"
      << "acoustic_dim=" << c.acoustic_dim << "\n"
      << "visual_dim=" << c.visual_dim << "\n"
      << "visual_layers=" << c.visual_layers << "\n"
      << "conv_channels=" << c.conv_channels << "\n"
      << "kernel=" << c.kernel << "\n"
      << "gru_hidden=" << c.gru_hidden << "\n"
      << "output_dim=" << c.output_dim << "\n"
      << "seed=" << model.seed << "\n";

  auto save_layer = [&](const Layer& l, const std::string& prefix) {
    const auto names = l.param_names();
    man << prefix << "=" << layer_kind_name(l.spec.kind) << " " << l.spec.in_dim << " " << l.spec.out_dim
        << " " << l.spec.kernel << "\n";
    for (std::size_t p = 0; p < l.params.size(); ++p) {
      const std::string file = prefix + "." + names[p] + ".elf1";
      write_matrix_file(l.params[p], root / file);
      man << "tensor=" << file << "\n";
    }
  };
  for (std::size_t i = 0; i < model.trunk.size(); ++i) save_layer(model.trunk[i], "trunk." + std::to_string(i));
  if (model.ft_gru) save_layer(*model.ft_gru, "ft_gru");
  if (uses_visual(c.mode)) {
    write_matrix_file(Matrix(1, model.fusion.logits.size(), model.fusion.logits), root / "fusion.logits.elf1");
    man << "tensor=fusion.logits.elf1\n";
  }
  if (model.norm) {
    write_feature_file(model.norm->to_feature_set(), root / "norm_stats.elf1");
    man << "norm_stats=norm_stats.elf1\n";
  }

  std::ofstream out(root / "manifest.txt", std::ios::binary | std::ios::trunc);
  out << man.str();
  if (!out) throw Error(Errc::kIoError, "cannot write checkpoint manifest in " + dir);
}

Model load_checkpoint(const std::string& dir) {
  const fs::path root(dir);
  std::ifstream in(root / "manifest.txt");
  if (!in) throw Error(Errc::kNotFound, (root / "manifest.txt").string());

  std::map<std::string, std::string> kv;
  std::vector<std::pair<std::string, LayerSpec>> layers;
  std::vector<std::string> tensors;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(Errc::kParseError, "bad manifest line: " + line);
    const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "tensor") {
      tensors.push_back(value);
    } else if (key.rfind("trunk.", 0) == 0 || key == "ft_gru") {
      std::istringstream ls(value);
      std::string kind;
      LayerSpec spec;
      if (!(ls >> kind >> spec.in_dim >> spec.out_dim >> spec.kernel)) {
        throw Error(Errc::kParseError, "bad layer line: " + line);
      }
      spec.kind = parse_layer_kind(kind);
      layers.emplace_back(key, spec);
    } else {
      kv[key] = value;
    }
  }
  if (kv["format"] != "elvc-checkpoint-1") throw Error(Errc::kParseError, "unknown checkpoint format");

  auto num = [&](const std::string& key) -> std::size_t {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error(Errc::kParseError, "checkpoint manifest lacks " + key);
    return static_cast<std::size_t>(std::stoull(it->second));
  };
  ModelConfig cfg;
  cfg.mode = parse_model_mode(kv["mode"]);
  cfg.acoustic_dim = num("acoustic_dim");
  cfg.visual_dim = num("visual_dim");
  cfg.visual_layers = num("visual_layers");
  cfg.conv_channels = num("conv_channels");
  cfg.kernel = num("kernel");
  cfg.gru_hidden = num("gru_hidden");
  cfg.output_dim = num("output_dim");

  Model model = build_model(cfg);
  model.seed = static_cast<std::uint64_t>(std::stoull(kv["seed"].empty() ? "0" : kv["seed"]));

  std::size_t li = 0;
  for (const auto& [name, spec] : layers) {
    const Layer& expect = name == "ft_gru" ? *model.ft_gru : model.trunk.at(li);
    if (!(expect.spec == spec)) throw Error(Errc::kShapeError, "checkpoint layer " + name + " mismatches config");
    if (name != "ft_gru") ++li;
  }
  auto views = model.parameters();
  if (views.size() != tensors.size()) {
    throw Error(Errc::kShapeError, "checkpoint has " + std::to_string(tensors.size()) + " tensors, model needs " +
                                       std::to_string(views.size()));
  }
  for (std::size_t i = 0; i < views.size(); ++i) {
    const Matrix m = read_matrix_file(root / tensors[i]);
    if (m.size() != views[i].values.size()) {
      throw Error(Errc::kShapeError, "tensor " + tensors[i] + " has the wrong size");
    }
    std::copy(m.data().begin(), m.data().end(), views[i].values.begin());
  }
  if (kv.count("norm_stats")) {
    model.norm = NormStats::from_feature_set(read_feature_file(root / kv["norm_stats"]));
  }
  return model;
}

}  // namespace elvc

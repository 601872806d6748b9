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

#include "layers.hpp"

#include <cmath>
#include <tuple>

#include "error.hpp"

namespace elvc {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Matrix conv_forward(const Layer& l, const Matrix& x) {
  const auto& w = l.params[0];
  const auto& b = l.params[1];
  const std::size_t t_len = x.rows(), in = l.spec.in_dim, out = l.spec.out_dim, k = l.spec.kernel;
  const auto pad = static_cast<long long>(k / 2);
  Matrix y(t_len, out);
  for (std::size_t t = 0; t < t_len; ++t) {
    auto yt = y.row(t);
    for (std::size_t o = 0; o < out; ++o) yt[o] = b(0, o);
    for (std::size_t tap = 0; tap < k; ++tap) {
      const long long src = static_cast<long long>(t) + static_cast<long long>(tap) - pad;
      if (src < 0 || src >= static_cast<long long>(t_len)) continue;
      const auto xs = x.row(static_cast<std::size_t>(src));
      for (std::size_t o = 0; o < out; ++o) {
        const double* wrow = w.row(o).data() + tap * in;
        double acc = 0.0;
        for (std::size_t i = 0; i < in; ++i) acc += wrow[i] * xs[i];
        yt[o] += acc;
      }
    }
  }
  return y;
}

Matrix conv_backward(const Layer& l, const Matrix& x, const Matrix& g, std::vector<Matrix>& grads) {
  const auto& w = l.params[0];
  auto& dw = grads[0];
  auto& db = grads[1];
  const std::size_t t_len = x.rows(), in = l.spec.in_dim, out = l.spec.out_dim, k = l.spec.kernel;
  const auto pad = static_cast<long long>(k / 2);
  Matrix dx(t_len, in);
  for (std::size_t t = 0; t < t_len; ++t) {
    const auto gt = g.row(t);
    for (std::size_t o = 0; o < out; ++o) db(0, o) += gt[o];
    for (std::size_t tap = 0; tap < k; ++tap) {
      const long long src = static_cast<long long>(t) + static_cast<long long>(tap) - pad;
      if (src < 0 || src >= static_cast<long long>(t_len)) continue;
      const auto xs = x.row(static_cast<std::size_t>(src));
      auto dxs = dx.row(static_cast<std::size_t>(src));
      for (std::size_t o = 0; o < out; ++o) {
        const double go = gt[o];
        if (go == 0.0) continue;
        double* dwrow = dw.row(o).data() + tap * in;
        const double* wrow = w.row(o).data() + tap * in;
        for (std::size_t i = 0; i < in; ++i) {
          dwrow[i] += go * xs[i];
          dxs[i] += go * wrow[i];
        }
      }
    }
  }
  return dx;
}

Matrix linear_forward(const Layer& l, const Matrix& x) {
  const auto& w = l.params[0];
  const auto& b = l.params[1];
  Matrix y(x.rows(), l.spec.out_dim);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const auto xt = x.row(t);
    for (std::size_t o = 0; o < l.spec.out_dim; ++o) {
      double acc = b(0, o);
      const auto wrow = w.row(o);
      for (std::size_t i = 0; i < xt.size(); ++i) acc += wrow[i] * xt[i];
      y(t, o) = acc;
    }
  }
  return y;
}

Matrix linear_backward(const Layer& l, const Matrix& x, const Matrix& g, std::vector<Matrix>& grads) {
  const auto& w = l.params[0];
  auto& dw = grads[0];
  auto& db = grads[1];
  Matrix dx(x.rows(), l.spec.in_dim);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const auto xt = x.row(t);
    auto dxt = dx.row(t);
    for (std::size_t o = 0; o < l.spec.out_dim; ++o) {
      const double go = g(t, o);
      db(0, o) += go;
      if (go == 0.0) continue;
      auto dwrow = dw.row(o);
      const auto wrow = w.row(o);
      for (std::size_t i = 0; i < xt.size(); ++i) {
        dwrow[i] += go * xt[i];
        dxt[i] += go * wrow[i];
      }
    }
  }
  return dx;
}

// Cache layout for GRU: x, h (T+1 rows, row 0 is the zero initial state),
// r, z, n, hn (= W_hn h_prev + b_hn).
Matrix gru_forward(const Layer& l, const Matrix& x, LayerCache* cache) {
  const auto& w_ih = l.params[0];
  const auto& w_hh = l.params[1];
  const auto& b_ih = l.params[2];
  const auto& b_hh = l.params[3];
  const std::size_t t_len = x.rows(), in = l.spec.in_dim, hid = l.spec.out_dim;

  Matrix h(t_len + 1, hid), r(t_len, hid), z(t_len, hid), n(t_len, hid), hn(t_len, hid);
  std::vector<double> gi(3 * hid), gh(3 * hid);
  for (std::size_t t = 0; t < t_len; ++t) {
    const auto xt = x.row(t);
    const auto hp = h.row(t);
    for (std::size_t g = 0; g < 3 * hid; ++g) {
      double a = b_ih(0, g);
      const auto wi = w_ih.row(g);
      for (std::size_t i = 0; i < in; ++i) a += wi[i] * xt[i];
      gi[g] = a;
      double c = b_hh(0, g);
      const auto wh = w_hh.row(g);
      for (std::size_t j = 0; j < hid; ++j) c += wh[j] * hp[j];
      gh[g] = c;
    }
    auto ht = h.row(t + 1);
    for (std::size_t u = 0; u < hid; ++u) {
      const double rv = sigmoid(gi[u] + gh[u]);
      const double zv = sigmoid(gi[hid + u] + gh[hid + u]);
      const double nv = std::tanh(gi[2 * hid + u] + rv * gh[2 * hid + u]);
      r(t, u) = rv;
      z(t, u) = zv;
      n(t, u) = nv;
      hn(t, u) = gh[2 * hid + u];
      ht[u] = (1.0 - zv) * nv + zv * hp[u];
    }
  }

  Matrix y(t_len, hid);
  std::copy(h.data().begin() + static_cast<std::ptrdiff_t>(hid), h.data().end(), y.data().begin());
  if (cache) {
    cache->saved = {x, std::move(h), std::move(r), std::move(z), std::move(n), std::move(hn)};
  }
  return y;
}

Matrix gru_backward(const Layer& l, const LayerCache& cache, const Matrix& g, std::vector<Matrix>& grads) {
  const auto& w_ih = l.params[0];
  const auto& w_hh = l.params[1];
  const auto& [x, h, r, z, n, hn] =
      std::tie(cache.saved[0], cache.saved[1], cache.saved[2], cache.saved[3], cache.saved[4], cache.saved[5]);
  auto& dw_ih = grads[0];
  auto& dw_hh = grads[1];
  auto& db_ih = grads[2];
  auto& db_hh = grads[3];
  const std::size_t t_len = x.rows(), in = l.spec.in_dim, hid = l.spec.out_dim;

  Matrix dx(t_len, in);
  std::vector<double> dh_next(hid, 0.0), dh_prev(hid), dgi(3 * hid), dgh(3 * hid);
  for (std::size_t step = t_len; step-- > 0;) {
    const auto hp = h.row(step);
    for (std::size_t u = 0; u < hid; ++u) {
      const double dh = g(step, u) + dh_next[u];
      const double rv = r(step, u), zv = z(step, u), nv = n(step, u);
      const double dn = dh * (1.0 - zv);
      const double dz = dh * (hp[u] - nv);
      const double dan = dn * (1.0 - nv * nv);
      const double dr = dan * hn(step, u);
      const double dar = dr * rv * (1.0 - rv);
      const double daz = dz * zv * (1.0 - zv);
      dgi[u] = dar;
      dgi[hid + u] = daz;
      dgi[2 * hid + u] = dan;
      dgh[u] = dar;
      dgh[hid + u] = daz;
      dgh[2 * hid + u] = dan * rv;
      dh_prev[u] = dh * zv;
    }
    const auto xt = x.row(step);
    auto dxt = dx.row(step);
    for (std::size_t gidx = 0; gidx < 3 * hid; ++gidx) {
      const double a = dgi[gidx];
      const double c = dgh[gidx];
      db_ih(0, gidx) += a;
      db_hh(0, gidx) += c;
      auto dwi = dw_ih.row(gidx);
      const auto wi = w_ih.row(gidx);
      for (std::size_t i = 0; i < in; ++i) {
        dwi[i] += a * xt[i];
        dxt[i] += a * wi[i];
      }
      auto dwh = dw_hh.row(gidx);
      const auto wh = w_hh.row(gidx);
      for (std::size_t j = 0; j < hid; ++j) {
        dwh[j] += c * hp[j];
        dh_prev[j] += c * wh[j];
      }
    }
    dh_next = dh_prev;
  }
  return dx;
}

}  // namespace

const char* layer_kind_name(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::kConv1D: return "conv1d";
    case LayerKind::kGru: return "gru";
    case LayerKind::kLinear: return "linear";
    case LayerKind::kRelu: return "relu";
  }
  return "unknown";
}

LayerKind parse_layer_kind(const std::string& name) {
  for (auto k : {LayerKind::kConv1D, LayerKind::kGru, LayerKind::kLinear, LayerKind::kRelu}) {
    if (name == layer_kind_name(k)) return k;
  }
  throw Error(Errc::kParseError, "unknown layer kind '" + name + "'");
}

void LayerSpec::validate() const {
  if (in_dim == 0 || out_dim == 0) throw Error(Errc::kBadDim, "layer dimensions must be positive");
  if (kind == LayerKind::kConv1D && kernel % 2 == 0) {
    throw Error(Errc::kBadDim, "Conv1D kernel must be odd");
  }
  if (kind == LayerKind::kRelu && in_dim != out_dim) {
    throw Error(Errc::kBadDim, "activation layers keep their dimension");
  }
}

Layer Layer::zeros(const LayerSpec& spec) {
  spec.validate();
  Layer l;
  l.spec = spec;
  switch (spec.kind) {
    case LayerKind::kConv1D:
      l.params = {Matrix(spec.out_dim, spec.kernel * spec.in_dim), Matrix(1, spec.out_dim)};
      break;
    case LayerKind::kGru:
      l.params = {Matrix(3 * spec.out_dim, spec.in_dim), Matrix(3 * spec.out_dim, spec.out_dim),
                  Matrix(1, 3 * spec.out_dim), Matrix(1, 3 * spec.out_dim)};
      break;
    case LayerKind::kLinear:
      l.params = {Matrix(spec.out_dim, spec.in_dim), Matrix(1, spec.out_dim)};
      break;
    case LayerKind::kRelu:
      break;
  }
  return l;
}

std::vector<std::string> Layer::param_names() const {
  switch (spec.kind) {
    case LayerKind::kGru: return {"w_ih", "w_hh", "b_ih", "b_hh"};
    case LayerKind::kRelu: return {};
    default: return {"weight", "bias"};
  }
}

Matrix layer_forward(const Layer& layer, const Matrix& x, LayerCache* cache) {
  if (x.cols() != layer.spec.in_dim) {
    throw Error(Errc::kShapeError, std::string(layer_kind_name(layer.spec.kind)) + " expects " +
                                       std::to_string(layer.spec.in_dim) + " inputs, got " +
                                       std::to_string(x.cols()));
  }
  switch (layer.spec.kind) {
    case LayerKind::kGru:
      return gru_forward(layer, x, cache);
    case LayerKind::kConv1D:
      if (cache) cache->saved = {x};
      return conv_forward(layer, x);
    case LayerKind::kLinear:
      if (cache) cache->saved = {x};
      return linear_forward(layer, x);
    case LayerKind::kRelu: {
      if (cache) cache->saved = {x};
      Matrix y = x;
      for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
      return y;
    }
  }
  throw Error(Errc::kInvalidArgument, "unknown layer kind");
}

Matrix layer_backward(const Layer& layer, const LayerCache& cache, const Matrix& grad_out,
                      std::vector<Matrix>& grads) {
  switch (layer.spec.kind) {
    case LayerKind::kGru:
      return gru_backward(layer, cache, grad_out, grads);
    case LayerKind::kConv1D:
      return conv_backward(layer, cache.saved[0], grad_out, grads);
    case LayerKind::kLinear:
      return linear_backward(layer, cache.saved[0], grad_out, grads);
    case LayerKind::kRelu: {
      const auto& x = cache.saved[0];
      Matrix dx = grad_out;
      for (std::size_t i = 0; i < dx.size(); ++i) {
        if (!(x.data()[i] > 0.0)) dx.data()[i] = 0.0;
      }
      return dx;
    }
  }
  throw Error(Errc::kInvalidArgument, "unknown layer kind");
}

}  // namespace elvc

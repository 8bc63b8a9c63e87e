/*
 * Copyright 2026 The DLCM Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dlcm/models/networks.h"

#include <limits>
#include <numeric>

#include "dlcm/error.h"
#include "dlcm/gradcore/ops.h"

namespace dlcm::models {

using grad::Array;
using grad::Shape;
using grad::Tensor;

const char* ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kDnn: return "dnn";
    case ModelKind::kLidnn: return "lidnn";
    case ModelKind::kDlcm: return "dlcm";
  }
  return "?";
}

ModelKind ParseModelKind(std::string_view name) {
  if (name == "dnn") return ModelKind::kDnn;
  if (name == "lidnn") return ModelKind::kLidnn;
  if (name == "dlcm") return ModelKind::kDlcm;
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

void ModelSpec::Validate() const {
  if (num_features == 0) throw ConfigError("model needs >= 1 feature");
  if (list_size == 0 || list_size > kMaxListSize) {
    throw ConfigError("list size n must be in [1, 200], got " +
                      std::to_string(list_size));
  }
  if (kind == ModelKind::kDlcm) {
    if (k == 0) throw ConfigError("k must be >= 1");
    return;
  }
  if (hidden.empty() || hidden.size() > 2) {
    throw ConfigError("feed-forward nets take one or two hidden widths");
  }
  for (std::size_t h : hidden) {
    if (h < kMinHidden || h > kMaxHidden) {
      throw ConfigError("hidden width " + std::to_string(h) +
                        " outside [64, 1024]");
    }
  }
}

namespace {

void AddFeedForward(ParamSet<float>& p, std::size_t in_width,
                    const std::vector<std::size_t>& hidden,
                    std::size_t out_width, Rng& rng) {
  std::size_t fan = in_width;
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    const std::string idx = std::to_string(l + 1);
    p.Add("w" + idx, ScaledUniform({fan, hidden[l]}, fan, rng));
    p.Add("b" + idx, ScaledUniform({hidden[l]}, fan, rng));
    fan = hidden[l];
  }
  p.Add("w_out", ScaledUniform({fan, out_width}, fan, rng));
  p.Add("b_out", ScaledUniform({out_width}, fan, rng));
}

// Hidden layers use elu; the output layer is affine.
template <typename T>
Tensor<T> FeedForward(Tensor<T> h, const std::vector<Tensor<T>>& bound,
                      std::size_t num_hidden) {
  std::size_t i = 0;
  for (std::size_t l = 0; l < num_hidden; ++l, i += 2) {
    h = grad::Elu(grad::Add(grad::MatMul(h, bound[i]), bound[i + 1]));
  }
  return grad::Add(grad::MatMul(h, bound[i]), bound[i + 1]);
}

template <typename T>
Tensor<T> RowSlice(const Tensor<T>& m, std::size_t row) {
  return grad::Slice(m, row, row + 1);
}

template <typename T>
Tensor<T> DlcmForward(grad::Graph<T>& g, const ModelSpec& spec,
                      const std::vector<Tensor<T>>& bound,
                      const Array<T>& inputs) {
  const DlcmTensors<T> w = UnpackDlcm(spec, bound);
  const std::size_t n = spec.list_size, d = spec.dim(), k = spec.k;
  Tensor<T> x = AbstractionForward(g.Constant(inputs), w, spec.beta);

  // Lowest slot first.
  std::vector<std::size_t> reversed(n);
  std::iota(reversed.rbegin(), reversed.rend(), 0);
  const GruEncoding<T> enc =
      GruEncode(grad::Take(x, std::span<const std::size_t>(reversed)), w);

  // Slot i was fed at step n - 1 - i.
  std::vector<Tensor<T>> by_slot(enc.outputs.rbegin(), enc.outputs.rend());
  Tensor<T> o = grad::Concat(std::span<const Tensor<T>>(by_slot), 0);

  Tensor<T> ctx = grad::MatMul(enc.final_state, grad::Reshape(w.w_phi, {d, d * k}));
  ctx = grad::Tanh(grad::Add(grad::Reshape(ctx, {d, k}), w.b_phi));
  Tensor<T> scores =
      grad::MatMul(grad::MatMul(o, ctx), grad::Reshape(w.v_phi, {k, 1}));
  return grad::Reshape(scores, {n});
}

}  // namespace

ParamSet<float> InitParams(const ModelSpec& spec, std::uint64_t seed) {
  spec.Validate();
  Rng rng(seed);
  ParamSet<float> p;
  const std::size_t a = spec.num_features;
  switch (spec.kind) {
    case ModelKind::kDnn:
      AddFeedForward(p, a, spec.hidden, 1, rng);
      break;
    case ModelKind::kLidnn:
      AddFeedForward(p, spec.list_size * a, spec.hidden, spec.list_size, rng);
      break;
    case ModelKind::kDlcm: {
      const std::size_t b = spec.beta, d = spec.dim(), k = spec.k;
      if (b > 0) {
        p.Add("wz0", ScaledUniform({a, b}, a, rng));
        p.Add("bz0", ScaledUniform({b}, a, rng));
        p.Add("wz1", ScaledUniform({b, b}, b, rng));
        p.Add("bz1", ScaledUniform({b}, b, rng));
      }
      for (const char* name : {"w_x", "w_s", "w_ux", "w_us", "w_rx", "w_rs"}) {
        p.Add(name, ScaledUniform({d, d}, d, rng));
      }
      p.Add("w_phi", ScaledUniform({d, d, k}, d, rng));
      p.Add("b_phi", ScaledUniform({d, k}, d, rng));
      p.Add("v_phi", ScaledUniform({k}, k, rng));
      break;
    }
  }
  return p;
}

template <typename T>
DlcmTensors<T> UnpackDlcm(const ModelSpec& spec,
                          const std::vector<Tensor<T>>& bound) {
  const std::size_t expected = spec.beta > 0 ? 13 : 9;
  if (spec.kind != ModelKind::kDlcm || bound.size() != expected) {
    throw ConfigError("parameter set does not match a DLCM with beta " +
                      std::to_string(spec.beta));
  }
  DlcmTensors<T> w;
  std::size_t i = 0;
  if (spec.beta > 0) {
    w.wz0 = bound[i++];
    w.bz0 = bound[i++];
    w.wz1 = bound[i++];
    w.bz1 = bound[i++];
  }
  w.w_x = bound[i++];
  w.w_s = bound[i++];
  w.w_ux = bound[i++];
  w.w_us = bound[i++];
  w.w_rx = bound[i++];
  w.w_rs = bound[i++];
  w.w_phi = bound[i++];
  w.b_phi = bound[i++];
  w.v_phi = bound[i++];
  return w;
}

template <typename T>
Tensor<T> AbstractionForward(const Tensor<T>& x, const DlcmTensors<T>& w,
                             std::size_t beta) {
  if (beta == 0) return x;
  Tensor<T> z1 = grad::Elu(grad::Add(grad::MatMul(x, w.wz0), w.bz0));
  Tensor<T> z2 = grad::Elu(grad::Add(grad::MatMul(z1, w.wz1), w.bz1));
  const Tensor<T> parts[] = {x, z2};
  return grad::Concat(std::span<const Tensor<T>>(parts), 1);
}

template <typename T>
GruEncoding<T> GruEncode(const Tensor<T>& feed, const DlcmTensors<T>& w) {
  if (!feed.valid() || feed.shape().size() != 2) {
    throw ContractError("gru: expected a [steps x d] input");
  }
  const std::size_t steps = feed.shape()[0], d = feed.shape()[1];
  grad::Graph<T>& g = *feed.graph();
  // Input projections for all steps at once; row t equals x_t . W.
  const Tensor<T> px = grad::MatMul(feed, w.w_x);
  const Tensor<T> pu = grad::MatMul(feed, w.w_ux);
  const Tensor<T> pr = grad::MatMul(feed, w.w_rx);
  const Tensor<T> one = g.Constant(Array<T>::Scalar(T{1}));

  GruEncoding<T> enc;
  enc.outputs.reserve(steps);
  Tensor<T> o = g.Constant(Array<T>({1, d}, T{0}));
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor<T> r = grad::Sigmoid(
        grad::Add(RowSlice(pr, t), grad::MatMul(o, w.w_rs)));
    Tensor<T> s = grad::Tanh(
        grad::Add(RowSlice(px, t), grad::MatMul(grad::Mul(r, o), w.w_s)));
    Tensor<T> u = grad::Sigmoid(
        grad::Add(RowSlice(pu, t), grad::MatMul(o, w.w_us)));
    o = grad::Add(grad::Mul(grad::Sub(one, u), o), grad::Mul(u, s));
    enc.outputs.push_back(o);
    enc.final_state = s;
  }
  return enc;
}

template <typename T>
Tensor<T> Score(grad::Graph<T>& g, const ModelSpec& spec,
                const std::vector<Tensor<T>>& bound, const Array<T>& inputs) {
  const std::size_t n = spec.list_size, a = spec.num_features;
  if (inputs.shape != Shape{n, a}) {
    throw ConfigError("model expects input " + grad::ShapeString({n, a}) +
                      ", got " + grad::ShapeString(inputs.shape));
  }
  switch (spec.kind) {
    case ModelKind::kDnn:
      return grad::Reshape(FeedForward(g.Constant(inputs), bound, spec.hidden.size()),
                           {n});
    case ModelKind::kLidnn: {
      Tensor<T> flat = g.Constant(Array<T>({1, n * a}, inputs.data));
      return grad::Reshape(FeedForward(flat, bound, spec.hidden.size()), {n});
    }
    case ModelKind::kDlcm:
      return DlcmForward(g, spec, bound, inputs);
  }
  throw ConfigError("unknown model kind");
}

std::vector<double> ScoreRankedList(const ModelSpec& spec,
                                    const ParamSet<float>& params,
                                    const data::RankedInput& list) {
  grad::Graph<float> g;
  const auto bound = Bind(g, params, /*requires_grad=*/false);
  const Tensor<float> s = Score(g, spec, bound, list.inputs);
  std::vector<double> out(list.n, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < list.num_real(); ++i) out[i] = s.value()[i];
  return out;
}

#define DLCM_INSTANTIATE_NETWORKS(T)                                         \
  template DlcmTensors<T> UnpackDlcm(const ModelSpec&,                       \
                                     const std::vector<Tensor<T>>&);         \
  template Tensor<T> AbstractionForward(const Tensor<T>&,                    \
                                        const DlcmTensors<T>&, std::size_t); \
  template GruEncoding<T> GruEncode(const Tensor<T>&, const DlcmTensors<T>&);\
  template Tensor<T> Score(grad::Graph<T>&, const ModelSpec&,                \
                           const std::vector<Tensor<T>>&, const Array<T>&);

DLCM_INSTANTIATE_NETWORKS(float)
DLCM_INSTANTIATE_NETWORKS(double)

#undef DLCM_INSTANTIATE_NETWORKS

}  // namespace dlcm::models

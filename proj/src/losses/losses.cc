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

#include "dlcm/losses/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dlcm/error.h"
#include "dlcm/gradcore/ops.h"
#include "loss_input.h"

namespace dlcm::losses {

using grad::Array;
using grad::Tensor;

const char* LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kListMle: return "listmle";
    case LossKind::kSoftRank: return "softrank";
    case LossKind::kAttRank: return "attrank";
  }
  return "?";
}

LossKind ParseLossKind(std::string_view name) {
  if (name == "listmle") return LossKind::kListMle;
  if (name == "softrank") return LossKind::kSoftRank;
  if (name == "attrank") return LossKind::kAttRank;
  throw ConfigError("unknown loss '" + std::string(name) + "'");
}

std::vector<std::size_t> IdealOrder(std::span<const int> labels,
                                    std::span<const std::size_t> initial_rank) {
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  auto rank = [&](std::size_t i) {
    return initial_rank.empty() ? i : initial_rank[i];
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (labels[a] != labels[b]) return labels[a] > labels[b];
    return rank(a) < rank(b);
  });
  return order;
}

std::vector<double> RectifiedAttention(std::span<const double> values) {
  double top = 0.0;
  for (double v : values) top = std::max(top, v);
  std::vector<double> out(values.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 0.0) {
      out[i] = std::exp(values[i] - top);
      total += out[i];
    }
  }
  if (total > 0.0) {
    for (double& v : out) v /= total;
  }
  return out;
}

template <typename T>
Tensor<T> ListMleLoss(const LossInput<T>& in) {
  const std::size_t m = internal::CheckLossInput(in, "listmle");
  const std::vector<std::size_t> ideal = IdealOrder(in.labels, in.initial_rank);
  const Array<T>& sv = in.scores.value();
  std::vector<double> s(m);
  for (std::size_t i = 0; i < m; ++i) s[i] = sv.data[ideal[i]];
  // Selection step i picks s[i] out of the remaining suffix s[i..m); lse[i]
  // is the log-normaliser of that suffix, accumulated from the back.
  std::vector<double> lse(m);
  lse[m - 1] = s[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) {
    const double hi = std::max(s[i], lse[i + 1]), lo = std::min(s[i], lse[i + 1]);
    lse[i] = hi + std::log1p(std::exp(lo - hi));
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < m; ++i) loss += lse[i] - s[i];
  return in.scores.graph()->Record(
      grad::OpKind::kCustom, {in.scores}, Array<T>::Scalar(static_cast<T>(loss)),
      [ideal, s = std::move(s), lse = std::move(lse)](
          const Array<T>& go, const Array<T>&, const std::vector<const Array<T>*>&,
          const std::vector<Array<T>*>& gi) {
        if (!gi[0]) return;
        // d/ds_j sum_{i<=j} lse_i = exp(s_j - lse_j) * sum_{i<=j} exp(lse_j - lse_i);
        // lse is non-increasing, so the running sum only ever shrinks terms.
        double run = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j) {
          run = 1.0 + (j == 0 ? 0.0 : run * std::exp(lse[j] - lse[j - 1]));
          const double d = std::exp(s[j] - lse[j]) * run - 1.0;
          gi[0]->data[ideal[j]] += static_cast<T>(go.data[0] * d);
        }
      });
}

template <typename T>
Tensor<T> AttRankLoss(const LossInput<T>& in, bool softmax_scores) {
  const std::size_t m = internal::CheckLossInput(in, "attrank");
  const std::vector<double> label_values(in.labels.begin(), in.labels.end());
  const std::vector<double> target = RectifiedAttention(label_values);

  // Score attention: softmax over every score, or psi (softmax restricted to
  // the positive scores; all zero when there are none).
  const Array<T>& sv = in.scores.value();
  std::vector<double> a(m, 0.0);
  double shift = softmax_scores ? -std::numeric_limits<double>::infinity() : 0.0;
  for (std::size_t i = 0; i < m; ++i) shift = std::max(shift, double{sv.data[i]});
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (softmax_scores || sv.data[i] > T{0}) {
      a[i] = std::exp(sv.data[i] - shift);
      z += a[i];
    }
  }
  if (z > 0.0) {
    for (double& v : a) v /= z;
  }

  // Cross entropy of the two attention distributions, with logs clamped at
  // kLogFloor (zero slope below it).
  const double floor = grad::kLogFloor;
  double loss = 0.0;
  std::vector<double> da(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    loss -= target[i] * std::log(std::max(a[i], floor)) +
            (1.0 - target[i]) * std::log(std::max(1.0 - a[i], floor));
    if (a[i] >= floor) da[i] -= target[i] / a[i];
    if (1.0 - a[i] >= floor) da[i] += (1.0 - target[i]) / (1.0 - a[i]);
  }
  return in.scores.graph()->Record(
      grad::OpKind::kCustom, {in.scores}, Array<T>::Scalar(static_cast<T>(loss)),
      [a = std::move(a), da = std::move(da)](
          const Array<T>& go, const Array<T>&, const std::vector<const Array<T>*>&,
          const std::vector<Array<T>*>& gi) {
        if (!gi[0]) return;
        // Softmax Jacobian; documents outside psi's support have a = 0 and
        // receive nothing.
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * da[i];
        for (std::size_t i = 0; i < a.size(); ++i) {
          gi[0]->data[i] += static_cast<T>(go.data[0] * a[i] * (da[i] - dot));
        }
      });
}

template <typename T>
Tensor<T> ComputeLoss(LossKind kind, const LossInput<T>& in,
                      const LossOptions& options) {
  switch (kind) {
    case LossKind::kListMle: return ListMleLoss(in);
    case LossKind::kSoftRank: return SoftRankLoss(in, options.sigma);
    case LossKind::kAttRank: return AttRankLoss(in, options.attn_softmax);
  }
  throw ConfigError("unknown loss kind");
}

#define DLCM_INSTANTIATE_LOSSES(T)                                          \
  template Tensor<T> ListMleLoss(const LossInput<T>&);                      \
  template Tensor<T> AttRankLoss(const LossInput<T>&, bool);                \
  template Tensor<T> ComputeLoss(LossKind, const LossInput<T>&,             \
                                 const LossOptions&);

DLCM_INSTANTIATE_LOSSES(float)
DLCM_INSTANTIATE_LOSSES(double)

#undef DLCM_INSTANTIATE_LOSSES

}  // namespace dlcm::losses

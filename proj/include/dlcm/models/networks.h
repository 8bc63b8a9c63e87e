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

// Re-ranking networks: pointwise DNN, list-input DNN (LIDNN) and the deep
// listwise context model (DLCM).
//
// Matrices are stored [in x out] and applied to row vectors (x . W). In this
// layout the DLCM is, with d = alpha + beta:
//
//   abstraction   z1 = elu(x . Wz0 + bz0)          Wz0 [alpha x beta]
//                 z2 = elu(z1 . Wz1 + bz1)         Wz1 [beta x beta]
//                 x' = [x, z2]                     (x' = x when beta == 0)
//   GRU step      r = sigmoid(x . Wrx + o . Wrs)
//                 s = tanh(x . Wx + (r * o) . Ws)
//                 u = sigmoid(x . Wux + o . Wus)
//                 o = (1 - u) * o + u * s          all [d x d], no biases
//   scoring       C = tanh(s_n . Wphi + bphi)      Wphi [d x d x k] viewed as
//                                                  [d x (d k)], C [d x k]
//                 score = o . C . Vphi             Vphi [k]
//
// The GRU reads the list from the lowest slot to slot 0 (the top document).
// s_n is the candidate state of the last step; each slot is scored from its
// own step output o and s_n.

#ifndef DLCM_MODELS_NETWORKS_H_
#define DLCM_MODELS_NETWORKS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dlcm/data/ranked_input.h"
#include "dlcm/gradcore/graph.h"
#include "dlcm/models/params.h"

namespace dlcm::models {

enum class ModelKind { kDnn, kLidnn, kDlcm };

const char* ModelKindName(ModelKind kind);
ModelKind ParseModelKind(std::string_view name);

inline constexpr std::size_t kMaxListSize = 200;
inline constexpr std::size_t kMinHidden = 64;
inline constexpr std::size_t kMaxHidden = 1024;

struct ModelSpec {
  ModelKind kind = ModelKind::kDlcm;
  std::size_t num_features = 0;  // alpha
  std::size_t list_size = 10;    // n
  std::size_t beta = 0;          // DLCM abstraction width
  std::size_t k = 5;             // DLCM scoring hidden units
  // DNN/LIDNN hidden widths: one entry = two-layer net, two = three-layer.
  std::vector<std::size_t> hidden = {64};

  std::size_t dim() const { return num_features + beta; }
  // Throws ConfigError on out-of-range settings.
  void Validate() const;
  bool operator==(const ModelSpec&) const = default;
};

ParamSet<float> InitParams(const ModelSpec& spec, std::uint64_t seed);

// Handles of the DLCM parameters bound on one graph.
template <typename T>
struct DlcmTensors {
  grad::Tensor<T> wz0, bz0, wz1, bz1;  // invalid when beta == 0
  grad::Tensor<T> w_x, w_s, w_ux, w_us, w_rx, w_rs;
  grad::Tensor<T> w_phi, b_phi, v_phi;
};

template <typename T>
DlcmTensors<T> UnpackDlcm(const ModelSpec& spec,
                          const std::vector<grad::Tensor<T>>& bound);

// [rows x alpha] -> [rows x (alpha + beta)].
template <typename T>
grad::Tensor<T> AbstractionForward(const grad::Tensor<T>& x,
                                   const DlcmTensors<T>& w, std::size_t beta);

template <typename T>
struct GruEncoding {
  std::vector<grad::Tensor<T>> outputs;  // o_t per feed step, each [1 x d]
  grad::Tensor<T> final_state;           // s_n, [1 x d]
};

// `feed` holds one input row per step, first row fed first. Throws
// ContractError on an empty sequence.
template <typename T>
GruEncoding<T> GruEncode(const grad::Tensor<T>& feed, const DlcmTensors<T>& w);

// Scores every slot of `inputs` ([n x alpha], slot order). Returns [n].
template <typename T>
grad::Tensor<T> Score(grad::Graph<T>& g, const ModelSpec& spec,
                      const std::vector<grad::Tensor<T>>& bound,
                      const grad::Array<T>& inputs);

// Model scores of a ranked list with padded slots set to -infinity.
std::vector<double> ScoreRankedList(const ModelSpec& spec,
                                    const ParamSet<float>& params,
                                    const data::RankedInput& list);

}  // namespace dlcm::models

#endif  // DLCM_MODELS_NETWORKS_H_

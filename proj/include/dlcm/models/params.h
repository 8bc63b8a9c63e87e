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

#ifndef DLCM_MODELS_PARAMS_H_
#define DLCM_MODELS_PARAMS_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dlcm/error.h"
#include "dlcm/gradcore/array.h"
#include "dlcm/gradcore/graph.h"
#include "dlcm/random.h"

namespace dlcm::models {

template <typename T>
struct NamedParam {
  std::string name;
  grad::Array<T> value;

  bool operator==(const NamedParam&) const = default;
};

// Ordered, named collection of model parameters. Order is significant: it is
// the order of Bind() handles and of checkpoint records.
template <typename T>
class ParamSet {
 public:
  void Add(std::string name, grad::Array<T> value) {
    for (const auto& e : entries_) {
      if (e.name == name) throw ContractError("duplicate parameter " + name);
    }
    entries_.push_back({std::move(name), std::move(value)});
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  NamedParam<T>& operator[](std::size_t i) { return entries_[i]; }
  const NamedParam<T>& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::size_t IndexOf(std::string_view name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].name == name) return i;
    }
    throw ConfigError("no parameter named " + std::string(name));
  }
  const grad::Array<T>& Get(std::string_view name) const {
    return entries_[IndexOf(name)].value;
  }
  grad::Array<T>& Get(std::string_view name) {
    return entries_[IndexOf(name)].value;
  }

  std::size_t TotalCount() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
  }

  bool operator==(const ParamSet&) const = default;

 private:
  std::vector<NamedParam<T>> entries_;
};

template <typename To, typename From>
ParamSet<To> CastParams(const ParamSet<From>& in) {
  ParamSet<To> out;
  for (const auto& e : in) out.Add(e.name, grad::Cast<To>(e.value));
  return out;
}

// Registers every parameter as a leaf on `g`, in set order.
template <typename T>
std::vector<grad::Tensor<T>> Bind(grad::Graph<T>& g, const ParamSet<T>& params,
                                  bool requires_grad) {
  std::vector<grad::Tensor<T>> out;
  out.reserve(params.size());
  for (const auto& e : params) out.push_back(g.Leaf(e.value, requires_grad));
  return out;
}

// Gradients of bound leaves after backward, zero-filled where none reached.
template <typename T>
std::vector<grad::Array<T>> CollectGrads(
    const std::vector<grad::Tensor<T>>& bound) {
  std::vector<grad::Array<T>> out;
  out.reserve(bound.size());
  for (const auto& t : bound) {
    out.push_back(t.grad() ? *t.grad() : grad::Array<T>(t.shape(), T{0}));
  }
  return out;
}

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
grad::Array<float> ScaledUniform(grad::Shape shape, std::size_t fan_in,
                                 Rng& rng);

}  // namespace dlcm::models

#endif  // DLCM_MODELS_PARAMS_H_

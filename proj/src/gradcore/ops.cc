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

#include "dlcm/gradcore/ops.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace dlcm::grad {
namespace {

template <typename T>
Graph<T>& OwningGraph(const Tensor<T>& a, const char* op) {
  if (!a.valid()) throw ContractError(std::string(op) + ": invalid tensor");
  return *a.graph();
}

template <typename T>
Graph<T>& OwningGraph(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (!a.valid() || !b.valid()) {
    throw ContractError(std::string(op) + ": invalid tensor");
  }
  if (a.graph() != b.graph()) {
    throw ContractError(std::string(op) + ": operands on different graphs");
  }
  return *a.graph();
}

// ---------------------------------------------------------------------------
// Broadcasting

bool IsTrailingMatch(const Shape& small, const Shape& big) {
  std::size_t lead = 0;
  while (lead < small.size() && small[lead] == 1) ++lead;
  const std::size_t rest = small.size() - lead;
  if (rest > big.size()) return false;
  return std::equal(small.begin() + lead, small.end(), big.end() - rest);
}

struct Broadcast {
  Shape out_shape;
  std::size_t a_mod;  // flat index into a is i % a_mod.
  std::size_t b_mod;
};

Broadcast PlanBroadcast(const Shape& a, const Shape& b, const char* op) {
  const std::size_t na = NumElements(a);
  const std::size_t nb = NumElements(b);
  if (a == b) return {a, na, nb};
  // Same element count, different rank (e.g. [] and [1x1]): keep the rank.
  if (na == nb && IsTrailingMatch(a, b) && IsTrailingMatch(b, a)) {
    return {a.size() >= b.size() ? a : b, na, nb};
  }
  if (nb == 1 || (nb <= na && IsTrailingMatch(b, a))) return {a, na, nb};
  if (na == 1 || (na <= nb && IsTrailingMatch(a, b))) return {b, na, nb};
  throw DimensionError(std::string(op) + ": cannot broadcast " +
                       ShapeString(a) + " with " + ShapeString(b));
}

// f(x, y) -> value; da(x, y, out) and db(x, y, out) are the partials.
template <typename T, typename F, typename DA, typename DB>
Tensor<T> Binary(OpKind kind, const char* name, const Tensor<T>& a,
                 const Tensor<T>& b, F f, DA da, DB db) {
  Graph<T>& g = OwningGraph(a, b, name);
  const Broadcast plan = PlanBroadcast(a.shape(), b.shape(), name);
  const Array<T>& av = a.value();
  const Array<T>& bv = b.value();
  Array<T> out(plan.out_shape);
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    out.data[i] = f(av.data[i % plan.a_mod], bv.data[i % plan.b_mod]);
  }
  return g.Record(
      kind, {a, b}, std::move(out),
      [plan, da, db](const Array<T>& go, const Array<T>& out_v,
                     const std::vector<const Array<T>*>& in,
                     const std::vector<Array<T>*>& gi) {
        const Array<T>& x = *in[0];
        const Array<T>& y = *in[1];
        const std::size_t n = go.size();
        for (std::size_t i = 0; i < n; ++i) {
          const T xv = x.data[i % plan.a_mod];
          const T yv = y.data[i % plan.b_mod];
          if (gi[0]) gi[0]->data[i % plan.a_mod] += go.data[i] * da(xv, yv, out_v.data[i]);
          if (gi[1]) gi[1]->data[i % plan.b_mod] += go.data[i] * db(xv, yv, out_v.data[i]);
        }
      });
}

// f(x) -> value; df(x, out) is the derivative.
template <typename T, typename F, typename DF>
Tensor<T> Unary(OpKind kind, const Tensor<T>& x, F f, DF df) {
  Graph<T>& g = OwningGraph(x, OpName(kind));
  const Array<T>& xv = x.value();
  Array<T> out(xv.shape);
  for (std::size_t i = 0; i < xv.size(); ++i) out.data[i] = f(xv.data[i]);
  return g.Record(kind, {x}, std::move(out),
                  [df](const Array<T>& go, const Array<T>& out_v,
                       const std::vector<const Array<T>*>& in,
                       const std::vector<Array<T>*>& gi) {
                    if (!gi[0]) return;
                    const Array<T>& x = *in[0];
                    for (std::size_t i = 0; i < go.size(); ++i) {
                      gi[0]->data[i] += go.data[i] * df(x.data[i], out_v.data[i]);
                    }
                  });
}

// outer x len x inner decomposition of a shape around `axis`.
struct AxisSplit {
  std::size_t outer = 1, len = 1, inner = 1;
};

AxisSplit SplitAt(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.len = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

Shape DropAxis(const Shape& shape, std::size_t axis) {
  Shape out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i != axis) out.push_back(shape[i]);
  }
  return out;
}

void CheckAxis(const Shape& shape, std::size_t axis, const char* op) {
  if (axis >= shape.size()) {
    throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) +
                         " out of range for shape " + ShapeString(shape));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> MatMul(const Tensor<T>& a, const Tensor<T>& b) {
  Graph<T>& g = OwningGraph(a, b, "matmul");
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.size() != 2 || sb.size() != 2 || sa[1] != sb[0]) {
    throw DimensionError("matmul: inner dimensions disagree for " +
                         ShapeString(sa) + " and " + ShapeString(sb));
  }
  const std::size_t m = sa[0], k = sa[1], n = sb[1];
  const Array<T>& av = a.value();
  const Array<T>& bv = b.value();
  Array<T> out(Shape{m, n});
  for (std::size_t i = 0; i < m; ++i) {
    T* orow = &out.data[i * n];
    for (std::size_t p = 0; p < k; ++p) {
      const T aip = av.data[i * k + p];
      const T* brow = &bv.data[p * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return g.Record(
      OpKind::kMatMul, {a, b}, std::move(out),
      [m, k, n](const Array<T>& go, const Array<T>&,
                const std::vector<const Array<T>*>& in,
                const std::vector<Array<T>*>& gi) {
        const Array<T>& av = *in[0];
        const Array<T>& bv = *in[1];
        if (gi[0]) {  // dA = G . B^T
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
              T acc{0};
              for (std::size_t j = 0; j < n; ++j) {
                acc += go.data[i * n + j] * bv.data[p * n + j];
              }
              gi[0]->data[i * k + p] += acc;
            }
          }
        }
        if (gi[1]) {  // dB = A^T . G
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
              const T aip = av.data[i * k + p];
              T* grow = &gi[1]->data[p * n];
              for (std::size_t j = 0; j < n; ++j) grow[j] += aip * go.data[i * n + j];
            }
          }
        }
      });
}

template <typename T>
Tensor<T> Add(const Tensor<T>& a, const Tensor<T>& b) {
  return Binary<T>(
      OpKind::kAdd, "add", a, b, [](T x, T y) { return x + y; },
      [](T, T, T) { return T{1}; }, [](T, T, T) { return T{1}; });
}

template <typename T>
Tensor<T> Sub(const Tensor<T>& a, const Tensor<T>& b) {
  return Binary<T>(
      OpKind::kSub, "sub", a, b, [](T x, T y) { return x - y; },
      [](T, T, T) { return T{1}; }, [](T, T, T) { return T{-1}; });
}

template <typename T>
Tensor<T> Mul(const Tensor<T>& a, const Tensor<T>& b) {
  return Binary<T>(
      OpKind::kMul, "mul", a, b, [](T x, T y) { return x * y; },
      [](T, T y, T) { return y; }, [](T x, T, T) { return x; });
}

template <typename T>
Tensor<T> Sigmoid(const Tensor<T>& x) {
  return Unary<T>(
      OpKind::kSigmoid, x,
      [](T v) {
        if (v >= 0) return T{1} / (T{1} + std::exp(-v));
        const T e = std::exp(v);
        return e / (T{1} + e);
      },
      [](T, T y) { return y * (T{1} - y); });
}

template <typename T>
Tensor<T> Tanh(const Tensor<T>& x) {
  return Unary<T>(
      OpKind::kTanh, x, [](T v) { return std::tanh(v); },
      [](T, T y) { return T{1} - y * y; });
}

template <typename T>
Tensor<T> Elu(const Tensor<T>& x) {
  return Unary<T>(
      OpKind::kElu, x, [](T v) { return v >= 0 ? v : std::expm1(v); },
      [](T v, T y) { return v >= 0 ? T{1} : y + T{1}; });
}

template <typename T>
Tensor<T> Exp(const Tensor<T>& x) {
  return Unary<T>(
      OpKind::kExp, x, [](T v) { return std::exp(v); },
      [](T, T y) { return y; });
}

template <typename T>
Tensor<T> Log(const Tensor<T>& x) {
  const T floor = static_cast<T>(kLogFloor);
  return Unary<T>(
      OpKind::kLog, x, [floor](T v) { return std::log(std::max(v, floor)); },
      [floor](T v, T) { return v >= floor ? T{1} / v : T{0}; });
}

template <typename T>
Tensor<T> Neg(const Tensor<T>& x) {
  return Unary<T>(
      OpKind::kNeg, x, [](T v) { return -v; }, [](T, T) { return T{-1}; });
}

template <typename T>
Tensor<T> ClampedReciprocal(const Tensor<T>& x) {
  const T floor = static_cast<T>(kLogFloor);
  return Unary<T>(
      OpKind::kClampedReciprocal, x,
      [floor](T v) { return T{1} / std::max(v, floor); },
      [floor](T v, T y) { return v >= floor ? -y * y : T{0}; });
}

// ---------------------------------------------------------------------------
// Reductions

template <typename T>
Tensor<T> Sum(const Tensor<T>& x, std::size_t axis) {
  Graph<T>& g = OwningGraph(x, "sum");
  CheckAxis(x.shape(), axis, "sum");
  const AxisSplit s = SplitAt(x.shape(), axis);
  const Array<T>& xv = x.value();
  Array<T> out(DropAxis(x.shape(), axis));
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t l = 0; l < s.len; ++l) {
      for (std::size_t i = 0; i < s.inner; ++i) {
        out.data[o * s.inner + i] += xv.data[(o * s.len + l) * s.inner + i];
      }
    }
  }
  return g.Record(OpKind::kSum, {x}, std::move(out),
                  [s](const Array<T>& go, const Array<T>&,
                      const std::vector<const Array<T>*>&,
                      const std::vector<Array<T>*>& gi) {
                    if (!gi[0]) return;
                    for (std::size_t o = 0; o < s.outer; ++o) {
                      for (std::size_t l = 0; l < s.len; ++l) {
                        for (std::size_t i = 0; i < s.inner; ++i) {
                          gi[0]->data[(o * s.len + l) * s.inner + i] +=
                              go.data[o * s.inner + i];
                        }
                      }
                    }
                  });
}

template <typename T>
Tensor<T> SumAll(const Tensor<T>& x) {
  const std::size_t n = x.size();
  Tensor<T> flat = x.shape().size() == 1 ? x : Reshape(x, Shape{n});
  return Sum(flat, 0);
}

template <typename T>
Tensor<T> Max(const Tensor<T>& x, std::size_t axis) {
  Graph<T>& g = OwningGraph(x, "max");
  CheckAxis(x.shape(), axis, "max");
  const AxisSplit s = SplitAt(x.shape(), axis);
  const Array<T>& xv = x.value();
  Array<T> out(DropAxis(x.shape(), axis));
  std::vector<std::size_t> argmax(out.size());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      std::size_t best = o * s.len * s.inner + i;
      for (std::size_t l = 1; l < s.len; ++l) {
        const std::size_t idx = (o * s.len + l) * s.inner + i;
        if (xv.data[idx] > xv.data[best]) best = idx;  // first max wins ties
      }
      out.data[o * s.inner + i] = xv.data[best];
      argmax[o * s.inner + i] = best;
    }
  }
  return g.Record(OpKind::kMax, {x}, std::move(out),
                  [argmax = std::move(argmax)](
                      const Array<T>& go, const Array<T>&,
                      const std::vector<const Array<T>*>&,
                      const std::vector<Array<T>*>& gi) {
                    if (!gi[0]) return;
                    for (std::size_t j = 0; j < argmax.size(); ++j) {
                      gi[0]->data[argmax[j]] += go.data[j];
                    }
                  });
}

template <typename T>
Tensor<T> SoftmaxLastAxis(const Tensor<T>& x) {
  Graph<T>& g = OwningGraph(x, "softmax");
  if (x.shape().empty()) {
    throw DimensionError("softmax: scalar input has no last axis");
  }
  const std::size_t len = x.shape().back();
  const std::size_t rows = x.size() / len;
  const Array<T>& xv = x.value();
  Array<T> out(xv.shape);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = &xv.data[r * len];
    T* o = &out.data[r * len];
    const T mx = *std::max_element(in, in + len);
    T z{0};
    for (std::size_t j = 0; j < len; ++j) z += (o[j] = std::exp(in[j] - mx));
    for (std::size_t j = 0; j < len; ++j) o[j] /= z;
  }
  return g.Record(OpKind::kSoftmax, {x}, std::move(out),
                  [rows, len](const Array<T>& go, const Array<T>& y,
                              const std::vector<const Array<T>*>&,
                              const std::vector<Array<T>*>& gi) {
                    if (!gi[0]) return;
                    for (std::size_t r = 0; r < rows; ++r) {
                      const std::size_t base = r * len;
                      T dot{0};
                      for (std::size_t j = 0; j < len; ++j) {
                        dot += go.data[base + j] * y.data[base + j];
                      }
                      for (std::size_t j = 0; j < len; ++j) {
                        gi[0]->data[base + j] +=
                            y.data[base + j] * (go.data[base + j] - dot);
                      }
                    }
                  });
}

// ---------------------------------------------------------------------------
// Structural ops

template <typename T>
Tensor<T> Reshape(const Tensor<T>& x, Shape shape) {
  Graph<T>& g = OwningGraph(x, "reshape");
  if (NumElements(shape) != x.size()) {
    throw DimensionError("reshape: " + ShapeString(x.shape()) + " to " +
                         ShapeString(shape));
  }
  Array<T> out(std::move(shape), x.value().data);
  return g.Record(OpKind::kReshape, {x}, std::move(out),
                  [](const Array<T>& go, const Array<T>&,
                     const std::vector<const Array<T>*>&,
                     const std::vector<Array<T>*>& gi) {
                    if (!gi[0]) return;
                    for (std::size_t i = 0; i < go.size(); ++i) {
                      gi[0]->data[i] += go.data[i];
                    }
                  });
}

template <typename T>
Tensor<T> Concat(std::span<const Tensor<T>> parts, std::size_t axis) {
  if (parts.empty()) throw ContractError("concat: no inputs");
  Graph<T>& g = OwningGraph(parts[0], "concat");
  const Shape& first = parts[0].shape();
  CheckAxis(first, axis, "concat");
  std::vector<AxisSplit> splits;
  std::size_t total = 0;
  for (const Tensor<T>& p : parts) {
    if (p.graph() != &g) throw ContractError("concat: mixed graphs");
    const Shape& s = p.shape();
    bool ok = s.size() == first.size();
    for (std::size_t i = 0; ok && i < s.size(); ++i) {
      ok = i == axis || s[i] == first[i];
    }
    if (!ok) {
      throw DimensionError("concat: " + ShapeString(s) +
                           " incompatible with " + ShapeString(first) +
                           " along axis " + std::to_string(axis));
    }
    splits.push_back(SplitAt(s, axis));
    total += s[axis];
  }
  Shape out_shape = first;
  out_shape[axis] = total;
  Array<T> out(out_shape);
  const std::size_t outer = splits[0].outer, inner = splits[0].inner;
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    offsets.push_back(off);
    const Array<T>& v = parts[p].value();
    const std::size_t len = splits[p].len;
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(&v.data[o * len * inner], len * inner,
                  &out.data[(o * total + off) * inner]);
    }
    off += len;
  }
  std::vector<Tensor<T>> inputs(parts.begin(), parts.end());
  return g.Record(
      OpKind::kConcat, std::move(inputs), std::move(out),
      [splits, offsets, total, outer, inner](
          const Array<T>& go, const Array<T>&,
          const std::vector<const Array<T>*>&,
          const std::vector<Array<T>*>& gi) {
        for (std::size_t p = 0; p < gi.size(); ++p) {
          if (!gi[p]) continue;
          const std::size_t len = splits[p].len;
          for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t j = 0; j < len * inner; ++j) {
              gi[p]->data[o * len * inner + j] +=
                  go.data[(o * total + offsets[p]) * inner + j];
            }
          }
        }
      });
}

template <typename T>
Tensor<T> Take(const Tensor<T>& x, std::span<const std::size_t> indices) {
  Graph<T>& g = OwningGraph(x, "take");
  const Shape& s = x.shape();
  if (s.empty()) throw DimensionError("take: scalar input");
  if (indices.empty()) throw ContractError("take: empty index list");
  const std::size_t row = x.size() / s[0];
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  for (std::size_t i : idx) {
    if (i >= s[0]) {
      throw DimensionError("take: index " + std::to_string(i) +
                           " out of range for shape " + ShapeString(s));
    }
  }
  Shape out_shape = s;
  out_shape[0] = idx.size();
  Array<T> out(out_shape);
  const Array<T>& xv = x.value();
  for (std::size_t r = 0; r < idx.size(); ++r) {
    std::copy_n(&xv.data[idx[r] * row], row, &out.data[r * row]);
  }
  return g.Record(OpKind::kTake, {x}, std::move(out),
                  [idx = std::move(idx), row](
                      const Array<T>& go, const Array<T>&,
                      const std::vector<const Array<T>*>&,
                      const std::vector<Array<T>*>& gi) {
                    if (!gi[0]) return;
                    for (std::size_t r = 0; r < idx.size(); ++r) {
                      for (std::size_t j = 0; j < row; ++j) {
                        gi[0]->data[idx[r] * row + j] += go.data[r * row + j];
                      }
                    }
                  });
}

template <typename T>
Tensor<T> Slice(const Tensor<T>& x, std::size_t begin, std::size_t end) {
  if (begin >= end) throw ContractError("slice: empty range");
  std::vector<std::size_t> idx(end - begin);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
  return Take(x, std::span<const std::size_t>(idx));
}

template <typename T>
Tensor<T> Detach(const Tensor<T>& x) {
  return OwningGraph(x, "detach").Constant(x.value());
}

template <typename T>
Tensor<T> Scale(const Tensor<T>& x, T factor) {
  return Mul(x, OwningGraph(x, "scale").Constant(Array<T>::Scalar(factor)));
}

template <typename T>
Tensor<T> AddScalar(const Tensor<T>& x, T c) {
  return Add(x, OwningGraph(x, "add_scalar").Constant(Array<T>::Scalar(c)));
}

template <typename T>
Tensor<T> LogSumExp(const Tensor<T>& x) {
  // The shift is a detached constant: log-sum-exp is shift invariant, so the
  // gradient is unaffected.
  const T shift = *std::max_element(x.value().data.begin(), x.value().data.end());
  Tensor<T> shifted = AddScalar(x, -shift);
  return AddScalar(Log(SumAll(Exp(shifted))), shift);
}

#define DLCM_INSTANTIATE_OPS(T)                                              \
  template Tensor<T> MatMul(const Tensor<T>&, const Tensor<T>&);             \
  template Tensor<T> Add(const Tensor<T>&, const Tensor<T>&);                \
  template Tensor<T> Sub(const Tensor<T>&, const Tensor<T>&);                \
  template Tensor<T> Mul(const Tensor<T>&, const Tensor<T>&);                \
  template Tensor<T> Sigmoid(const Tensor<T>&);                              \
  template Tensor<T> Tanh(const Tensor<T>&);                                 \
  template Tensor<T> Elu(const Tensor<T>&);                                  \
  template Tensor<T> Exp(const Tensor<T>&);                                  \
  template Tensor<T> Log(const Tensor<T>&);                                  \
  template Tensor<T> Neg(const Tensor<T>&);                                  \
  template Tensor<T> ClampedReciprocal(const Tensor<T>&);                    \
  template Tensor<T> Sum(const Tensor<T>&, std::size_t);                     \
  template Tensor<T> SumAll(const Tensor<T>&);                               \
  template Tensor<T> Max(const Tensor<T>&, std::size_t);                     \
  template Tensor<T> SoftmaxLastAxis(const Tensor<T>&);                      \
  template Tensor<T> Reshape(const Tensor<T>&, Shape);                       \
  template Tensor<T> Concat(std::span<const Tensor<T>>, std::size_t);        \
  template Tensor<T> Take(const Tensor<T>&, std::span<const std::size_t>);   \
  template Tensor<T> Slice(const Tensor<T>&, std::size_t, std::size_t);      \
  template Tensor<T> Detach(const Tensor<T>&);                               \
  template Tensor<T> Scale(const Tensor<T>&, T);                             \
  template Tensor<T> AddScalar(const Tensor<T>&, T);                         \
  template Tensor<T> LogSumExp(const Tensor<T>&);

DLCM_INSTANTIATE_OPS(float)
DLCM_INSTANTIATE_OPS(double)

#undef DLCM_INSTANTIATE_OPS

}  // namespace dlcm::grad

// Copyright 2026 The GAMT Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gamt/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "gamt/error.hpp"

namespace gamt {

// ---------------------------------------------------------------------------
// ParameterStore / Gradients

std::size_t ParameterStore::add(std::string name, Tensor value) {
  if (index_.count(name)) throw ContractError("duplicate parameter name: " + name);
  const std::size_t i = values_.size();
  index_.emplace(name, i);
  names_.push_back(std::move(name));
  values_.push_back(std::move(value));
  return i;
}

void ParameterStore::set(std::size_t i, Tensor value) {
  if (value.shape() != values_.at(i).shape()) {
    throw DimensionError("parameter " + names_[i] + " has shape " +
                         shape_string(values_[i].shape()) + ", got " + shape_string(value.shape()));
  }
  values_[i] = std::move(value);
}

std::optional<std::size_t> ParameterStore::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ParameterStore::index(const std::string& name) const {
  auto i = find(name);
  if (!i) throw ContractError("unknown parameter: " + name);
  return *i;
}

std::size_t ParameterStore::total_elements() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

Gradients::Gradients(const ParameterStore& store) {
  shapes_.reserve(store.size());
  buffers_.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    shapes_.push_back(store.value(i).shape());
    buffers_.emplace_back(store.value(i).size(), 0.0);
  }
}

void Gradients::zero() {
  for (auto& b : buffers_) std::fill(b.begin(), b.end(), 0.0);
}

void Gradients::scale(double k) {
  for (auto& b : buffers_) {
    for (double& g : b) g *= k;
  }
}

double Gradients::global_norm() const {
  double sq = 0.0;
  for (const auto& b : buffers_) {
    for (double g : b) sq += g * g;
  }
  return std::sqrt(sq);
}

// ---------------------------------------------------------------------------
// Tape

const Tensor& Var::value() const {
  if (!tape_) throw ContractError("use of an unbound Var");
  return tape_->value(id_);
}

Var Tape::record(Op op, Tensor value, std::vector<std::uint32_t> operands, double k,
                 std::vector<std::size_t> ids) {
  nodes_.push_back(Node{op, std::move(value), std::move(operands), k, std::move(ids)});
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::constant(Tensor value) { return record(Op::kConstant, std::move(value), {}); }

Var Tape::parameter(const ParameterStore& store, std::size_t index) {
  return record(Op::kParameter, store.value(index), {}, 0.0, {index});
}

namespace {

void accumulate(std::vector<double>& dst, std::size_t n) {
  if (dst.empty()) dst.assign(n, 0.0);
}

}  // namespace

void Tape::backward(Var loss, Gradients& grads, double seed) const {
  if (loss.tape() != this) throw ContractError("backward: loss was not recorded on this tape");
  if (loss.value().size() != 1) {
    throw ContractError("backward: loss must be a scalar, got shape " +
                        shape_string(loss.value().shape()));
  }
  std::vector<std::vector<double>> g(nodes_.size());
  g[loss.id()] = {seed};

  for (std::size_t idx = loss.id() + 1; idx-- > 0;) {
    if (g[idx].empty()) continue;
    const Node& node = nodes_[idx];
    const std::vector<double>& dy = g[idx];
    const auto y = node.value.data();

    auto grad_of = [&](std::size_t operand) -> std::vector<double>& {
      const auto id = node.operands[operand];
      accumulate(g[id], nodes_[id].value.size());
      return g[id];
    };
    auto val_of = [&](std::size_t operand) { return nodes_[node.operands[operand]].value.data(); };

    switch (node.op) {
      case Op::kConstant:
        break;
      case Op::kParameter: {
        auto dst = grads[node.ids[0]];
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += dy[i];
        break;
      }
      case Op::kMatmul: {
        const Tensor& a = nodes_[node.operands[0]].value;
        const Tensor& b = nodes_[node.operands[1]].value;
        const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
        const auto A = a.data();
        const auto B = b.data();
        auto& dA = grad_of(0);
        auto& dB = grad_of(1);
        for (std::size_t i = 0; i < m; ++i) {
          const double* dyi = &dy[i * n];
          for (std::size_t p = 0; p < k; ++p) {
            const double* bp = &B[p * n];
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += dyi[j] * bp[j];
            dA[i * k + p] += acc;
            const double aip = A[i * k + p];
            double* dbp = &dB[p * n];
            for (std::size_t j = 0; j < n; ++j) dbp[j] += aip * dyi[j];
          }
        }
        break;
      }
      case Op::kAdd: {
        auto& da = grad_of(0);
        for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i];
        auto& db = grad_of(1);
        for (std::size_t i = 0; i < dy.size(); ++i) db[i] += dy[i];
        break;
      }
      case Op::kSub: {
        auto& da = grad_of(0);
        for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i];
        auto& db = grad_of(1);
        for (std::size_t i = 0; i < dy.size(); ++i) db[i] -= dy[i];
        break;
      }
      case Op::kMul: {
        const auto a = val_of(0);
        const auto b = val_of(1);
        auto& da = grad_of(0);
        for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i] * b[i];
        auto& db = grad_of(1);
        for (std::size_t i = 0; i < dy.size(); ++i) db[i] += dy[i] * a[i];
        break;
      }
      case Op::kTanh: {
        auto& dx = grad_of(0);
        for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i] * (1.0 - y[i] * y[i]);
        break;
      }
      case Op::kSigmoid: {
        auto& dx = grad_of(0);
        for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i] * y[i] * (1.0 - y[i]);
        break;
      }
      case Op::kAbs: {
        const auto x = val_of(0);
        auto& dx = grad_of(0);
        for (std::size_t i = 0; i < dy.size(); ++i) {
          const double s = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
          dx[i] += dy[i] * s;
        }
        break;
      }
      case Op::kScale: {
        auto& dx = grad_of(0);
        for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i] * node.k;
        break;
      }
      case Op::kLog: {
        const auto x = val_of(0);
        auto& dx = grad_of(0);
        for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i] / x[i];
        break;
      }
      case Op::kSoftmaxRow: {
        double dot = 0.0;
        for (std::size_t i = 0; i < dy.size(); ++i) dot += dy[i] * y[i];
        auto& dx = grad_of(0);
        for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += y[i] * (dy[i] - dot);
        break;
      }
      case Op::kLogSoftmaxRow: {
        double total = 0.0;
        for (double d : dy) total += d;
        auto& dx = grad_of(0);
        for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i] - std::exp(y[i]) * total;
        break;
      }
      case Op::kGatherRows: {
        const std::size_t d = node.value.cols();
        auto& dt = grad_of(0);
        for (std::size_t r = 0; r < node.ids.size(); ++r) {
          double* dst = &dt[node.ids[r] * d];
          for (std::size_t c = 0; c < d; ++c) dst[c] += dy[r * d + c];
        }
        break;
      }
      case Op::kConcatCols: {
        const std::size_t rows = node.value.rows();
        const std::size_t total = node.value.cols();
        std::size_t offset = 0;
        for (std::size_t p = 0; p < node.operands.size(); ++p) {
          const std::size_t w = nodes_[node.operands[p]].value.cols();
          auto& dp = grad_of(p);
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < w; ++c) dp[r * w + c] += dy[r * total + offset + c];
          }
          offset += w;
        }
        break;
      }
      case Op::kConcatRows: {
        std::size_t offset = 0;
        for (std::size_t p = 0; p < node.operands.size(); ++p) {
          const std::size_t n = nodes_[node.operands[p]].value.size();
          auto& dp = grad_of(p);
          for (std::size_t i = 0; i < n; ++i) dp[i] += dy[offset + i];
          offset += n;
        }
        break;
      }
      case Op::kSum: {
        auto& dx = grad_of(0);
        for (double& v : dx) v += dy[0];
        break;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Ops

namespace {

Tape& tape_of(Var a) {
  if (!a.valid()) throw ContractError("op applied to an unbound Var");
  return *a.tape();
}

Tape& tape_of(Var a, Var b) {
  if (!a.valid() || !b.valid()) throw ContractError("op applied to an unbound Var");
  if (a.tape() != b.tape()) throw ContractError("operands recorded on different tapes");
  return *a.tape();
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
}

template <typename F>
Var unary(Op op, Var x, F f, double k = 0.0) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  std::vector<double> out(xv.size());
  const auto in = xv.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return t.record(op, Tensor(xv.shape(), std::move(out)), {x.id()}, k);
}

template <typename F>
Var binary(Op op, const char* name, Var a, Var b, F f) {
  Tape& t = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_same_shape(name, av, bv);
  std::vector<double> out(av.size());
  const auto x = av.data();
  const auto y = bv.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i], y[i]);
  return t.record(op, Tensor(av.shape(), std::move(out)), {a.id(), b.id()});
}

const Tensor& single_row(const char* op, Var x) {
  const Tensor& v = x.value();
  if (v.rank() != 2 || v.rows() != 1) {
    throw DimensionError(std::string(op) + ": expected a 1xn row, got " + shape_string(v.shape()));
  }
  return v;
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() != 2 || bv.rank() != 2 || av.cols() != bv.rows()) {
    throw DimensionError("matmul: cannot multiply " + shape_string(av.shape()) + " by " +
                         shape_string(bv.shape()));
  }
  const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
  const auto A = av.data();
  const auto B = bv.data();
  std::vector<double> C(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = &C[i * n];
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      const double* bp = &B[p * n];
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
  return t.record(Op::kMatmul, Tensor({m, n}, std::move(C)), {a.id(), b.id()});
}

Var add(Var a, Var b) {
  return binary(Op::kAdd, "add", a, b, [](double x, double y) { return x + y; });
}

Var sub(Var a, Var b) {
  return binary(Op::kSub, "sub", a, b, [](double x, double y) { return x - y; });
}

Var mul(Var a, Var b) {
  return binary(Op::kMul, "mul", a, b, [](double x, double y) { return x * y; });
}

Var tanh(Var x) {
  return unary(Op::kTanh, x, [](double v) { return std::tanh(v); });
}

Var sigmoid(Var x) {
  return unary(Op::kSigmoid, x, [](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

Var abs(Var x) {
  return unary(Op::kAbs, x, [](double v) { return std::fabs(v); });
}

Var scale(Var x, double k) {
  return unary(Op::kScale, x, [k](double v) { return v * k; }, k);
}

Var log(Var x) {
  return unary(Op::kLog, x, [](double v) { return std::log(v); });
}

Var softmax_row(Var x) {
  Tape& t = tape_of(x);
  const Tensor& v = single_row("softmax_row", x);
  const auto in = v.data();
  const double m = *std::max_element(in.begin(), in.end());
  std::vector<double> out(in.size());
  double total = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = std::exp(in[i] - m);
    total += out[i];
  }
  for (double& o : out) o /= total;
  return t.record(Op::kSoftmaxRow, Tensor(v.shape(), std::move(out)), {x.id()});
}

Var log_softmax_row(Var x) {
  Tape& t = tape_of(x);
  const Tensor& v = single_row("log_softmax_row", x);
  const auto in = v.data();
  const double m = *std::max_element(in.begin(), in.end());
  double total = 0.0;
  for (double e : in) total += std::exp(e - m);
  const double log_total = std::log(total);
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = (in[i] - m) - log_total;
  return t.record(Op::kLogSoftmaxRow, Tensor(v.shape(), std::move(out)), {x.id()});
}

Var gather_rows(Var table, std::span<const std::size_t> ids) {
  Tape& t = tape_of(table);
  const Tensor& tv = table.value();
  if (tv.rank() != 2) throw DimensionError("gather_rows: table must be rank 2");
  if (ids.empty()) throw ContractError("gather_rows: empty id list");
  const std::size_t v = tv.rows(), d = tv.cols();
  const auto src = tv.data();
  std::vector<double> out(ids.size() * d);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] >= v) {
      throw IndexError("gather_rows: id " + std::to_string(ids[r]) + " out of range for " +
                       std::to_string(v) + " rows");
    }
    std::copy_n(&src[ids[r] * d], d, &out[r * d]);
  }
  return t.record(Op::kGatherRows, Tensor({ids.size(), d}, std::move(out)), {table.id()}, 0.0,
                  std::vector<std::size_t>(ids.begin(), ids.end()));
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no operands");
  Tape& t = tape_of(parts[0]);
  const std::size_t rows = parts[0].value().rows();
  std::size_t total = 0;
  std::vector<std::uint32_t> ids;
  for (const Var& p : parts) {
    tape_of(parts[0], p);
    if (p.value().rank() != 2 || p.value().rows() != rows) {
      throw DimensionError("concat_cols: row count mismatch " +
                           shape_string(parts[0].value().shape()) + " vs " +
                           shape_string(p.value().shape()));
    }
    total += p.value().cols();
    ids.push_back(p.id());
  }
  std::vector<double> out(rows * total);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const std::size_t w = p.value().cols();
    const auto src = p.value().data();
    for (std::size_t r = 0; r < rows; ++r) std::copy_n(&src[r * w], w, &out[r * total + offset]);
    offset += w;
  }
  return t.record(Op::kConcatCols, Tensor({rows, total}, std::move(out)), std::move(ids));
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_rows: no operands");
  Tape& t = tape_of(parts[0]);
  const std::size_t cols = parts[0].value().cols();
  std::size_t rows = 0;
  std::vector<std::uint32_t> ids;
  std::vector<double> out;
  for (const Var& p : parts) {
    tape_of(parts[0], p);
    if (p.value().rank() != 2 || p.value().cols() != cols) {
      throw DimensionError("concat_rows: column count mismatch " +
                           shape_string(parts[0].value().shape()) + " vs " +
                           shape_string(p.value().shape()));
    }
    rows += p.value().rows();
    ids.push_back(p.id());
    const auto src = p.value().data();
    out.insert(out.end(), src.begin(), src.end());
  }
  return t.record(Op::kConcatRows, Tensor({rows, cols}, std::move(out)), std::move(ids));
}

Var sum(Var x) {
  Tape& t = tape_of(x);
  double total = 0.0;
  for (double v : x.value().data()) total += v;
  return t.record(Op::kSum, Tensor::scalar(total), {x.id()});
}

}  // namespace gamt

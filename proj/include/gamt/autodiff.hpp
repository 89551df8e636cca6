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

#pragma once

// Reverse-mode automatic differentiation over a fixed set of dense ops.
//
// A Tape records every op executed on it. Parameters live in a
// ParameterStore; binding one onto a tape creates a leaf whose gradient is
// accumulated into a Gradients buffer by Tape::backward. All ops work on
// rank-2 tensors and do no broadcasting.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gamt/tensor.hpp"

namespace gamt {

class ParameterStore {
 public:
  std::size_t add(std::string name, Tensor value);

  std::size_t size() const { return values_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const Tensor& value(std::size_t i) const { return values_.at(i); }
  // Replacement must keep the declared shape.
  void set(std::size_t i, Tensor value);

  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t index(const std::string& name) const;
  const Tensor& value(const std::string& name) const { return value(index(name)); }

  std::size_t total_elements() const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

// One flat gradient buffer per parameter of a store.
class Gradients {
 public:
  explicit Gradients(const ParameterStore& store);

  std::size_t size() const { return buffers_.size(); }
  std::span<double> operator[](std::size_t i) { return buffers_[i]; }
  std::span<const double> operator[](std::size_t i) const { return buffers_[i]; }
  const Shape& shape(std::size_t i) const { return shapes_[i]; }
  Tensor tensor(std::size_t i) const { return Tensor(shapes_[i], buffers_[i]); }

  void zero();
  void scale(double k);
  double global_norm() const;

 private:
  std::vector<Shape> shapes_;
  std::vector<std::vector<double>> buffers_;
};

class Tape;

// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  const Tensor& value() const;
  Tape* tape() const { return tape_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

enum class Op : std::uint8_t {
  kConstant,
  kParameter,
  kMatmul,
  kAdd,
  kSub,
  kMul,
  kTanh,
  kSigmoid,
  kAbs,
  kScale,
  kLog,
  kSoftmaxRow,
  kLogSoftmaxRow,
  kGatherRows,
  kConcatCols,
  kConcatRows,
  kSum,
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var parameter(const ParameterStore& store, std::size_t index);

  // Reverse sweep from a 1x1 loss. Parameter gradients are scaled by `seed`
  // and added into `grads`; the tape itself is left unchanged, so repeated
  // sweeps give identical results.
  void backward(Var loss, Gradients& grads, double seed = 1.0) const;

  std::size_t size() const { return nodes_.size(); }
  const Tensor& value(std::uint32_t id) const { return nodes_[id].value; }

  // Used by the op functions below.
  Var record(Op op, Tensor value, std::vector<std::uint32_t> operands, double k = 0.0,
             std::vector<std::size_t> ids = {});

 private:
  struct Node {
    Op op;
    Tensor value;
    std::vector<std::uint32_t> operands;
    double k = 0.0;                // scale factor
    std::vector<std::size_t> ids;  // gather ids, or parameter index
  };

  std::vector<Node> nodes_;
};

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var tanh(Var x);
Var sigmoid(Var x);
// Subgradient at 0 is 0.
Var abs(Var x);
Var scale(Var x, double k);
Var log(Var x);
Var softmax_row(Var x);
Var log_softmax_row(Var x);
Var gather_rows(Var table, std::span<const std::size_t> ids);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var sum(Var x);

}  // namespace gamt

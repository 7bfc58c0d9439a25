// Copyright 2026 The DMM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Lightweight machines: M + N streams of fixed-shape M x N matrices.
//
//   X^i_{t+1} = sum_j a_{i,j} Y^j_t        with A = Y^1_t
//   Y^j_{t+1} = f^j(X^1_{t+1}, ..., X^M_{t+1})
//
// so Y^1 is both a stream and the connectivity of the next step. Matrix and
// stream indices are 0-based in code; wave positions are reported 1-based.
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dmm/activations.hpp"
#include "dmm/engine.hpp"
#include "dmm/errors.hpp"
#include "dmm/rect_matrix.hpp"
#include "dmm/vspace.hpp"

namespace dmm {

using StreamFunction = std::function<RectMatrix(std::span<const RectMatrix>)>;

struct LightweightSystem {
  std::size_t rows = 0;  // M
  std::size_t cols = 0;  // N
  std::vector<StreamFunction> functions;  // f^1 .. f^N
  std::vector<RectMatrix> outputs;        // Y^1 .. Y^N
  std::size_t t = 0;

  const RectMatrix& connectivity() const { return outputs.front(); }
};

inline void validate(const LightweightSystem& sys) {
  if (sys.rows == 0 || sys.cols == 0)
    throw DimensionError("lightweight system needs M, N >= 1");
  if (sys.functions.size() != sys.cols || sys.outputs.size() != sys.cols)
    throw DimensionError("lightweight system needs exactly N functions and N "
                         "output streams");
  for (const RectMatrix& y : sys.outputs)
    if (y.rows() != sys.rows || y.cols() != sys.cols)
      throw DimensionError("stream value has shape " + y.shape_string() +
                           ", expected " + std::to_string(sys.rows) + "x" +
                           std::to_string(sys.cols));
}

inline LightweightSystem lw_step(LightweightSystem sys) {
  validate(sys);
  const RectMatrix& a = sys.connectivity();
  std::vector<RectMatrix> xs(sys.rows, RectMatrix(sys.rows, sys.cols));
  for (std::size_t i = 0; i < sys.rows; ++i)
    for (std::size_t j = 0; j < sys.cols; ++j)
      if (a(i, j) != 0.0) xs[i] += a(i, j) * sys.outputs[j];

  std::vector<RectMatrix> next;
  next.reserve(sys.cols);
  for (std::size_t j = 0; j < sys.cols; ++j) {
    RectMatrix y = sys.functions[j](xs);
    if (y.rows() != sys.rows || y.cols() != sys.cols)
      throw DimensionError("f^" + std::to_string(j + 1) + " returned shape " +
                           y.shape_string());
    next.push_back(std::move(y));
  }
  sys.outputs = std::move(next);
  ++sys.t;
  return sys;
}

// f^1 = X^1 + X^2 and f^j = U^j for j >= 2, starting from Y^1_0 = A and
// Y^j_0 = U^j. `updates` holds U^2 .. U^N.
inline LightweightSystem build_accumulator_system(
    const RectMatrix& a0, const std::vector<RectMatrix>& updates) {
  if (a0.rows() < 2)
    throw DimensionError("accumulator system needs M >= 2");
  LightweightSystem sys;
  sys.rows = a0.rows();
  sys.cols = updates.size() + 1;
  if (a0.cols() != sys.cols)
    throw DimensionError("A has " + std::to_string(a0.cols()) +
                         " columns but there are " + std::to_string(sys.cols) +
                         " streams");
  sys.functions.push_back(
      [](std::span<const RectMatrix> x) { return x[0] + x[1]; });
  sys.outputs.push_back(a0);
  for (const RectMatrix& u : updates) {
    sys.functions.push_back([u](std::span<const RectMatrix>) { return u; });
    sys.outputs.push_back(u);
  }
  validate(sys);
  return sys;
}

struct WaveOptions {
  // Optional third row: U^2 gets +payload, U^3 gets -payload, so A carries
  // the payload in row 3 for exactly one step out of every three.
  std::optional<std::vector<double>> payload;
};

inline constexpr std::size_t kWaveStreams = 4;

// The circulating-wave example: row 2 of U^2, U^3, U^4 points from each
// update stream to the next with weight 1 and to itself with weight -1.
inline std::vector<RectMatrix> wave_updates(const WaveOptions& opts = {}) {
  const std::size_t m = opts.payload ? 3 : 2;
  std::vector<RectMatrix> u(3, RectMatrix(m, kWaveStreams));
  u[0](1, 1) = -1;  // u^2_{2,2}
  u[0](1, 2) = 1;   // u^2_{2,3}
  u[1](1, 2) = -1;  // u^3_{2,3}
  u[1](1, 3) = 1;   // u^3_{2,4}
  u[2](1, 3) = -1;  // u^4_{2,4}
  u[2](1, 1) = 1;   // u^4_{2,2}
  if (opts.payload) {
    if (opts.payload->size() != kWaveStreams)
      throw DimensionError("payload row needs " + std::to_string(kWaveStreams) +
                           " entries");
    for (std::size_t j = 0; j < kWaveStreams; ++j) {
      u[0](2, j) = (*opts.payload)[j];
      u[1](2, j) = -(*opts.payload)[j];
    }
  }
  return u;
}

inline RectMatrix wave_initial_connectivity(const WaveOptions& opts = {}) {
  RectMatrix a(opts.payload ? 3 : 2, kWaveStreams);
  a(0, 0) = 1;  // a_{1,1}
  a(1, 1) = 1;  // a_{2,2}
  return a;
}

inline LightweightSystem build_wave_example(const WaveOptions& opts = {}) {
  return build_accumulator_system(wave_initial_connectivity(opts),
                                  wave_updates(opts));
}

// 1-based column of the single 1 in row 2 of `a`.
inline std::size_t wave_position(const RectMatrix& a) {
  if (a.rows() < 2) throw InvariantBrokenError("matrix has no second row");
  std::optional<std::size_t> pos;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double x = a(1, j);
    if (x == 1.0 && !pos) {
      pos = j + 1;
    } else if (x != 0.0) {
      throw InvariantBrokenError("row 2 entry " + std::to_string(j + 1) +
                                 " is " + std::to_string(x));
    }
  }
  if (!pos) throw InvariantBrokenError("row 2 has no entry equal to 1");
  return *pos;
}

inline std::size_t wave_position(const LightweightSystem& sys) {
  return wave_position(sys.connectivity());
}

// --- encoding into the general engine ----------------------------------------
//
// Row i of a lightweight matrix maps to an input address, column j to an
// output address; entry (i, j) becomes the weight on the six-token path
// (row_i, column_j). Column 1 is the Self neuron, an `add` accumulator whose
// inputs x1, x2 receive X^1, X^2; columns j >= 2 are const neurons emitting
// U^j. Rows i >= 3 feed observer neurons identity/x<i>.
class AccumulatorEncoding {
 public:
  AccumulatorEncoding(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  static NeuronAddress self_address() { return {"add", "Self", "single"}; }

  static NeuronAddress row_address(std::size_t i) {
    const Token port = "x" + std::to_string(i + 1);
    if (i < 2) return {"add", "Self", port};
    return {"identity", port, Token(kSingle)};
  }

  static Token update_name(std::size_t j) { return "u" + std::to_string(j + 1); }

  static NeuronAddress column_address(std::size_t j) {
    if (j == 0) return self_address();
    return {std::string(kConstPrefix) + update_name(j), update_name(j),
            Token(kSingle)};
  }

  PTVector encode(const RectMatrix& m) const {
    check_shape(m);
    std::vector<std::pair<Path, double>> terms;
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        if (m(i, j) == 0.0) continue;
        const NeuronAddress r = row_address(i);
        const NeuronAddress c = column_address(j);
        terms.push_back({{r.type, r.neuron, r.port, c.type, c.neuron, c.port},
                         m(i, j)});
      }
    }
    return from_terms(terms, 0.0);
  }

  RectMatrix decode(const PTVector& v) const {
    RectMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        const NeuronAddress r = row_address(i);
        const NeuronAddress c = column_address(j);
        const Token path[] = {r.type, r.neuron, r.port, c.type, c.neuron, c.port};
        m(i, j) = coefficient(v, path);
      }
    }
    return m;
  }

  // Engine state equivalent to build_accumulator_system(a0, updates).
  EngineState build_state(const RectMatrix& a0,
                          const std::vector<RectMatrix>& updates) const {
    if (updates.size() + 1 != cols_)
      throw DimensionError("expected " + std::to_string(cols_ - 1) +
                           " update matrices");
    EngineState s;
    auto registry =
        std::make_shared<NeuronTypeRegistry>(NeuronTypeRegistry::with_builtins());
    s.matrix = NetworkMatrix(encode(a0));
    s.self_address = self_address();
    s.set_output(self_address().key(),
                 attach(PTVector{}, kSingle, s.matrix.weights()));
    for (std::size_t j = 1; j < cols_; ++j) {
      PTVector u = encode(updates[j - 1]);
      registry->add_constant(update_name(j), u);
      s.constants.insert_or_assign(update_name(j), u);
      s.set_output(column_address(j).key(), attach(PTVector{}, kSingle, u));
    }
    s.registry = std::move(registry);
    return s;
  }

 private:
  void check_shape(const RectMatrix& m) const {
    if (m.rows() != rows_ || m.cols() != cols_)
      throw DimensionError("matrix has shape " + m.shape_string() +
                           ", encoding expects " + std::to_string(rows_) + "x" +
                           std::to_string(cols_));
  }

  std::size_t rows_;
  std::size_t cols_;
};

inline EngineState build_wave_dmm(const WaveOptions& opts = {}) {
  RectMatrix a0 = wave_initial_connectivity(opts);
  return AccumulatorEncoding(a0.rows(), a0.cols())
      .build_state(a0, wave_updates(opts));
}

}  // namespace dmm

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
// Built-in scenarios with self-checking verdicts. Each returns a report the
// CLI prints; `pass` is false when the scenario's invariant failed.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dmm/activations.hpp"
#include "dmm/engine.hpp"
#include "dmm/lightweight.hpp"
#include "dmm/random.hpp"
#include "dmm/samples.hpp"
#include "dmm/vspace.hpp"

namespace dmm {

struct DemoReport {
  bool pass = true;
  std::string summary;

  void fail(const std::string& why) {
    if (pass) summary.clear();
    pass = false;
    summary += (summary.empty() ? "" : "; ") + why;
  }
};

// --- wave --------------------------------------------------------------------

struct WaveStep {
  std::size_t t;
  std::size_t position;
  const RectMatrix& connectivity;
};

// Steps the wave example, checking that the 1 in row 2 of Y^1_t sits at
// column 2, 3, 4, 2, ... and, with a payload, that row 3 holds the payload
// exactly when t = 1 (mod 3). `on_step` sees the matrix that drives step t.
inline DemoReport demo_wave(std::size_t steps, const WaveOptions& opts = {},
                            const std::function<void(const WaveStep&)>& on_step =
                                nullptr) {
  DemoReport report;
  LightweightSystem sys = build_wave_example(opts);
  for (std::size_t t = 0; t < steps; ++t) {
    std::size_t pos = 0;
    try {
      pos = wave_position(sys);
    } catch (const InvariantBrokenError& e) {
      report.fail("t=" + std::to_string(t) + ": " + e.what());
      return report;
    }
    if (on_step) on_step(WaveStep{t, pos, sys.connectivity()});
    const std::size_t expected = 2 + t % 3;
    if (pos != expected) {
      report.fail("t=" + std::to_string(t) + ": position " +
                  std::to_string(pos) + ", expected " +
                  std::to_string(expected));
      return report;
    }
    if (opts.payload) {
      for (std::size_t j = 0; j < kWaveStreams; ++j) {
        const double want = t % 3 == 1 ? (*opts.payload)[j] : 0.0;
        if (sys.connectivity()(2, j) != want) {
          report.fail("t=" + std::to_string(t) + ": payload row entry " +
                      std::to_string(j + 1) + " is " +
                      std::to_string(sys.connectivity()(2, j)));
          return report;
        }
      }
    }
    sys = lw_step(std::move(sys));
  }
  report.summary = "wave position cycles 2,3,4 with period 3 over " +
                   std::to_string(steps) + " steps; row 2 keeps a single 1";
  if (opts.payload) report.summary += "; payload present once every 3 steps";
  return report;
}

// --- rnn ---------------------------------------------------------------------

inline RnnSpec random_rnn_spec(std::size_t k, std::size_t m, std::size_t steps,
                               std::uint64_t seed,
                               const Token& nonlinearity = "tanh") {
  Rng rng(seed);
  auto draw = [&] { return 2.0 * uniform01(rng) - 1.0; };
  RnnSpec spec{RectMatrix(k, k), RectMatrix(k, m), nonlinearity, {}};
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) spec.recurrent(r, c) = draw();
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < m; ++c) spec.input(r, c) = draw();
  spec.inputs.assign(steps, std::vector<double>(m));
  for (auto& v : spec.inputs)
    for (double& x : v) x = draw();
  return spec;
}

// Plain-loop reference for y^{t+1} = f(W_rec y^t + W_in i^t), y^0 = 0.
// Returns y^1 .. y^steps.
inline std::vector<std::vector<double>> dense_rnn_trajectory(
    const RnnSpec& spec, std::size_t steps) {
  const std::size_t k = spec.recurrent.rows();
  const std::size_t m = spec.input.cols();
  std::function<double(double)> f = [](double x) { return std::tanh(x); };
  if (spec.nonlinearity == "identity") f = [](double x) { return x; };
  if (spec.nonlinearity == "sigmoid")
    f = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  std::vector<double> y(k, 0.0);
  std::vector<std::vector<double>> out;
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<double> x(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t l = 0; l < k; ++l) x[j] += spec.recurrent(j, l) * y[l];
      if (t < spec.inputs.size())
        for (std::size_t c = 0; c < m; ++c)
          x[j] += spec.input(j, c) * spec.inputs[t][c];
    }
    for (std::size_t j = 0; j < k; ++j) y[j] = f(x[j]);
    out.push_back(y);
  }
  return out;
}

inline DemoReport demo_rnn(std::uint64_t seed, std::size_t steps = 100,
                           std::size_t k = 4, std::size_t m = 2) {
  DemoReport report;
  const RnnSpec spec = random_rnn_spec(k, m, steps, seed);
  const auto reference = dense_rnn_trajectory(spec, steps);
  EngineState s = build_rnn(spec, seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    s = step(std::move(s));
    const auto y = rnn_hidden_state(s, spec);
    for (std::size_t j = 0; j < k; ++j)
      worst = std::max(worst, std::abs(y[j] - reference[t][j]));
  }
  std::ostringstream os;
  os << "rnn k=" << k << " m=" << m << " over " << steps
     << " steps: max deviation from dense reference " << worst;
  report.summary = os.str();
  if (!(worst < 1e-12)) report.fail(report.summary + " (limit 1e-12)");
  return report;
}

// --- self-accumulate ---------------------------------------------------------

// Self is an `add` neuron whose output feeds its own `accum` input with
// weight 1; const:update feeds `delta` with weight 1. Each step the matrix
// grows by `update`.
struct SelfAccumulator {
  PTVector initial;  // W_0, including the two wiring weights
  PTVector update;   // U
  EngineState state;
};

inline SelfAccumulator build_self_accumulator(const PTVector& extra_weights,
                                              const PTVector& update) {
  const NeuronAddress self{"add", "Self", Token(kSingle)};
  const NeuronAddress src{"const:update", "update", Token(kSingle)};
  PTVector w0 = extra_weights;
  auto set = [&](const NeuronAddress& to, const NeuronAddress& from) {
    const Token path[] = {to.type,   to.neuron,   to.port,
                          from.type, from.neuron, from.port};
    w0 = with_coefficient(w0, path, 1.0);
  };
  set({"add", "Self", Token(kAccum)}, self);
  set({"add", "Self", Token(kDelta)}, src);

  EngineState s;
  s.add_constant("update", update);
  s.matrix = NetworkMatrix(w0);
  s.self_address = self;
  s.set_output(self.key(), attach(PTVector{}, kSingle, w0));
  s.set_output(src.key(), attach(PTVector{}, kSingle, update));
  return {w0, update, std::move(s)};
}

// Integer-weighted instance used by the demo and tests.
inline SelfAccumulator default_self_accumulator() {
  PTVector extra = from_terms({
      {{"identity", "a", "single", "identity", "b", "single"}, 3.0},
      {{"tanh", "h", "single", "identity", "a", "single"}, -2.0},
  });
  PTVector update = from_terms({
      {{"identity", "a", "single", "identity", "c", "single"}, 2.0},
      {{"identity", "b", "single", "identity", "a", "single"}, -1.0},
      {{"tanh", "h", "single", "identity", "a", "single"}, 1.0},
  });
  return build_self_accumulator(extra, update);
}

inline DemoReport demo_self_accumulate(std::size_t steps = 10) {
  DemoReport report;
  SelfAccumulator acc = default_self_accumulator();
  EngineState s = acc.state;
  for (std::size_t t = 1; t <= steps; ++t) {
    s = step(std::move(s));
    const std::pair<double, PTVector> expected_terms[] = {
        {1.0, acc.initial}, {static_cast<double>(t), acc.update}};
    const PTVector expected = linear_combination(expected_terms, 0.0);
    if (!(s.matrix.weights() == expected)) {
      report.fail("t=" + std::to_string(t) + ": matrix differs from W0 + t*U");
      return report;
    }
  }
  report.summary = "matrix equals W0 + t*U exactly for t = 1.." +
                   std::to_string(steps);
  return report;
}

// Self whose delta is a depth-1 constant, so every self-update is malformed.
inline EngineState build_malformed_self() {
  PTVector junk = from_terms({{{"junk"}, 1.0}});
  SelfAccumulator acc = build_self_accumulator(PTVector{}, junk);
  return acc.state;
}

// --- sampling ----------------------------------------------------------------

struct SamplingCase {
  double alpha1;
  double alpha2;
};

inline DemoReport demo_sampling(std::size_t draws, std::uint64_t seed) {
  DemoReport report;
  Rng rng(seed);
  const SampleSlot p = SignedSample{"p", Sign::kPlus};
  const SampleSlot q = SignedSample{"q", Sign::kPlus};
  std::ostringstream os;
  for (const SamplingCase c : {SamplingCase{0.3, 0.7}, SamplingCase{0.5, -0.5},
                               SamplingCase{0.0, 0.0}}) {
    std::size_t first = 0, second = 0, missing = 0, bad_sign = 0;
    for (std::size_t n = 0; n < draws; ++n) {
      SampleSlot s = combine_samples({{c.alpha1, p}, {c.alpha2, q}}, rng);
      if (!s) {
        ++missing;
        continue;
      }
      const double alpha = s->point == "p" ? c.alpha1 : c.alpha2;
      if (s->sign != sign_of(alpha)) ++bad_sign;
      (s->point == "p" ? first : second)++;
    }
    os << "(" << c.alpha1 << "," << c.alpha2 << "): ";
    const double total = std::abs(c.alpha1) + std::abs(c.alpha2);
    if (total == 0.0) {
      os << "missing " << missing << "/" << draws;
      if (missing != draws) report.fail("zero coefficients produced a sample");
    } else {
      const double prob = std::abs(c.alpha1) / total;
      const double sigma = std::sqrt(prob * (1.0 - prob) / draws);
      const double freq = static_cast<double>(first) / draws;
      os << "freq(p)=" << freq << " expected " << prob << " 3sigma="
         << 3 * sigma;
      if (std::abs(freq - prob) > 3 * sigma)
        report.fail("selection frequency outside 3 sigma");
      if (missing != 0) report.fail("nonzero coefficients produced Missing");
      if (bad_sign != 0) report.fail("sign rule violated");
    }
    os << "; ";
  }
  if (report.pass) report.summary = os.str();
  else report.summary += " [" + os.str() + "]";
  return report;
}

}  // namespace dmm

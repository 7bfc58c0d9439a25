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
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dmm/demos.hpp"
#include "dmm/engine.hpp"
#include "support/oracles.hpp"

namespace dmm {
namespace {

using testing::dense_down_movement;
using testing::flat_distance;
using testing::flatten_inputs;

PTVector weight(const NeuronAddress& to, const NeuronAddress& from, double w) {
  return from_terms(
      {{{to.type, to.neuron, to.port, from.type, from.neuron, from.port}, w}});
}

TEST(DownMovement, SingleWeight) {
  PTVector m = weight({"identity", "n1", "x"}, {"identity", "n2", "out"}, 2.0);
  NeuronMap outputs{{{"identity", "n2"}, from_terms({{{"out", "a"}, 3.0}})}};
  NeuronMap in = down_movement(m, outputs);
  ASSERT_EQ(in.size(), 1u);
  EXPECT_EQ(in.at({"identity", "n1"}), from_terms({{{"x", "a"}, 6.0}}));
}

TEST(DownMovement, ZeroMatrixGivesEmptyMap) {
  NeuronMap outputs{{{"identity", "n2"}, from_terms({{{"out", "a"}, 3.0}})}};
  EXPECT_TRUE(down_movement(zero(), outputs).empty());
}

TEST(DownMovement, RowWithSilentSourcesIsPresentWithZeroInput) {
  PTVector m = weight({"tanh", "h", "single"}, {"identity", "quiet", "single"}, 1.0);
  NeuronMap in = down_movement(m, {});
  ASSERT_EQ(in.size(), 1u);
  EXPECT_TRUE(in.at({"tanh", "h"}).is_zero());
}

TEST(DownMovement, RejectsWrongDepth) {
  PTVector bad = from_terms({{{"a", "b", "c", "d", "e"}, 1.0}});
  try {
    down_movement(bad, {});
    FAIL();
  } catch (const MatrixDepthError& e) {
    EXPECT_EQ(e.path(), "a/b/c/d/e");
    EXPECT_EQ(e.depth(), 5u);
  }
  EXPECT_THROW(NetworkMatrix(from_terms({{{"a", "b", "c", "d", "e", "f", "g"}, 1.0}})),
               MatrixDepthError);
  EXPECT_THROW(NetworkMatrix(PTVector::scalar_only(1.0)), MatrixDepthError);
}

TEST(DownMovement, ThirtyWeightsOverFiveNeuronsMatchDenseOracle) {
  Rng rng(30);
  for (int trial = 0; trial < 20; ++trial) {
    testing::RandomNetwork net = testing::random_network(rng, 5, 30, 3);
    NeuronMap in = down_movement(net.matrix, net.outputs);
    testing::DenseInputs dense = dense_down_movement(net.matrix, net.outputs);
    EXPECT_LE(flat_distance(flatten_inputs(in), dense.flat), 1e-12);
    std::set<NeuronKey> keys;
    for (const auto& [k, v] : in) keys.insert(k);
    EXPECT_EQ(keys, dense.present);
  }
}

TEST(UpMovement, AppliesEachType) {
  Rng rng(0);
  NeuronTypeRegistry r = NeuronTypeRegistry::with_builtins();
  NeuronMap in{{{"add", "Self"},
                from_terms({{{"accum", "a"}, 1.0}, {{"delta", "a"}, 1.0}})}};
  NeuronMap out = up_movement(r, in, rng);
  EXPECT_EQ(out.at({"add", "Self"}), from_terms({{{"single", "a"}, 2.0}}));
  EXPECT_TRUE(up_movement(r, {}, rng).empty());
  NeuronMap t{{{"tanh", "h1"}, from_terms({{{"single"}, 0.0}})}};
  EXPECT_TRUE(up_movement(r, t, rng).at({"tanh", "h1"}).is_zero());
}

TEST(UpMovement, UnknownTypeNamesTheType) {
  Rng rng(0);
  NeuronTypeRegistry r = NeuronTypeRegistry::with_builtins();
  NeuronMap in{{{"add", "a"}, zero()}, {{"mystery", "b"}, zero()}};
  try {
    up_movement(r, in, rng);
    FAIL();
  } catch (const UnknownNeuronTypeError& e) {
    EXPECT_EQ(e.type_name(), "mystery");
  }
}

TEST(Step, UnknownTypeLeavesStateUntouched) {
  EngineState s;
  s.matrix = NetworkMatrix(weight({"mystery", "m", "single"}, {"identity", "x", "single"}, 1.0));
  s.set_output({"identity", "x"}, from_terms({{{"single"}, 1.0}}));
  const EngineState before = s;
  EXPECT_THROW(step(s), UnknownNeuronTypeError);
  EXPECT_EQ(s.matrix, before.matrix);
  EXPECT_EQ(s.outputs, before.outputs);
  EXPECT_EQ(s.step_count, 0u);
}

// Hand-stepped oracle: W_{t+1} = W_t + U with integer weights.
TEST(Step, SelfAccumulatorAddsUpdateEachStep) {
  SelfAccumulator acc = default_self_accumulator();
  EngineState s = acc.state;
  PTVector expected = acc.initial;
  for (int t = 1; t <= 10; ++t) {
    s = step(std::move(s));
    expected = add(expected, acc.update, 0.0);
    EXPECT_EQ(s.matrix.weights(), expected) << "t=" << t;
    EXPECT_EQ(s.output(*s.self_address), s.matrix.weights());
    EXPECT_TRUE(finite_activity_holds(s));
  }
  EXPECT_EQ(coefficient(s.matrix.weights(),
                        Path{"identity", "a", "single", "identity", "c", "single"}),
            20.0);
}

TEST(Step, StaticMatrixWithoutSelf) {
  Rng rng(101);
  testing::RandomNetwork net = testing::random_network(rng, 8, 40, 3);
  EngineState s;
  s.matrix = NetworkMatrix(net.matrix);
  for (const auto& [k, v] : net.outputs) s.set_output(k, v);
  const NetworkMatrix m0 = s.matrix;
  for (int t = 0; t < 100; ++t) {
    s = step(std::move(s));
    EXPECT_EQ(s.matrix, m0);
    EXPECT_TRUE(finite_activity_holds(s));
  }
  EXPECT_EQ(s.step_count, 100u);
}

TEST(Step, NeuronsWithoutRowsKeepTheirOutput) {
  EngineState s;
  s.matrix = NetworkMatrix(weight({"identity", "sink", "single"}, {"identity", "src", "single"}, 1.0));
  s.set_output({"identity", "src"}, from_terms({{{"single", "a"}, 4.0}}));
  s = step(std::move(s));
  s = step(std::move(s));
  EXPECT_EQ(s.output({"identity", "src", "single"}), from_terms({{{"a"}, 4.0}}));
  EXPECT_EQ(s.output({"identity", "sink", "single"}), from_terms({{{"a"}, 4.0}}));
}

TEST(Step, MalformedSelfUpdateKeepsPreviousMatrix) {
  EngineState s = build_malformed_self();
  const NetworkMatrix m0 = s.matrix;
  for (int t = 0; t < 100; ++t) s = step(std::move(s));
  EXPECT_EQ(s.matrix, m0);
  EXPECT_EQ(s.warnings.size(), 100u);
  EXPECT_EQ(s.warnings.front().kind, "self-update-rejected");
  EXPECT_NE(s.warnings.front().message.find("junk"), std::string::npos);
}

TEST(Run, ZeroStepsIsIdentity) {
  SelfAccumulator acc = default_self_accumulator();
  auto [s, log] = run(acc.state, 0, {{"add", "Self", "single"}});
  EXPECT_TRUE(log.empty());
  EXPECT_EQ(s.matrix, acc.state.matrix);
  EXPECT_EQ(s.outputs, acc.state.outputs);
  EXPECT_EQ(s.step_count, 0u);
}

TEST(Run, Composes) {
  const RnnSpec spec = random_rnn_spec(3, 2, 20, 5);
  const std::vector<NeuronAddress> trace = {{"tanh", "h1", "single"},
                                            {"tanh", "h3", "single"}};
  auto [whole, whole_log] = run(build_rnn(spec), 12, trace);
  auto [half, log_a] = run(build_rnn(spec), 5, trace);
  auto [rest, log_b] = run(half, 7, trace);
  EXPECT_EQ(rest.outputs, whole.outputs);
  EXPECT_EQ(rest.step_count, 12u);
  ASSERT_EQ(log_a.size() + log_b.size(), whole_log.size());
  log_a.insert(log_a.end(), log_b.begin(), log_b.end());
  for (std::size_t k = 0; k < whole_log.size(); ++k) {
    EXPECT_EQ(log_a[k].step, whole_log[k].step);
    EXPECT_EQ(log_a[k].address, whole_log[k].address);
    EXPECT_EQ(log_a[k].value, whole_log[k].value);
  }
  EXPECT_EQ(whole_log.back().step, 12u);
}

TEST(Run, DeterministicUnderSeed) {
  auto trace_of = [](std::uint64_t seed) {
    EngineState s = default_self_accumulator().state;
    s.reseed(seed);
    return run(s, 10, {{"add", "Self", "single"}}).second;
  };
  auto a = trace_of(3), b = trace_of(3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].value, b[k].value);
}

TEST(SetWeight, SetReadDelete) {
  EngineState s;
  const NeuronAddress from{"identity", "a", "single"};
  const NeuronAddress to{"tanh", "b", "single"};
  s = set_weight(std::move(s), from, to, 0.75);
  EXPECT_EQ(s.matrix.weight(to, from), 0.75);
  EXPECT_EQ(s.matrix.nonzero_count(), 1u);
  s = set_weight(std::move(s), from, to, 0.0);
  EXPECT_TRUE(s.matrix.weights().is_zero());

  for (int k = 0; k < 7; ++k)
    s = set_weight(std::move(s), {"identity", "n" + std::to_string(k), "single"},
                   to, k + 1.0);
  EXPECT_EQ(s.matrix.nonzero_count(), 7u);
}

TEST(SetWeight, SurvivesSelfUpdate) {
  SelfAccumulator acc = default_self_accumulator();
  EngineState s = set_weight(acc.state, {"identity", "q", "single"},
                             {"identity", "r", "single"}, 5.0);
  s = step(std::move(s));
  EXPECT_EQ(s.matrix.weight({"identity", "r", "single"}, {"identity", "q", "single"}),
            5.0);
}

TEST(BuildRnn, DegenerateCases) {
  RnnSpec zero_rnn{RectMatrix(1, 1), RectMatrix(1, 0), "tanh", {}};
  EngineState s = build_rnn(zero_rnn);
  EXPECT_EQ(s.matrix.nonzero_count(), 0u);
  for (int t = 0; t < 10; ++t) s = step(std::move(s));
  EXPECT_TRUE(s.outputs.empty());

  RnnSpec ident{RectMatrix::from_rows({{1, 0}, {0, 1}}), RectMatrix(2, 0), "tanh", {}};
  s = build_rnn(ident);
  for (int t = 0; t < 10; ++t) {
    s = step(std::move(s));
    EXPECT_EQ(rnn_hidden_state(s, ident), (std::vector<double>{0.0, 0.0}));
  }
}

TEST(BuildRnn, DimensionErrors) {
  EXPECT_THROW(build_rnn({RectMatrix(2, 3), RectMatrix(2, 1), "tanh", {}}),
               DimensionError);
  EXPECT_THROW(build_rnn({RectMatrix(2, 2), RectMatrix(3, 1), "tanh", {}}),
               DimensionError);
  EXPECT_THROW(build_rnn({RectMatrix(2, 2), RectMatrix(2, 1), "tanh", {{1.0, 2.0}}}),
               DimensionError);
  EXPECT_THROW(build_rnn({RectMatrix(2, 2), RectMatrix(2, 1), "relu", {}}),
               UnknownNeuronTypeError);
}

TEST(BuildRnn, DenseEncodingHasKTimesKPlusMWeights) {
  const RnnSpec spec = random_rnn_spec(4, 2, 10, 1);
  EXPECT_EQ(build_rnn(spec).matrix.nonzero_count(), 24u);
}

TEST(BuildRnn, MatchesDenseReference) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const RnnSpec spec = random_rnn_spec(4, 2, 100, seed);
    const auto ref = testing::reference_rnn(
        spec.recurrent, spec.input, spec.inputs, 100,
        [](double x) { return std::tanh(x); });
    EngineState s = build_rnn(spec, seed);
    for (std::size_t t = 0; t < 100; ++t) {
      s = step(std::move(s));
      const auto y = rnn_hidden_state(s, spec);
      for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(y[j], ref[t][j], 1e-12);
      EXPECT_TRUE(finite_activity_holds(s));
    }
  }
}

TEST(BuildRnn, IdentityNonlinearityIsLinearRecurrence) {
  RnnSpec spec{RectMatrix::from_rows({{0.5}}), RectMatrix::from_rows({{1.0}}),
               "identity", {{1.0}, {0.0}, {0.0}}};
  EngineState s = build_rnn(spec);
  std::vector<double> ys;
  for (int t = 0; t < 3; ++t) {
    s = step(std::move(s));
    ys.push_back(rnn_hidden_state(s, spec)[0]);
  }
  EXPECT_EQ(ys, (std::vector<double>{1.0, 0.5, 0.25}));
}

TEST(Addresses, Parse) {
  EXPECT_EQ(parse_address("add/Self/single"), (NeuronAddress{"add", "Self", "single"}));
  EXPECT_EQ(parse_neuron_key("const:u2/u2"), (NeuronKey{"const:u2", "u2"}));
  EXPECT_THROW(parse_address("add/Self"), ParseError);
  EXPECT_THROW(parse_address("a//b"), ParseError);
  EXPECT_THROW(parse_address("a/b/:number"), ReservedTokenError);
}

}  // namespace
}  // namespace dmm

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
#include <string>

#include <gtest/gtest.h>

#include "dmm/demos.hpp"
#include "dmm/network_file.hpp"

namespace dmm {
namespace {

std::string parse_error_where(const char* text) {
  try {
    network_from_json(json::parse(text));
  } catch (const ParseError& e) {
    return e.where();
  }
  return "<no error>";
}

TEST(NetworkFile, MinimalFile) {
  EngineState s = network_from_json(json::parse(R"({
    "registry": ["identity"],
    "matrix": {"identity": {"b": {"single": {"identity": {"a": {"single": 2}}}}}},
    "init_outputs": {"identity/a": {"single": {"v": 1.5}}},
    "seed": 11
  })"));
  EXPECT_EQ(s.matrix.nonzero_count(), 1u);
  EXPECT_EQ(s.seed, 11u);
  EXPECT_FALSE(s.self_address);
  s = step(std::move(s));
  EXPECT_EQ(s.output({"identity", "b", "single"}), from_terms({{{"v"}, 3.0}}));
}

TEST(NetworkFile, ExportedNetworksRoundTrip) {
  const EngineState states[] = {build_wave_dmm(), build_rnn(random_rnn_spec(4, 2, 5, 3)),
                                default_self_accumulator().state, build_malformed_self()};
  for (const EngineState& s : states) {
    const json doc = network_to_json(s);
    EngineState back = network_from_json(doc);
    EXPECT_EQ(back.matrix, s.matrix);
    EXPECT_EQ(back.outputs, s.outputs);
    EXPECT_EQ(back.self_address, s.self_address);
    EXPECT_EQ(back.registry->names(), s.registry->names());
    EXPECT_EQ(network_to_json(back), doc);
    // Both copies evolve identically.
    EngineState a = s, b = back;
    for (int t = 0; t < 5; ++t) {
      a = step(std::move(a));
      b = step(std::move(b));
    }
    EXPECT_EQ(a.outputs, b.outputs);
    EXPECT_EQ(a.matrix, b.matrix);
  }
}

TEST(NetworkFile, SelfWithoutInitialValueEmitsMatrix) {
  EngineState s = network_from_json(json::parse(R"({
    "registry": ["add"],
    "matrix": {"add": {"Self": {"accum": {"add": {"Self": {"single": 1}}}}}},
    "self": "add/Self/single"
  })"));
  ASSERT_TRUE(s.self_address);
  EXPECT_EQ(s.output(*s.self_address), s.matrix.weights());
}

TEST(NetworkFile, FeedsDriveInputNeurons) {
  EngineState s = network_from_json(json::parse(R"({
    "registry": ["identity"],
    "matrix": {"identity": {"y": {"single": {"identity": {"x": {"single": 1}}}}}},
    "inputs": {"identity/x": [{"single": 1}, {"single": 2}]}
  })"));
  EXPECT_EQ(s.output({"identity", "x", "single"}), PTVector::scalar_only(1.0));
  s = step(std::move(s));
  EXPECT_EQ(s.output({"identity", "y", "single"}), PTVector::scalar_only(1.0));
  s = step(std::move(s));
  EXPECT_EQ(s.output({"identity", "y", "single"}), PTVector::scalar_only(2.0));
}

TEST(NetworkFile, ValidationErrorsNameTheirLocation) {
  EXPECT_EQ(parse_error_where(R"({"registry": [], "matrix": {"a": {"b": {"c": {"d": {"e": 1}}}}}})"),
            "matrix/a/b/c/d/e");
  EXPECT_EQ(parse_error_where(R"({"registry": ["relu"], "matrix": {}})"), "registry/0");
  EXPECT_EQ(parse_error_where(R"({"registry": ["const:u"], "matrix": {}})"),
            "registry/0");
  EXPECT_EQ(parse_error_where(R"({"matrix": {}})"), "registry");
  EXPECT_EQ(parse_error_where(R"({"registry": []})"), "matrix");
  EXPECT_EQ(parse_error_where(R"({"registry": [], "matrix": {}, "extra": 1})"), "extra");
  EXPECT_EQ(parse_error_where(
                R"({"registry": [], "matrix": {"tanh": {"h": {"single": {"identity": {"x": {"single": 1}}}}}}})"),
            "matrix/tanh");
  EXPECT_EQ(parse_error_where(R"({"registry": [], "matrix": {}, "seed": "x"})"), "seed");
  EXPECT_EQ(parse_error_where(R"({"registry": [], "matrix": {}, "epsilon": 0})"),
            "epsilon");
  EXPECT_EQ(parse_error_where(
                R"({"registry": [], "matrix": {}, "init_outputs": {"bad": {}}})"),
            "init_outputs/bad");
  EXPECT_EQ(parse_error_where(R"({"registry": [], "matrix": {}, "self": "a/b"})"), "self");
  EXPECT_EQ(parse_error_where(
                R"({"registry": [], "matrix": {}, "inputs": {"identity/x": {}}})"),
            "inputs/identity/x");
}

TEST(NetworkFile, ConstantsAreRegistered) {
  EngineState s = network_from_json(json::parse(R"({
    "registry": ["identity", "const:u"],
    "constants": {"u": {"k": 4}},
    "matrix": {"identity": {"y": {"single": {"const:u": {"u": {"single": 0.5}}}}}}
  })"));
  s = step(std::move(s));
  // const:u has no row, so only its seeded output (if any) reaches y.
  EXPECT_TRUE(s.output({"identity", "y", "single"}).is_zero());
  EXPECT_EQ(s.constants.at("u"), from_terms({{{"k"}, 4.0}}));
}

TEST(NetworkFile, MissingFileIsParseError) {
  EXPECT_THROW(load_network_file("/nonexistent/net.json"), ParseError);
}

TEST(NetworkFile, TraceRecordShape) {
  const json j = trace_to_json({3, {"tanh", "h1", "single"}, PTVector::scalar_only(0.5)});
  EXPECT_EQ(j.dump(), R"({"address":"tanh/h1/single","step":3,"value":{":number":0.5}})");
}

}  // namespace
}  // namespace dmm

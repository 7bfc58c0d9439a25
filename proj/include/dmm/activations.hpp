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
// Built-in neuron types.
//
// Every neuron has one input and one output in V. The first-level keys of
// the input name its arguments; the first-level keys of the output name its
// results. Single-result neurons emit under the key `single`.
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dmm/errors.hpp"
#include "dmm/random.hpp"
#include "dmm/vspace.hpp"

namespace dmm {

inline constexpr std::string_view kSingle = "single";
inline constexpr std::string_view kAccum = "accum";
inline constexpr std::string_view kDelta = "delta";
inline constexpr std::string_view kDecay = "decay";
inline constexpr std::string_view kMask = "mask";
inline constexpr std::string_view kSignal = "signal";

inline constexpr std::string_view kConstPrefix = "const:";
inline constexpr double kDefaultLeak = 0.9;

// Per-call context. Deterministic transforms ignore the rng.
struct NeuronContext {
  Rng& rng;
  double epsilon = kDefaultEpsilon;
};

using Transform = std::function<PTVector(const PTVector&, NeuronContext&)>;

struct NeuronType {
  Token name;
  Transform transform;
};

namespace detail {

inline PTVector single_output(PTVector value) {
  return attach(PTVector{}, kSingle, std::move(value));
}

}  // namespace detail

// Sums every argument: {single: sum_k v[k]}. With arguments `accum` and
// `delta` and its output wired back into `accum`, this is an accumulator.
inline PTVector act_add(const PTVector& v, double epsilon = kDefaultEpsilon) {
  std::vector<Term> terms;
  for (const auto& [token, child] : v.children())
    terms.push_back(Term{1.0, &child});
  return detail::single_output(linear_combination(terms, epsilon));
}

inline PTVector act_identity(const PTVector& v) {
  return detail::single_output(subtree(v, kSingle));
}

// {single: decay * v[single] + v[delta]}; decay is the scalar of argument
// `decay`, or kDefaultLeak when that argument is absent.
inline PTVector act_leaky(const PTVector& v,
                          double epsilon = kDefaultEpsilon) {
  const PTVector* decay = v.find(kDecay);
  const double lambda = decay ? decay->scalar() : kDefaultLeak;
  PTVector state = subtree(v, kSingle);
  PTVector delta = subtree(v, kDelta);
  const Term terms[] = {{lambda, &state}, {1.0, &delta}};
  return detail::single_output(linear_combination(terms, epsilon));
}

// Gates `signal` by the scalar component of `mask`.
inline PTVector act_multiply(const PTVector& v,
                             double epsilon = kDefaultEpsilon) {
  const double gate = subtree(v, kMask).scalar();
  return detail::single_output(scale(gate, subtree(v, kSignal), epsilon));
}

inline PTVector act_tanh(const PTVector& v, double epsilon = kDefaultEpsilon) {
  return detail::single_output(map_coefficients(
      subtree(v, kSingle), [](double x) { return std::tanh(x); }, epsilon));
}

// Applied to present coefficients only; absent paths stay zero.
inline PTVector act_sigmoid(const PTVector& v,
                            double epsilon = kDefaultEpsilon) {
  return detail::single_output(map_coefficients(
      subtree(v, kSingle), [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      epsilon));
}

// A neuron type that ignores its input and always emits {single: c}.
inline NeuronType act_const(const Token& name, PTVector c) {
  PTVector out = detail::single_output(std::move(c));
  return NeuronType{std::string(kConstPrefix) + name,
                    [out](const PTVector&, NeuronContext&) { return out; }};
}

class NeuronTypeRegistry {
 public:
  NeuronTypeRegistry() = default;

  static NeuronTypeRegistry with_builtins() {
    NeuronTypeRegistry r;
    r.add({"add", [](const PTVector& v, NeuronContext& c) {
             return act_add(v, c.epsilon);
           }});
    r.add({"identity",
           [](const PTVector& v, NeuronContext&) { return act_identity(v); }});
    r.add({"leaky", [](const PTVector& v, NeuronContext& c) {
             return act_leaky(v, c.epsilon);
           }});
    r.add({"multiply", [](const PTVector& v, NeuronContext& c) {
             return act_multiply(v, c.epsilon);
           }});
    r.add({"tanh", [](const PTVector& v, NeuronContext& c) {
             return act_tanh(v, c.epsilon);
           }});
    r.add({"sigmoid", [](const PTVector& v, NeuronContext& c) {
             return act_sigmoid(v, c.epsilon);
           }});
    return r;
  }

  static bool is_builtin_name(std::string_view name) {
    return name == "add" || name == "identity" || name == "leaky" ||
           name == "multiply" || name == "tanh" || name == "sigmoid";
  }

  void add(NeuronType type) {
    Token name = type.name;
    types_.insert_or_assign(std::move(name), std::move(type));
  }

  // Registers "const:<name>".
  void add_constant(const Token& name, PTVector value) {
    add(act_const(name, std::move(value)));
  }

  bool contains(std::string_view name) const {
    return types_.find(name) != types_.end();
  }

  const NeuronType& resolve(std::string_view name) const {
    auto it = types_.find(name);
    if (it == types_.end()) throw UnknownNeuronTypeError(std::string(name));
    return it->second;
  }

  std::vector<Token> names() const {
    std::vector<Token> out;
    for (const auto& [name, type] : types_) out.push_back(name);
    return out;
  }

 private:
  std::map<Token, NeuronType, std::less<>> types_;
};

}  // namespace dmm

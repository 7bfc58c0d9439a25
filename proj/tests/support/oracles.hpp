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
// Test-only reference implementations and random generators. Nothing here
// calls the library's combination or contraction code: vectors are read
// through scalar()/children() and recomputed as flat maps of paths.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dmm/engine.hpp"
#include "dmm/random.hpp"
#include "dmm/rect_matrix.hpp"
#include "dmm/vspace.hpp"

namespace dmm::testing {

using FlatVector = std::map<Path, double>;

inline void flatten_into(const PTVector& v, Path& prefix, FlatVector& out) {
  if (v.scalar() != 0.0) out[prefix] += v.scalar();
  for (const auto& [token, child] : v.children()) {
    prefix.push_back(token);
    flatten_into(child, prefix, out);
    prefix.pop_back();
  }
}

inline FlatVector flatten(const PTVector& v) {
  FlatVector out;
  Path prefix;
  flatten_into(v, prefix, out);
  return out;
}

inline FlatVector flat_from_terms(
    const std::vector<std::pair<Path, double>>& terms) {
  FlatVector out;
  for (const auto& [p, x] : terms) out[p] += x;
  return out;
}

inline FlatVector flat_combine(
    const std::vector<std::pair<double, FlatVector>>& pairs) {
  FlatVector out;
  for (const auto& [alpha, v] : pairs)
    for (const auto& [p, x] : v) out[p] += alpha * x;
  return out;
}

// max |a[p] - b[p]| over the union of paths.
inline double flat_distance(const FlatVector& a, const FlatVector& b) {
  double d = 0.0;
  for (const auto& [p, x] : a) {
    auto it = b.find(p);
    d = std::max(d, std::abs(x - (it == b.end() ? 0.0 : it->second)));
  }
  for (const auto& [p, x] : b)
    if (!a.contains(p)) d = std::max(d, std::abs(x));
  return d;
}

// --- generators --------------------------------------------------------------

inline const std::vector<Token>& default_alphabet() {
  static const std::vector<Token> kAlphabet = {"a", "b", "c", "d", "e", "f"};
  return kAlphabet;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

inline std::vector<std::pair<Path, double>> random_terms(
    Rng& rng, std::size_t max_paths, std::size_t max_depth,
    const std::vector<Token>& alphabet = default_alphabet()) {
  std::vector<std::pair<Path, double>> terms;
  const std::size_t n = uniform_index(rng, max_paths + 1);
  for (std::size_t k = 0; k < n; ++k) {
    Path p(uniform_index(rng, max_depth + 1));
    for (Token& t : p) t = alphabet[uniform_index(rng, alphabet.size())];
    terms.emplace_back(std::move(p), uniform(rng, -5.0, 5.0));
  }
  return terms;
}

inline PTVector random_vector(Rng& rng, std::size_t max_paths = 20,
                              std::size_t max_depth = 4) {
  return from_terms(random_terms(rng, max_paths, max_depth));
}

// --- dense six-index contraction ---------------------------------------------

struct DenseInputs {
  // (f, n_f) groups with at least one nonzero weight.
  std::set<NeuronKey> present;
  // (f, n_f, i, path...) -> coefficient
  FlatVector flat;
};

// Evaluates x[f,n_f,i] = sum_{g,n_g,o} w * y[g,n_g,o] by looping over the
// full cross product of every type, name and port that occurs anywhere.
inline DenseInputs dense_down_movement(const PTVector& matrix,
                                       const NeuronMap& outputs) {
  const FlatVector w = flatten(matrix);
  std::set<Token> types, names, ports;
  for (const auto& [p, x] : w) {
    types.insert(p[0]);
    types.insert(p[3]);
    names.insert(p[1]);
    names.insert(p[4]);
    ports.insert(p[2]);
    ports.insert(p[5]);
  }
  std::map<std::pair<NeuronKey, Token>, FlatVector> y;
  for (const auto& [key, value] : outputs) {
    types.insert(key.type);
    names.insert(key.name);
    for (const auto& [port, sub] : value.children()) {
      ports.insert(port);
      y[{key, port}] = flatten(sub);
    }
  }
  DenseInputs out;
  for (const Token& f : types)
    for (const Token& nf : names)
      for (const Token& i : ports)
        for (const Token& g : types)
          for (const Token& ng : names)
            for (const Token& o : ports) {
              auto wit = w.find(Path{f, nf, i, g, ng, o});
              const double weight = wit == w.end() ? 0.0 : wit->second;
              if (weight == 0.0) continue;
              out.present.insert({f, nf});
              auto yit = y.find({NeuronKey{g, ng}, o});
              if (yit == y.end()) continue;
              for (const auto& [p, x] : yit->second) {
                Path key{f, nf, i};
                key.insert(key.end(), p.begin(), p.end());
                out.flat[key] += weight * x;
              }
            }
  return out;
}

inline FlatVector flatten_inputs(const NeuronMap& inputs) {
  FlatVector out;
  for (const auto& [key, value] : inputs)
    for (const auto& [p, x] : flatten(value)) {
      Path full{key.type, key.name};
      full.insert(full.end(), p.begin(), p.end());
      out[full] += x;
    }
  return out;
}

// Random network with at most `max_neurons` neurons and `max_weights`
// weights; outputs carry payloads of depth <= `payload_depth` on ports
// drawn from {single, a, b}.
struct RandomNetwork {
  PTVector matrix;
  NeuronMap outputs;
};

inline RandomNetwork random_network(Rng& rng, std::size_t max_neurons,
                                    std::size_t max_weights,
                                    std::size_t payload_depth) {
  static const std::vector<Token> kTypes = {"identity", "add", "tanh"};
  static const std::vector<Token> kPorts = {"single", "a", "b"};
  const std::size_t n_neurons = 1 + uniform_index(rng, max_neurons);
  std::vector<NeuronKey> neurons;
  for (std::size_t k = 0; k < n_neurons; ++k)
    neurons.push_back({kTypes[uniform_index(rng, kTypes.size())],
                       "n" + std::to_string(k)});
  std::vector<std::pair<Path, double>> weights;
  const std::size_t n_weights = uniform_index(rng, max_weights + 1);
  for (std::size_t k = 0; k < n_weights; ++k) {
    const NeuronKey& to = neurons[uniform_index(rng, neurons.size())];
    const NeuronKey& from = neurons[uniform_index(rng, neurons.size())];
    weights.push_back({{to.type, to.name, kPorts[uniform_index(rng, 3)],
                        from.type, from.name, kPorts[uniform_index(rng, 3)]},
                       uniform(rng, -2.0, 2.0)});
  }
  RandomNetwork net;
  net.matrix = from_terms(weights);
  for (const NeuronKey& key : neurons) {
    if (uniform01(rng) < 0.2) continue;  // some neurons have no output yet
    PTVector::Children ports;
    for (const Token& port : kPorts) {
      if (uniform01(rng) < 0.3) continue;
      PTVector v = random_vector(rng, 10, payload_depth);
      if (!v.is_zero()) ports.emplace(port, std::move(v));
    }
    PTVector y = PTVector::from_parts(0.0, std::move(ports), 0.0);
    if (!y.is_zero()) net.outputs.emplace(key, std::move(y));
  }
  return net;
}

// --- dense RNN ---------------------------------------------------------------

// y^{t+1} = tanh(W_rec y^t + W_in i^t), y^0 = 0; returns y^1 .. y^steps.
inline std::vector<std::vector<double>> reference_rnn(
    const RectMatrix& w_rec, const RectMatrix& w_in,
    const std::vector<std::vector<double>>& inputs, std::size_t steps,
    const std::function<double(double)>& f) {
  const std::size_t k = w_rec.rows();
  std::vector<double> y(k, 0.0);
  std::vector<std::vector<double>> out;
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<double> x(k, 0.0);
    for (std::size_t r = 0; r < k; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < k; ++c) acc += w_rec(r, c) * y[c];
      for (std::size_t c = 0; c < w_in.cols(); ++c)
        acc += w_in(r, c) * inputs[t][c];
      x[r] = acc;
    }
    for (std::size_t r = 0; r < k; ++r) y[r] = f(x[r]);
    out.push_back(y);
  }
  return out;
}

}  // namespace dmm::testing

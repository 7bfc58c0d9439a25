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
// Two-stroke execution engine over V.
//
// Neurons are addressed by (type, name); their arguments and results by a
// third token, the port. The network matrix is a PTVector whose nonzero
// terms all have length six:
//
//   (f, n_f, i, g, n_g, o) -> weight from output o of neuron (g, n_g)
//                             into input i of neuron (f, n_f)
//
// Down movement:  x[f,n_f,i] = sum_{g,n_g,o} w[f,n_f,i,g,n_g,o] * y[g,n_g,o]
// Up movement:    y[f,n_f]   = f(x[f,n_f])   for every (f,n_f) with a row.
//
// Neurons without a nonzero row are not evaluated and keep their previous
// output. When a Self address is configured, the value emitted there
// becomes the network matrix for the next step.
#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dmm/activations.hpp"
#include "dmm/errors.hpp"
#include "dmm/random.hpp"
#include "dmm/rect_matrix.hpp"
#include "dmm/vspace.hpp"

namespace dmm {

inline constexpr std::size_t kMatrixDepth = 6;

struct NeuronKey {
  Token type;
  Token name;

  friend auto operator<=>(const NeuronKey&, const NeuronKey&) = default;

  std::string to_string() const { return type + "/" + name; }
};

struct NeuronAddress {
  Token type;
  Token neuron;
  Token port;

  friend auto operator<=>(const NeuronAddress&, const NeuronAddress&) = default;

  NeuronKey key() const { return {type, neuron}; }
  std::string to_string() const { return type + "/" + neuron + "/" + port; }
};

namespace detail {

inline std::vector<std::string> split_slash(std::string_view s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find('/', start);
    parts.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace detail

// Parses "type/name". Type names may themselves not contain '/'.
inline NeuronKey parse_neuron_key(std::string_view text) {
  auto parts = detail::split_slash(text);
  if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
    throw ParseError(std::string(text), "expected 'type/name'");
  for (const auto& p : parts)
    if (is_reserved(p)) throw ReservedTokenError(p);
  return {parts[0], parts[1]};
}

// Parses "type/name/port".
inline NeuronAddress parse_address(std::string_view text) {
  auto parts = detail::split_slash(text);
  if (parts.size() != 3 || parts[0].empty() || parts[1].empty() ||
      parts[2].empty())
    throw ParseError(std::string(text), "expected 'type/name/port'");
  for (const auto& p : parts)
    if (is_reserved(p)) throw ReservedTokenError(p);
  return {parts[0], parts[1], parts[2]};
}

// Throws MatrixDepthError naming the first nonzero path whose length is not
// six.
inline void validate_matrix_depth(const PTVector& weights) {
  for_each_term(weights, [&](const Path& p, double) {
    if (p.size() != kMatrixDepth)
      throw MatrixDepthError(path_to_string(p), p.size());
  });
}

// A PTVector known to satisfy the depth-six invariant.
class NetworkMatrix {
 public:
  NetworkMatrix() = default;

  explicit NetworkMatrix(PTVector weights) : weights_(std::move(weights)) {
    validate_matrix_depth(weights_);
  }

  const PTVector& weights() const noexcept { return weights_; }

  double weight(const NeuronAddress& to, const NeuronAddress& from) const {
    const Token path[] = {to.type,   to.neuron,   to.port,
                          from.type, from.neuron, from.port};
    return coefficient(weights_, path);
  }

  std::size_t nonzero_count() const { return term_count(weights_); }

  friend bool operator==(const NetworkMatrix&, const NetworkMatrix&) = default;

 private:
  PTVector weights_;
};

using NeuronMap = std::map<NeuronKey, PTVector>;

// (f, n_f) groups that own at least one nonzero weight.
inline std::set<NeuronKey> row_groups(const NetworkMatrix& m) {
  std::set<NeuronKey> out;
  for (const auto& [f, by_name] : m.weights().children())
    for (const auto& [n, row] : by_name.children()) out.insert({f, n});
  return out;
}

// (g, n_g) groups whose outputs are read by at least one nonzero weight.
inline std::set<NeuronKey> column_groups(const NetworkMatrix& m) {
  std::set<NeuronKey> out;
  for_each_term(m.weights(), [&](const Path& p, double) {
    out.insert({p[3], p[4]});
  });
  return out;
}

// Neurons with at least one nonzero weight on either side.
inline std::set<NeuronKey> active_neurons(const NetworkMatrix& m) {
  std::set<NeuronKey> out = row_groups(m);
  out.merge(column_groups(m));
  return out;
}

inline NeuronMap down_movement(const NetworkMatrix& m,
                               const NeuronMap& outputs,
                               double epsilon = kDefaultEpsilon) {
  NeuronMap inputs;
  std::vector<Term> terms;
  for (const auto& [f, by_name] : m.weights().children()) {
    for (const auto& [n_f, rows] : by_name.children()) {
      PTVector::Children args;
      for (const auto& [i, row] : rows.children()) {
        terms.clear();
        for (const auto& [g, by_source] : row.children()) {
          for (const auto& [n_g, by_port] : by_source.children()) {
            auto y = outputs.find(NeuronKey{g, n_g});
            if (y == outputs.end()) continue;
            for (const auto& [o, w] : by_port.children()) {
              const PTVector* value = y->second.find(o);
              if (value) terms.push_back(Term{w.scalar(), value});
            }
          }
        }
        PTVector x = linear_combination(terms, epsilon);
        if (!x.is_zero()) args.emplace(i, std::move(x));
      }
      // A nonzero row makes the neuron present even when its input is zero.
      inputs.emplace(NeuronKey{f, n_f},
                     PTVector::from_parts(0.0, std::move(args), 0.0));
    }
  }
  return inputs;
}

// Validates depth before contracting.
inline NeuronMap down_movement(const PTVector& weights,
                               const NeuronMap& outputs,
                               double epsilon = kDefaultEpsilon) {
  return down_movement(NetworkMatrix(weights), outputs, epsilon);
}

// Applies each neuron's type to its input. Every type is resolved before
// any transform runs, so an unknown type leaves nothing half-applied.
inline NeuronMap up_movement(const NeuronTypeRegistry& registry,
                             const NeuronMap& inputs, Rng& rng,
                             double epsilon = kDefaultEpsilon) {
  std::vector<const NeuronType*> types;
  types.reserve(inputs.size());
  for (const auto& [key, x] : inputs) types.push_back(&registry.resolve(key.type));
  NeuronContext ctx{rng, epsilon};
  NeuronMap outputs;
  std::size_t k = 0;
  for (const auto& [key, x] : inputs)
    outputs.emplace(key, types[k++]->transform(x, ctx));
  return outputs;
}

struct EngineWarning {
  std::size_t step = 0;
  std::string kind;
  std::string message;
};

struct EngineState {
  NetworkMatrix matrix;
  // Current outputs; absent means zero.
  NeuronMap outputs;
  std::shared_ptr<const NeuronTypeRegistry> registry =
      std::make_shared<const NeuronTypeRegistry>(
          NeuronTypeRegistry::with_builtins());
  std::optional<NeuronAddress> self_address;
  std::size_t step_count = 0;
  std::uint64_t seed = 0;
  Rng rng{0};
  double epsilon = kDefaultEpsilon;
  // External input streams: the output of a fed neuron at time t is
  // feeds[key][t], or zero once the stream is exhausted.
  std::map<NeuronKey, std::vector<PTVector>> feeds;
  // Neurons given an output from outside the network.
  std::set<NeuronKey> seeded;
  // Every (f, n_f) that has had a nonzero row at some step.
  std::set<NeuronKey> evaluated;
  std::vector<EngineWarning> warnings;
  // Values behind the registry's const:<name> types, kept for export.
  std::map<Token, PTVector> constants;

  // Registers const:<name> on a private copy of the registry.
  void add_constant(const Token& name, PTVector value) {
    auto copy = std::make_shared<NeuronTypeRegistry>(*registry);
    copy->add_constant(name, value);
    registry = std::move(copy);
    constants.insert_or_assign(name, std::move(value));
  }

  void reseed(std::uint64_t s) {
    seed = s;
    rng.seed(s);
  }

  void set_output(const NeuronKey& key, PTVector value) {
    seeded.insert(key);
    if (value.is_zero())
      outputs.erase(key);
    else
      outputs.insert_or_assign(key, std::move(value));
  }

  PTVector output(const NeuronAddress& a) const {
    auto it = outputs.find(a.key());
    return it == outputs.end() ? PTVector{} : subtree(it->second, a.port);
  }
};

// Sets fed neurons to their value for the current step.
inline void apply_feeds(EngineState& s) {
  for (const auto& [key, stream] : s.feeds) {
    s.seeded.insert(key);
    if (s.step_count < stream.size() && !stream[s.step_count].is_zero())
      s.outputs.insert_or_assign(key, stream[s.step_count]);
    else
      s.outputs.erase(key);
  }
}

// Bound on the active part: only seeded or evaluated neurons can carry a
// nonzero output.
inline bool finite_activity_holds(const EngineState& s) {
  for (const auto& [key, y] : s.outputs)
    if (!s.seeded.contains(key) && !s.evaluated.contains(key)) return false;
  return s.outputs.size() <= s.seeded.size() + s.evaluated.size();
}

inline EngineState step(EngineState s) {
  apply_feeds(s);
  NeuronMap inputs = down_movement(s.matrix, s.outputs, s.epsilon);
  // Self runs every step, row or not; otherwise an all-zero Self row would
  // freeze the matrix instead of zeroing it.
  if (s.self_address) inputs.try_emplace(s.self_address->key());
  NeuronMap fresh = up_movement(*s.registry, inputs, s.rng, s.epsilon);
  for (const auto& [key, x] : inputs) s.evaluated.insert(key);

  std::optional<PTVector> self_value;
  if (s.self_address) {
    auto it = fresh.find(s.self_address->key());
    if (it != fresh.end()) self_value = subtree(it->second, s.self_address->port);
  }
  for (auto& [key, y] : fresh) {
    if (y.is_zero())
      s.outputs.erase(key);
    else
      s.outputs.insert_or_assign(key, std::move(y));
  }
  if (self_value) {
    try {
      s.matrix = NetworkMatrix(std::move(*self_value));
    } catch (const MatrixDepthError& e) {
      s.warnings.push_back(
          {s.step_count + 1, "self-update-rejected", e.what()});
    }
  }
  ++s.step_count;
  apply_feeds(s);
  return s;
}

struct TraceRecord {
  std::size_t step;
  NeuronAddress address;
  PTVector value;
};

// Steps `n` times; after each step calls sink(record) for every traced
// address, in the order given.
template <typename Sink>
EngineState run(EngineState s, std::size_t n,
                const std::vector<NeuronAddress>& trace, Sink&& sink) {
  for (std::size_t k = 0; k < n; ++k) {
    s = step(std::move(s));
    for (const NeuronAddress& a : trace)
      sink(TraceRecord{s.step_count, a, s.output(a)});
  }
  return s;
}

inline std::pair<EngineState, std::vector<TraceRecord>> run(
    EngineState s, std::size_t n,
    const std::vector<NeuronAddress>& trace = {}) {
  std::vector<TraceRecord> log;
  s = run(std::move(s), n, trace,
          [&](TraceRecord r) { log.push_back(std::move(r)); });
  return {std::move(s), std::move(log)};
}

// Sets the weight from output `from` into input `to`. With a Self address
// configured the Self output is updated too, so the change survives the
// next self-update.
inline EngineState set_weight(EngineState s, const NeuronAddress& from,
                              const NeuronAddress& to, double w) {
  const Token path[] = {to.type, to.neuron, to.port,
                        from.type, from.neuron, from.port};
  s.matrix = NetworkMatrix(with_coefficient(s.matrix.weights(), path, w));
  if (s.self_address) {
    auto it = s.outputs.find(s.self_address->key());
    PTVector self = it == s.outputs.end() ? PTVector{} : it->second;
    s.outputs[s.self_address->key()] =
        attach(self, s.self_address->port, s.matrix.weights());
  }
  return s;
}

// --- RNN emulation -----------------------------------------------------------

struct RnnSpec {
  RectMatrix recurrent;  // k x k
  RectMatrix input;      // k x m
  Token nonlinearity = "tanh";
  // inputs[t][c]: value of network input c at time t.
  std::vector<std::vector<double>> inputs;
};

inline Token rnn_hidden_name(std::size_t j) { return "h" + std::to_string(j + 1); }
inline Token rnn_input_name(std::size_t c) { return "i" + std::to_string(c + 1); }
inline constexpr std::string_view kRnnInputType = "identity";

// Encodes the classical RNN
//   x^{t+1} = W_rec y^t + W_in i^t,   y^{t+1} = f(x^{t+1})
// with scalar values carried as {":number": v} and y^0 = 0.
inline EngineState build_rnn(const RnnSpec& spec, std::uint64_t seed = 0) {
  const std::size_t k = spec.recurrent.rows();
  const std::size_t m = spec.input.cols();
  if (spec.recurrent.cols() != k)
    throw DimensionError("recurrent matrix must be square, got " +
                         spec.recurrent.shape_string());
  if (spec.input.rows() != k && !(m == 0 && spec.input.rows() == 0))
    throw DimensionError("input matrix has " + std::to_string(spec.input.rows()) +
                         " rows, expected " + std::to_string(k));
  for (std::size_t t = 0; t < spec.inputs.size(); ++t)
    if (spec.inputs[t].size() != m)
      throw DimensionError("input vector at t=" + std::to_string(t) + " has " +
                           std::to_string(spec.inputs[t].size()) +
                           " entries, expected " + std::to_string(m));
  if (!NeuronTypeRegistry::is_builtin_name(spec.nonlinearity))
    throw UnknownNeuronTypeError(spec.nonlinearity);

  const Token single(kSingle);
  const Token input_type(kRnnInputType);
  std::vector<std::pair<Path, double>> weights;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = 0; l < k; ++l)
      weights.push_back({{spec.nonlinearity, rnn_hidden_name(j), single,
                          spec.nonlinearity, rnn_hidden_name(l), single},
                         spec.recurrent(j, l)});
    for (std::size_t c = 0; c < m; ++c)
      weights.push_back({{spec.nonlinearity, rnn_hidden_name(j), single,
                          input_type, rnn_input_name(c), single},
                         spec.input(j, c)});
  }
  EngineState s;
  s.matrix = NetworkMatrix(from_terms(weights, 0.0));
  s.reseed(seed);
  for (std::size_t c = 0; c < m; ++c) {
    auto& stream = s.feeds[NeuronKey{input_type, rnn_input_name(c)}];
    for (const auto& v : spec.inputs)
      stream.push_back(attach(PTVector{}, kSingle, PTVector::scalar_only(v[c])));
  }
  apply_feeds(s);
  return s;
}

// Current hidden vector y^t of an engine built by build_rnn.
inline std::vector<double> rnn_hidden_state(const EngineState& s,
                                            const RnnSpec& spec) {
  std::vector<double> y(spec.recurrent.rows());
  for (std::size_t j = 0; j < y.size(); ++j)
    y[j] = s.output({spec.nonlinearity, rnn_hidden_name(j), Token(kSingle)})
               .scalar();
  return y;
}

}  // namespace dmm

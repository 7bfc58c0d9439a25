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
// JSON network definition files.
//
//   {
//     "registry":     ["add", "const:u2", ...],
//     "constants":    {"u2": <PTVector>},            // optional
//     "matrix":       <PTVector, every term of length 6>,
//     "init_outputs": {"<type>/<neuron>": <PTVector>},
//     "inputs":       {"<type>/<neuron>": [<PTVector>, ...]},  // optional
//     "self":         "add/Self/single" | null,
//     "seed":         <int>,
//     "epsilon":      <positive real>                // optional
//   }
//
// Only the listed registry names are available to the engine; each
// "const:<name>" entry needs a matching value under "constants".
#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "dmm/activations.hpp"
#include "dmm/engine.hpp"
#include "dmm/errors.hpp"
#include "dmm/vspace.hpp"
#include "dmm/vspace_json.hpp"

namespace dmm {

inline EngineState network_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "network file must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "registry" && key != "constants" && key != "matrix" &&
        key != "init_outputs" && key != "inputs" && key != "self" &&
        key != "seed" && key != "epsilon")
      throw ParseError(key, "unknown top-level key");
  }

  std::map<Token, PTVector> constants;
  if (auto it = doc.find("constants"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("constants", "expected an object");
    for (const auto& [name, value] : it->items())
      constants.emplace(name, ptvector_from_json(value, "constants/" + name));
  }

  auto registry = std::make_shared<NeuronTypeRegistry>();
  const NeuronTypeRegistry builtins = NeuronTypeRegistry::with_builtins();
  auto reg = doc.find("registry");
  if (reg == doc.end() || !reg->is_array())
    throw ParseError("registry", "expected an array of neuron type names");
  EngineState s;
  for (std::size_t k = 0; k < reg->size(); ++k) {
    const std::string where = "registry/" + std::to_string(k);
    if (!(*reg)[k].is_string()) throw ParseError(where, "expected a string");
    const std::string name = (*reg)[k].get<std::string>();
    if (name.starts_with(kConstPrefix)) {
      const std::string cname = name.substr(kConstPrefix.size());
      auto c = constants.find(cname);
      if (c == constants.end())
        throw ParseError(where, "'" + name + "' has no entry in constants");
      registry->add_constant(cname, c->second);
      s.constants.insert_or_assign(cname, c->second);
    } else if (builtins.contains(name)) {
      registry->add(builtins.resolve(name));
    } else {
      throw ParseError(where, "unknown neuron type '" + name + "'");
    }
  }

  auto matrix = doc.find("matrix");
  if (matrix == doc.end()) throw ParseError("matrix", "missing");
  PTVector weights = ptvector_from_json(*matrix, "matrix");
  try {
    s.matrix = NetworkMatrix(weights);
  } catch (const MatrixDepthError& e) {
    throw ParseError("matrix/" + e.path(), "weight path has length " +
                                               std::to_string(e.depth()) +
                                               ", expected 6");
  }
  for (const NeuronKey& row : row_groups(s.matrix))
    if (!registry->contains(row.type))
      throw ParseError("matrix/" + row.type,
                       "neuron type '" + row.type + "' is not in the registry");
  s.registry = std::move(registry);

  if (auto it = doc.find("seed"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ParseError("seed", "expected an integer");
    s.reseed(it->get<std::uint64_t>());
  }
  if (auto it = doc.find("epsilon"); it != doc.end() && !it->is_null()) {
    if (!it->is_number() || !(it->get<double>() > 0.0))
      throw ParseError("epsilon", "expected a positive number");
    s.epsilon = it->get<double>();
  }

  if (auto it = doc.find("init_outputs"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("init_outputs", "expected an object");
    for (const auto& [key, value] : it->items()) {
      const std::string where = "init_outputs/" + key;
      NeuronKey nk;
      try {
        nk = parse_neuron_key(key);
      } catch (const Error&) {
        throw ParseError(where, "expected 'type/neuron'");
      }
      s.set_output(nk, ptvector_from_json(value, where));
    }
  }

  if (auto it = doc.find("inputs"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("inputs", "expected an object");
    for (const auto& [key, value] : it->items()) {
      const std::string where = "inputs/" + key;
      NeuronKey nk;
      try {
        nk = parse_neuron_key(key);
      } catch (const Error&) {
        throw ParseError(where, "expected 'type/neuron'");
      }
      if (!value.is_array()) throw ParseError(where, "expected an array");
      auto& stream = s.feeds[nk];
      for (std::size_t t = 0; t < value.size(); ++t)
        stream.push_back(
            ptvector_from_json(value[t], where + "/" + std::to_string(t)));
    }
  }

  if (auto it = doc.find("self"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError("self", "expected a string or null");
    try {
      s.self_address = parse_address(it->get<std::string>());
    } catch (const Error&) {
      throw ParseError("self", "expected 'type/neuron/port'");
    }
    // Without an explicit initial value, Self starts out emitting the matrix.
    if (!s.outputs.contains(s.self_address->key()))
      s.set_output(s.self_address->key(),
                   attach(PTVector{}, s.self_address->port, s.matrix.weights()));
  }
  apply_feeds(s);
  return s;
}

inline json network_to_json(const EngineState& s) {
  json doc;
  doc["registry"] = s.registry->names();
  if (!s.constants.empty()) {
    json c = json::object();
    for (const auto& [name, value] : s.constants) c[name] = to_json(value);
    doc["constants"] = c;
  }
  doc["matrix"] = to_json(s.matrix.weights());
  json init = json::object();
  for (const auto& [key, value] : s.outputs)
    if (!s.feeds.contains(key)) init[key.to_string()] = to_json(value);
  doc["init_outputs"] = init;
  if (!s.feeds.empty()) {
    json inputs = json::object();
    for (const auto& [key, stream] : s.feeds) {
      json arr = json::array();
      for (const auto& v : stream) arr.push_back(to_json(v));
      inputs[key.to_string()] = arr;
    }
    doc["inputs"] = inputs;
  }
  doc["self"] = s.self_address ? json(s.self_address->to_string()) : json();
  doc["seed"] = s.seed;
  if (s.epsilon != kDefaultEpsilon) doc["epsilon"] = s.epsilon;
  return doc;
}

inline EngineState load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("", "cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  return network_from_json(doc);
}

// One line-delimited trace record.
inline json trace_to_json(const TraceRecord& r) {
  return json{{"step", r.step},
              {"address", r.address.to_string()},
              {"value", to_json(r.value)}};
}

}  // namespace dmm

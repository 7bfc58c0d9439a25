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
// Nested-map text form of PTVector:
//
//   {"a": {"b": 2.0}, ":number": 5.0}   ==   5 + 2*ab
//
// The scalar of a node sits under ":number"; every other key is a child.
// A child that is a bare number is shorthand for {":number": x}. Keys are
// emitted in lexicographic order and floats in shortest round-trip form.
#pragma once

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "dmm/errors.hpp"
#include "dmm/vspace.hpp"

namespace dmm {

using json = nlohmann::json;

inline json to_json(const PTVector& v) {
  json out = json::object();
  if (v.scalar() != 0.0) out[std::string(kNumberKey)] = v.scalar();
  for (const auto& [token, child] : v.children()) {
    if (child.children().empty())
      out[token] = child.scalar();
    else
      out[token] = to_json(child);
  }
  return out;
}

namespace detail {

inline std::string join_where(const std::string& where,
                              const std::string& key) {
  return where.empty() ? key : where + "/" + key;
}

inline double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where, "expected a number");
  double x = j.get<double>();
  if (!std::isfinite(x)) throw ParseError(where, "coefficient is not finite");
  return x;
}

}  // namespace detail

// Parses the nested-map form. `where` prefixes error locations.
inline PTVector ptvector_from_json(const json& j,
                                   const std::string& where = "") {
  if (j.is_number())
    return PTVector::from_parts(detail::number_at(j, where), {}, 0.0);
  if (!j.is_object())
    throw ParseError(where, "expected an object or a number");
  double scalar = 0.0;
  PTVector::Children children;
  for (const auto& [key, value] : j.items()) {
    std::string at = detail::join_where(where, key);
    if (key == kNumberKey) {
      scalar = detail::number_at(value, at);
    } else if (key == kSampleKey) {
      throw ParseError(at, "':sample' is not allowed in a plain vector");
    } else {
      PTVector child = ptvector_from_json(value, at);
      if (!child.is_zero()) children.emplace(key, std::move(child));
    }
  }
  return PTVector::from_parts(scalar, std::move(children), 0.0);
}

inline std::string print(const PTVector& v) { return to_json(v).dump(); }

inline PTVector parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", e.what());
  }
  return ptvector_from_json(j);
}

}  // namespace dmm

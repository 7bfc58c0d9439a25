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
// Streams of signed samples.
//
// A finite signed measure is represented by one draw <x, s> with s = +-1,
// or by the missing sample when the measure is zero. A linear combination
// sum_i alpha_i * mu_i is represented by picking index i with probability
// |alpha_i| / sum_j |alpha_j| and returning <x_i, sign(alpha_i) * s_i>.
//
// ExtendedVector generalizes PTVector so that each node carries a sample
// slot next to its number.
#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dmm/errors.hpp"
#include "dmm/random.hpp"
#include "dmm/vspace.hpp"
#include "dmm/vspace_json.hpp"

namespace dmm {

enum class Sign : int { kPlus = 1, kMinus = -1 };

inline Sign operator*(Sign a, Sign b) {
  return a == b ? Sign::kPlus : Sign::kMinus;
}

inline Sign sign_of(double x) { return x < 0 ? Sign::kMinus : Sign::kPlus; }

struct SignedSample {
  std::string point;
  Sign sign = Sign::kPlus;

  friend bool operator==(const SignedSample&, const SignedSample&) = default;
};

// std::nullopt is the missing sample.
using SampleSlot = std::optional<SignedSample>;

inline constexpr std::nullopt_t kMissing = std::nullopt;

// Draws a sample representing sum_i alpha_i * mu_i. All-zero (or empty)
// coefficients yield Missing without consuming randomness.
inline SampleSlot combine_samples(
    std::span<const std::pair<double, SampleSlot>> pairs, Rng& rng) {
  double total = 0.0;
  for (const auto& [alpha, slot] : pairs) total += std::abs(alpha);
  if (total == 0.0) return kMissing;

  const double u = uniform01(rng) * total;
  double cumulative = 0.0;
  const std::pair<double, SampleSlot>* chosen = nullptr;
  for (const auto& pair : pairs) {
    if (pair.first == 0.0) continue;
    chosen = &pair;
    cumulative += std::abs(pair.first);
    if (u < cumulative) break;
  }
  // `chosen` is the last nonzero entry if rounding left u >= cumulative.
  const auto& [alpha, slot] = *chosen;
  if (!slot) return kMissing;
  return SignedSample{slot->point, sign_of(alpha) * slot->sign};
}

inline SampleSlot combine_samples(
    std::initializer_list<std::pair<double, SampleSlot>> pairs, Rng& rng) {
  return combine_samples(
      std::span<const std::pair<double, SampleSlot>>(pairs.begin(),
                                                     pairs.size()),
      rng);
}

// Signed frequency estimate: (#<x,+1> - #<x,-1>) / #slots, Missing counted
// in the denominator.
inline std::map<std::string, double> empirical_signed_measure(
    std::span<const SampleSlot> slots) {
  std::map<std::string, double> out;
  if (slots.empty()) return out;
  const double n = static_cast<double>(slots.size());
  for (const SampleSlot& s : slots) {
    if (!s) continue;
    out[s->point] += static_cast<int>(s->sign) / n;
  }
  return out;
}

// Prefix tree whose nodes carry a number and a sample slot.
class ExtendedVector {
 public:
  using Children = std::map<Token, ExtendedVector, std::less<>>;

  ExtendedVector() = default;

  static ExtendedVector leaf(double number, SampleSlot sample = kMissing) {
    ExtendedVector v;
    v.number_ = number;
    v.sample_ = std::move(sample);
    return v;
  }

  static ExtendedVector from_parts(double number, SampleSlot sample,
                                   Children children,
                                   double epsilon = kDefaultEpsilon) {
    ExtendedVector v;
    v.number_ = std::abs(number) < epsilon ? 0.0 : number;
    v.sample_ = std::move(sample);
    std::erase_if(children, [](const auto& kv) { return kv.second.is_zero(); });
    v.children_ = std::move(children);
    return v;
  }

  double number() const noexcept { return number_; }
  const SampleSlot& sample() const noexcept { return sample_; }
  const Children& children() const noexcept { return children_; }

  // A node is prunable only when its number is zero and its slot Missing.
  bool is_zero() const noexcept {
    return number_ == 0.0 && !sample_ && children_.empty();
  }

  const ExtendedVector* find(std::string_view token) const {
    auto it = children_.find(token);
    return it == children_.end() ? nullptr : &it->second;
  }

  friend bool operator==(const ExtendedVector&,
                         const ExtendedVector&) = default;

 private:
  double number_ = 0.0;
  SampleSlot sample_;
  Children children_;
};

inline ExtendedVector extend(const PTVector& v) {
  ExtendedVector::Children children;
  for (const auto& [token, child] : v.children())
    children.emplace(token, extend(child));
  return ExtendedVector::from_parts(v.scalar(), kMissing, std::move(children),
                                    0.0);
}

inline PTVector numeric_part(const ExtendedVector& v) {
  PTVector::Children children;
  for (const auto& [token, child] : v.children()) {
    PTVector c = numeric_part(child);
    if (!c.is_zero()) children.emplace(token, std::move(c));
  }
  return PTVector::from_parts(v.number(), std::move(children), 0.0);
}

inline SampleSlot sample_at(const ExtendedVector& v,
                            std::span<const Token> path) {
  const ExtendedVector* node = &v;
  for (const Token& t : path) {
    node = node->find(t);
    if (!node) return kMissing;
  }
  return node->sample();
}

// Returns `v` with the sample slot at `path` replaced.
inline ExtendedVector with_sample(const ExtendedVector& v,
                                  std::span<const Token> path,
                                  SampleSlot sample) {
  if (path.empty())
    return ExtendedVector::from_parts(v.number(), std::move(sample),
                                      v.children(), 0.0);
  check_token(path.front());
  ExtendedVector::Children children = v.children();
  const ExtendedVector* child = v.find(path.front());
  ExtendedVector updated = with_sample(child ? *child : ExtendedVector{},
                                       path.subspan(1), std::move(sample));
  children.insert_or_assign(path.front(), std::move(updated));
  return ExtendedVector::from_parts(v.number(), v.sample(),
                                    std::move(children), 0.0);
}

namespace detail {

struct ExtendedTerm {
  double alpha;
  const ExtendedVector* vector;  // nullptr: path absent, i.e. zero measure
};

inline ExtendedVector combine_extended_nodes(std::span<const ExtendedTerm> terms,
                                             Rng& rng, double epsilon) {
  double number = 0.0;
  bool any_sample = false;
  std::vector<std::pair<double, SampleSlot>> slots;
  slots.reserve(terms.size());
  std::map<std::string_view, std::size_t> keys;
  for (const ExtendedTerm& t : terms) {
    if (!t.vector) {
      slots.emplace_back(t.alpha, kMissing);
      continue;
    }
    number += t.alpha * t.vector->number();
    slots.emplace_back(t.alpha, t.vector->sample());
    any_sample = any_sample || t.vector->sample().has_value();
    for (const auto& [token, child] : t.vector->children()) keys[token];
  }
  // Every branch of an all-Missing path yields Missing; skip the draw.
  SampleSlot sample = any_sample ? combine_samples(slots, rng) : kMissing;

  ExtendedVector::Children children;
  std::vector<ExtendedTerm> sub(terms.size());
  for (const auto& [token, unused] : keys) {
    for (std::size_t i = 0; i < terms.size(); ++i)
      sub[i] = ExtendedTerm{terms[i].alpha,
                            terms[i].vector ? terms[i].vector->find(token)
                                            : nullptr};
    ExtendedVector c = combine_extended_nodes(sub, rng, epsilon);
    if (!c.is_zero()) children.emplace(Token(token), std::move(c));
  }
  return ExtendedVector::from_parts(number, std::move(sample),
                                    std::move(children), epsilon);
}

}  // namespace detail

// Numbers combine linearly; at every path present in any input the sample
// slot is drawn independently by combine_samples over that path's slots,
// with absent paths contributing Missing. Paths are visited in
// lexicographic order, so a fixed seed gives a fixed result.
inline ExtendedVector combine_extended(
    std::span<const std::pair<double, ExtendedVector>> pairs, Rng& rng,
    double epsilon = kDefaultEpsilon) {
  std::vector<detail::ExtendedTerm> terms;
  terms.reserve(pairs.size());
  for (const auto& [alpha, v] : pairs)
    terms.push_back(detail::ExtendedTerm{alpha, &v});
  return detail::combine_extended_nodes(terms, rng, epsilon);
}

// --- serialization ---------------------------------------------------------
//
// A node with a sample is an object {":number": x, ":sample": {"point": p,
// "sign": +-1}}; Missing slots are absent.

inline json to_json(const SignedSample& s) {
  return json{{"point", s.point}, {"sign", static_cast<int>(s.sign)}};
}

inline json to_json(const ExtendedVector& v) {
  json out = json::object();
  if (v.number() != 0.0) out[std::string(kNumberKey)] = v.number();
  if (v.sample()) out[std::string(kSampleKey)] = to_json(*v.sample());
  for (const auto& [token, child] : v.children()) {
    if (child.children().empty() && !child.sample())
      out[token] = child.number();
    else
      out[token] = to_json(child);
  }
  return out;
}

inline SignedSample signed_sample_from_json(const json& j,
                                            const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected a sample object");
  auto point = j.find("point");
  auto sign = j.find("sign");
  if (point == j.end() || !point->is_string())
    throw ParseError(where, "sample needs a string 'point'");
  if (sign == j.end() || !sign->is_number_integer())
    throw ParseError(where, "sample needs an integer 'sign'");
  int s = sign->get<int>();
  if (s != 1 && s != -1) throw ParseError(where, "sign must be 1 or -1");
  return SignedSample{point->get<std::string>(),
                      s == 1 ? Sign::kPlus : Sign::kMinus};
}

inline ExtendedVector extended_from_json(const json& j,
                                         const std::string& where = "") {
  if (j.is_number())
    return ExtendedVector::leaf(detail::number_at(j, where));
  if (!j.is_object())
    throw ParseError(where, "expected an object or a number");
  double number = 0.0;
  SampleSlot sample;
  ExtendedVector::Children children;
  for (const auto& [key, value] : j.items()) {
    std::string at = detail::join_where(where, key);
    if (key == kNumberKey)
      number = detail::number_at(value, at);
    else if (key == kSampleKey)
      sample = signed_sample_from_json(value, at);
    else
      children.emplace(key, extended_from_json(value, at));
  }
  return ExtendedVector::from_parts(number, std::move(sample),
                                    std::move(children), 0.0);
}

}  // namespace dmm

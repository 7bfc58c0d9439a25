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
// The vector space of finite linear combinations of token strings.
//
// A PTVector is a finite prefix tree: every node carries a real scalar (the
// coefficient of the path leading to it) and a finite map from tokens to
// child trees. Equivalently it is a "mixed rank" sparse tensor, or a
// recurrent map token -> PTVector plus a scalar. Values are immutable and
// share structure; every operation returns a canonical tree, i.e. one with
// no identically-zero subtrees.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dmm/errors.hpp"

namespace dmm {

using Token = std::string;
using Path = std::vector<Token>;

// Key holding the scalar component of a node in serialized form.
inline constexpr std::string_view kNumberKey = ":number";
// Key holding the sample slot of a leaf in the sample-bearing extension.
inline constexpr std::string_view kSampleKey = ":sample";

// Coefficients with |x| below this are dropped after a linear combination.
inline constexpr double kDefaultEpsilon = 1e-12;

inline bool is_reserved(std::string_view token) {
  return token == kNumberKey || token == kSampleKey;
}

inline void check_token(std::string_view token) {
  if (is_reserved(token)) throw ReservedTokenError(std::string(token));
}

inline std::string path_to_string(std::span<const Token> path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '/';
    out += path[i];
  }
  return out;
}

class PTVector {
 public:
  using Children = std::map<Token, PTVector, std::less<>>;

  PTVector() = default;

  static PTVector scalar_only(double value) {
    PTVector v;
    v.scalar_ = value;
    return v;
  }

  // Builds a node from parts, dropping zero children and a scalar below
  // `epsilon`. Children are assumed canonical already.
  static PTVector from_parts(double scalar, Children children,
                             double epsilon = kDefaultEpsilon) {
    PTVector v;
    v.scalar_ = std::abs(scalar) < epsilon ? 0.0 : scalar;
    std::erase_if(children, [](const auto& kv) { return kv.second.is_zero(); });
    if (!children.empty())
      v.children_ = std::make_shared<const Children>(std::move(children));
    return v;
  }

  double scalar() const noexcept { return scalar_; }

  const Children& children() const noexcept {
    static const Children kEmpty;
    return children_ ? *children_ : kEmpty;
  }

  bool is_zero() const noexcept { return scalar_ == 0.0 && !children_; }

  // Child subtree at `token`, or nullptr when absent (i.e. zero).
  const PTVector* find(std::string_view token) const {
    if (!children_) return nullptr;
    auto it = children_->find(token);
    return it == children_->end() ? nullptr : &it->second;
  }

  friend bool operator==(const PTVector& a, const PTVector& b) {
    if (a.scalar_ != b.scalar_) return false;
    if (a.children_ == b.children_) return true;
    return a.children() == b.children();
  }

 private:
  double scalar_ = 0.0;
  std::shared_ptr<const Children> children_;
};

inline PTVector zero() { return PTVector{}; }

// Coefficient of the term `path`; zero when absent.
inline double coefficient(const PTVector& v, std::span<const Token> path) {
  const PTVector* node = &v;
  for (const Token& t : path) {
    node = node->find(t);
    if (!node) return 0.0;
  }
  return node->scalar();
}

inline PTVector subtree(const PTVector& v, std::string_view token) {
  check_token(token);
  const PTVector* child = v.find(token);
  return child ? *child : PTVector{};
}

// Replaces the component of `v` under `token` by `w` (removing it when `w`
// is zero).
inline PTVector attach(const PTVector& v, std::string_view token,
                       PTVector w) {
  check_token(token);
  PTVector::Children children = v.children();
  if (w.is_zero()) {
    auto it = children.find(token);
    if (it != children.end()) children.erase(it);
  } else {
    children.insert_or_assign(Token(token), std::move(w));
  }
  return PTVector::from_parts(v.scalar(), std::move(children), 0.0);
}

// `v` with the coefficient of `path` replaced by `x` (0 removes the term).
inline PTVector with_coefficient(const PTVector& v, std::span<const Token> path,
                                 double x) {
  if (path.empty()) return PTVector::from_parts(x, v.children(), 0.0);
  check_token(path.front());
  const PTVector* child = v.find(path.front());
  return attach(v, path.front(),
                with_coefficient(child ? *child : PTVector{}, path.subspan(1),
                                 x));
}

// Drops every coefficient below `epsilon` and every resulting empty subtree.
inline PTVector prune(const PTVector& v, double epsilon = kDefaultEpsilon) {
  PTVector::Children children;
  for (const auto& [token, child] : v.children()) {
    PTVector c = prune(child, epsilon);
    if (!c.is_zero()) children.emplace(token, std::move(c));
  }
  return PTVector::from_parts(v.scalar(), std::move(children), epsilon);
}

struct Term {
  double alpha;
  const PTVector* vector;
};

namespace detail {

inline PTVector combine_nodes(std::span<const Term> terms, double epsilon) {
  double scalar = 0.0;
  std::map<std::string_view, std::vector<Term>> grouped;
  for (const Term& term : terms) {
    if (term.alpha == 0.0) continue;
    scalar += term.alpha * term.vector->scalar();
    for (const auto& [token, child] : term.vector->children())
      grouped[token].push_back(Term{term.alpha, &child});
  }
  PTVector::Children children;
  for (auto& [token, group] : grouped) {
    // Reuse the subtree as-is when it passes through unscaled.
    if (group.size() == 1 && group.front().alpha == 1.0) {
      children.emplace(Token(token), prune(*group.front().vector, epsilon));
      continue;
    }
    PTVector c = combine_nodes(group, epsilon);
    if (!c.is_zero()) children.emplace(Token(token), std::move(c));
  }
  return PTVector::from_parts(scalar, std::move(children), epsilon);
}

}  // namespace detail

// sum_i alpha_i * v_i, pruned at `epsilon`.
inline PTVector linear_combination(std::span<const Term> terms,
                                   double epsilon = kDefaultEpsilon) {
  return detail::combine_nodes(terms, epsilon);
}

inline PTVector linear_combination(
    std::span<const std::pair<double, PTVector>> pairs,
    double epsilon = kDefaultEpsilon) {
  std::vector<Term> terms;
  terms.reserve(pairs.size());
  for (const auto& [alpha, v] : pairs) terms.push_back(Term{alpha, &v});
  return detail::combine_nodes(terms, epsilon);
}

inline PTVector add(const PTVector& u, const PTVector& v,
                    double epsilon = kDefaultEpsilon) {
  const Term terms[] = {{1.0, &u}, {1.0, &v}};
  return detail::combine_nodes(terms, epsilon);
}

inline PTVector scale(double alpha, const PTVector& v,
                      double epsilon = kDefaultEpsilon) {
  const Term terms[] = {{alpha, &v}};
  return detail::combine_nodes(terms, epsilon);
}

// Sums like terms. Throws ReservedTokenError for `:number` / `:sample`
// anywhere in a path.
inline PTVector from_terms(std::span<const std::pair<Path, double>> terms,
                           double epsilon = kDefaultEpsilon) {
  struct Node {
    double scalar = 0.0;
    std::map<Token, Node, std::less<>> children;
  };
  Node root;
  for (const auto& [path, alpha] : terms) {
    Node* node = &root;
    for (const Token& t : path) {
      check_token(t);
      node = &node->children[t];
    }
    node->scalar += alpha;
  }
  std::function<PTVector(const Node&)> build = [&](const Node& n) {
    PTVector::Children children;
    for (const auto& [token, child] : n.children) {
      PTVector c = build(child);
      if (!c.is_zero()) children.emplace(token, std::move(c));
    }
    return PTVector::from_parts(n.scalar, std::move(children), epsilon);
  };
  return build(root);
}

inline PTVector from_terms(
    std::initializer_list<std::pair<Path, double>> terms,
    double epsilon = kDefaultEpsilon) {
  return from_terms(std::span<const std::pair<Path, double>>(terms.begin(),
                                                             terms.size()),
                    epsilon);
}

// Visits every nonzero term in lexicographic path order.
template <typename Fn>
void for_each_term(const PTVector& v, Fn&& fn) {
  Path path;
  std::function<void(const PTVector&)> walk = [&](const PTVector& node) {
    if (node.scalar() != 0.0) fn(std::as_const(path), node.scalar());
    for (const auto& [token, child] : node.children()) {
      path.push_back(token);
      walk(child);
      path.pop_back();
    }
  };
  walk(v);
}

inline std::vector<std::pair<Path, double>> terms(const PTVector& v) {
  std::vector<std::pair<Path, double>> out;
  for_each_term(v, [&](const Path& p, double x) { out.emplace_back(p, x); });
  return out;
}

inline std::size_t term_count(const PTVector& v) {
  std::size_t n = v.scalar() != 0.0 ? 1 : 0;
  for (const auto& [token, child] : v.children()) n += term_count(child);
  return n;
}

// Length of the longest path with a nonzero coefficient; none for zero.
inline std::optional<std::size_t> max_rank(const PTVector& v) {
  std::optional<std::size_t> rank;
  if (v.scalar() != 0.0) rank = 0;
  for (const auto& [token, child] : v.children()) {
    if (auto r = max_rank(child)) rank = std::max(rank.value_or(0), *r + 1);
  }
  return rank;
}

// Applies `fn` to every nonzero coefficient. Coefficients mapped below
// `epsilon` are pruned.
template <typename Fn>
PTVector map_coefficients(const PTVector& v, Fn&& fn,
                          double epsilon = kDefaultEpsilon) {
  PTVector::Children children;
  for (const auto& [token, child] : v.children()) {
    PTVector c = map_coefficients(child, fn, epsilon);
    if (!c.is_zero()) children.emplace(token, std::move(c));
  }
  double s = v.scalar() != 0.0 ? fn(v.scalar()) : 0.0;
  return PTVector::from_parts(s, std::move(children), epsilon);
}

// max over all paths of |coefficient(a, p) - coefficient(b, p)|.
inline double max_abs_difference(const PTVector& a, const PTVector& b) {
  double d = std::abs(a.scalar() - b.scalar());
  const auto& ca = a.children();
  const auto& cb = b.children();
  static const PTVector kZero;
  auto ia = ca.begin();
  auto ib = cb.begin();
  while (ia != ca.end() || ib != cb.end()) {
    if (ib == cb.end() || (ia != ca.end() && ia->first < ib->first)) {
      d = std::max(d, max_abs_difference(ia->second, kZero));
      ++ia;
    } else if (ia == ca.end() || ib->first < ia->first) {
      d = std::max(d, max_abs_difference(kZero, ib->second));
      ++ib;
    } else {
      d = std::max(d, max_abs_difference(ia->second, ib->second));
      ++ia;
      ++ib;
    }
  }
  return d;
}

}  // namespace dmm

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
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dmm/errors.hpp"

namespace dmm {

// Dense rows x cols real matrix, row-major. Indices are 0-based.
class RectMatrix {
 public:
  RectMatrix() = default;
  RectMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static RectMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows) {
    RectMatrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t r = 0;
    for (const auto& row : rows) {
      if (row.size() != m.cols_) throw DimensionError("ragged matrix rows");
      std::size_t c = 0;
      for (double x : row) m(r, c++) = x;
      ++r;
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  bool same_shape(const RectMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  RectMatrix& operator+=(const RectMatrix& o) {
    if (!same_shape(o)) throw DimensionError("shape mismatch in matrix sum");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

  friend RectMatrix operator+(RectMatrix a, const RectMatrix& b) {
    a += b;
    return a;
  }

  friend RectMatrix operator*(double alpha, RectMatrix m) {
    for (double& x : m.data_) x *= alpha;
    return m;
  }

  friend bool operator==(const RectMatrix&, const RectMatrix&) = default;

  std::string shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace dmm

#pragma once

#include <cstddef>
#include <vector>

namespace uie {

/// Dense row-major matrix of doubles; rows are the unit of work everywhere
/// (one basis function / one deflated component per row).
struct RowMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  RowMatrix() = default;
  RowMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const {
    return data.data() + static_cast<size_t>(i) * cols;
  }
  double& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const {
    return data[static_cast<size_t>(i) * cols + j];
  }

  /// Drop the first row in place.
  void drop_first_row() {
    data.erase(data.begin(), data.begin() + cols);
    --rows;
  }
};

}  // namespace uie

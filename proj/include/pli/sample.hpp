#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pli/distributions.hpp"

namespace pli {

//! N paired records of a d-dimensional input point and the scalar model
//! output recorded for it. Inputs are stored row-major.
class Sample {
 public:
  Sample() = default;
  /// Throws Error(dimension_mismatch) when sizes disagree or N == 0.
  Sample(std::vector<double> inputs_row_major, std::size_t dim, std::vector<double> outputs);

  std::size_t size() const noexcept { return outputs_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  double input(std::size_t row, std::size_t column) const { return inputs_[row * dim_ + column]; }
  std::span<const double> row(std::size_t n) const {
    return std::span<const double>(inputs_).subspan(n * dim_, dim_);
  }
  std::vector<double> column(std::size_t i) const;
  std::span<const double> outputs() const noexcept { return outputs_; }
  std::span<const double> inputs() const noexcept { return inputs_; }

  /// Rows picked by index, with repetition allowed (bootstrap resample).
  Sample subset(std::span<const std::size_t> rows) const;
  /// Copy with one row removed (leave-one-out).
  Sample without_row(std::size_t n) const;
  /// Copy with every output multiplied by c.
  Sample scaled_outputs(double c) const;

 private:
  std::vector<double> inputs_;
  std::size_t dim_ = 0;
  std::vector<double> outputs_;
};

/// Throws Error(dimension_mismatch) if the marginal count differs from the
/// sample dimension, Error(out_of_support) naming the first offending
/// (row, column, value) otherwise.
void validate_support(const Sample& s, std::span<const Marginal> marginals);

}  // namespace pli

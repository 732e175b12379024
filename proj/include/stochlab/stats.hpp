#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stochlab {

/// Pairwise (cascade) summation. The summation tree depends only on the
/// length of the input, so results are reproducible bit for bit.
double pairwise_sum(std::span<const double> values);

/// Monte Carlo mean with its standard error (sample sd / sqrt(N)).
struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

MeanEstimate estimate_mean(std::span<const double> values);

/// Per-replica results: `rows` replicas, `width` statistics each, row-major.
class SampleTable {
 public:
  SampleTable(std::size_t rows, std::size_t width);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t width() const noexcept { return width_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * width_, width_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * width_, width_}; }
  std::vector<double> column(std::size_t c) const;
  MeanEstimate mean(std::size_t c) const { return estimate_mean(column(c)); }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t rows_;
  std::size_t width_;
  std::vector<double> data_;
};

/// Least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace stochlab

#include "stochlab/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace stochlab {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t block = 8;
  if (values.size() <= block) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanEstimate estimate_mean(std::span<const double> values) {
  MeanEstimate e;
  e.samples = values.size();
  if (values.empty()) return e;
  const auto n = static_cast<double>(values.size());
  e.mean = pairwise_sum(values) / n;
  if (values.size() < 2) return e;
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - e.mean;
    dev[i] = d * d;
  }
  const double var = pairwise_sum(dev) / (n - 1.0);
  e.stderr_ = std::sqrt(var / n);
  return e;
}

SampleTable::SampleTable(std::size_t rows, std::size_t width)
    : rows_(rows), width_(width), data_(rows * width, 0.0) {}

std::vector<double> SampleTable::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[r * width_ + c];
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace stochlab

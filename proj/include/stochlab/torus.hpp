#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace stochlab {

/// Periodic cell grid on the unit torus T^d, d in {1, 2}.
class TorusGrid {
 public:
  TorusGrid(std::size_t cells_per_dim, std::size_t dim = 1);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t cells_per_dim() const noexcept { return n_; }
  std::size_t cells() const noexcept { return dim_ == 1 ? n_ : n_ * n_; }
  double dx() const noexcept { return 1.0 / static_cast<double>(n_); }
  double cell_volume() const noexcept { return 1.0 / static_cast<double>(cells()); }

  /// Coordinate of the centre of cell i along `axis`.
  double center(std::size_t i, std::size_t axis = 0) const;
  /// Periodic neighbour of cell i, shifted by +1 or -1 along `axis`.
  std::size_t neighbor(std::size_t i, std::size_t axis, int shift) const;

  std::vector<double> sample(const std::function<double(std::array<double, 2>)>& f) const;

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  std::size_t n_;
  std::size_t dim_;
};

/// Smooth periodic test function with nodal values, gradient and Laplacian.
class TestFunction {
 public:
  using Scalar = std::function<double(std::array<double, 2>)>;
  using Vector = std::function<std::array<double, 2>(std::array<double, 2>)>;

  /// Samples f, grad f and lap f; throws ConfigError if the derivative
  /// arrays disagree with spectral differentiation of the samples.
  static TestFunction from_analytic(const TorusGrid& grid, const Scalar& f, const Vector& grad,
                                    const Scalar& laplacian);
  static TestFunction constant(const TorusGrid& grid, double c);

  const TorusGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& gradient(std::size_t axis) const { return grad_.at(axis); }
  const std::vector<double>& laplacian() const noexcept { return laplacian_; }
  double max_abs() const;

 private:
  explicit TestFunction(TorusGrid grid) : grid_(grid) {}
  TorusGrid grid_;
  std::vector<double> values_;
  std::vector<std::vector<double>> grad_;
  std::vector<double> laplacian_;
};

}  // namespace stochlab

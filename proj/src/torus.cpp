#include "stochlab/torus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stochlab/error.hpp"
#include "stochlab/spectral.hpp"

namespace stochlab {

TorusGrid::TorusGrid(std::size_t cells_per_dim, std::size_t dim) : n_(cells_per_dim), dim_(dim) {
  if (dim != 1 && dim != 2) throw ConfigError("torus dimension must be 1 or 2");
  if (cells_per_dim < 16) throw ConfigError("torus grid needs at least 16 cells per dimension");
}

double TorusGrid::center(std::size_t i, std::size_t axis) const {
  const std::size_t idx = axis == 0 ? i % n_ : i / n_;
  return (static_cast<double>(idx) + 0.5) / static_cast<double>(n_);
}

std::size_t TorusGrid::neighbor(std::size_t i, std::size_t axis, int shift) const {
  const std::size_t ix = i % n_;
  const std::size_t iy = dim_ == 1 ? 0 : i / n_;
  const std::size_t step = shift > 0 ? 1 : n_ - 1;
  const auto wrap = [this, step](std::size_t v) { return (v + step) % n_; };
  if (axis == 0) return wrap(ix) + iy * n_;
  return ix + wrap(iy) * n_;
}

std::vector<double> TorusGrid::sample(const std::function<double(std::array<double, 2>)>& f) const {
  std::vector<double> v(cells());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f({center(i, 0), dim_ == 2 ? center(i, 1) : 0.0});
  return v;
}

namespace {

// Extracts the line of cells through `start` along `axis`.
std::vector<double> line(const TorusGrid& g, const std::vector<double>& v, std::size_t start, std::size_t axis) {
  std::vector<double> out(g.cells_per_dim());
  std::size_t i = start;
  for (auto& o : out) {
    o = v[i];
    i = g.neighbor(i, axis, +1);
  }
  return out;
}

double max_abs_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TestFunction TestFunction::from_analytic(const TorusGrid& grid, const Scalar& f, const Vector& grad,
                                         const Scalar& laplacian) {
  TestFunction tf(grid);
  tf.values_ = grid.sample(f);
  for (std::size_t a = 0; a < grid.dim(); ++a)
    tf.grad_.push_back(grid.sample([&](std::array<double, 2> x) { return grad(x)[a]; }));
  tf.laplacian_ = grid.sample(laplacian);

  // Spectral consistency along every grid line.
  const std::size_t n = grid.cells_per_dim();
  std::vector<double> second(grid.cells(), 0.0);
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    const std::size_t lines = grid.dim() == 1 ? 1 : n;
    const double tol = 1e-8 * std::max(1.0, max_abs_of(tf.grad_[a]));
    for (std::size_t l = 0; l < lines; ++l) {
      const std::size_t start = a == 0 ? l * n : l;
      const auto vals = line(grid, tf.values_, start, a);
      const auto d1 = spectral::derivative(vals, 1);
      const auto d2 = spectral::derivative(vals, 2);
      std::size_t i = start;
      for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(d1[k] - tf.grad_[a][i]) > tol)
          throw ConfigError("test function gradient inconsistent with its values (axis " +
                            std::to_string(a) + ")");
        second[i] += d2[k];
        i = grid.neighbor(i, a, +1);
      }
    }
  }
  const double tol = 1e-8 * std::max(1.0, max_abs_of(tf.laplacian_));
  for (std::size_t i = 0; i < second.size(); ++i)
    if (std::abs(second[i] - tf.laplacian_[i]) > tol)
      throw ConfigError("test function Laplacian inconsistent with its values");
  return tf;
}

TestFunction TestFunction::constant(const TorusGrid& grid, double c) {
  TestFunction tf(grid);
  tf.values_.assign(grid.cells(), c);
  tf.grad_.assign(grid.dim(), std::vector<double>(grid.cells(), 0.0));
  tf.laplacian_.assign(grid.cells(), 0.0);
  return tf;
}

double TestFunction::max_abs() const { return max_abs_of(values_); }

}  // namespace stochlab

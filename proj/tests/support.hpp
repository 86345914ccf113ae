#pragma once

#include "fracinv/spectral.hpp"
#include "fracinv/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>

namespace testing {

inline fracinv::DirichletSpectrum interval_spectrum(double s, std::size_t n, double a = -1.0, double b = 1.0) {
  using namespace fracinv;
  return eigendecompose(assemble_operator(FractionalOrder(s), SpaceGrid(a, b, n)));
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = dist(rng);
  return v;
}

inline double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

template <class F>
double path_error(const fracinv::SampledPath& path, F&& exact) {
  double err = 0.0;
  for (std::size_t m = 0; m < path.size(); ++m) {
    err = std::max(err, std::abs(path[m] - exact(path.grid().at(m))));
  }
  return err;
}

}  // namespace testing

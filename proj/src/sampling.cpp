#include "varcalc/sampling.hpp"

#include <array>
#include <cmath>
#include <random>

#include <boost/math/special_functions/erf.hpp>

namespace varcalc {

namespace {
constexpr std::array<int, 24> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                         41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

double radical_inverse(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
  }
  return r;
}
}  // namespace

QuasiRandom::QuasiRandom(int dim, std::uint64_t seed) {
  if (dim <= 0 || dim > static_cast<int>(kPrimes.size())) {
    throw DimensionError("QuasiRandom: dimension out of supported range");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  shift_.resize(dim);
  for (int i = 0; i < dim; ++i) shift_(i) = u(rng);
}

Vec QuasiRandom::cube(std::uint64_t index) const {
  Vec p(shift_.size());
  for (int i = 0; i < shift_.size(); ++i) {
    double v = radical_inverse(index + 1, kPrimes[static_cast<size_t>(i)]) + shift_(i);
    p(i) = v - std::floor(v);
  }
  return p;
}

Vec QuasiRandom::sphere(std::uint64_t index) const {
  const Vec c = cube(index);
  const int d = dim() - 1;
  Vec g(d);
  for (int i = 0; i < d; ++i) {
    const double u = std::clamp(c(i + 1), 1e-12, 1.0 - 1e-12);
    g(i) = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
  }
  const double ng = g.norm();
  if (ng == 0.0) return Vec::Unit(d, 0);
  return g / ng;
}

Vec QuasiRandom::ball(std::uint64_t index) const {
  const int d = dim() - 1;
  const double r = std::pow(cube(index)(0), 1.0 / d);
  return r * sphere(index);
}

}  // namespace varcalc

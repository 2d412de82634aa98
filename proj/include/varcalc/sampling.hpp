#pragma once

#include <cstdint>

#include "varcalc/common.hpp"

namespace varcalc {

// Halton sequence with a seeded Cranley–Patterson rotation.
class QuasiRandom {
 public:
  QuasiRandom(int dim, std::uint64_t seed);
  int dim() const { return static_cast<int>(shift_.size()); }
  // Point `index` of the rotated sequence in [0,1)^dim.
  Vec cube(std::uint64_t index) const;
  // Point in the closed unit ball of R^(dim-1): one coordinate drives the radius,
  // the rest a Gaussian direction.
  Vec ball(std::uint64_t index) const;
  // Unit vector in R^(dim-1).
  Vec sphere(std::uint64_t index) const;

 private:
  Vec shift_;
};

}  // namespace varcalc

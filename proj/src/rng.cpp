/**
 * This code is part of qcoreset.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcoreset/rng.hpp"

#include <algorithm>

namespace qcoreset {

std::size_t draw_from_cumulative(Rng& rng, std::span<const double> cumulative) {
  const double target = uniform01(rng) * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  // upper_bound never lands on a zero-weight slot: its cumulative value
  // equals its predecessor's, which would already exceed the target.
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace qcoreset

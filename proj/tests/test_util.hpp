#pragma once

#include "nvdpt/model.hpp"
#include "nvdpt/spin_algebra.hpp"

#include <memory>
#include <random>

namespace testutil {

inline nvdpt::ComplexMatrix random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  nvdpt::ComplexMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    m(r, r) = u(rng);
    for (int c = r + 1; c < n; ++c) {
      m(r, c) = nvdpt::Complex(u(rng), u(rng));
      m(c, r) = std::conj(m(r, c));
    }
  }
  return m;
}

inline std::shared_ptr<const nvdpt::SpinSystem> make(const nvdpt::SpinSystemSpec& spec) {
  return std::make_shared<const nvdpt::SpinSystem>(spec);
}

inline std::shared_ptr<const nvdpt::SpinSystem> nv3c() {
  static const auto system = make(nvdpt::nv3c_system());
  return system;
}

}  // namespace testutil

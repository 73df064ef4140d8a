#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "beliefinfo/gaussian.hpp"

// Deterministic keyed random streams. A stream is addressed by
// (master_seed, index, stage); distinct keys give statistically independent
// sequences, so ensemble workers can draw for any record in any order and
// still reproduce identical outputs. No libc RNG state is involved anywhere.

namespace beliefinfo {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1]; never returns 0 so logs in transforms stay finite.
  double uniform01() noexcept {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  // Box-Muller. Consumes exactly two uniforms per call; the cosine branch is
  // kept and the sine branch discarded so consumption is position-independent.
  double normal() noexcept {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi_v<double> * u2);
  }

 private:
  std::uint64_t state_;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

inline SplitMix64 keyed_stream(std::uint64_t master_seed, std::uint64_t index,
                               std::uint64_t stage) noexcept {
  std::uint64_t k = detail::mix64(master_seed ^ 0xD1B54A32D192ED03ULL);
  k = detail::mix64(k ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  k = detail::mix64(k ^ (0xBF58476D1CE4E5B9ULL * (stage + 1)));
  return SplitMix64(k);
}

template <typename Scalar>
void fill_standard_normal(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& z, SplitMix64& rng) {
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = static_cast<Scalar>(rng.normal());
}

// Draw x = mean + L z with L the stored Cholesky factor.
template <typename Scalar>
typename GaussianT<Scalar>::Vector sample(const GaussianT<Scalar>& g, SplitMix64& rng) {
  typename GaussianT<Scalar>::Vector z(g.dim());
  fill_standard_normal(z, rng);
  return g.mean() + g.llt().matrixL() * z;
}

}  // namespace beliefinfo

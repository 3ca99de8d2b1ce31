#include "espike/rng.hpp"

#include <cmath>

namespace espike {

namespace {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::uint64_t RngStream::next_u64() {
  // Two avalanche rounds over the (seed, stream, counter) key.
  std::uint64_t k = seed_ + 0x9e3779b97f4a7c15ULL * (stream_ + 1);
  std::uint64_t h = mix64(k ^ 0x6a09e667f3bcc909ULL);
  return mix64(h + 0x9e3779b97f4a7c15ULL * ++counter_);
}

double RngStream::uniform() {
  // 53-bit mantissa, shifted off zero.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925287 * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

std::complex<double> RngStream::gaussian_complex() {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  double re = gaussian();
  double im = gaussian();
  return {re * inv_sqrt2, im * inv_sqrt2};
}

}  // namespace espike

#pragma once
#include <complex>
#include <cstdint>

namespace espike {

// Counter-based random stream keyed by (seed, stream_id). Draw k of any
// stream is a pure function of (seed, stream_id, k), so identical keys
// reproduce identical sequences and distinct stream ids are independent,
// with no shared state between workers.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint64_t next_u64();
  double uniform();   // open interval (0,1)
  double gaussian();  // standard normal
  std::complex<double> gaussian_complex();  // E|z|^2 = 1

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace espike

#pragma once

#include <complex>
#include <cstdint>

namespace qdecouple {

/// Counter-based random stream. Draw i of a stream is a pure function of
/// (seed, stream index, i), so a sample can be regenerated independently of
/// how work was scheduled across threads.
///
/// The generator is SplitMix64 evaluated at an explicit counter; normals
/// come from the Box-Muller transform so results do not depend on the
/// standard library's distribution implementations.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  /// Independent child stream, keyed by (this stream, index).
  RngStream substream(std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open0();
  double normal();
  /// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
  std::complex<double> complex_normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace qdecouple

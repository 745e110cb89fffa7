#include "qdecouple/rng.hpp"

#include <cmath>
#include <numbers>

namespace qdecouple {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGamma) ^ (stream * kGamma + 0x2545F4914F6CDD1DULL))) {}

RngStream RngStream::substream(std::uint64_t index) const {
  return RngStream(mix64(key_ ^ mix64(index + kGamma)));
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open0() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

std::complex<double> RngStream::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

}  // namespace qdecouple

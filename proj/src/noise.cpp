#include "dpfdr/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace dpfdr {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

NoiseStream::NoiseStream(std::uint64_t seed) : NoiseStream(Mode::Seeded, seed) {}

NoiseStream::NoiseStream(Mode mode, std::uint64_t seed)
    : mode_(mode), seed_(seed), state_(mix64(seed ^ kGolden)) {}

NoiseStream NoiseStream::median() { return NoiseStream(Mode::Median, 0); }

NoiseStream NoiseStream::scripted(std::vector<double> uniforms) {
  NoiseStream s(Mode::Scripted, 0);
  s.script_.assign(uniforms.begin(), uniforms.end());
  return s;
}

std::uint64_t NoiseStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double NoiseStream::next_uniform() {
  switch (mode_) {
    case Mode::Median:
      return 0.5;
    case Mode::Scripted: {
      if (script_.empty()) {
        throw std::logic_error("scripted NoiseStream exhausted");
      }
      double u = script_.front();
      script_.pop_front();
      return u;
    }
    case Mode::Seeded:
      break;
  }
  // Top 53 bits, centered on odd multiples of 2^-54: always in (0,1) open.
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

NoiseStream NoiseStream::child(std::uint64_t index) const {
  if (mode_ == Mode::Median) return median();
  if (mode_ == Mode::Scripted) {
    throw std::logic_error("scripted NoiseStream cannot be split");
  }
  return NoiseStream(derive_seed(seed_, index));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(kGolden * (index + 1)));
}

double laplace_sample(double lambda, NoiseStream& rng) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("laplace_sample: scale must be > 0");
  }
  const double d = rng.next_uniform() - 0.5;
  // Inverse CDF: u<1/2 -> lambda*log(2u), u>=1/2 -> -lambda*log(2(1-u)).
  return d < 0.0 ? lambda * std::log1p(2.0 * d) : -lambda * std::log1p(-2.0 * d);
}

double laplace_cdf(double z) {
  return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

double exponential_sample(NoiseStream& rng) { return -std::log(rng.next_uniform()); }

}  // namespace dpfdr

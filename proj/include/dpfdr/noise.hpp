#ifndef DPFDR_NOISE_HPP
#define DPFDR_NOISE_HPP

#include <cstdint>
#include <deque>
#include <vector>

namespace dpfdr {

// Seeded source of uniform variates. Every random draw in the library flows
// through one of these, so a run is reproducible from its seed alone.
//
// Modes:
//   seeded   - counter-based 64-bit generator (splitmix-style), the default.
//   median   - every draw returns the distribution median (0.5 for uniforms).
//              Exists for deterministic unit tests only; the CLI refuses it
//              for privacy-bearing commands.
//   scripted - draws come from a fixed list (test use).
//
// A stream is single-owner: do not share one instance between concurrent
// callers. Parallel simulations derive independent child streams with
// derive_seed(seed, trial_index).
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed);

  static NoiseStream median();
  static NoiseStream scripted(std::vector<double> uniforms);

  // Strictly inside (0,1); never returns 0 or 1 exactly.
  double next_uniform();

  // Raw 64-bit output of the underlying generator (seeded mode semantics).
  std::uint64_t next_u64();

  bool is_median() const { return mode_ == Mode::Median; }
  bool is_seeded() const { return mode_ == Mode::Seeded; }
  std::uint64_t seed() const { return seed_; }

  // Independent stream for a sub-task; median streams stay median.
  NoiseStream child(std::uint64_t index) const;

 private:
  enum class Mode { Seeded, Median, Scripted };
  NoiseStream(Mode mode, std::uint64_t seed);

  Mode mode_;
  std::uint64_t seed_ = 0;
  std::uint64_t state_ = 0;
  std::deque<double> script_;
};

// Fixed 64-bit mixing function used for seed-splitting: (seed, index) -> child
// seed. Distinct indices give decorrelated child streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// One draw from the zero-mean Laplace law with the given scale, by inverse-CDF
// transform of a single uniform. Throws std::invalid_argument if scale <= 0.
double laplace_sample(double lambda, NoiseStream& rng);

// CDF of the standard (scale 1) Laplace distribution.
double laplace_cdf(double z);

// One unit-rate exponential variate, as -log(u).
double exponential_sample(NoiseStream& rng);

}  // namespace dpfdr

#endif  // DPFDR_NOISE_HPP

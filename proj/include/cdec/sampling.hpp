#ifndef CDEC_SAMPLING_HPP_
#define CDEC_SAMPLING_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace cdec {

// Deterministic sampler on top of mt19937_64. The transforms (uniform,
// Box-Muller normal, Marsaglia-Tsang gamma) are implemented here rather
// than taken from <random> because the standard leaves distribution
// algorithms implementation-defined; this keeps streams reproducible for
// a given seed.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1); safe as a log or power argument.
  double uniform_open() {
    return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal();
  double gamma(double shape);  // scale 1, shape > 0
  std::vector<double> dirichlet(const std::vector<double> &alpha);
  int categorical(const std::vector<double> &probs);

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cdec

#endif  // CDEC_SAMPLING_HPP_

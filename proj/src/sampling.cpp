#include "cdec/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace cdec {

double Sampler::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * 3.14159265358979323846 * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

double Sampler::gamma(double shape) {
  if (shape <= 0.0) {
    if (shape == 0.0) return 0.0;
    throw std::invalid_argument("gamma shape must be >= 0");
  }
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
    const double u = uniform_open();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze method.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<double> Sampler::dirichlet(const std::vector<double> &alpha) {
  std::vector<double> draw(alpha.size());
  double total = 0.0;
  for (size_t j = 0; j < alpha.size(); ++j) {
    draw[j] = gamma(alpha[j]);
    total += draw[j];
  }
  if (total <= 0.0) {
    // All concentrations underflowed; fall back to a point mass on the
    // largest one.
    size_t best = 0;
    for (size_t j = 1; j < alpha.size(); ++j)
      if (alpha[j] > alpha[best]) best = j;
    std::fill(draw.begin(), draw.end(), 0.0);
    draw[best] = 1.0;
    return draw;
  }
  for (double &v : draw) v /= total;
  return draw;
}

int Sampler::categorical(const std::vector<double> &probs) {
  const double u = uniform();
  double cumulative = 0.0;
  for (size_t j = 0; j < probs.size(); ++j) {
    cumulative += probs[j];
    if (u < cumulative) return static_cast<int>(j);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace cdec

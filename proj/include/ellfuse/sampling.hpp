#pragma once

// Seeded generic-parameter sampling.
//
// Generator: std::mt19937_64 (MT19937-64 with the standard seeding), doubles
// in [0,1) formed as (x >> 11) * 2^-53. Complex draws take the real part
// first. Rejection keeps every theta denominator that can appear away from
// zero; the threshold is far above the residual tolerances used in checks.

#include <random>
#include <vector>

#include "rmatrix.hpp"

namespace ellfuse {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  Complex unit_complex() {
    const double re = uniform();
    const double im = uniform();
    return {re, im};
  }

  // lambda in ([0,1)+[0,1)i)^N with |theta(lambda_i-lambda_j+k gamma)| >= thresh
  // for all i != j and |k| <= max_shift.
  WeightVector generic_lambda(const ModelParams& p, int max_shift = 1, double thresh = 1e-6) {
    while (true) {
      WeightVector l(p.N);
      for (int j = 0; j < p.N; ++j) l[j] = unit_complex();
      if (lambda_is_generic(l, p, max_shift, thresh)) return l;
    }
  }

  // z in [0,1)+[0,1)i with |theta(z - s)| >= thresh for every listed s.
  Complex generic_spectral(const ModelParams& p, const std::vector<Complex>& avoid,
                           double thresh = 1e-6) {
    while (true) {
      const Complex z = unit_complex();
      bool ok = true;
      for (Complex s : avoid)
        if (p.th_abs(z - s) < thresh) ok = false;
      if (ok) return z;
    }
  }

  static bool lambda_is_generic(const WeightVector& l, const ModelParams& p, int max_shift,
                                double thresh) {
    for (int i = 0; i < l.size(); ++i)
      for (int j = 0; j < l.size(); ++j) {
        if (i == j) continue;
        for (int k = -max_shift; k <= max_shift; ++k)
          if (p.th_abs(l[i] - l[j] + static_cast<double>(k) * p.gamma) < thresh) return false;
      }
    return true;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Multiples k*gamma for |k| <= K, used as avoid lists for spectral draws.
inline std::vector<Complex> gamma_multiples(const ModelParams& p, int K) {
  std::vector<Complex> v;
  for (int k = -K; k <= K; ++k) v.push_back(static_cast<double>(k) * p.gamma);
  return v;
}

}  // namespace ellfuse

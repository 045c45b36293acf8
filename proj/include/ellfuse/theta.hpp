#pragma once

// Jacobi's first theta function
//
//   theta(z) = - sum_{j in Z+1/2} exp(pi i j^2 tau + 2 pi i j (z + 1/2))
//
// evaluated by summing the index pairs j = +-1/2, +-3/2, ... in order.
// Summation stops once the latest pair has magnitude (|t_+| + |t_-|)
// below term_tol times the largest pair magnitude seen so far. The pair
// magnitude uses absolute values of the individual terms, so cancellation
// inside a pair (at z = 0 every pair sums to exactly zero) cannot stall
// the stopping rule.
//
// With this normalization theta(z) coincides with the classical
// theta_1(pi z | q), q = exp(pi i tau): odd, theta(z+1) = -theta(z),
// theta(z+tau) = -exp(-pi i tau - 2 pi i z) theta(z), simple zeros on Z + tau Z.
//
// No reduction of z into the fundamental cell is done; accuracy degrades
// like exp(2 pi |Im z|) relative to the result for large |Im z|.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ellfuse {

using Complex = std::complex<double>;

struct ThetaParams {
  Complex tau{0.0, 0.75};
  int max_terms = 200;
  double term_tol = 1e-18;

  void validate() const {
    if (!(tau.imag() > 0.0))
      throw std::invalid_argument("ThetaParams: Im(tau) must be positive");
    if (max_terms < 1)
      throw std::invalid_argument("ThetaParams: max_terms must be >= 1");
    if (!(term_tol > 0.0 && term_tol < 1.0))
      throw std::invalid_argument("ThetaParams: term_tol must lie in (0,1)");
  }
};

class ThetaConvergenceError : public std::runtime_error {
 public:
  explicit ThetaConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

namespace detail {

// Sums weight(j) * exp(pi i j^2 tau + 2 pi i j (z+1/2)) over j in Z+1/2.
template <typename Weight>
Complex theta_series(Complex z, const ThetaParams& p, Weight&& weight) {
  p.validate();
  constexpr double pi = std::numbers::pi;
  const Complex i_pi{0.0, pi};
  const Complex shifted = z + 0.5;

  Complex sum{0.0, 0.0};
  double running_max = 0.0;
  for (int k = 0; k < p.max_terms; ++k) {
    const double j = k + 0.5;
    const Complex gauss = std::exp(i_pi * (j * j) * p.tau);
    const Complex plus = weight(j) * gauss * std::exp(2.0 * i_pi * j * shifted);
    const Complex minus = weight(-j) * gauss * std::exp(-2.0 * i_pi * j * shifted);
    sum += plus + minus;

    const double magnitude = std::abs(plus) + std::abs(minus);
    if (magnitude > running_max) running_max = magnitude;
    if (k > 0 && magnitude < p.term_tol * running_max) return -sum;
  }
  throw ThetaConvergenceError("theta series did not converge within max_terms=" +
                              std::to_string(p.max_terms) + " pairs");
}

}  // namespace detail

inline Complex theta_eval(Complex z, const ThetaParams& p) {
  return detail::theta_series(z, p, [](double) { return Complex{1.0, 0.0}; });
}

/// Term-by-term derivative d/dz of theta_eval, same stopping rule.
inline Complex theta_deriv(Complex z, const ThetaParams& p) {
  return detail::theta_series(z, p, [](double j) {
    return Complex{0.0, 2.0 * std::numbers::pi * j};
  });
}

}  // namespace ellfuse

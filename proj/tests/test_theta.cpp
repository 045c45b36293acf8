#include <gtest/gtest.h>

#include "ellfuse/sampling.hpp"
#include "ellfuse/theta.hpp"
#include "oracle.hpp"

using namespace ellfuse;

namespace {

const ThetaParams kP{};

std::vector<Complex> random_points(int n, std::uint64_t seed) {
  Sampler s(seed);
  std::vector<Complex> v;
  for (int k = 0; k < n; ++k) v.push_back(s.unit_complex() - Complex(0.5, 0.4));
  return v;
}

}  // namespace

TEST(Theta, VanishesAtOrigin) { EXPECT_LT(std::abs(theta_eval(0.0, kP)), 1e-12); }

TEST(Theta, MatchesTripleProduct) {
  for (Complex z : random_points(30, 1)) {
    const Complex ref = oracle::theta_product(z, kP.tau);
    EXPECT_LT(std::abs(theta_eval(z, kP) - ref), 1e-13 * (1 + std::abs(ref))) << z;
  }
}

TEST(Theta, AntiPeriodicInOne) {
  for (Complex z : random_points(20, 2))
    EXPECT_LT(std::abs(theta_eval(z + 1.0, kP) + theta_eval(z, kP)), 1e-12 * (1 + std::abs(theta_eval(z, kP))));
}

TEST(Theta, QuasiPeriodicInTau) {
  const double pi = std::numbers::pi;
  for (Complex z : random_points(100, 3)) {
    const Complex factor = -std::exp(Complex(0, -pi) * kP.tau - Complex(0, 2 * pi) * z);
    const Complex lhs = theta_eval(z + kP.tau, kP);
    const Complex rhs = factor * theta_eval(z, kP);
    EXPECT_LT(std::abs(lhs - rhs), 1e-11 * (1 + std::abs(rhs))) << z;
  }
}

TEST(Theta, Odd) {
  for (Complex z : random_points(100, 4))
    EXPECT_LE(std::abs(theta_eval(-z, kP) + theta_eval(z, kP)), 1e-12 * (1 + std::abs(theta_eval(z, kP))));
}

TEST(Theta, LatticeZeros) {
  for (int m = -1; m <= 1; ++m)
    for (int n = -1; n <= 1; ++n)
      EXPECT_LE(std::abs(theta_eval(static_cast<double>(m) + static_cast<double>(n) * kP.tau, kP)), 1e-10);
}

TEST(ThetaDeriv, NonzeroAtOriginAndMatchesProduct) {
  const Complex d0 = theta_deriv(0.0, kP);
  EXPECT_GT(std::abs(d0), 1e-3);
  EXPECT_LT(std::abs(d0 - oracle::theta_prime_zero(kP.tau)), 1e-12 * std::abs(d0));
}

TEST(ThetaDeriv, CentralDifference) {
  const double h = 1e-6;
  for (Complex z : random_points(20, 5)) {
    const Complex fd = (theta_eval(z + h, kP) - theta_eval(z - h, kP)) / (2 * h);
    const Complex d = theta_deriv(z, kP);
    EXPECT_LT(std::abs(fd - d), 1e-6 * std::max(1.0, std::abs(d)));
  }
}

TEST(ThetaDeriv, Even) {
  for (Complex z : random_points(20, 6))
    EXPECT_LT(std::abs(theta_deriv(-z, kP) - theta_deriv(z, kP)), 1e-12 * (1 + std::abs(theta_deriv(z, kP))));
}

TEST(ThetaParams, RejectsInvalid) {
  ThetaParams p;
  p.tau = {0.0, -0.1};
  EXPECT_THROW(theta_eval(0.3, p), std::invalid_argument);
  p = {};
  p.max_terms = 0;
  EXPECT_THROW(theta_eval(0.3, p), std::invalid_argument);
  p = {};
  p.term_tol = 1.0;
  EXPECT_THROW(theta_eval(0.3, p), std::invalid_argument);
}

TEST(ThetaParams, CapSignalsNonConvergence) {
  ThetaParams p;
  p.tau = {0.0, 1e-4};
  p.max_terms = 5;
  EXPECT_THROW(theta_eval(0.3, p), ThetaConvergenceError);
}

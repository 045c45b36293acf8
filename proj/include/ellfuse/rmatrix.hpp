#pragma once

// Fundamental elliptic dynamical R-matrix on C^N x C^N
//
//   R(z,lambda) = sum_i E_ii x E_ii
//               + sum_{i!=j} alpha(z, lambda_i - lambda_j) E_ii x E_jj
//               + sum_{i!=j} beta(z, lambda_i - lambda_j)  E_ij x E_ji
//
//   alpha(z,a) = theta(z) theta(a+gamma) / (theta(z-gamma) theta(a))
//   beta(z,a)  = -theta(z+a) theta(gamma) / (theta(z-gamma) theta(a))
//
// The only pole in z is z = gamma (mod lattice); R(-gamma) is finite and is
// the projector-like operator whose image is S^2(C^N).

#include <stdexcept>
#include <string>

#include "tensorspace.hpp"
#include "theta.hpp"

namespace ellfuse {

struct ModelParams {
  int N = 2;
  Complex gamma{0.171717, 0.01};
  ThetaParams theta{};

  void validate() const {
    if (N < 2) throw std::invalid_argument("ModelParams: N must be >= 2");
    theta.validate();
  }
  ModelParams with_gamma(Complex g) const {
    ModelParams p = *this;
    p.gamma = g;
    return p;
  }
  double th_abs(Complex z) const { return std::abs(theta_eval(z, theta)); }
};

class PoleError : public std::domain_error {
 public:
  explicit PoleError(const std::string& what) : std::domain_error(what) {}
};

inline constexpr double kPoleThreshold = 1e-10;

namespace detail {

inline Complex checked_den(Complex v, const char* what) {
  if (std::abs(v) < kPoleThreshold) throw PoleError(std::string("pole: ") + what);
  return v;
}

inline void check_lambda(const WeightVector& lambda, int N) {
  if (lambda.size() != N) throw std::invalid_argument("lambda must have length N");
}

}  // namespace detail

inline Complex alpha(Complex z, Complex a, const ModelParams& p) {
  const auto& t = p.theta;
  const Complex den = detail::checked_den(theta_eval(z - p.gamma, t), "theta(z-gamma)") *
                      detail::checked_den(theta_eval(a, t), "theta(lambda_i-lambda_j)");
  return theta_eval(z, t) * theta_eval(a + p.gamma, t) / den;
}

inline Complex beta(Complex z, Complex a, const ModelParams& p) {
  const auto& t = p.theta;
  const Complex den = detail::checked_den(theta_eval(z - p.gamma, t), "theta(z-gamma)") *
                      detail::checked_den(theta_eval(a, t), "theta(lambda_i-lambda_j)");
  return -theta_eval(z + a, t) * theta_eval(p.gamma, t) / den;
}

inline GradedOperator build_r(Complex z, const WeightVector& lambda, const ModelParams& p) {
  const int N = p.N;
  detail::check_lambda(lambda, N);
  const auto& t = p.theta;
  const Complex th_z = theta_eval(z, t);
  const Complex th_zg = detail::checked_den(theta_eval(z - p.gamma, t), "theta(z-gamma)");
  const Complex th_g = theta_eval(p.gamma, t);

  Mat m = Mat::Zero(N * N, N * N);
  for (int i = 0; i < N; ++i) {
    m(i * N + i, i * N + i) = 1.0;
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      const Complex a = lambda[i] - lambda[j];
      const Complex th_a = detail::checked_den(theta_eval(a, t), "theta(lambda_i-lambda_j)");
      m(i * N + j, i * N + j) = th_z * theta_eval(a + p.gamma, t) / (th_zg * th_a);
      m(i * N + j, j * N + i) = -theta_eval(z + a, t) * th_g / (th_zg * th_a);
    }
  }
  return {tensor_power_space(N, 2), std::move(m)};
}

// res_{z=gamma} R(z,lambda), using res 1/theta(z-gamma) = 1/theta'(0).
inline GradedOperator build_r_reg(const WeightVector& lambda, const ModelParams& p) {
  const int N = p.N;
  detail::check_lambda(lambda, N);
  const auto& t = p.theta;
  const Complex th_g = theta_eval(p.gamma, t);
  const Complex thp0 = theta_deriv(0.0, t);
  Mat m = Mat::Zero(N * N, N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      const Complex a = lambda[i] - lambda[j];
      const Complex th_a = detail::checked_den(theta_eval(a, t), "theta(lambda_i-lambda_j)");
      const Complex th_ag = theta_eval(a + p.gamma, t);
      m(i * N + j, i * N + j) = th_g * th_ag / (thp0 * th_a);
      m(i * N + j, j * N + i) = -th_ag * th_g / (thp0 * th_a);
    }
  return {tensor_power_space(N, 2), std::move(m)};
}

// lim_{gamma->0} R_gamma(k gamma, lambda) = (k/(k-1)) Id - (1/(k-1)) P for integer
// k != 0, 1. Negative k gives (|k|/(|k|+1)) Id + (1/(|k|+1)) P.
inline GradedOperator r_classical_limit(int k, int N) {
  if (k == 0) throw std::invalid_argument("r_classical_limit: k must be nonzero");
  if (k == 1)
    throw std::invalid_argument(
        "r_classical_limit: k=1 is a pole; use r_reg_classical_limit for the rescaled residue");
  const double kd = k;
  Mat m = (kd / (kd - 1.0)) * Mat::Identity(N * N, N * N) -
          (1.0 / (kd - 1.0)) * flip_operator(N).matrix;
  return {tensor_power_space(N, 2), std::move(m)};
}

// lim_{gamma->0} gamma^{-1} res_{z=gamma} R_gamma = Id - P
inline GradedOperator r_reg_classical_limit(int N) {
  Mat m = Mat::Identity(N * N, N * N) - flip_operator(N).matrix;
  return {tensor_power_space(N, 2), std::move(m)};
}

// X^{(21)} for an operator X on C^N x C^N
inline Mat swap_factors(const Mat& x, int N) {
  const Mat P = flip_operator(N).matrix;
  return P * x * P;
}

// S_N action on lambda: (sigma lambda)_{sigma(i)} = lambda_i
inline WeightVector permute_lambda(const WeightVector& lambda, const Permutation& sigma) {
  WeightVector out(lambda.size());
  for (int i = 0; i < lambda.size(); ++i) out[sigma[static_cast<std::size_t>(i)]] = lambda[i];
  return out;
}

// sigma acting on C^N by e_i -> e_{sigma(i)}
inline Mat permutation_matrix(const Permutation& sigma) {
  const int N = static_cast<int>(sigma.size());
  Mat m = Mat::Zero(N, N);
  for (int i = 0; i < N; ++i) m(sigma[static_cast<std::size_t>(i)], i) = 1.0;
  return m;
}

}  // namespace ellfuse

#pragma once

// Transfer matrices of E-modules as difference operators on W[0]-valued
// functions, the fused family T_m(z), the quantum determinant and the
// g_{N,ell} fusion-vector check.
//
// T_m(z) f(lambda) = sum_{j_1<...<j_m} sum_{sigma in S_m} eps(sigma)
//     L_{j_sigma(1) j_1}(z, lambda)
//     L_{j_sigma(2) j_2}(z - gamma, lambda - gamma omega_{j_1}) ...
//     L_{j_sigma(m) j_m}(z - (m-1)gamma, lambda - gamma(omega_{j_1}+...+omega_{j_{m-1}}))
//     f(lambda - gamma(omega_{j_1}+...+omega_{j_m}))
//
// Each factor is shifted by the indices to its left. This is what tracing the
// composed R-matrix over the exterior power produces, and it is the placement
// for which T_m/M_m comes out independent of lambda.

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "diffop.hpp"
#include "emodule.hpp"
#include "fusion.hpp"

namespace ellfuse {

class EmptyZeroWeightError : public std::runtime_error {
 public:
  EmptyZeroWeightError() : std::runtime_error("module has an empty zero-weight space") {}
};

inline std::vector<int> zero_weight_indices(const EModule& m) {
  auto idx = m.space.balanced_indices();
  if (idx.empty()) throw EmptyZeroWeightError();
  return idx;
}

inline Mat restrict_to(const Mat& a, const std::vector<int>& idx) {
  const int d = static_cast<int>(idx.size());
  Mat out(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) out(r, c) = a(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
  return out;
}

namespace detail {

// Coefficients of T_m(z) on the whole of W, keyed by the indicator weight of J.
inline DifferenceOperator::Coeffs transfer_tm_coeffs(int m, Complex z, const EModule& mod,
                                                     const WeightVector& lambda) {
  const ModelParams& p = mod.params;
  const int N = p.N, d = mod.dim();
  std::map<std::pair<int, Weight>, Mat> lcache;
  auto L = [&](int k, const Weight& prefix) -> const Mat& {
    auto key = std::make_pair(k, prefix);
    auto it = lcache.find(key);
    if (it == lcache.end())
      it = lcache.emplace(key, mod.L(z - static_cast<double>(k) * p.gamma, shift_lambda(lambda, prefix, p.gamma))).first;
    return it->second;
  };
  const auto perms = all_permutations(m);
  DifferenceOperator::Coeffs out;
  for (const auto& J : subsets(N, m)) {
    std::vector<Weight> prefix(static_cast<std::size_t>(m), Weight(N));
    for (int k = 1; k < m; ++k)
      prefix[static_cast<std::size_t>(k)] = prefix[static_cast<std::size_t>(k - 1)] + Weight::unit(N, J[static_cast<std::size_t>(k - 1)]);
    Mat total = Mat::Zero(d, d);
    for (const auto& s : perms) {
      Mat prod = Mat::Identity(d, d);
      for (int k = 0; k < m; ++k) {
        const int row = J[static_cast<std::size_t>(s[static_cast<std::size_t>(k)])];
        const int col = J[static_cast<std::size_t>(k)];
        prod = prod * matrix_element(L(k, prefix[static_cast<std::size_t>(k)]), d, row, col);
      }
      total += static_cast<double>(permutation_sign(s)) * prod;
    }
    out.emplace(indicator(J, N), std::move(total));
  }
  return out;
}

inline std::vector<Weight> subset_shifts(int N, int m) {
  std::vector<Weight> s;
  for (const auto& J : subsets(N, m)) s.push_back(indicator(J, N));
  return s;
}

}  // namespace detail

// T_m(z) with coefficients on all of W (used for the vector representation).
inline DifferenceOperator transfer_tm_full(int m, Complex z, const EModule& mod) {
  const int N = mod.params.N;
  if (m < 1 || m > N) throw std::invalid_argument("transfer_tm: need 1 <= m <= N");
  return DifferenceOperator(N, mod.dim(), mod.params.gamma, detail::subset_shifts(N, m),
                            [m, z, mod](const WeightVector& l) { return detail::transfer_tm_coeffs(m, z, mod, l); });
}

// T_m(z) acting on W[0]-valued functions.
inline DifferenceOperator transfer_tm(int m, Complex z, const EModule& mod) {
  const int N = mod.params.N;
  if (m < 1 || m > N) throw std::invalid_argument("transfer_tm: need 1 <= m <= N");
  const auto idx = zero_weight_indices(mod);
  return DifferenceOperator(N, static_cast<int>(idx.size()), mod.params.gamma, detail::subset_shifts(N, m),
                            [m, z, mod, idx](const WeightVector& l) {
                              auto c = detail::transfer_tm_coeffs(m, z, mod, l);
                              for (auto& [mu, a] : c) a = restrict_to(a, idx);
                              return c;
                            });
}

// T(z) f(lambda) = sum_i L_ii(z,lambda) f(lambda - gamma omega_i)
inline DifferenceOperator transfer_t1(const EModule& mod, Complex z) { return transfer_tm(1, z, mod); }

// theta(z - gamma ell) / theta(z - gamma N ell)
inline Complex theta_prefactor(Complex z, int N, int ell, const ModelParams& p) {
  return theta_eval(z - p.gamma * static_cast<double>(ell), p.theta) /
         theta_eval(z - p.gamma * static_cast<double>(N * ell), p.theta);
}

// phi(lambda) = prod_{i<j} theta(lambda_i - lambda_j)
inline Complex phi(const WeightVector& l, const ModelParams& p) {
  Complex v = 1.0;
  for (int i = 0; i < l.size(); ++i)
    for (int j = i + 1; j < l.size(); ++j) v *= theta_eval(l[i] - l[j], p.theta);
  return v;
}

inline Weight all_ones(int N) { return Weight(std::vector<int>(static_cast<std::size_t>(N), 1)); }

// Det(z,lambda) on W[0]: the coefficient of prod_j Gamma_j in T_N(z).
// On W[0] the factor phi(lambda - gamma h)/phi(lambda) is 1.
inline Mat quantum_det(Complex z, const WeightVector& lambda, const EModule& mod) {
  return transfer_tm(mod.params.N, z, mod).coeff(all_ones(mod.params.N), lambda);
}

// Det(z,lambda) on all of W: [phi(lambda - gamma h)/phi(lambda)]^{-1} times the
// coefficient of prod_j Gamma_j in T_N(z).
inline Mat quantum_det_full(Complex z, const WeightVector& lambda, const EModule& mod) {
  const ModelParams& p = mod.params;
  const Mat c = transfer_tm_full(p.N, z, mod).coeff(all_ones(p.N), lambda);
  const Complex f0 = phi(lambda, p);
  Mat dg = Mat::Zero(mod.dim(), mod.dim());
  for (int v = 0; v < mod.dim(); ++v)
    dg(v, v) = f0 / phi(shift_lambda(lambda, mod.space.weights[static_cast<std::size_t>(v)], p.gamma), p);
  return dg * c;
}

// Det(z) prod_j Gamma_j as a difference operator on W-valued functions.
inline DifferenceOperator quantum_det_operator(Complex z, const EModule& mod) {
  return single_shift(all_ones(mod.params.N), mod.dim(), mod.params.gamma,
                      [z, mod](const WeightVector& l) { return quantum_det_full(z, l, mod); });
}

// Generator L_ij(w, lambda) Gamma_j of the operator algebra of W.
inline DifferenceOperator operator_algebra_generator(int i, int j, Complex w, const EModule& mod) {
  const int d = mod.dim();
  return single_shift(Weight::unit(mod.params.N, j), d, mod.params.gamma, [i, j, w, mod, d](const WeightVector& l) {
    return matrix_element(mod.L(w, l), d, i, j);
  });
}

struct TransferFamily {
  EModule module;

  int dim_w0() const { return static_cast<int>(zero_weight_indices(module).size()); }
  DifferenceOperator op(int m, Complex z) const { return transfer_tm(m, z, module).memoized(); }
};

// ---------------------------------------------------------------------------
// W^S_{N ell}(lambda) applied to e_1^{ell} x ... x e_N^{ell}

struct FusionVectorResult {
  double residual = 0.0;    // |c(l)/c(l') - g(l)/g(l')|
  double orthogonal = 0.0;  // max over l, l' of |W ebar - c e| / |W ebar|
  Complex c_lambda, c_lambda_prime;
};

struct FusionVector {
  Complex c;
  double orthogonal;
};

inline FusionVector fusion_vector_coefficient(int ell, const WeightVector& lambda, const ModelParams& p) {
  const int N = p.N, n = N * ell;
  std::vector<int> ebar_idx;
  for (int j = 0; j < N; ++j)
    for (int s = 0; s < ell; ++s) ebar_idx.push_back(j);
  const int D = ipow(N, n);
  Vec e = Vec::Zero(D);
  const Weight target(std::vector<int>(static_cast<std::size_t>(N), ell));
  for (int f = 0; f < D; ++f)
    if (basis_weight(multi_index(f, N, n), N) == target) e[f] = 1.0;
  const Mat ws = w_sym(n, lambda, p).matrix;
  const Vec v = ws.col(flat_index(ebar_idx, N));
  const Complex c = e.dot(v) / e.squaredNorm();
  const double nv = v.norm();
  return {c, nv > 0 ? (v - c * e).norm() / nv : 0.0};
}

inline FusionVectorResult lemma4_check(int ell, const WeightVector& lambda, const WeightVector& lambda_prime,
                                 const ModelParams& p) {
  const auto a = fusion_vector_coefficient(ell, lambda, p);
  const auto b = fusion_vector_coefficient(ell, lambda_prime, p);
  const Complex lhs = a.c / b.c;
  const Complex rhs = g_function(ell, lambda, p) / g_function(ell, lambda_prime, p);
  return {std::abs(lhs - rhs), std::max(a.orthogonal, b.orthogonal), a.c, b.c};
}

}  // namespace ellfuse

#pragma once

// Seeded property checks over random parameter draws, grouped into suites, with
// JSON reports and CSV coefficient tables. Used by the command-line tool and by
// the acceptance runner.
//
// Every check draws from its own Sampler, seeded by the run seed xor a hash of
// the check name, so results do not depend on which other checks ran.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "diffop.hpp"
#include "emodule.hpp"
#include "fusion.hpp"
#include "rmatrix.hpp"
#include "sampling.hpp"
#include "transfer.hpp"

namespace ellfuse {

inline constexpr const char* kVersion = "1.0.0";

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> s{"theta", "rmatrix", "fusion", "modules", "ruijsenaars", "transfer", "all"};
  return s;
}

struct RunConfig {
  std::string suite = "all";
  int N = 2;
  int ell = 1;
  int n = 3;
  Complex tau{0.0, 0.75};
  Complex gamma{0.171717, 0.01};
  std::uint64_t seed = 1;
  int samples = 10;
  double tol = 1.0;  // multiplies every nominal tolerance
  std::string out;

  void validate() const {
    if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
      throw ConfigError("unknown suite '" + suite + "'");
    if (N < 2) throw ConfigError("N must be >= 2");
    if (ell < 0) throw ConfigError("ell must be >= 0");
    if (n < 2) throw ConfigError("n must be >= 2");
    if (samples < 1) throw ConfigError("samples must be >= 1");
    if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
    if (!(tau.imag() > 0.0)) throw ConfigError("Im(tau) must be > 0");
    if (!std::isfinite(gamma.real()) || !std::isfinite(gamma.imag())) throw ConfigError("gamma must be finite");
  }

  ModelParams params() const {
    ModelParams p;
    p.N = N;
    p.gamma = gamma;
    p.theta.tau = tau;
    return p;
  }
};

struct CheckRecord {
  std::string name;
  double max_residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  int samples_used = 0;
  double wall_time_s = 0.0;
  std::string error;
};

struct Report {
  RunConfig config;
  std::vector<CheckRecord> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
  }
};

// Running maximum of a residual; NaN poisons it so the check fails.
struct Measure {
  double residual = 0.0;
  int samples = 0;

  void add(double r) {
    if (std::isnan(r) || std::isnan(residual)) residual = std::numeric_limits<double>::quiet_NaN();
    else residual = std::max(residual, r);
  }
  void sample(double r) {
    add(r);
    ++samples;
  }
  void merge(const Measure& o) {
    add(o.residual);
    samples += o.samples;
  }
};

inline std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

inline double rel_diff(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

// ---------------------------------------------------------------------------
// individual checks; each returns the largest residual over its samples

namespace checks {

inline Complex cell_point(Sampler& s) { return s.unit_complex() - Complex(0.5, 0.4); }

inline Measure theta_oddness(const ModelParams& p, Sampler& s, int samples) {
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const Complex z = cell_point(s), t = theta_eval(z, p.theta);
    m.sample(std::abs(theta_eval(-z, p.theta) + t) / (1.0 + std::abs(t)));
  }
  return m;
}

// theta(z+1) = -theta(z),  theta(z+tau) = -exp(-pi i tau - 2 pi i z) theta(z)
inline Measure theta_quasi_periodicity(const ModelParams& p, Sampler& s, int samples) {
  const double pi = std::numbers::pi;
  const Complex tau = p.theta.tau;
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const Complex z = cell_point(s), t = theta_eval(z, p.theta);
    const Complex f = -std::exp(Complex(0, -pi) * tau - Complex(0, 2 * pi) * z);
    m.sample(std::max(std::abs(theta_eval(z + 1.0, p.theta) + t) / (1.0 + std::abs(t)),
                      std::abs(theta_eval(z + tau, p.theta) - f * t) / (1.0 + std::abs(f * t))));
  }
  return m;
}

inline Measure theta_zeros(const ModelParams& p) {
  Measure m;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      m.sample(std::abs(theta_eval(static_cast<double>(a) + static_cast<double>(b) * p.theta.tau, p.theta)));
  return m;
}

inline Measure dybe(const ModelParams& p, Sampler& s, int samples) {
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const auto l = s.generic_lambda(p);
    const Complex z1 = s.unit_complex(), z2 = s.unit_complex(), z3 = s.unit_complex();
    m.sample(dybe_residual(z1, z2, z3, l, p));
  }
  return m;
}

// R(z,l) P R(-z,l) P = Id
inline Measure unitarity(const ModelParams& p, Sampler& s, int samples) {
  const int N = p.N;
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const auto l = s.generic_lambda(p);
    const Complex z = s.generic_spectral(p, {p.gamma, -p.gamma});
    const Mat prod = build_r(z, l, p).matrix * swap_factors(build_r(-z, l, p).matrix, N);
    m.sample((prod - Mat::Identity(N * N, N * N)).norm());
  }
  return m;
}

// R(z, sigma l) = (sigma x sigma) R(z, l) (sigma x sigma)^{-1} for all transpositions
inline Measure equivariance(const ModelParams& p, Sampler& s, int samples) {
  const int N = p.N;
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const auto l = s.generic_lambda(p);
    const Complex z = s.generic_spectral(p, {p.gamma});
    const Mat r = build_r(z, l, p).matrix;
    double worst = 0.0;
    for (int a = 0; a < N; ++a)
      for (int b = a + 1; b < N; ++b) {
        const auto sigma = transposition(N, a, b);
        const Mat S = kron(permutation_matrix(sigma), permutation_matrix(sigma));
        worst = std::max(worst, (build_r(z, permute_lambda(l, sigma), p).matrix - S * r * S.adjoint()).norm());
      }
    m.sample(worst);
  }
  return m;
}

// |rank - expected| plus 1 when the column space is not the symmetric square
inline Measure image_at_minus_gamma_check(const ModelParams& p, Sampler& s, int samples) {
  const int N = p.N;
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const auto l = s.generic_lambda(p);
    const Mat r = build_r(-p.gamma, l, p).matrix;
    double d = std::abs(numeric_rank(r) - binom(N + 1, 2));
    if (!same_column_space(r, projector_sym(2, N).matrix)) d += 1.0;
    m.sample(d);
  }
  return m;
}

// |rank| and |nullity| mismatches of build_r(-gamma) and build_r_reg
inline Measure rmatrix_ranks(const ModelParams& p, Sampler& s) {
  const int N = p.N;
  const auto l = s.generic_lambda(p);
  Measure m;
  m.sample(std::abs(numeric_rank(build_r(-p.gamma, l, p).matrix) - binom(N + 1, 2)));
  m.sample(std::abs(N * N - numeric_rank(build_r_reg(l, p).matrix) - binom(N + 1, 2)));
  return m;
}

inline Measure h_invariance(const ModelParams& p, Sampler& s, int samples) {
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const auto l = s.generic_lambda(p);
    const Complex z = s.generic_spectral(p, {p.gamma});
    m.sample(std::max(build_r(z, l, p).off_weight_norm(), build_r_reg(l, p).off_weight_norm()));
  }
  return m;
}

// Distance of build_r(-k gamma), k = 1,2,3, and R_reg/gamma from their gamma -> 0
// limits (k/(k+1))Id + (1/(k+1))P and Id - P, at fixed lambda.
inline double classical_limit_error(const WeightVector& l, const ModelParams& p) {
  const int N = p.N;
  double worst = 0.0;
  for (int k : {1, 2, 3})
    worst = std::max(worst, (build_r(-static_cast<double>(k) * p.gamma, l, p).matrix -
                             r_classical_limit(-k, N).matrix).norm());
  return std::max(worst, (build_r_reg(l, p).matrix / p.gamma - r_reg_classical_limit(N).matrix).norm());
}

// Raw distance at gamma = 1e-4. It is gamma |theta'/theta(l_i - l_j)| to first
// order, so its size depends on how close lambda comes to the theta lattice.
inline Measure classical_limits(const ModelParams& p0, Sampler& s, int samples) {
  const auto p = p0.with_gamma(1e-4);
  Measure m;
  for (int t = 0; t < samples; ++t) m.sample(classical_limit_error(s.generic_lambda(p, 3), p));
  return m;
}

// |e(1e-5)/e(1e-4) - 1/10|: the approach to the limits is first order in gamma.
inline Measure classical_limit_order(const ModelParams& p0, Sampler& s, int samples) {
  const auto p = p0.with_gamma(1e-4), q = p0.with_gamma(1e-5);
  Measure m;
  for (int t = 0; t < samples; ++t) {
    const auto l = s.generic_lambda(p, 3);
    m.sample(std::abs(classical_limit_error(l, q) / classical_limit_error(l, p) - 0.1));
  }
  return m;
}

inline std::vector<Complex> random_points(Sampler& s, int n) {
  std::vector<Complex> z;
  for (int k = 0; k < n; ++k) z.push_back(s.unit_complex());
  return z;
}

// All reduced words of every permutation of n lines evaluate to the same operator.
inline Measure word_independence(const ModelParams& p, Sampler& s, int samples, int n) {
  Measure m;
  const auto targets = all_permutations(n);
  for (int k = 0; k < samples; ++k) {
    const auto l = s.generic_lambda(p, n);
    const auto z = random_points(s, n);
    double worst = 0.0;
    for (const auto& t : targets) {
      const auto words = reduced_words(t);
      if (words.size() < 2) continue;
      const Mat ref = eval_diagram({n, words.front()}, z, l, p).matrix;
      for (std::size_t w = 1; w < words.size(); ++w)
        worst = std::max(worst, rel_diff(eval_diagram({n, words[w]}, z, l, p).matrix, ref));
    }
    m.sample(worst);
  }
  return m;
}

// Every admissible diagram on n lines gives W_n.
inline Measure admissible_diagrams(const ModelParams& p, Sampler& s, int samples, int n) {
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const auto l = s.generic_lambda(p, n);
    const auto z = random_points(s, n);
    const Mat ref = w_n(z, l, p).matrix;
    double worst = 0.0;
    for (const auto& w : reduced_words(reversal(n)))
      worst = std::max(worst, rel_diff(eval_diagram({n, w}, z, l, p).matrix, ref));
    m.sample(worst);
  }
  return m;
}

// |rank W^S - binom(N+n-1,n)| + |nullity W^ - (N^n - binom(N,n))|, plus 1 if
// the image of W^S is not S^n.
inline Measure fusion_ranks(const ModelParams& p, Sampler& s, int n) {
  const int N = p.N;
  const auto l = s.generic_lambda(p, n);
  Measure m;
  const Mat ws = w_sym(n, l, p).matrix;
  double d = std::abs(numeric_rank(ws) - binom(N + n - 1, n));
  if (!same_column_space(ws, projector_sym(n, N).matrix)) d += 1.0;
  m.sample(d);
  const Mat we = w_ext(n, l, p).matrix;
  const int nullity = ipow(N, n) - numeric_rank(we, 1e-7, w_ext_scale(n, l, p));
  m.sample(std::abs(nullity - (ipow(N, n) - binom(N, n))));
  return m;
}

// P^{(j,j+1)} W^S = W^S and W^(P^{(j,j+1)} + Id) = 0
inline Measure fusion_flips(const ModelParams& p, Sampler& s, int samples, int n) {
  const int N = p.N;
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const auto l = s.generic_lambda(p, n);
    const Mat ws = w_sym(n, l, p).matrix, we = w_ext(n, l, p).matrix;
    const double scale = w_ext_scale(n, l, p);
    double worst = 0.0;
    for (int j = 0; j + 1 < n; ++j) {
      const Mat P = permutation_operator(transposition(n, j, j + 1), N).matrix;
      worst = std::max(worst, rel_diff(P * ws, ws));
      worst = std::max(worst, (we * (P + Mat::Identity(P.rows(), P.cols()))).norm() / scale);
    }
    m.sample(worst);
  }
  return m;
}

struct ModuleDraw {
  WeightVector l;
  Complex z, w;
};

inline ModuleDraw module_draw(Sampler& s, const ModelParams& p, int n) {
  ModuleDraw d{s.generic_lambda(p, n), 0.0, s.unit_complex()};
  std::vector<Complex> avoid;
  for (int k = -n - 1; k <= n + 1; ++k) avoid.push_back(d.w + static_cast<double>(k) * p.gamma);
  d.z = s.generic_spectral(p, avoid);
  return d;
}

// RLL relation for the vector, n-fold tensor, symmetric and exterior power modules
inline Measure rll(const ModelParams& p, Sampler& s, int samples, int n) {
  Measure m;
  const Complex w = s.unit_complex();
  std::vector<EModule> mods{vector_module(w, p), fused_tensor_module(n, w, p), sym_power_module(n, w, p)};
  if (n <= p.N) mods.push_back(ext_power_module(n, w, p));
  for (int k = 0; k < samples; ++k) {
    const auto l = s.generic_lambda(p, n + 1);
    std::vector<Complex> avoid;
    for (int j = -n - 1; j <= n + 1; ++j) avoid.push_back(w + static_cast<double>(j) * p.gamma);
    const Complex z1 = s.generic_spectral(p, avoid);
    avoid.push_back(z1 - p.gamma);
    avoid.push_back(z1 + p.gamma);
    const Complex z2 = s.generic_spectral(p, avoid);
    double worst = 0.0;
    for (const auto& mod : mods) worst = std::max(worst, rll_residual(mod, z1, z2, l));
    m.sample(worst);
  }
  return m;
}

// The fused L preserves C^N x S^n and C^N x J_n.
inline Measure subspace_leakage(const ModelParams& p, Sampler& s, int samples, int n) {
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const auto d = module_draw(s, p, n);
    const auto r = fused_l_leakage(n, d.w, d.z, d.l, p);
    m.sample(std::max(r.sym, r.j));
  }
  return m;
}

// (i)  L (1 x W^S(l - g h0)) = (1 x W^S(l)) L'
// (ii) (1 x W^(l)) L = L' (1 x W^(l - g h0)), relative to |W^| |L|
inline Measure intertwining(const ModelParams& p, Sampler& s, int samples, int n) {
  const Layout layout = power_layout(p.N, n + 1);
  std::vector<int> wf(static_cast<std::size_t>(n));
  std::iota(wf.begin(), wf.end(), 1);
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const auto d = module_draw(s, p, n);
    const Mat L = fused_l(n, d.w, d.z, d.l, p).matrix;
    const Mat Lp = opposite_l(n, d.w, d.z, d.l, p).matrix;
    auto ws = [&](const Weight& mu) { return w_sym(n, shift_lambda(d.l, mu, p.gamma), p).matrix; };
    auto we = [&](const Weight& mu) { return w_ext(n, shift_lambda(d.l, mu, p.gamma), p).matrix; };
    const double r1 = rel_diff(L * embed_local(layout, wf, {0}, ws), embed_local(layout, wf, {}, ws) * Lp);
    const Mat a2 = embed_local(layout, wf, {}, we) * L;
    const Mat b2 = Lp * embed_local(layout, wf, {0}, we);
    const double r2 = (a2 - b2).norm() / (w_ext_scale(n, d.l, p) * L.norm());
    m.sample(std::max(r1, r2));
  }
  return m;
}

// DYBE for W1 = V(z1), W2 = V(z2) x V(z3), W3 = V(z4)
inline Measure composite_dybe(const ModelParams& p, Sampler& s, int samples) {
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const auto z = random_points(s, 4);
    const RMatrix r12 = compose_rmatrix_right(fundamental_rmatrix(z[0], z[2], p), fundamental_rmatrix(z[0], z[1], p));
    const RMatrix r13 = fundamental_rmatrix(z[0], z[3], p);
    const RMatrix r23 = compose_rmatrix_left(fundamental_rmatrix(z[1], z[3], p), fundamental_rmatrix(z[2], z[3], p));
    m.sample(rmatrix_dybe_residual(r12, r13, r23, s.generic_lambda(p)));
  }
  return m;
}

// R of V^{x2}(z), V^{x2}(w) is invertible and preserves A x B for A, B in {full, S^2, J_2};
// the residual is the worst leakage, or 1 if the smallest singular value collapses.
inline Measure fused_r_subspaces(const ModelParams& p, Sampler& s, int samples) {
  const int N = p.N, D = N * N;
  const std::vector<Mat> proj{Mat::Identity(D, D), projector_sym(2, N).matrix,
                              Mat::Identity(D, D) - projector_antisym(2, N).matrix};
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const Complex z = s.unit_complex(), w = s.unit_complex();
    const Mat R = rmatrix_between(2, z, 2, w, p)(s.generic_lambda(p, 2));
    Eigen::JacobiSVD<Mat> svd(R);
    double worst = svd.singularValues().minCoeff() < 1e-6 * svd.singularValues().maxCoeff() ? 1.0 : 0.0;
    for (const auto& A : proj)
      for (const auto& B : proj) {
        const Mat P = kron(A, B);
        worst = std::max(worst, (R * P - P * R * P).norm() / R.norm());
      }
    m.sample(worst);
  }
  return m;
}

inline std::vector<WeightVector> lambdas(const ModelParams& p, Sampler& s, int count, int max_shift) {
  std::vector<WeightVector> v;
  for (int k = 0; k < count; ++k) v.push_back(s.generic_lambda(p, max_shift));
  return v;
}

// [M_m, M_m'] for all 1 <= m <= m' <= N
inline Measure ruijsenaars_commute(const ModelParams& p, int ell, Sampler& s, int samples) {
  const auto ls = lambdas(p, s, samples, p.N * (ell + 1));
  Measure m;
  for (int a = 1; a <= p.N; ++a)
    for (int b = a; b <= p.N; ++b)
      m.add(max_coefficient(commutator(ruijsenaars_m(a, ell, p), ruijsenaars_m(b, ell, p)), ls));
  m.samples = samples;
  return m;
}

// sigma M_m sigma^{-1} = M_m for all transpositions
inline Measure ruijsenaars_symmetry(const ModelParams& p, int ell, Sampler& s, int samples) {
  const auto ls = lambdas(p, s, samples, ell + 1);
  Measure m;
  for (int k = 1; k <= p.N; ++k) {
    const auto M = ruijsenaars_m(k, ell, p);
    for (int a = 0; a < p.N; ++a)
      for (int b = a + 1; b < p.N; ++b)
        m.add(max_coefficient(linear_combination(1.0, sn_conjugate(M, transposition(p.N, a, b)), -1.0, M), ls));
  }
  m.samples = samples;
  return m;
}

// g(l)/g(l - g w1) = prod_{k>1} th(l1-lk+g ell) th(l1-lk-g ell) / th(l1-lk)^2
inline Measure g_ratio_identity(const ModelParams& p, int ell, Sampler& s, int samples) {
  auto th = [&](Complex x) { return theta_eval(x, p.theta); };
  const double g = static_cast<double>(ell);
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const auto l = s.generic_lambda(p, ell + 1);
    const Complex lhs = g_function(ell, l, p) / g_function(ell, shift_lambda(l, Weight::unit(p.N, 0), p.gamma), p);
    Complex rhs = 1.0;
    for (int q = 1; q < p.N; ++q) {
      const Complex a = l[0] - l[q];
      rhs *= th(a + p.gamma * g) * th(a - p.gamma * g) / (th(a) * th(a));
    }
    m.sample(std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
  }
  return m;
}

// (A B) C = A (B C) on Ruijsenaars operators of different couplings
inline Measure compose_associativity(const ModelParams& p, Sampler& s, int samples) {
  const auto A = ruijsenaars_m(1, 1, p), B = ruijsenaars_m(std::min(2, p.N), 2, p), C = ruijsenaars_m(1, 3, p);
  const auto ls = lambdas(p, s, samples, 8);
  Measure m;
  m.add(max_coefficient(linear_combination(1.0, compose(compose(A, B), C), -1.0, compose(A, compose(B, C))), ls));
  m.samples = samples;
  return m;
}

inline Complex transfer_spectral(Sampler& s, const ModelParams& p, int reach) {
  return s.generic_spectral(p, gamma_multiples(p, reach + 1));
}

// T(z) = theta(z - g ell)/theta(z - g N ell) M, coefficientwise, relative
inline Measure transfer_equals_ruijsenaars(const ModelParams& p, int ell, Sampler& s, int samples) {
  const int N = p.N;
  const auto mod = sym_power_module(N * ell, 0.0, p);
  const auto M = ruijsenaars_m(1, ell, p);
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const Complex z = transfer_spectral(s, p, N * ell);
    const auto l = s.generic_lambda(p, N * ell);
    const auto t = transfer_t1(mod, z).coefficients(l), mm = M.coefficients(l);
    const Complex pre = theta_prefactor(z, N, ell, p);
    double worst = 0.0;
    for (const auto& [mu, c] : t) {
      const Complex ref = pre * mm.at(mu)(0, 0);
      worst = std::max(worst, std::abs(c(0, 0) - ref) / std::abs(ref));
    }
    m.sample(worst);
  }
  return m;
}

// coefficient of Gamma_1 in T(z) against its closed form
inline Measure gamma1_coefficient(const ModelParams& p, int ell, Sampler& s, int samples) {
  const int N = p.N;
  const auto mod = sym_power_module(N * ell, 0.0, p);
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const Complex z = transfer_spectral(s, p, N * ell);
    const auto l = s.generic_lambda(p, N * ell);
    Complex ref = theta_prefactor(z, N, ell, p);
    for (int q = 1; q < N; ++q)
      ref *= theta_eval(l[0] - l[q] + p.gamma * static_cast<double>(ell), p.theta) / theta_eval(l[0] - l[q], p.theta);
    const Complex c = transfer_t1(mod, z).coeff(Weight::unit(N, 0), l)(0, 0);
    m.sample(std::abs(c - ref) / std::abs(ref));
  }
  return m;
}

// Ratios T_m(z)/M_m over lambda samples and subsets J, one z per m.
struct RatioSpread {
  Measure lambda;  // max over J of the relative spread across lambda
  Measure subset;  // max over lambda of the relative spread across J
};

inline RatioSpread transfer_ratio_spread(const ModelParams& p, int ell, Sampler& s, int samples) {
  const int N = p.N;
  const auto mod = sym_power_module(N * ell, 0.0, p);
  RatioSpread out;
  for (int m = 1; m <= N; ++m) {
    const Complex z = transfer_spectral(s, p, 2 * N * ell);
    const auto T = transfer_tm(m, z, mod);
    const auto M = ruijsenaars_m(m, ell, p);
    std::vector<std::vector<Complex>> r;  // [lambda][J]
    for (int k = 0; k < samples; ++k) {
      const auto l = s.generic_lambda(p, N * ell + m);
      const auto t = T.coefficients(l), mm = M.coefficients(l);
      std::vector<Complex> row;
      for (const auto& [mu, c] : t) row.push_back(c(0, 0) / mm.at(mu)(0, 0));
      r.push_back(std::move(row));
    }
    for (std::size_t j = 0; j < r.front().size(); ++j) {
      double worst = 0.0;
      for (const auto& row : r) worst = std::max(worst, std::abs(row[j] - r.front()[j]) / std::abs(r.front()[j]));
      out.lambda.add(worst);
    }
    for (const auto& row : r) {
      double worst = 0.0;
      for (const Complex v : row) worst = std::max(worst, std::abs(v - row.front()) / std::abs(row.front()));
      out.subset.add(worst);
    }
    out.lambda.samples += samples;
    out.subset.samples += samples;
  }
  return out;
}

// Empirical g_m(z, gamma) at the given z, averaged over subsets and lambda samples.
inline Complex gm_estimate(int m, Complex z, const ModelParams& p, int ell, Sampler& s, int samples) {
  const auto mod = sym_power_module(p.N * ell, 0.0, p);
  const auto T = transfer_tm(m, z, mod);
  const auto M = ruijsenaars_m(m, ell, p);
  Complex acc = 0.0;
  int count = 0;
  for (int k = 0; k < samples; ++k) {
    const auto l = s.generic_lambda(p, 1, 1e-3);
    const auto t = T.coefficients(l), mm = M.coefficients(l);
    for (const auto& [mu, c] : t) {
      acc += c(0, 0) / mm.at(mu)(0, 0);
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

// theta'/theta vanishes at z = 1/2, so the O(gamma) term of g_m drops out there.
inline constexpr double kGmSpectralPoint = 0.5;

// |g_m(1/2, 1e-4) - 1| for all m
inline Measure gm_small_gamma(const ModelParams& p0, int ell, Sampler& s, int samples) {
  const auto p = p0.with_gamma(1e-4);
  Measure m;
  for (int k = 1; k <= p.N; ++k) m.add(std::abs(gm_estimate(k, kGmSpectralPoint, p, ell, s, samples) - 1.0));
  m.samples = samples;
  return m;
}

// [T_m(z), T_m'(w)] for all 1 <= m <= m' <= N
inline Measure transfer_commute(const ModelParams& p, int ell, Sampler& s, int samples) {
  const int N = p.N;
  const TransferFamily fam{sym_power_module(N * ell, 0.0, p)};
  const Complex z = transfer_spectral(s, p, 2 * N * ell), w = transfer_spectral(s, p, 2 * N * ell);
  const auto ls = lambdas(p, s, samples, 2 * N * ell);
  std::vector<DifferenceOperator> tz, tw;
  for (int k = 1; k <= N; ++k) {
    tz.push_back(fam.op(k, z));
    tw.push_back(fam.op(k, w));
  }
  Measure m;
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) m.add(max_coefficient(commutator(tz[static_cast<std::size_t>(a)], tw[static_cast<std::size_t>(b)]), ls));
  m.samples = samples;
  return m;
}

// sigma T(z) sigma^{-1} = T(z)
inline Measure transfer_symmetry(const ModelParams& p, int ell, Sampler& s, int samples) {
  const int N = p.N;
  const auto mod = sym_power_module(N * ell, 0.0, p);
  const auto T = transfer_t1(mod, transfer_spectral(s, p, N * ell)).memoized();
  const auto ls = lambdas(p, s, samples, N * ell);
  Measure m;
  for (int a = 0; a < N; ++a)
    for (int b = a + 1; b < N; ++b)
      m.add(max_coefficient(linear_combination(1.0, sn_conjugate(T, transposition(N, a, b)), -1.0, T), ls));
  m.samples = samples;
  return m;
}

struct FusionVectorMeasure {
  Measure ratio;
  Measure orthogonal;
};

inline FusionVectorMeasure fusion_vector_ratio(const ModelParams& p, int ell, Sampler& s, int samples) {
  FusionVectorMeasure out;
  for (int k = 0; k < samples; ++k) {
    const auto l = s.generic_lambda(p, p.N * ell), lp = s.generic_lambda(p, p.N * ell);
    const auto r = lemma4_check(ell, l, lp, p);
    out.ratio.sample(r.residual);
    out.orthogonal.sample(r.orthogonal);
  }
  return out;
}

// [Det(z) prod Gamma_j, L_ij(w) Gamma_j] on the vector representation
inline Measure det_central(const ModelParams& p, Sampler& s, int samples) {
  const auto V = vector_module(s.unit_complex(), p);
  const Complex z = s.unit_complex(), w = s.unit_complex();
  const auto det = quantum_det_operator(z, V).memoized();
  const auto ls = lambdas(p, s, samples, 2);
  Measure m;
  for (int i = 0; i < p.N; ++i)
    for (int j = 0; j < p.N; ++j) m.add(max_coefficient(commutator(det, operator_algebra_generator(i, j, w, V)), ls));
  m.samples = samples;
  return m;
}

// 1/|Det(z,l)| on the zero-weight space of S^{N ell}
inline Measure det_inverse_magnitude(const ModelParams& p, int ell, Sampler& s, int samples) {
  const auto mod = sym_power_module(p.N * ell, 0.0, p);
  Measure m;
  for (int k = 0; k < samples; ++k) {
    const Complex z = transfer_spectral(s, p, 2 * p.N * ell);
    const auto l = s.generic_lambda(p, p.N * ell);
    const Mat d = quantum_det(z, l, mod);
    Eigen::JacobiSVD<Mat> svd(d);
    m.sample(1.0 / svd.singularValues().minCoeff());
  }
  return m;
}

}  // namespace checks

// ---------------------------------------------------------------------------
// suites

namespace detail {

struct CheckSpec {
  std::string name;
  double tol;
  std::function<Measure(Sampler&)> run;
};

inline CheckRecord run_check(const CheckSpec& c, const RunConfig& cfg) {
  CheckRecord r;
  r.name = c.name;
  r.tol = c.tol * cfg.tol;
  Sampler s(cfg.seed ^ name_hash(c.name));
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Measure m = c.run(s);
    r.max_residual = m.residual;
    r.samples_used = m.samples;
    r.pass = m.residual <= r.tol;
  } catch (const std::exception& e) {
    r.max_residual = std::numeric_limits<double>::infinity();
    r.pass = false;
    r.error = e.what();
  }
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline std::vector<CheckSpec> suite_checks(const std::string& suite, const RunConfig& cfg) {
  using namespace checks;
  const ModelParams p = cfg.params();
  const int S = cfg.samples, ell = cfg.ell, n = std::min(cfg.n, 4);
  std::vector<CheckSpec> v;
  auto add = [&](std::string name, double tol, std::function<Measure(Sampler&)> f) {
    v.push_back({std::move(name), tol, std::move(f)});
  };
  if (suite == "theta") {
    add("theta_odd", 1e-12, [=](Sampler& s) { return theta_oddness(p, s, 10 * S); });
    add("theta_quasi_periodic", 1e-11, [=](Sampler& s) { return theta_quasi_periodicity(p, s, 10 * S); });
    add("theta_lattice_zeros", 1e-10, [=](Sampler&) { return theta_zeros(p); });
  } else if (suite == "rmatrix") {
    add("dybe", 1e-9, [=](Sampler& s) { return dybe(p, s, 5 * S); });
    add("unitarity", 1e-10, [=](Sampler& s) { return unitarity(p, s, 5 * S); });
    add("sn_equivariance", 1e-10, [=](Sampler& s) { return equivariance(p, s, S); });
    add("image_at_minus_gamma", 0.0, [=](Sampler& s) { return image_at_minus_gamma_check(p, s, S); });
    add("rank_nullity", 0.0, [=](Sampler& s) { return rmatrix_ranks(p, s); });
    add("h_invariance", 1e-12, [=](Sampler& s) { return h_invariance(p, s, S); });
    add("classical_limit_order", 1e-2, [=](Sampler& s) { return classical_limit_order(p, s, S); });
  } else if (suite == "fusion") {
    add("word_independence", 1e-9, [=](Sampler& s) { return word_independence(p, s, std::min(S, 5), n); });
    add("admissible_diagrams", 1e-9, [=](Sampler& s) { return admissible_diagrams(p, s, std::min(S, 5), n); });
    add("fusion_ranks", 0.0, [=](Sampler& s) { return fusion_ranks(p, s, n); });
    add("fusion_flips", 1e-9, [=](Sampler& s) { return fusion_flips(p, s, std::min(S, 5), n); });
  } else if (suite == "modules") {
    add("rll", 1e-9, [=](Sampler& s) { return rll(p, s, S, n); });
    add("subspace_leakage", 1e-9, [=](Sampler& s) { return subspace_leakage(p, s, std::min(S, 5), n); });
    add("intertwining", 1e-9, [=](Sampler& s) { return intertwining(p, s, std::min(S, 5), n); });
    add("composite_dybe", 1e-9, [=](Sampler& s) { return composite_dybe(p, s, std::min(S, 5)); });
    add("fused_r_subspaces", 1e-9, [=](Sampler& s) { return fused_r_subspaces(p, s, std::min(S, 5)); });
  } else if (suite == "ruijsenaars") {
    add("ruijsenaars_commute", 1e-8, [=](Sampler& s) { return ruijsenaars_commute(p, ell, s, S); });
    add("ruijsenaars_symmetric", 1e-9, [=](Sampler& s) { return ruijsenaars_symmetry(p, ell, s, S); });
    add("g_ratio_identity", 1e-10, [=](Sampler& s) { return g_ratio_identity(p, ell, s, 2 * S); });
    add("compose_associative", 1e-10, [=](Sampler& s) { return compose_associativity(p, s, S); });
  } else if (suite == "transfer") {
    if (ell < 1) return v;
    add("theorem_T_equals_M", 1e-8, [=](Sampler& s) { return transfer_equals_ruijsenaars(p, ell, s, S); });
    add("gamma1_coefficient", 1e-9, [=](Sampler& s) { return gamma1_coefficient(p, ell, s, S); });
    add("tm_ratio_lambda_independent", 1e-7, [=](Sampler& s) { return transfer_ratio_spread(p, ell, s, S).lambda; });
    add("tm_ratio_subset_independent", 1e-7, [=](Sampler& s) { return transfer_ratio_spread(p, ell, s, S).subset; });
    add("gm_small_gamma_limit", 1e-3, [=](Sampler& s) { return gm_small_gamma(p, ell, s, 2); });
    add("transfer_commute", 1e-8, [=](Sampler& s) { return transfer_commute(p, ell, s, S); });
    add("transfer_symmetric", 1e-9, [=](Sampler& s) { return transfer_symmetry(p, ell, s, S); });
    add("fusion_vector_ratio", 1e-8, [=](Sampler& s) { return fusion_vector_ratio(p, ell, s, std::min(S, 5)).ratio; });
    add("fusion_vector_orthogonal", 1e-9, [=](Sampler& s) { return fusion_vector_ratio(p, ell, s, std::min(S, 5)).orthogonal; });
    add("det_central", 1e-8, [=](Sampler& s) { return det_central(p, s, S); });
    add("det_invertible", 1e6, [=](Sampler& s) { return det_inverse_magnitude(p, ell, s, S); });
  }
  return v;
}

}  // namespace detail

inline Report run_suite(const RunConfig& cfg) {
  cfg.validate();
  Report r{cfg, {}};
  std::vector<std::string> suites;
  if (cfg.suite == "all") suites.assign(suite_names().begin(), suite_names().end() - 1);
  else suites.push_back(cfg.suite);
  for (const auto& s : suites)
    for (const auto& c : detail::suite_checks(s, cfg)) r.checks.push_back(detail::run_check(c, cfg));
  return r;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"suite", c.suite},
          {"N", c.N},
          {"ell", c.ell},
          {"n", c.n},
          {"tau", {c.tau.real(), c.tau.imag()}},
          {"gamma", {c.gamma.real(), c.gamma.imag()}},
          {"seed", c.seed},
          {"samples", c.samples},
          {"tol", c.tol},
          {"out", c.out}};
}

// Non-finite residuals become null in JSON.
inline nlohmann::json to_json(const Report& r, bool with_times = true) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    nlohmann::json j{{"name", c.name},
                     {"max_residual", std::isfinite(c.max_residual) ? nlohmann::json(c.max_residual) : nlohmann::json()},
                     {"tol", c.tol},
                     {"pass", c.pass},
                     {"samples_used", c.samples_used}};
    if (with_times) j["wall_time_s"] = c.wall_time_s;
    if (!c.error.empty()) j["error"] = c.error;
    checks.push_back(std::move(j));
  }
  return {{"config", to_json(r.config)}, {"checks", checks}, {"pass", r.pass()}, {"version", kVersion}};
}

// ---------------------------------------------------------------------------
// CSV tables

inline const std::vector<std::string>& table_names() {
  static const std::vector<std::string> s{"ruijsenaars_coeffs", "transfer_coeffs", "gm_ratio"};
  return s;
}

struct TableOptions {
  std::string what = "ruijsenaars_coeffs";
  std::string module = "sym";  // transfer_coeffs: sym = S^{N ell}(0), ext = top exterior power
  int m = 0;  // 0 = every m in 1..N
  Complex z{checks::kGmSpectralPoint, 0.0};
};

inline std::string subset_label(const Weight& mu) {
  std::string s;
  for (int j = 0; j < mu.size(); ++j)
    if (mu[j]) s += (s.empty() ? "" : " ") + std::to_string(j + 1);
  return s;
}

namespace detail {

inline void csv_number(std::ostream& os, double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  os << ss.str();
}

inline void coefficient_rows(std::ostream& os, const DifferenceOperator& op, int m, Sampler& s, int samples,
                             const ModelParams& p, int reach) {
  for (int k = 0; k < samples; ++k) {
    const auto l = s.generic_lambda(p, reach);
    for (const auto& [mu, c] : op.coefficients(l)) {
      os << m << ',' << subset_label(mu) << ',' << k << ',';
      csv_number(os, c(0, 0).real());
      os << ',';
      csv_number(os, c(0, 0).imag());
      os << '\n';
    }
  }
}

}  // namespace detail

// CSV on os:
//   ruijsenaars_coeffs, transfer_coeffs: m,J,sample,re,im (J as 1-based indices)
//   gm_ratio: m,z_re,z_im,g_re,g_im
inline void emit_table(const RunConfig& cfg, const TableOptions& opt, std::ostream& os) {
  cfg.validate();
  if (std::find(table_names().begin(), table_names().end(), opt.what) == table_names().end())
    throw ConfigError("unknown table '" + opt.what + "'");
  const ModelParams p = cfg.params();
  const int N = p.N, ell = cfg.ell;
  Sampler s(cfg.seed ^ name_hash(opt.what));
  auto m_range = [&](auto f) {
    if (opt.m < 0 || opt.m > N) throw ConfigError("m must be in 1..N (or 0 for all)");
    for (int m = 1; m <= N; ++m)
      if (opt.m == 0 || opt.m == m) f(m);
  };
  if (opt.what == "ruijsenaars_coeffs") {
    os << "m,J,sample,re,im\n";
    m_range([&](int m) { detail::coefficient_rows(os, ruijsenaars_m(m, ell, p), m, s, cfg.samples, p, ell + 1); });
  } else if (opt.what == "transfer_coeffs") {
    EModule mod = [&] {
      if (opt.module == "sym") {
        if (ell < 1) throw ConfigError("transfer_coeffs on the symmetric power needs ell >= 1");
        return sym_power_module(N * ell, 0.0, p);
      }
      if (opt.module == "ext") return ext_power_module(N, 0.0, p);
      throw ConfigError("unknown module '" + opt.module + "'");
    }();
    const int reach = opt.module == "sym" ? N * ell : 1;
    const Complex z = s.generic_spectral(p, gamma_multiples(p, 2 * N * std::max(ell, 1) + 1));
    os << "m,J,sample,re,im\n";
    m_range([&](int m) { detail::coefficient_rows(os, transfer_tm(m, z, mod), m, s, cfg.samples, p, reach + m); });
  } else {
    if (ell < 1) throw ConfigError("gm_ratio needs ell >= 1");
    os << "m,z_re,z_im,g_re,g_im\n";
    m_range([&](int m) {
      const Complex g = checks::gm_estimate(m, opt.z, p, ell, s, cfg.samples);
      os << m << ',';
      detail::csv_number(os, opt.z.real());
      os << ',';
      detail::csv_number(os, opt.z.imag());
      os << ',';
      detail::csv_number(os, g.real());
      os << ',';
      detail::csv_number(os, g.imag());
      os << '\n';
    });
  }
}

}  // namespace ellfuse

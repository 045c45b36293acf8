#pragma once

// E-modules (W, L): a weight-graded space W and an L-operator L(z,lambda) on
// C^N x W, with the auxiliary C^N as the most significant factor. Matrix
// elements are blocks of the auxiliary factor:
//   L(z,lambda)(e_j x v) = sum_i e_i x L_ij(z,lambda) v,   L_ij = block (i,j).

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fusion.hpp"
#include "rmatrix.hpp"
#include "tensorspace.hpp"

namespace ellfuse {

using LOperator = std::function<Mat(Complex z, const WeightVector& lambda)>;

struct EModule {
  GradedSpace space;
  ModelParams params;
  std::string label;
  LOperator l_op;

  int dim() const { return space.dim(); }
  Mat L(Complex z, const WeightVector& lambda) const { return l_op(z, lambda); }
  GradedSpace aux_space() const { return tensor_space(vector_space(params.N), space); }
};

class ModuleConstructionError : public std::runtime_error {
 public:
  explicit ModuleConstructionError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kLeakageTolerance = 1e-8;

inline Mat matrix_element(const Mat& l, int d, int i, int j) { return l.block(i * d, j * d, d, d); }

inline EModule vector_module(Complex w, const ModelParams& p) {
  return {vector_space(p.N), p, "V(w)", [w, p](Complex z, const WeightVector& l) {
            return build_r(z - w, l, p).matrix;
          }};
}

inline EModule trivial_module(const ModelParams& p) {
  const int N = p.N;
  return {trivial_space(N), p, "trivial", [N](Complex, const WeightVector&) {
            return Mat(Mat::Identity(N, N));
          }};
}

// L(z,lambda) = L_1(z, lambda - gamma h^{(3)})^{(12)} L_2(z,lambda)^{(13)}
inline EModule tensor_module(const EModule& a, const EModule& b) {
  if (a.params.N != b.params.N) throw std::invalid_argument("tensor_module: N mismatch");
  const ModelParams p = a.params;
  const Layout layout{vector_space(p.N), a.space, b.space};
  auto la = a.l_op, lb = b.l_op;
  return {tensor_space(a.space, b.space), p, "(" + a.label + ")x(" + b.label + ")",
          [layout, la, lb, p](Complex z, const WeightVector& l) {
            Mat x = embed_local(layout, {0, 2}, {}, [&](const Weight&) { return lb(z, l); });
            return apply_local(layout, {0, 1}, {2}, [&](const Weight& mu) {
              return la(z, shift_lambda(l, mu, p.gamma));
            }, x);
          }};
}

// Product R(z-w, lambda - gamma sum_{j>1} h^{(j)})^{(01)} ... R(z-w-gamma(n-1), lambda)^{(0n)}
// applied to x, on C^N x (C^N)^{x n} with the auxiliary factor first.
inline Mat fused_l_apply(int n, Complex w, Complex z, const WeightVector& lambda,
                         const ModelParams& p, const Mat& x) {
  const Layout layout = power_layout(p.N, n + 1);
  Mat y = x;
  for (int k = n; k >= 1; --k) {
    std::vector<int> right;
    for (int j = k + 1; j <= n; ++j) right.push_back(j);
    const Complex u = z - w - static_cast<double>(k - 1) * p.gamma;
    y = apply_local(layout, {0, k}, right, [&](const Weight& mu) {
      return build_r(u, shift_lambda(lambda, mu, p.gamma), p).matrix;
    }, y);
  }
  return y;
}

inline GradedOperator fused_l(int n, Complex w, Complex z, const WeightVector& lambda,
                              const ModelParams& p) {
  const int D = ipow(p.N, n + 1);
  return {tensor_power_space(p.N, n + 1), fused_l_apply(n, w, z, lambda, p, Mat::Identity(D, D))};
}

// Opposite coproduct:
//   R(z-w-gamma(n-1), lambda - gamma sum_{j<n} h^{(j)})^{(0n)} ... R(z-w, lambda)^{(01)}
inline GradedOperator opposite_l(int n, Complex w, Complex z, const WeightVector& lambda,
                                 const ModelParams& p) {
  const Layout layout = power_layout(p.N, n + 1);
  const int D = ipow(p.N, n + 1);
  Mat y = Mat::Identity(D, D);
  for (int k = 1; k <= n; ++k) {
    std::vector<int> left;
    for (int j = 1; j < k; ++j) left.push_back(j);
    const Complex u = z - w - static_cast<double>(k - 1) * p.gamma;
    y = apply_local(layout, {0, k}, left, [&](const Weight& mu) {
      return build_r(u, shift_lambda(lambda, mu, p.gamma), p).matrix;
    }, y);
  }
  return {tensor_power_space(p.N, n + 1), std::move(y)};
}

// V^{x n}(w) = V(w) x V(w+gamma) x ... x V(w+(n-1)gamma)
inline EModule fused_tensor_module(int n, Complex w, const ModelParams& p) {
  return {tensor_power_space(p.N, n), p, "V^n(w)", [n, w, p](Complex z, const WeightVector& l) {
            return fused_l(n, w, z, l, p).matrix;
          }};
}

// Relative size of the part of y outside the range of the isometry q (q q* y vs y).
inline double leakage(const Mat& y, const Mat& q) {
  const double ny = y.norm();
  if (ny == 0.0) return 0.0;
  return (y - q * (q.adjoint() * y)).norm() / ny;
}

inline Mat aux_extend(const Mat& q, int N) {
  Mat out = Mat::Zero(N * q.rows(), N * q.cols());
  for (int i = 0; i < N; ++i) out.block(i * q.rows(), i * q.cols(), q.rows(), q.cols()) = q;
  return out;
}

// Leakage of the fused L on C^N x S^n and on C^N x J_n, relative to the norm of L
// applied to the subspace.
struct LeakageReport {
  double sym = 0.0;
  double j = 0.0;
};

inline LeakageReport fused_l_leakage(int n, Complex w, Complex z, const WeightVector& lambda,
                                     const ModelParams& p) {
  const int N = p.N;
  const Mat qs = aux_extend(sym_basis(n, N).embedding, N);
  const Mat a = antisym_basis(n, N).embedding;
  const Mat pj = Mat::Identity(a.rows(), a.rows()) - a * a.adjoint();
  const Mat qj = aux_extend(column_basis(pj), N);
  return {leakage(fused_l_apply(n, w, z, lambda, p, qs), qs),
          leakage(fused_l_apply(n, w, z, lambda, p, qj), qj)};
}

// ---------------------------------------------------------------------------
// symmetric and exterior powers

namespace detail {

// Coordinates of the orthonormal S^k basis in (S^{k-1} basis) x C^N.
inline Mat sym_step_isometry(int k, int N) {
  const Mat big = sym_basis(k, N).embedding;
  const Mat prev = sym_basis(k - 1, N).embedding;
  Mat prev_ext = Mat::Zero(prev.rows() * N, prev.cols() * N);
  for (int r = 0; r < prev.rows(); ++r)
    for (int c = 0; c < prev.cols(); ++c)
      if (prev(r, c) != 0.0)
        for (int j = 0; j < N; ++j) prev_ext(r * N + j, c * N + j) = prev(r, c);
  return prev_ext.adjoint() * big;
}

struct SymPowerData {
  int n;
  Complex w;
  ModelParams p;
  std::vector<GradedSpace> spaces;  // spaces[k] = S^k basis, k = 1..n
  std::vector<Mat> step;            // step[k] = I_N x Q_k, k = 2..n
};

// L of S^k(w) at (z, lambda - gamma mu), memoized by mu during one evaluation.
inline Mat sym_level(const SymPowerData& d, int k, Complex z, const WeightVector& lambda,
                     const Weight& mu, std::vector<std::map<Weight, Mat>>& memo) {
  auto& level = memo[static_cast<std::size_t>(k)];
  if (auto it = level.find(mu); it != level.end()) return it->second;
  const ModelParams& p = d.p;
  const WeightVector lam = shift_lambda(lambda, mu, p.gamma);
  Mat out;
  if (k == 1) {
    out = build_r(z - d.w, lam, p).matrix;
  } else {
    // S^k sits inside S^{k-1}(w) x V(w+(k-1)gamma)
    const Layout layout{vector_space(p.N), d.spaces[static_cast<std::size_t>(k - 1)], vector_space(p.N)};
    const Complex u = z - d.w - static_cast<double>(k - 1) * p.gamma;
    const Mat& q = d.step[static_cast<std::size_t>(k)];
    Mat y = apply_local(layout, {0, 2}, {}, [&](const Weight&) { return build_r(u, lam, p).matrix; }, q);
    y = apply_local(layout, {0, 1}, {2}, [&](const Weight& nu) {
      return sym_level(d, k - 1, z, lambda, mu + nu, memo);
    }, y);
    out = q.adjoint() * y;
    const double leak = (y - q * out).norm() / std::max(y.norm(), 1e-300);
    if (leak > kLeakageTolerance)
      throw ModuleConstructionError("symmetric power: L leaves C^N x S^" + std::to_string(k) +
                                    " (relative leakage " + std::to_string(leak) + ")");
  }
  level.emplace(mu, out);
  return out;
}

}  // namespace detail

// The n-th symmetric power S^n V(w): the fused L restricted to C^N x S^n(C^N) in the
// orthonormal multiset basis. Evaluated level by level through
// S^k(w) inside S^{k-1}(w) x V(w+(k-1)gamma), which is the same operator at a
// fraction of the cost; each level verifies the subspace is preserved.
inline EModule sym_power_module(int n, Complex w, const ModelParams& p) {
  if (n < 1) throw std::invalid_argument("sym_power_module: n must be >= 1");
  if (ipow(p.N, n) > 10000) throw std::invalid_argument("sym_power_module: N^n too large");
  auto d = std::make_shared<detail::SymPowerData>();
  d->n = n;
  d->w = w;
  d->p = p;
  d->spaces.resize(static_cast<std::size_t>(n + 1));
  d->step.resize(static_cast<std::size_t>(n + 1));
  for (int k = 1; k <= n; ++k) {
    d->spaces[static_cast<std::size_t>(k)] = sym_basis(k, p.N).space;
    if (k >= 2) d->step[static_cast<std::size_t>(k)] = aux_extend(detail::sym_step_isometry(k, p.N), p.N);
  }
  return {d->spaces[static_cast<std::size_t>(n)], p, "S^" + std::to_string(n) + "V(w)",
          [d](Complex z, const WeightVector& lambda) {
            std::vector<std::map<Weight, Mat>> memo(static_cast<std::size_t>(d->n + 1));
            return detail::sym_level(*d, d->n, z, lambda, Weight(d->p.N), memo);
          }};
}

// The n-th exterior power: the fused L induced on V^{x n}(w)/J_n, represented on the
// orthonormal antisymmetric basis (the orthogonal complement of J_n), so the
// induced operator is Q* L Q. The construction verifies that J_n is preserved.
inline EModule ext_power_module(int n, Complex w, const ModelParams& p) {
  if (n < 1 || n > p.N) throw std::invalid_argument("ext_power_module: need 1 <= n <= N");
  const SubspaceBasis a = antisym_basis(n, p.N);
  const Mat qa = aux_extend(a.embedding, p.N);
  const Mat pj = Mat::Identity(a.embedding.rows(), a.embedding.rows()) - a.embedding * a.embedding.adjoint();
  const Mat jb = column_basis(pj);
  const Mat qj = aux_extend(jb, p.N);
  return {a.space, p, "ext^" + std::to_string(n) + "V(w)",
          [n, w, p, qa, qj](Complex z, const WeightVector& lambda) {
            if (qj.cols() > 0) {
              const double leak = leakage(fused_l_apply(n, w, z, lambda, p, qj), qj);
              if (leak > kLeakageTolerance)
                throw ModuleConstructionError("exterior power: J_n not preserved (relative leakage " +
                                              std::to_string(leak) + ")");
            }
            return Mat(qa.adjoint() * fused_l_apply(n, w, z, lambda, p, qa));
          }};
}

// ---------------------------------------------------------------------------
// RLL relation
//   R(z1-z2, lambda - gamma h^{(3)})^{(12)} L(z1,lambda)^{(13)} L(z2, lambda - gamma h^{(1)})^{(23)}
//   = L(z2,lambda)^{(23)} L(z1, lambda - gamma h^{(2)})^{(13)} R(z1-z2, lambda)^{(12)}
// Returns the relative Frobenius residual.
inline double rll_residual(const EModule& m, Complex z1, Complex z2, const WeightVector& lambda) {
  const ModelParams& p = m.params;
  const Layout layout{vector_space(p.N), vector_space(p.N), m.space};
  const auto R = [&](const Weight& mu, const WeightVector& l) {
    return build_r(z1 - z2, shift_lambda(l, mu, p.gamma), p).matrix;
  };
  const auto Lsh = [&](Complex z, const Weight& mu) { return m.L(z, shift_lambda(lambda, mu, p.gamma)); };
  const int D = layout_dim(layout);
  const Mat I = Mat::Identity(D, D);

  Mat lhs = apply_local(layout, {1, 2}, {0}, [&](const Weight& mu) { return Lsh(z2, mu); }, I);
  lhs = apply_local(layout, {0, 2}, {}, [&](const Weight&) { return m.L(z1, lambda); }, lhs);
  lhs = apply_local(layout, {0, 1}, {2}, [&](const Weight& mu) { return R(mu, lambda); }, lhs);

  Mat rhs = apply_local(layout, {0, 1}, {}, [&](const Weight& mu) { return R(mu, lambda); }, I);
  rhs = apply_local(layout, {0, 2}, {1}, [&](const Weight& mu) { return Lsh(z1, mu); }, rhs);
  rhs = apply_local(layout, {1, 2}, {}, [&](const Weight&) { return m.L(z2, lambda); }, rhs);
  return (lhs - rhs).norm() / std::max(lhs.norm(), 1e-300);
}

// Dynamical Yang-Baxter equation for the fundamental R-matrix on (C^N)^{x3}:
//   R(z12, l - g h3)^{12} R(z13, l)^{13} R(z23, l - g h1)^{23}
//   = R(z23, l)^{23} R(z13, l - g h2)^{13} R(z12, l)^{12}
inline double dybe_residual(Complex z1, Complex z2, Complex z3, const WeightVector& lambda,
                            const ModelParams& p) {
  return rll_residual(vector_module(z3, p), z1, z2, lambda);
}

// ---------------------------------------------------------------------------
// R-matrices between modules and their composition

// R_{A,B}(lambda) acting on A x B.
struct RMatrix {
  GradedSpace a, b;
  ModelParams params;
  std::function<Mat(const WeightVector&)> eval;

  Mat operator()(const WeightVector& lambda) const { return eval(lambda); }
};

inline RMatrix fundamental_rmatrix(Complex z1, Complex z2, const ModelParams& p) {
  return {vector_space(p.N), vector_space(p.N), p,
          [=](const WeightVector& l) { return build_r(z1 - z2, l, p).matrix; }};
}

// R_{V(z), W} = L_W(z, .)
inline RMatrix rmatrix_from_module(Complex z, const EModule& w) {
  auto l = w.l_op;
  return {vector_space(w.params.N), w.space, w.params, [z, l](const WeightVector& lam) { return l(z, lam); }};
}

// R_{W1 x W2, W3}(lambda) = R_{W2,W3}(lambda)^{(23)} R_{W1,W3}(lambda - gamma h^{(2)})^{(13)}
inline RMatrix compose_rmatrix_left(const RMatrix& r13, const RMatrix& r23) {
  if (r13.b.weights != r23.b.weights) throw std::invalid_argument("compose_rmatrix_left: W3 mismatch");
  const ModelParams p = r13.params;
  const Layout layout{r13.a, r23.a, r13.b};
  return {tensor_space(r13.a, r23.a), r13.b, p, [layout, r13, r23, p](const WeightVector& l) {
            Mat x = embed_local(layout, {0, 2}, {1}, [&](const Weight& mu) {
              return r13(shift_lambda(l, mu, p.gamma));
            });
            return apply_local(layout, {1, 2}, {}, [&](const Weight&) { return r23(l); }, x);
          }};
}

// R_{W1, W2 x W3}(lambda) = R_{W1,W2}(lambda - gamma h^{(3)})^{(12)} R_{W1,W3}(lambda)^{(13)}
inline RMatrix compose_rmatrix_right(const RMatrix& r13, const RMatrix& r12) {
  if (r13.a.weights != r12.a.weights) throw std::invalid_argument("compose_rmatrix_right: W1 mismatch");
  const ModelParams p = r13.params;
  const Layout layout{r13.a, r12.b, r13.b};
  return {r13.a, tensor_space(r12.b, r13.b), p, [layout, r13, r12, p](const WeightVector& l) {
            Mat x = embed_local(layout, {0, 2}, {}, [&](const Weight&) { return r13(l); });
            return apply_local(layout, {0, 1}, {2}, [&](const Weight& mu) {
              return r12(shift_lambda(l, mu, p.gamma));
            }, x);
          }};
}

// R-matrix of V^{x m}(z) and V^{x n}(w) (evaluation points in steps of gamma),
// composed from fundamental R-matrices.
inline RMatrix rmatrix_between(int m, Complex z, int n, Complex w, const ModelParams& p) {
  if (m < 1 || n < 1) throw std::invalid_argument("rmatrix_between: m, n >= 1");
  auto row = [&](Complex zi) {
    RMatrix r = fundamental_rmatrix(zi, w, p);
    for (int k = 1; k < n; ++k)
      r = compose_rmatrix_right(fundamental_rmatrix(zi, w + static_cast<double>(k) * p.gamma, p), r);
    return r;
  };
  RMatrix acc = row(z);
  for (int k = 1; k < m; ++k) acc = compose_rmatrix_left(acc, row(z + static_cast<double>(k) * p.gamma));
  return acc;
}

// Dynamical YBE for R-matrices between W1, W2, W3 on W1 x W2 x W3, relative residual:
//   R12(l - g h3) R13(l) R23(l - g h1) = R23(l) R13(l - g h2) R12(l)
inline double rmatrix_dybe_residual(const RMatrix& r12, const RMatrix& r13, const RMatrix& r23,
                                    const WeightVector& l) {
  const ModelParams& p = r12.params;
  const Layout layout{r12.a, r12.b, r13.b};
  const int D = layout_dim(layout);
  const Mat I = Mat::Identity(D, D);
  auto sh = [&](const RMatrix& r) {
    return [&](const Weight& mu) { return r(shift_lambda(l, mu, p.gamma)); };
  };
  Mat lhs = apply_local(layout, {1, 2}, {0}, sh(r23), I);
  lhs = apply_local(layout, {0, 2}, {}, sh(r13), lhs);
  lhs = apply_local(layout, {0, 1}, {2}, sh(r12), lhs);
  Mat rhs = apply_local(layout, {0, 1}, {}, sh(r12), I);
  rhs = apply_local(layout, {0, 2}, {1}, sh(r13), rhs);
  rhs = apply_local(layout, {1, 2}, {}, sh(r23), rhs);
  return (lhs - rhs).norm() / std::max(lhs.norm(), 1e-300);
}

// Operator A x B -> B x A
inline Mat swap_spaces(int da, int db) {
  Mat s = Mat::Zero(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j) s(j * da + i, i * db + j) = 1.0;
  return s;
}

// R_{W1,W2}(lambda)^{(12)} R_{W2,W1}(lambda)^{(21)} - Id, relative to Id.
inline double rmatrix_unitarity_residual(const RMatrix& r12, const RMatrix& r21, const WeightVector& l) {
  const int da = r12.a.dim(), db = r12.b.dim();
  const Mat s = swap_spaces(da, db);  // W1 x W2 -> W2 x W1
  const Mat prod = r12(l) * (s.transpose() * r21(l) * s);
  const Mat I = Mat::Identity(da * db, da * db);
  return (prod - I).norm() / I.norm();
}

}  // namespace ellfuse

#include <gtest/gtest.h>

#include "ellfuse/emodule.hpp"
#include "ellfuse/rmatrix.hpp"
#include "ellfuse/sampling.hpp"
#include "oracle.hpp"

using namespace ellfuse;

namespace {

ModelParams params(int N) {
  ModelParams p;
  p.N = N;
  return p;
}

// R assembled from the triple-product theta, independent of the series code
Mat r_oracle(Complex z, const WeightVector& l, const ModelParams& p) {
  auto th = [&](Complex x) { return oracle::theta_product(x, p.theta.tau); };
  const int N = p.N;
  Mat m = Mat::Zero(N * N, N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j) {
        m(i * N + i, i * N + i) = 1.0;
        continue;
      }
      const Complex a = l[i] - l[j];
      m(i * N + j, i * N + j) = th(z) * th(a + p.gamma) / (th(z - p.gamma) * th(a));
      m(i * N + j, j * N + i) = -th(z + a) * th(p.gamma) / (th(z - p.gamma) * th(a));
    }
  return m;
}

}  // namespace

TEST(AlphaBeta, ValuesAtZero) {
  const auto p = params(2);
  for (Complex a : {Complex(0.3, 0.2), Complex(-0.41, 0.05)}) {
    EXPECT_LT(std::abs(alpha(0.0, a, p)), 1e-14);
    EXPECT_LT(std::abs(beta(0.0, a, p) - 1.0), 1e-13);
  }
}

// Scalar content of unitarity on the 2x2 block spanned by e_i x e_j, e_j x e_i.
TEST(AlphaBeta, ScalarUnitarity) {
  const auto p = params(2);
  Sampler s(11);
  for (int k = 0; k < 20; ++k) {
    const Complex z = s.unit_complex(), a = s.unit_complex() - Complex(0.5, 0.5);
    const Complex v = alpha(z, a, p) * alpha(-z, -a, p) + beta(z, a, p) * beta(-z, a, p);
    EXPECT_LT(std::abs(v - 1.0), 1e-11);
    EXPECT_LT(std::abs(alpha(z, a, p) * beta(-z, -a, p) + beta(z, a, p) * alpha(-z, a, p)), 1e-11);
  }
}

TEST(AlphaBeta, PoleSignal) {
  const auto p = params(2);
  EXPECT_THROW(alpha(p.gamma, 0.3, p), PoleError);
  EXPECT_THROW(beta(0.2, 0.0, p), PoleError);
}

TEST(BuildR, MatchesOracleAndDiagonal) {
  for (int N : {2, 3}) {
    const auto p = params(N);
    Sampler s(N);
    for (int k = 0; k < 5; ++k) {
      const auto l = s.generic_lambda(p);
      const Complex z = s.generic_spectral(p, {p.gamma});
      const auto r = build_r(z, l, p);
      EXPECT_LT(oracle::rel(r.matrix, r_oracle(z, l, p)), 1e-12);
      for (int i = 0; i < N; ++i) EXPECT_EQ(r.matrix(i * N + i, i * N + i), Complex(1.0));
      EXPECT_LT(r.off_weight_norm(), 1e-12);
    }
  }
}

TEST(BuildR, FlipAtZero) {
  for (int N : {2, 3}) {
    const auto p = params(N);
    Sampler s(3);
    const auto l = s.generic_lambda(p);
    EXPECT_LT((build_r(0.0, l, p).matrix - flip_operator(N).matrix).norm(), 1e-12);
  }
}

TEST(BuildR, Unitarity) {
  for (int N : {2, 3}) {
    const auto p = params(N);
    Sampler s(100 + N);
    for (int k = 0; k < 50; ++k) {
      const auto l = s.generic_lambda(p);
      const Complex z = s.generic_spectral(p, {p.gamma, -p.gamma});
      const Mat prod = build_r(z, l, p).matrix * swap_factors(build_r(-z, l, p).matrix, N);
      EXPECT_LT((prod - Mat::Identity(N * N, N * N)).norm(), 1e-10);
    }
  }
}

TEST(BuildR, WeylEquivariance) {
  for (int N : {2, 3}) {
    const auto p = params(N);
    Sampler s(200 + N);
    for (int k = 0; k < 10; ++k) {
      const auto l = s.generic_lambda(p);
      const Complex z = s.generic_spectral(p, {p.gamma});
      for (int a = 0; a < N; ++a)
        for (int b = a + 1; b < N; ++b) {
          const auto sigma = transposition(N, a, b);
          const Mat S = permutation_matrix(sigma);
          const Mat SS = kron(S, S);
          const Mat lhs = build_r(z, permute_lambda(l, sigma), p).matrix;
          const Mat rhs = SS * build_r(z, l, p).matrix * SS.adjoint();
          EXPECT_LT((lhs - rhs).norm(), 1e-10);
        }
    }
  }
}

TEST(BuildR, PoleOnlyAtGamma) {
  const auto p = params(2);
  WeightVector l(2);
  l << Complex(0.1, 0.2), Complex(0.6, 0.3);
  EXPECT_THROW(build_r(p.gamma, l, p), PoleError);
  EXPECT_THROW(build_r(p.gamma + 1.0, l, p), PoleError);
  EXPECT_NO_THROW(build_r(-p.gamma, l, p));
  WeightVector bad(2);
  bad << Complex(0.1, 0.2), Complex(0.1, 0.2);
  EXPECT_THROW(build_r(0.3, bad, p), PoleError);
}

TEST(BuildR, DynamicalYangBaxterAgainstBruteForceEmbedding) {
  for (int N : {2, 3}) {
    const auto p = params(N);
    Sampler s(300 + N);
    for (int k = 0; k < 5; ++k) {
      const auto l = s.generic_lambda(p);
      const Complex z1 = s.unit_complex(), z2 = s.unit_complex(), z3 = s.unit_complex();
      auto R = [&](Complex z) {
        return [&, z](const std::vector<int>& w) {
          WeightVector sh = l;
          for (int j = 0; j < N; ++j) sh[j] -= p.gamma * static_cast<double>(w[j]);
          return r_oracle(z, sh, p);
        };
      };
      const Mat lhs = oracle::embed(N, 3, {0, 1}, {2}, R(z1 - z2)) * oracle::embed(N, 3, {0, 2}, {}, R(z1 - z3)) *
                      oracle::embed(N, 3, {1, 2}, {0}, R(z2 - z3));
      const Mat rhs = oracle::embed(N, 3, {1, 2}, {}, R(z2 - z3)) * oracle::embed(N, 3, {0, 2}, {1}, R(z1 - z3)) *
                      oracle::embed(N, 3, {0, 1}, {}, R(z1 - z2));
      EXPECT_LT(oracle::rel(lhs, rhs), 1e-10);
      EXPECT_LT(dybe_residual(z1, z2, z3, l, p), 1e-10);
    }
  }
}

TEST(BuildRReg, ResidueLimit) {
  for (int N : {2, 3}) {
    const auto p = params(N);
    Sampler s(400 + N);
    const auto l = s.generic_lambda(p);
    const double h = 1e-6;
    const Mat num = h * build_r(p.gamma + h, l, p).matrix;
    const Mat reg = build_r_reg(l, p).matrix;
    EXPECT_LT(oracle::rel(num, reg), 1e-4);
  }
}

TEST(BuildRReg, KernelIsSymmetricSquare) {
  for (int N : {2, 3, 4}) {
    const auto p = params(N);
    Sampler s(500 + N);
    const auto l = s.generic_lambda(p);
    const Mat reg = build_r_reg(l, p).matrix;
    EXPECT_EQ(N * N - numeric_rank(reg), N * (N + 1) / 2);
    EXPECT_LT((reg * projector_sym(2, N).matrix).norm(), 1e-9);
  }
}

TEST(BuildR, ImageAtMinusGammaIsSymmetricSquare) {
  for (int N : {2, 3}) {
    const auto p = params(N);
    Sampler s(600 + N);
    const auto l = s.generic_lambda(p);
    EXPECT_TRUE(same_column_space(build_r(-p.gamma, l, p).matrix, projector_sym(2, N).matrix));
  }
}

TEST(ClassicalLimit, ReferenceMatrices) {
  const Mat I = Mat::Identity(4, 4), P = flip_operator(2).matrix;
  EXPECT_LT((r_classical_limit(-1, 2).matrix - (0.5 * I + 0.5 * P)).norm(), 1e-15);
  EXPECT_LT((r_classical_limit(2, 2).matrix - (2.0 * I - P)).norm(), 1e-15);
  EXPECT_LT((r_classical_limit(-3, 2).matrix - (0.75 * I + 0.25 * P)).norm(), 1e-15);
  EXPECT_THROW(r_classical_limit(0, 2), std::invalid_argument);
  EXPECT_THROW(r_classical_limit(1, 2), std::invalid_argument);
}

TEST(ClassicalLimit, SmallGamma) {
  for (int N : {2, 3}) {
    auto p = params(N).with_gamma(1e-4);
    Sampler s(700 + N);
    const auto l = s.generic_lambda(p);
    for (int k : {1, 2, 3}) {
      EXPECT_LT((build_r(-static_cast<double>(k) * p.gamma, l, p).matrix - r_classical_limit(-k, N).matrix).norm(), 1e-3);
      if (k >= 2) {
        // O(gamma) approach with a lambda-dependent constant
        auto err = [&](double g) {
          const auto q = p.with_gamma(g);
          return (build_r(static_cast<double>(k) * q.gamma, l, q).matrix - r_classical_limit(k, N).matrix).norm();
        };
        EXPECT_LT(err(1e-2), 1.0);
        EXPECT_LT(err(1e-5), 1e-3);
        EXPECT_LT(err(1e-5), 0.2 * err(1e-4));
      }
    }
    EXPECT_LT((build_r_reg(l, p).matrix / p.gamma - r_reg_classical_limit(N).matrix).norm(), 1e-3);
  }
}

// At fixed lambda the distance to the limits is gamma |theta'/theta(l_i - l_j)| to
// first order, so it shrinks tenfold with gamma at every draw, however large the
// constant is.
TEST(ClassicalLimit, FirstOrderAtEveryLambda) {
  for (int N : {2, 3}) {
    const auto p = params(N).with_gamma(1e-4), q = params(N).with_gamma(1e-5);
    Sampler s(750 + N);
    for (int t = 0; t < 20; ++t) {
      const auto l = s.generic_lambda(p, 3);
      auto err = [&](const ModelParams& r) {
        double e = (build_r_reg(l, r).matrix / r.gamma - r_reg_classical_limit(N).matrix).norm();
        for (int k : {1, 2, 3})
          e = std::max(e, (build_r(-static_cast<double>(k) * r.gamma, l, r).matrix - r_classical_limit(-k, N).matrix).norm());
        return e;
      };
      EXPECT_NEAR(err(q) / err(p), 0.1, 1e-3);
    }
  }
}

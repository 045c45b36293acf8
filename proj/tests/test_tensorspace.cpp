#include <gtest/gtest.h>

#include "ellfuse/tensorspace.hpp"
#include "oracle.hpp"

using namespace ellfuse;

namespace {

int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

}  // namespace

TEST(BasisWeight, Counts) {
  EXPECT_EQ(basis_weight({0, 0}, 2), Weight(std::vector<int>{2, 0}));
  EXPECT_EQ(basis_weight({1, 2, 0}, 3), Weight(std::vector<int>{1, 1, 1}));
  EXPECT_EQ(basis_weight({}, 2), Weight(std::vector<int>{0, 0}));
  EXPECT_THROW(basis_weight({2}, 2), std::out_of_range);
}

TEST(ShiftLambda, Definition) {
  const Complex g{0.17, 0.01};
  WeightVector l(2);
  l << Complex(0.3, 0.1), Complex(0.8, 0.4);
  EXPECT_EQ(shift_lambda(l, Weight(2), g), l);
  const auto s = shift_lambda(l, Weight::unit(2, 0), g);
  EXPECT_EQ(s[0], l[0] - g);
  EXPECT_EQ(s[1], l[1]);
  const Weight mu(std::vector<int>{1, 2}), nu(std::vector<int>{3, 0});
  EXPECT_LT((shift_lambda(shift_lambda(l, mu, g), nu, g) - shift_lambda(l, mu + nu, g)).norm(), 1e-15);
}

TEST(Permutation, IdentityAndFlip) {
  EXPECT_TRUE(permutation_operator({0, 1, 2}, 2).matrix.isIdentity());
  const Mat P = permutation_operator({1, 0}, 2).matrix;
  Vec e12 = Vec::Zero(4);
  e12[0 * 2 + 1] = 1.0;
  Vec e21 = Vec::Zero(4);
  e21[1 * 2 + 0] = 1.0;
  EXPECT_EQ(P * e12, e21);
  EXPECT_THROW(permutation_operator({0, 0}, 2), std::invalid_argument);
}

TEST(Permutation, Homomorphism) {
  for (int N : {2, 3})
    for (const auto& s : all_permutations(3))
      for (const auto& r : all_permutations(3)) {
        const Mat lhs = permutation_operator(compose_perm(s, r), N).matrix;
        const Mat rhs = permutation_operator(s, N).matrix * permutation_operator(r, N).matrix;
        EXPECT_EQ(lhs, rhs);
      }
}

TEST(Permutation, MovesFactorToPosition) {
  // factor 0 -> position 2: e_a x e_b x e_c -> e_b x e_c x e_a
  const int N = 3;
  const Mat P = permutation_operator({2, 0, 1}, N).matrix;
  const int col = flat_index({0, 1, 2}, N);
  EXPECT_EQ(P(flat_index({1, 2, 0}, N), col), Complex(1.0));
}

TEST(Projectors, Ranks) {
  EXPECT_EQ(numeric_rank(projector_sym(2, 2).matrix), 3);
  EXPECT_EQ(numeric_rank(projector_antisym(2, 2).matrix), 1);
  for (int N = 2; N <= 4; ++N)
    for (int n = 1; ipow(N, n) <= 81; ++n) {
      EXPECT_EQ(numeric_rank(projector_sym(n, N).matrix), binom(N + n - 1, n)) << N << " " << n;
      EXPECT_EQ(numeric_rank(projector_antisym(n, N).matrix), binom(N, n)) << N << " " << n;
    }
}

TEST(Projectors, IdempotentOrthogonalEquivariant) {
  for (auto [N, n] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}}) {
    const Mat S = projector_sym(n, N).matrix, A = projector_antisym(n, N).matrix;
    EXPECT_LT((S * S - S).norm(), 1e-12);
    EXPECT_LT((A * A - A).norm(), 1e-12);
    EXPECT_LT((S * A).norm(), 1e-12);
    for (const auto& s : all_permutations(n)) {
      const Mat P = permutation_operator(s, N).matrix;
      EXPECT_LT((P * S - S * P).norm(), 1e-12);
      EXPECT_LT((P * A - A * P).norm(), 1e-12);
    }
  }
}

TEST(SubspaceBases, OrthonormalAndSpanning) {
  for (auto [N, n] : std::vector<std::pair<int, int>>{{2, 2}, {2, 4}, {3, 3}, {3, 2}, {4, 2}}) {
    const auto s = sym_basis(n, N);
    const auto a = antisym_basis(n, N);
    EXPECT_EQ(s.embedding.cols(), binom(N + n - 1, n));
    EXPECT_EQ(a.embedding.cols(), binom(N, n));
    EXPECT_TRUE((s.embedding.adjoint() * s.embedding).isIdentity(1e-12));
    EXPECT_LT((s.embedding * s.embedding.adjoint() - projector_sym(n, N).matrix).norm(), 1e-12);
    if (a.embedding.cols()) {
      EXPECT_TRUE((a.embedding.adjoint() * a.embedding).isIdentity(1e-12));
      EXPECT_LT((a.embedding * a.embedding.adjoint() - projector_antisym(n, N).matrix).norm(), 1e-12);
    }
    // declared weights agree with the weights of the supporting basis tensors
    for (int c = 0; c < s.embedding.cols(); ++c)
      for (int f = 0; f < s.embedding.rows(); ++f)
        if (std::abs(s.embedding(f, c)) > 0) {
          EXPECT_EQ(basis_weight(multi_index(f, N, n), N), s.space.weights[c]);
        }
  }
}

TEST(NumericRank, Basics) {
  EXPECT_EQ(numeric_rank(Mat::Identity(4, 4)), 4);
  EXPECT_EQ(numeric_rank(Mat::Zero(4, 4)), 0);
  EXPECT_EQ(numeric_rank(Mat::Constant(3, 3, 1e-20), 1e-7, 1.0), 0);
}

TEST(SameColumnSpace, InvariantUnderRightMultiplication) {
  Eigen::MatrixXd ar = Eigen::MatrixXd::Random(6, 3), gr = Eigen::MatrixXd::Random(3, 3);
  const Mat a = ar.cast<Complex>(), g = gr.cast<Complex>() + Mat::Identity(3, 3) * 3.0;
  EXPECT_TRUE(same_column_space(a, a * g));
  Mat b = a;
  b.col(0) = Eigen::VectorXd::Random(6).cast<Complex>();
  EXPECT_FALSE(same_column_space(a, b));
}

TEST(ApplyLocal, MatchesBruteForceEmbedding) {
  const int N = 2, n = 4;
  Eigen::MatrixXd r = Eigen::MatrixXd::Random(N * N, N * N);
  const Mat base = r.cast<Complex>();
  auto op = [&](const std::vector<int>& w) {
    Mat m = base;
    for (int j = 0; j < N; ++j) m *= Complex(1.0 + 0.3 * w[j], 0.1 * j * w[j]);
    return m;
  };
  for (auto [acting, shift] : std::vector<std::pair<std::vector<int>, std::vector<int>>>{
           {{0, 1}, {2, 3}}, {{2, 0}, {1}}, {{3, 1}, {0, 2}}, {{1, 2}, {}}}) {
    const Mat ref = oracle::embed(N, n, acting, shift, op);
    const Mat got = embed_local(power_layout(N, n), acting, shift, [&](const Weight& w) { return op(w.counts); });
    EXPECT_LT((got - ref).norm(), 1e-14);
  }
}

TEST(GradedOperator, OffWeightNorm) {
  GradedOperator g{tensor_power_space(2, 2), Mat::Identity(4, 4)};
  EXPECT_EQ(g.off_weight_norm(), 0.0);
  g.matrix(0, 1) = 0.5;
  EXPECT_EQ(g.off_weight_norm(), 0.5);
  g.matrix(0, 1) = 0.0;
  g.matrix(1, 2) = 0.25;  // e1e2 and e2e1 share a weight
  EXPECT_EQ(g.off_weight_norm(), 0.0);
}

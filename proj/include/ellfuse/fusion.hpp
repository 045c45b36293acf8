#pragma once

// Diagram calculus for products of R-matrices and the fusion operators
// W_n, W^S_n, W^wedge_n.
//
// A diagram on n lines is a word in adjacent transpositions s_1..s_{n-1}
// (1-based letters, bottom crossing first). Line l starts at position l and
// acts on tensor factor l. The crossing s_p swaps the lines at positions p-1
// and p (0-based); if those are lines j (left) and k (right) it contributes
//
//   R(z_j - z_k, lambda - gamma * sum_{l left of the crossing} h^{(l)})^{(jk)}
//
// and later crossings multiply from the left.

#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rmatrix.hpp"
#include "tensorspace.hpp"

namespace ellfuse {

struct Diagram {
  int n = 0;
  std::vector<int> word;  // letters in 1..n-1

  void validate() const {
    if (n < 0) throw std::invalid_argument("Diagram: negative line count");
    for (int p : word)
      if (p < 1 || p > n - 1) throw std::invalid_argument("Diagram: letter out of range");
  }

  // result[l] = final position of line l
  Permutation permutation() const {
    validate();
    std::vector<int> arr(static_cast<std::size_t>(n));
    std::iota(arr.begin(), arr.end(), 0);
    for (int p : word) std::swap(arr[static_cast<std::size_t>(p - 1)], arr[static_cast<std::size_t>(p)]);
    return inverse_perm(arr);
  }

  // every pair of lines crosses exactly once
  bool admissible() const {
    return static_cast<int>(word.size()) == n * (n - 1) / 2 && permutation() == reversal(n);
  }
};

// All reduced words of the permutation (final position of each line).
inline std::vector<std::vector<int>> reduced_words(const Permutation& target) {
  if (!is_permutation(target)) throw std::invalid_argument("reduced_words: not a permutation");
  const int n = static_cast<int>(target.size());
  std::vector<std::vector<int>> out;
  std::vector<int> arr(static_cast<std::size_t>(n)), word;
  std::iota(arr.begin(), arr.end(), 0);
  std::function<void()> dfs = [&]() {
    bool done = true;
    for (int p = 0; p + 1 < n; ++p) {
      const int a = arr[static_cast<std::size_t>(p)], b = arr[static_cast<std::size_t>(p + 1)];
      if (target[static_cast<std::size_t>(a)] > target[static_cast<std::size_t>(b)]) {
        done = false;
        std::swap(arr[static_cast<std::size_t>(p)], arr[static_cast<std::size_t>(p + 1)]);
        word.push_back(p + 1);
        dfs();
        word.pop_back();
        std::swap(arr[static_cast<std::size_t>(p)], arr[static_cast<std::size_t>(p + 1)]);
      }
    }
    if (done) out.push_back(word);
  };
  dfs();
  return out;
}

// Crossing evaluator: (left line j, right line k, shifted lambda) -> N^2 x N^2 matrix.
using CrossingFn = std::function<Mat(int j, int k, const WeightVector& lambda)>;

// Product over the crossings of D applied to x (identity when x is empty).
inline Mat eval_diagram_with(const Diagram& d, const WeightVector& lambda, const ModelParams& p,
                             const CrossingFn& crossing, const Mat& x = Mat()) {
  d.validate();
  const int N = p.N;
  const Layout layout = power_layout(N, d.n);
  const int D = ipow(N, d.n);
  Mat result = x.size() ? x : Mat(Mat::Identity(D, D));
  std::vector<int> arr(static_cast<std::size_t>(d.n));
  std::iota(arr.begin(), arr.end(), 0);
  for (int letter : d.word) {
    const int pos = letter - 1;
    const int j = arr[static_cast<std::size_t>(pos)], k = arr[static_cast<std::size_t>(pos + 1)];
    const std::vector<int> left(arr.begin(), arr.begin() + pos);
    result = apply_local(layout, {j, k}, left,
                         [&](const Weight& mu) { return crossing(j, k, shift_lambda(lambda, mu, p.gamma)); },
                         result);
    std::swap(arr[static_cast<std::size_t>(pos)], arr[static_cast<std::size_t>(pos + 1)]);
  }
  return result;
}

inline GradedOperator eval_diagram(const Diagram& d, const std::vector<Complex>& z,
                                   const WeightVector& lambda, const ModelParams& p) {
  if (static_cast<int>(z.size()) != d.n) throw std::invalid_argument("eval_diagram: need n spectral parameters");
  Mat m = eval_diagram_with(d, lambda, p, [&](int j, int k, const WeightVector& l) {
    return build_r(z[static_cast<std::size_t>(j)] - z[static_cast<std::size_t>(k)], l, p).matrix;
  });
  return {tensor_power_space(p.N, d.n), std::move(m)};
}

// Word of the recursion W_{n} = R^{(12)} ... R^{(1n)} W_{n-1}^{(2..n)}:
// W_2 = (1), W_{n+1} = (W_n shifted by one) ++ (1, 2, ..., n).
inline std::vector<int> recursion_word(int n) {
  std::vector<int> w;
  for (int m = 2; m <= n; ++m) {
    for (int& l : w) ++l;
    for (int p = 1; p < m; ++p) w.push_back(p);
  }
  return w;
}

// W_n(z, lambda) by the recursion
//   W_n = R(z_1-z_2, lambda - gamma sum_{j>=3} h^{(j)})^{(12)} ... R(z_1-z_n, lambda)^{(1n)}
//         * W_{n-1}(z_2..z_n, lambda - gamma h^{(1)})^{(2..n)}.
inline GradedOperator w_n(const std::vector<Complex>& z, const WeightVector& lambda,
                          const ModelParams& p) {
  const int n = static_cast<int>(z.size());
  const int N = p.N;
  if (n == 0) return {trivial_space(N), Mat::Identity(1, 1)};
  if (n == 1) return {vector_space(N), Mat::Identity(N, N)};
  const Layout layout = power_layout(N, n);
  const std::vector<Complex> tail(z.begin() + 1, z.end());
  std::vector<int> rest(static_cast<std::size_t>(n - 1));
  std::iota(rest.begin(), rest.end(), 1);
  Mat x = embed_local(layout, rest, {0}, [&](const Weight& mu) {
    return w_n(tail, shift_lambda(lambda, mu, p.gamma), p).matrix;
  });
  for (int k = n - 1; k >= 1; --k) {
    std::vector<int> right;
    for (int l = k + 1; l < n; ++l) right.push_back(l);
    x = apply_local(layout, {0, k}, right, [&](const Weight& mu) {
      return build_r(z[0] - z[static_cast<std::size_t>(k)], shift_lambda(lambda, mu, p.gamma), p).matrix;
    }, x);
  }
  return {tensor_power_space(N, n), std::move(x)};
}

inline std::vector<Complex> z_sym(int n, Complex gamma) {
  std::vector<Complex> z;
  for (int k = 0; k < n; ++k) z.push_back(static_cast<double>(k) * gamma);
  return z;
}

inline std::vector<Complex> z_ext(int n, Complex gamma) {
  std::vector<Complex> z;
  for (int k = 0; k < n; ++k) z.push_back(static_cast<double>(n - 1 - k) * gamma);
  return z;
}

inline GradedOperator w_sym(int n, const WeightVector& lambda, const ModelParams& p) {
  return w_n(z_sym(n, p.gamma), lambda, p);
}

namespace detail {

// Crossing of lines j < k at z_ext spacing (k-j) gamma: residue at spacing 1.
inline Mat ext_crossing(int j, int k, const WeightVector& l, const ModelParams& p) {
  const int s = k - j;
  if (s == 1) return build_r_reg(l, p).matrix;
  return build_r(static_cast<double>(s) * p.gamma, l, p).matrix;
}

}  // namespace detail

// W^wedge_n(lambda): the diagram product at z_ext with the residue taken at
// each of the n-1 crossings of spacing exactly gamma, with the tensor factors
// relabelled in reverse order.
inline GradedOperator w_ext(int n, const WeightVector& lambda, const ModelParams& p) {
  const int N = p.N;
  const Diagram d{n, recursion_word(n)};
  const Mat rev = permutation_operator(reversal(n), N).matrix;
  Mat inner = eval_diagram_with(d, lambda, p, [&](int j, int k, const WeightVector& l) {
    return detail::ext_crossing(j, k, l, p);
  });
  return {tensor_power_space(N, n), rev * inner * rev};
}

// Product of the crossing-factor norms of w_ext: the natural size of W^wedge_n,
// used as the reference for numeric rank since W^wedge_n vanishes for n > N.
inline double w_ext_scale(int n, const WeightVector& lambda, const ModelParams& p) {
  const Diagram d{n, recursion_word(n)};
  double s = 1.0;
  std::vector<int> arr(static_cast<std::size_t>(n));
  std::iota(arr.begin(), arr.end(), 0);
  for (int letter : d.word) {
    const int j = arr[static_cast<std::size_t>(letter - 1)], k = arr[static_cast<std::size_t>(letter)];
    s *= detail::ext_crossing(j, k, lambda, p).operatorNorm();
    std::swap(arr[static_cast<std::size_t>(letter - 1)], arr[static_cast<std::size_t>(letter)]);
  }
  return s;
}

}  // namespace ellfuse

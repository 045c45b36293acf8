#pragma once

// Weight-graded dense tensor algebra.
//
// Conventions
//  - Factor indices and basis labels are 0-based. Basis tensors of a tensor
//    product are ordered lexicographically with the first factor as the most
//    significant digit.
//  - A Weight counts how often each omega_j occurs; WeightVector is a point
//    lambda in C^N.
//  - A permutation sigma is stored as sigma[k] = position that factor k moves to.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "theta.hpp"

namespace ellfuse {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using WeightVector = Eigen::VectorXcd;

struct Weight {
  std::vector<int> counts;

  Weight() = default;
  explicit Weight(int N) : counts(static_cast<std::size_t>(N), 0) {}
  explicit Weight(std::vector<int> c) : counts(std::move(c)) {}

  int size() const { return static_cast<int>(counts.size()); }
  int total() const { return std::accumulate(counts.begin(), counts.end(), 0); }
  int operator[](int j) const { return counts[static_cast<std::size_t>(j)]; }
  int& operator[](int j) { return counts[static_cast<std::size_t>(j)]; }

  Weight& operator+=(const Weight& o) {
    if (o.size() != size()) throw std::invalid_argument("Weight: length mismatch");
    for (int j = 0; j < size(); ++j) (*this)[j] += o[j];
    return *this;
  }
  friend Weight operator+(Weight a, const Weight& b) { return a += b; }
  auto operator<=>(const Weight&) const = default;
  bool operator==(const Weight&) const = default;

  static Weight unit(int N, int j) {
    Weight w(N);
    w[j] = 1;
    return w;
  }
  // every count equal: the zero weight of sl_N
  bool balanced() const {
    return std::adjacent_find(counts.begin(), counts.end(), std::not_equal_to<>()) ==
           counts.end();
  }
  std::string str() const {
    std::string s = "(";
    for (int j = 0; j < size(); ++j) s += (j ? "," : "") + std::to_string(counts[j]);
    return s + ")";
  }
};

inline Weight basis_weight(const std::vector<int>& multi_index, int N) {
  Weight w(N);
  for (int i : multi_index) {
    if (i < 0 || i >= N) throw std::out_of_range("basis_weight: factor index out of range");
    ++w[i];
  }
  return w;
}

inline WeightVector shift_lambda(const WeightVector& lambda, const Weight& mu, Complex gamma) {
  if (lambda.size() != mu.size())
    throw std::invalid_argument("shift_lambda: length mismatch");
  WeightVector out = lambda;
  for (int j = 0; j < mu.size(); ++j) out[j] -= gamma * static_cast<double>(mu[j]);
  return out;
}

// ---------------------------------------------------------------------------
// graded spaces

struct GradedSpace {
  int N = 0;
  std::vector<Weight> weights;  // one per basis vector

  int dim() const { return static_cast<int>(weights.size()); }
  std::vector<int> indices_of(const Weight& mu) const {
    std::vector<int> out;
    for (int k = 0; k < dim(); ++k)
      if (weights[static_cast<std::size_t>(k)] == mu) out.push_back(k);
    return out;
  }
  std::vector<int> balanced_indices() const {
    std::vector<int> out;
    for (int k = 0; k < dim(); ++k)
      if (weights[static_cast<std::size_t>(k)].balanced()) out.push_back(k);
    return out;
  }
};

inline int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

inline std::vector<int> multi_index(int flat, int N, int n) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int k = n - 1; k >= 0; --k) {
    idx[static_cast<std::size_t>(k)] = flat % N;
    flat /= N;
  }
  return idx;
}

inline int flat_index(const std::vector<int>& idx, int N) {
  int f = 0;
  for (int i : idx) f = f * N + i;
  return f;
}

inline GradedSpace vector_space(int N) {
  GradedSpace s{N, {}};
  for (int j = 0; j < N; ++j) s.weights.push_back(Weight::unit(N, j));
  return s;
}

inline GradedSpace trivial_space(int N) { return GradedSpace{N, {Weight(N)}}; }

inline GradedSpace tensor_space(const GradedSpace& a, const GradedSpace& b) {
  if (a.N != b.N) throw std::invalid_argument("tensor_space: N mismatch");
  GradedSpace s{a.N, {}};
  s.weights.reserve(static_cast<std::size_t>(a.dim() * b.dim()));
  for (const auto& wa : a.weights)
    for (const auto& wb : b.weights) s.weights.push_back(wa + wb);
  return s;
}

inline GradedSpace tensor_power_space(int N, int n) {
  GradedSpace s = trivial_space(N);
  for (int k = 0; k < n; ++k) s = tensor_space(s, vector_space(N));
  return s;
}

struct GradedOperator {
  GradedSpace space;
  Mat matrix;

  int N() const { return space.N; }
  // largest entry connecting basis vectors of different weight
  double off_weight_norm() const {
    double m = 0.0;
    for (int r = 0; r < matrix.rows(); ++r)
      for (int c = 0; c < matrix.cols(); ++c)
        if (space.weights[static_cast<std::size_t>(r)] != space.weights[static_cast<std::size_t>(c)])
          m = std::max(m, std::abs(matrix(r, c)));
    return m;
  }
};

inline double off_weight_norm(const Mat& m, const GradedSpace& s) {
  return GradedOperator{s, m}.off_weight_norm();
}

// ---------------------------------------------------------------------------
// permutations

using Permutation = std::vector<int>;

inline bool is_permutation(const Permutation& s) {
  std::vector<char> seen(s.size(), 0);
  for (int v : s) {
    if (v < 0 || v >= static_cast<int>(s.size()) || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return true;
}

// (a o b)[k] = a[b[k]]
inline Permutation compose_perm(const Permutation& a, const Permutation& b) {
  Permutation r(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) r[k] = a[static_cast<std::size_t>(b[k])];
  return r;
}

inline Permutation inverse_perm(const Permutation& s) {
  Permutation r(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) r[static_cast<std::size_t>(s[k])] = static_cast<int>(k);
  return r;
}

inline int permutation_sign(const Permutation& s) {
  int sign = 1;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (s[i] > s[j]) sign = -sign;
  return sign;
}

inline std::vector<Permutation> all_permutations(int n) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<Permutation> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline Permutation transposition(int n, int a, int b) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::swap(p[static_cast<std::size_t>(a)], p[static_cast<std::size_t>(b)]);
  return p;
}

inline Permutation reversal(int n) {
  Permutation p(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) p[static_cast<std::size_t>(k)] = n - 1 - k;
  return p;
}

inline GradedOperator permutation_operator(const Permutation& sigma, int N) {
  if (!is_permutation(sigma)) throw std::invalid_argument("permutation_operator: not a bijection");
  const int n = static_cast<int>(sigma.size());
  const int D = ipow(N, n);
  Mat m = Mat::Zero(D, D);
  std::vector<int> row(static_cast<std::size_t>(n));
  for (int c = 0; c < D; ++c) {
    auto col = multi_index(c, N, n);
    for (int k = 0; k < n; ++k) row[static_cast<std::size_t>(sigma[k])] = col[static_cast<std::size_t>(k)];
    m(flat_index(row, N), c) = 1.0;
  }
  return {tensor_power_space(N, n), std::move(m)};
}

inline GradedOperator flip_operator(int N) { return permutation_operator({1, 0}, N); }

inline GradedOperator projector_sym(int n, int N) {
  GradedOperator acc{tensor_power_space(N, n), Mat::Zero(ipow(N, n), ipow(N, n))};
  auto perms = all_permutations(n);
  for (const auto& p : perms) acc.matrix += permutation_operator(p, N).matrix;
  acc.matrix /= static_cast<double>(perms.size());
  return acc;
}

inline GradedOperator projector_antisym(int n, int N) {
  GradedOperator acc{tensor_power_space(N, n), Mat::Zero(ipow(N, n), ipow(N, n))};
  auto perms = all_permutations(n);
  for (const auto& p : perms)
    acc.matrix += static_cast<double>(permutation_sign(p)) * permutation_operator(p, N).matrix;
  acc.matrix /= static_cast<double>(perms.size());
  return acc;
}

// Orthonormal basis of a subspace, columns of `embedding`, one Weight per column.
struct SubspaceBasis {
  Mat embedding;
  GradedSpace space;
};

// Normalized sums over the distinct arrangements of each multiset.
inline SubspaceBasis sym_basis(int n, int N) {
  const int D = ipow(N, n);
  std::map<std::vector<int>, int> column_of;  // sorted multiset -> column
  std::vector<std::vector<int>> members;
  for (int f = 0; f < D; ++f) {
    auto idx = multi_index(f, N, n);
    std::sort(idx.begin(), idx.end());
    auto [it, inserted] = column_of.try_emplace(idx, static_cast<int>(column_of.size()));
    if (inserted) members.emplace_back();
    members[static_cast<std::size_t>(it->second)].push_back(f);
  }
  // column order follows the sorted multisets
  SubspaceBasis b{Mat::Zero(D, static_cast<int>(column_of.size())), GradedSpace{N, {}}};
  int col = 0;
  for (const auto& [ms, orig] : column_of) {
    const auto& fs = members[static_cast<std::size_t>(orig)];
    const double v = 1.0 / std::sqrt(static_cast<double>(fs.size()));
    for (int f : fs) b.embedding(f, col) = v;
    b.space.weights.push_back(basis_weight(ms, N));
    ++col;
  }
  return b;
}

// Normalized antisymmetrizations of e_{s_1} x ... x e_{s_n}, s_1 < ... < s_n.
inline SubspaceBasis antisym_basis(int n, int N) {
  const int D = ipow(N, n);
  SubspaceBasis b{Mat::Zero(D, 0), GradedSpace{N, {}}};
  if (n > N) return b;
  std::vector<int> mask(static_cast<std::size_t>(N), 0);
  std::fill(mask.begin(), mask.begin() + n, 1);
  std::vector<std::vector<int>> subsets;
  do {
    std::vector<int> s;
    for (int j = 0; j < N; ++j)
      if (mask[static_cast<std::size_t>(j)]) s.push_back(j);
    subsets.push_back(s);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  std::sort(subsets.begin(), subsets.end());
  b.embedding = Mat::Zero(D, static_cast<int>(subsets.size()));
  const auto perms = all_permutations(n);
  const double v = 1.0 / std::sqrt(static_cast<double>(perms.size()));
  for (std::size_t c = 0; c < subsets.size(); ++c) {
    for (const auto& p : perms) {
      std::vector<int> idx(static_cast<std::size_t>(n));
      for (int q = 0; q < n; ++q) idx[static_cast<std::size_t>(q)] = subsets[c][static_cast<std::size_t>(p[q])];
      b.embedding(flat_index(idx, N), static_cast<int>(c)) = v * permutation_sign(p);
    }
    b.space.weights.push_back(basis_weight(subsets[c], N));
  }
  return b;
}

// ---------------------------------------------------------------------------
// rank and subspace comparison

// Singular values above rel_tol * scale count, where scale is the largest
// singular value unless a positive reference scale is supplied. A reference
// is needed for operators that are legitimately zero up to roundoff.
inline int numeric_rank(const Mat& a, double rel_tol = 1e-7, double reference = 0.0) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  const double scale = reference > 0.0 ? reference : (s.size() ? s[0] : 0.0);
  if (!(scale > 0.0)) return 0;
  int r = 0;
  for (int k = 0; k < s.size(); ++k)
    if (s[k] > rel_tol * scale) ++r;
  return r;
}

// Orthonormal basis of the numerical column space.
inline Mat column_basis(const Mat& a, double rel_tol = 1e-7) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
  const int r = numeric_rank(a, rel_tol);
  return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the numerical null space.
inline Mat null_basis(const Mat& a, double rel_tol = 1e-7, double reference = 0.0) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const int r = numeric_rank(a, rel_tol, reference);
  return svd.matrixV().rightCols(a.cols() - r);
}

inline bool same_column_space(const Mat& a, const Mat& b, double rel_tol = 1e-7) {
  if (a.rows() != b.rows()) throw std::invalid_argument("same_column_space: row mismatch");
  if (numeric_rank(a, rel_tol) != numeric_rank(b, rel_tol)) return false;
  const Mat ua = column_basis(a, rel_tol);
  const Mat resid = b - ua * (ua.adjoint() * b);
  const double scale = std::max(b.norm(), 1e-300);
  return resid.norm() <= rel_tol * scale;
}

// ---------------------------------------------------------------------------
// local operators on tensor products with dynamical shifts
//
// A layout is an ordered list of graded factors. apply_local computes G*X,
// where G acts on the `acting` factors (in the listed order, first most
// significant) by local_op(mu), with mu the total weight carried by the
// `shift` factors. This realizes expressions like R(z, lambda - gamma h^{(3)})^{(12)}
// by blocking over the basis states of the shift factors. local_op is called
// once per distinct mu.

using Layout = std::vector<GradedSpace>;

namespace detail {

struct LayoutIndex {
  std::vector<int> dims, strides;
  int total = 1;
  explicit LayoutIndex(const Layout& L) {
    const std::size_t n = L.size();
    dims.resize(n);
    strides.resize(n);
    for (std::size_t f = n; f-- > 0;) {
      dims[f] = L[f].dim();
      strides[f] = total;
      total *= dims[f];
    }
  }
};

// Enumerates digit vectors for the given factor list, last factor fastest.
template <typename F>
void for_each_config(const std::vector<int>& factors, const std::vector<int>& dims, F&& f) {
  std::vector<int> digits(factors.size(), 0);
  while (true) {
    f(digits);
    int pos = static_cast<int>(factors.size()) - 1;
    while (pos >= 0) {
      auto& d = digits[static_cast<std::size_t>(pos)];
      if (++d < dims[static_cast<std::size_t>(factors[static_cast<std::size_t>(pos)])]) break;
      d = 0;
      --pos;
    }
    if (pos < 0) return;
  }
}

}  // namespace detail

inline int layout_dim(const Layout& L) { return detail::LayoutIndex(L).total; }

inline GradedSpace layout_space(const Layout& L) {
  if (L.empty()) throw std::invalid_argument("layout_space: empty layout");
  GradedSpace s = trivial_space(L.front().N);
  for (const auto& f : L) s = tensor_space(s, f);
  return s;
}

template <typename LocalOp>
Mat apply_local(const Layout& layout, const std::vector<int>& acting,
                const std::vector<int>& shift, LocalOp&& local_op, const Mat& x) {
  const detail::LayoutIndex li(layout);
  if (x.rows() != li.total) throw std::invalid_argument("apply_local: row mismatch");
  const int nf = static_cast<int>(layout.size());
  std::vector<char> role(static_cast<std::size_t>(nf), 0);  // 1 acting, 2 shift
  for (int f : acting) {
    if (f < 0 || f >= nf || role[static_cast<std::size_t>(f)])
      throw std::invalid_argument("apply_local: bad acting factor list");
    role[static_cast<std::size_t>(f)] = 1;
  }
  for (int f : shift) {
    if (f < 0 || f >= nf || role[static_cast<std::size_t>(f)] == 1)
      throw std::invalid_argument("apply_local: shift factor must not act");
  }
  std::vector<int> rest;
  for (int f = 0; f < nf; ++f)
    if (role[static_cast<std::size_t>(f)] != 1) rest.push_back(f);

  // offsets of the acting configurations inside one rest block
  std::vector<int> local_offsets;
  detail::for_each_config(acting, li.dims, [&](const std::vector<int>& d) {
    int off = 0;
    for (std::size_t q = 0; q < acting.size(); ++q) off += d[q] * li.strides[static_cast<std::size_t>(acting[q])];
    local_offsets.push_back(off);
  });
  const int dl = static_cast<int>(local_offsets.size());
  const int N = layout.empty() ? 0 : layout.front().N;

  std::map<Weight, Mat> cache;
  Mat y(x.rows(), x.cols());
  Mat block(dl, x.cols());
  detail::for_each_config(rest, li.dims, [&](const std::vector<int>& d) {
    int base = 0;
    Weight mu(N);
    for (std::size_t q = 0; q < rest.size(); ++q) {
      const int f = rest[q];
      base += d[q] * li.strides[static_cast<std::size_t>(f)];
    }
    for (int f : shift) {
      const auto pos = std::find(rest.begin(), rest.end(), f) - rest.begin();
      mu += layout[static_cast<std::size_t>(f)].weights[static_cast<std::size_t>(d[static_cast<std::size_t>(pos)])];
    }
    auto it = cache.find(mu);
    if (it == cache.end()) {
      Mat op = local_op(mu);
      if (op.rows() != dl || op.cols() != dl)
        throw std::invalid_argument("apply_local: local operator has wrong size");
      it = cache.emplace(mu, std::move(op)).first;
    }
    for (int i = 0; i < dl; ++i) block.row(i) = x.row(base + local_offsets[static_cast<std::size_t>(i)]);
    const Mat out = it->second * block;
    for (int i = 0; i < dl; ++i) y.row(base + local_offsets[static_cast<std::size_t>(i)]) = out.row(i);
  });
  return y;
}

template <typename LocalOp>
Mat embed_local(const Layout& layout, const std::vector<int>& acting,
                const std::vector<int>& shift, LocalOp&& local_op) {
  const int D = layout_dim(layout);
  return apply_local(layout, acting, shift, std::forward<LocalOp>(local_op), Mat::Identity(D, D));
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Layout power_layout(int N, int n) { return Layout(static_cast<std::size_t>(n), vector_space(N)); }

}  // namespace ellfuse

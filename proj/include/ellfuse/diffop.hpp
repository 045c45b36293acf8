#pragma once

// Difference operators in lambda with matrix coefficients,
//   (A f)(lambda) = sum_mu A(mu, lambda) f(lambda - gamma mu),   mu in Z_{>=0}^N.
// Coefficients are evaluated lazily; all coefficients at one lambda come from a
// single evaluator call. Composition:
//   (A o B)(rho, lambda) = sum_{mu+nu=rho} A(mu, lambda) B(nu, lambda - gamma mu).

#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rmatrix.hpp"
#include "tensorspace.hpp"

namespace ellfuse {

class DifferenceOperator {
 public:
  using Coeffs = std::map<Weight, Mat>;
  using Evaluator = std::function<Coeffs(const WeightVector&)>;

  DifferenceOperator(int N, int dim, Complex gamma, std::vector<Weight> shifts, Evaluator ev)
      : impl_(std::make_shared<const Impl>(Impl{N, dim, gamma, normalize(std::move(shifts), N), std::move(ev)})) {}

  int N() const { return impl_->N; }
  int dim() const { return impl_->dim; }
  Complex gamma() const { return impl_->gamma; }
  const std::vector<Weight>& shifts() const { return impl_->shifts; }

  // every declared shift is present in the result (missing ones are zero)
  Coeffs coefficients(const WeightVector& lambda) const {
    if (lambda.size() != N()) throw std::invalid_argument("DifferenceOperator: lambda length");
    Coeffs c = impl_->eval(lambda);
    for (const auto& s : impl_->shifts)
      if (!c.count(s)) c.emplace(s, Mat::Zero(dim(), dim()));
    return c;
  }
  Mat coeff(const Weight& mu, const WeightVector& lambda) const {
    auto c = coefficients(lambda);
    auto it = c.find(mu);
    return it == c.end() ? Mat(Mat::Zero(dim(), dim())) : it->second;
  }

  // Same operator with coefficient evaluations cached by the exact bits of lambda.
  DifferenceOperator memoized() const {
    struct Cache {
      std::mutex mu;
      std::map<std::vector<std::uint64_t>, Coeffs> table;
    };
    auto cache = std::make_shared<Cache>();
    auto inner = impl_->eval;
    return DifferenceOperator(N(), dim(), gamma(), shifts(), [cache, inner](const WeightVector& l) {
      std::vector<std::uint64_t> key(static_cast<std::size_t>(2 * l.size()));
      for (int j = 0; j < l.size(); ++j) {
        const double re = l[j].real(), im = l[j].imag();
        std::memcpy(&key[static_cast<std::size_t>(2 * j)], &re, sizeof re);
        std::memcpy(&key[static_cast<std::size_t>(2 * j + 1)], &im, sizeof im);
      }
      {
        std::lock_guard<std::mutex> g(cache->mu);
        if (auto it = cache->table.find(key); it != cache->table.end()) return it->second;
      }
      Coeffs c = inner(l);
      std::lock_guard<std::mutex> g(cache->mu);
      cache->table.emplace(key, c);
      return c;
    });
  }

 private:
  struct Impl {
    int N;
    int dim;
    Complex gamma;
    std::vector<Weight> shifts;
    Evaluator eval;
  };
  static std::vector<Weight> normalize(std::vector<Weight> s, int N) {
    for (const auto& w : s) {
      if (w.size() != N) throw std::invalid_argument("DifferenceOperator: shift length");
      for (int c : w.counts)
        if (c < 0) throw std::invalid_argument("DifferenceOperator: shifts must be non-negative");
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  }
  std::shared_ptr<const Impl> impl_;
};

inline void check_compatible(const DifferenceOperator& a, const DifferenceOperator& b) {
  if (a.N() != b.N() || a.dim() != b.dim() || a.gamma() != b.gamma())
    throw std::invalid_argument("difference operators are not compatible");
}

// Gamma_mu with identity coefficient
inline DifferenceOperator shift_operator(const Weight& mu, int dim, Complex gamma) {
  return DifferenceOperator(mu.size(), dim, gamma, {mu}, [mu, dim](const WeightVector&) {
    return DifferenceOperator::Coeffs{{mu, Mat::Identity(dim, dim)}};
  });
}

// Single shift with the given coefficient evaluator
inline DifferenceOperator single_shift(const Weight& mu, int dim, Complex gamma,
                                       std::function<Mat(const WeightVector&)> c) {
  return DifferenceOperator(mu.size(), dim, gamma, {mu}, [mu, c](const WeightVector& l) {
    return DifferenceOperator::Coeffs{{mu, c(l)}};
  });
}

inline DifferenceOperator compose(const DifferenceOperator& a, const DifferenceOperator& b) {
  check_compatible(a, b);
  std::set<Weight> s;
  for (const auto& m : a.shifts())
    for (const auto& n : b.shifts()) s.insert(m + n);
  return DifferenceOperator(a.N(), a.dim(), a.gamma(), {s.begin(), s.end()}, [a, b](const WeightVector& l) {
    DifferenceOperator::Coeffs out;
    for (const auto& [mu, ca] : a.coefficients(l)) {
      const auto cb = b.coefficients(shift_lambda(l, mu, a.gamma()));
      for (const auto& [nu, c] : cb) {
        const Weight rho = mu + nu;
        auto it = out.find(rho);
        if (it == out.end()) out.emplace(rho, ca * c);
        else it->second += ca * c;
      }
    }
    return out;
  });
}

// ca * A + cb * B
inline DifferenceOperator linear_combination(Complex ca, const DifferenceOperator& a, Complex cb,
                                             const DifferenceOperator& b) {
  check_compatible(a, b);
  std::set<Weight> s(a.shifts().begin(), a.shifts().end());
  s.insert(b.shifts().begin(), b.shifts().end());
  return DifferenceOperator(a.N(), a.dim(), a.gamma(), {s.begin(), s.end()}, [=](const WeightVector& l) {
    DifferenceOperator::Coeffs out;
    for (const auto& [mu, c] : a.coefficients(l)) out.emplace(mu, ca * c);
    for (const auto& [mu, c] : b.coefficients(l)) {
      auto it = out.find(mu);
      if (it == out.end()) out.emplace(mu, cb * c);
      else it->second += cb * c;
    }
    return out;
  });
}

inline DifferenceOperator commutator(const DifferenceOperator& a, const DifferenceOperator& b) {
  return linear_combination(1.0, compose(a, b), -1.0, compose(b, a));
}

// sigma o A o sigma^{-1} with (sigma f)(lambda) = f(sigma^{-1} lambda):
// shift sigma(mu), coefficient A(mu, sigma^{-1} lambda).
inline DifferenceOperator sn_conjugate(const DifferenceOperator& a, const Permutation& sigma) {
  if (static_cast<int>(sigma.size()) != a.N() || !is_permutation(sigma))
    throw std::invalid_argument("sn_conjugate: bad permutation");
  auto act = [sigma](const Weight& mu) {
    Weight out(mu.size());
    for (int i = 0; i < mu.size(); ++i) out[sigma[static_cast<std::size_t>(i)]] = mu[i];
    return out;
  };
  std::vector<Weight> s;
  for (const auto& mu : a.shifts()) s.push_back(act(mu));
  const Permutation inv = inverse_perm(sigma);
  return DifferenceOperator(a.N(), a.dim(), a.gamma(), s, [a, act, inv](const WeightVector& l) {
    DifferenceOperator::Coeffs out;
    for (const auto& [mu, c] : a.coefficients(permute_lambda(l, inv))) out.emplace(act(mu), c);
    return out;
  });
}

// (A f)(lambda) for a vector-valued f
inline Vec apply(const DifferenceOperator& a, const std::function<Vec(const WeightVector&)>& f,
                 const WeightVector& lambda) {
  Vec out = Vec::Zero(a.dim());
  for (const auto& [mu, c] : a.coefficients(lambda)) out += c * f(shift_lambda(lambda, mu, a.gamma()));
  return out;
}

// Largest coefficient entry over the given sample points.
inline double max_coefficient(const DifferenceOperator& a, const std::vector<WeightVector>& lambdas) {
  double m = 0.0;
  for (const auto& l : lambdas)
    for (const auto& [mu, c] : a.coefficients(l))
      if (c.size()) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

// Indicator weights of all m-subsets of {0..N-1}, in lexicographic order of subsets.
inline std::vector<std::vector<int>> subsets(int N, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == m) {
      out.push_back(cur);
      return;
    }
    for (int j = start; j < N; ++j) {
      cur.push_back(j);
      rec(j + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

inline Weight indicator(const std::vector<int>& J, int N) { return basis_weight(J, N); }

// prod_{j in J, k not in J} theta(lambda_j - lambda_k + gamma ell) / theta(lambda_j - lambda_k)
inline Complex ruijsenaars_coefficient(const std::vector<int>& J, int ell, const WeightVector& l,
                                       const ModelParams& p) {
  const int N = p.N;
  std::vector<char> in(static_cast<std::size_t>(N), 0);
  for (int j : J) in[static_cast<std::size_t>(j)] = 1;
  Complex c = 1.0;
  for (int j : J)
    for (int k = 0; k < N; ++k) {
      if (in[static_cast<std::size_t>(k)]) continue;
      const Complex a = l[j] - l[k];
      const Complex den = theta_eval(a, p.theta);
      if (std::abs(den) < kPoleThreshold) throw PoleError("ruijsenaars_m: non-generic lambda");
      c *= theta_eval(a + p.gamma * static_cast<double>(ell), p.theta) / den;
    }
  return c;
}

// M_m = sum_{|J|=m} prod_{j in J, k not in J} theta(l_j-l_k+gamma ell)/theta(l_j-l_k) prod_{j in J} Gamma_j
inline DifferenceOperator ruijsenaars_m(int m, int ell, const ModelParams& p) {
  if (m < 1 || m > p.N) throw std::invalid_argument("ruijsenaars_m: need 1 <= m <= N");
  if (ell < 0) throw std::invalid_argument("ruijsenaars_m: ell must be non-negative");
  const auto Js = subsets(p.N, m);
  std::vector<Weight> s;
  for (const auto& J : Js) s.push_back(indicator(J, p.N));
  return DifferenceOperator(p.N, 1, p.gamma, s, [Js, ell, p](const WeightVector& l) {
    DifferenceOperator::Coeffs out;
    for (const auto& J : Js)
      out.emplace(indicator(J, p.N), Mat::Constant(1, 1, ruijsenaars_coefficient(J, ell, l, p)));
    return out;
  });
}

// g_{N,ell}(lambda) = prod_{j<k} prod_{s=1}^{ell} theta(l_j-l_k+gamma s)/theta(l_j-l_k-gamma(s-1))
inline Complex g_function(int ell, const WeightVector& l, const ModelParams& p) {
  Complex g = 1.0;
  for (int j = 0; j < l.size(); ++j)
    for (int k = j + 1; k < l.size(); ++k)
      for (int s = 1; s <= ell; ++s)
        g *= theta_eval(l[j] - l[k] + p.gamma * static_cast<double>(s), p.theta) /
             theta_eval(l[j] - l[k] - p.gamma * static_cast<double>(s - 1), p.theta);
  return g;
}

}  // namespace ellfuse

// Acceptance run: one PASS/FAIL line per criterion, each with its tolerance and
// runtime budget. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ellfuse/verify.hpp"

using namespace ellfuse;
using namespace ellfuse::checks;

namespace {

ModelParams params(int N) {
  ModelParams p;
  p.N = N;
  return p;
}

struct Part {
  std::string what;
  double residual;
  double tol;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<std::vector<Part>()> run;
};

using Grid = std::vector<std::pair<int, int>>;
const Grid kFusionGrid{{2, 2}, {2, 3}, {2, 4}, {3, 2}, {3, 3}};
const Grid kIntertwiningGrid{{2, 2}, {2, 3}, {3, 2}};
const Grid kTransferGrid{{2, 1}, {2, 2}, {3, 1}};

std::string tag(const char* base, int a, int b) {
  return std::string(base) + "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

std::vector<Criterion> criteria() {
  return {
      {1, "dynamical Yang-Baxter equation", 5.0,
       [] {
         std::vector<Part> out;
         for (int N : {2, 3}) {
           Sampler s(1000 + N);
           out.push_back({"N=" + std::to_string(N), dybe(params(N), s, 50).residual, 1e-9});
         }
         return out;
       }},
      {2, "unitarity and S_N equivariance", 2.0,
       [] {
         std::vector<Part> out;
         for (int N : {2, 3}) {
           Sampler s(2000 + N);
           out.push_back({"unitarity N=" + std::to_string(N), unitarity(params(N), s, 50).residual, 1e-10});
           out.push_back({"equivariance N=" + std::to_string(N), equivariance(params(N), s, 50).residual, 1e-10});
         }
         return out;
       }},
      {3, "ranks and nullities of fusion operators", 30.0,
       [] {
         std::vector<Part> out;
         for (int N : {2, 3}) {
           Sampler s(3000 + N);
           out.push_back({"R(-gamma), R_reg N=" + std::to_string(N), rmatrix_ranks(params(N), s).residual, 0.0});
           out.push_back({"image R(-gamma) N=" + std::to_string(N), image_at_minus_gamma_check(params(N), s, 5).residual, 0.0});
         }
         for (auto [N, n] : kFusionGrid) {
           Sampler s(3100 + 10 * N + n);
           out.push_back({tag("W^S, W^ ", N, n), fusion_ranks(params(N), s, n).residual, 0.0});
         }
         return out;
       }},
      {4, "reduced words and admissible diagrams", 30.0,
       [] {
         std::vector<Part> out;
         for (int N : {2, 3})
           for (int n : {3, 4}) {
             Sampler s(4000 + 10 * N + n);
             out.push_back({tag("words ", N, n), word_independence(params(N), s, 5, n).residual, 1e-9});
           }
         for (int N : {2, 3}) {
           Sampler s(4100 + N);
           out.push_back({"W_4 N=" + std::to_string(N), admissible_diagrams(params(N), s, 5, 4).residual, 1e-9});
         }
         return out;
       }},
      {5, "intertwining of L and L' by W^S and W^", 60.0,
       [] {
         std::vector<Part> out;
         for (auto [N, n] : kIntertwiningGrid) {
           Sampler s(5000 + 10 * N + n);
           out.push_back({tag("", N, n), intertwining(params(N), s, 5, n).residual, 1e-9});
         }
         return out;
       }},
      {6, "fused L preserves C^N x S^n and C^N x J_n", 60.0,
       [] {
         std::vector<Part> out;
         for (auto [N, n] : kFusionGrid) {
           Sampler s(6000 + 10 * N + n);
           out.push_back({tag("", N, n), subspace_leakage(params(N), s, 5, n).residual, 1e-9});
         }
         return out;
       }},
      {7, "T(z) = theta ratio times M", 120.0,
       [] {
         std::vector<Part> out;
         for (auto [N, ell] : kTransferGrid) {
           Sampler s(7000 + 10 * N + ell);
           out.push_back({tag("", N, ell), transfer_equals_ruijsenaars(params(N), ell, s, 10).residual, 1e-8});
         }
         return out;
       }},
      {8, "fusion vector ratio c(l)/c(l') = g(l)/g(l')", 60.0,
       [] {
         std::vector<Part> out;
         for (auto [N, ell] : kTransferGrid) {
           Sampler s(8000 + 10 * N + ell);
           const auto r = fusion_vector_ratio(params(N), ell, s, 5);
           out.push_back({tag("ratio ", N, ell), r.ratio.residual, 1e-8});
           out.push_back({tag("orthogonal ", N, ell), r.orthogonal.residual, 1e-9});
         }
         return out;
       }},
      {9, "T_m(z)/M_m independent of lambda and J; g_m -> 1", 180.0,
       [] {
         std::vector<Part> out;
         for (auto [N, ell] : kTransferGrid) {
           Sampler s(9000 + 10 * N + ell);
           const auto r = transfer_ratio_spread(params(N), ell, s, 10);
           out.push_back({tag("lambda spread ", N, ell), r.lambda.residual, 1e-7});
           out.push_back({tag("J spread ", N, ell), r.subset.residual, 1e-7});
           out.push_back({tag("g_m at gamma=1e-4 ", N, ell), gm_small_gamma(params(N), ell, s, 3).residual, 1e-3});
         }
         return out;
       }},
      {10, "commutativity of T_m and of M_m", 180.0,
       [] {
         std::vector<Part> out;
         for (int N : {2, 3})
           for (int ell : {1, 2}) {
             Sampler s(10000 + 10 * N + ell);
             out.push_back({tag("M ", N, ell), ruijsenaars_commute(params(N), ell, s, 10).residual, 1e-8});
             out.push_back({tag("T ", N, ell), transfer_commute(params(N), ell, s, 10).residual, 1e-8});
           }
         return out;
       }},
      {11, "quantum determinant is central", 60.0,
       [] {
         std::vector<Part> out;
         for (int N : {2, 3}) {
           Sampler s(11000 + N);
           out.push_back({"N=" + std::to_string(N), det_central(params(N), s, 10).residual, 1e-8});
         }
         return out;
       }},
      {12, "gamma -> 0 limits of R(-k gamma) and R_reg/gamma", 2.0,
       [] {
         std::vector<Part> out;
         for (int N : {2, 3}) {
           Sampler s(12000 + N);
           out.push_back({"N=" + std::to_string(N), classical_limits(params(N), s, 10).residual, 1e-3});
         }
         // context for the raw criterion: the error is first order in gamma at every lambda
         for (int N : {2, 3}) {
           Sampler s(12100 + N);
           out.push_back({"order N=" + std::to_string(N), classical_limit_order(params(N), s, 10).residual, 1e-2});
         }
         return out;
       }},
  };
}

}  // namespace

int main() {
  int failed = 0;
  for (const auto& c : criteria()) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Part> parts;
    std::string error;
    try {
      parts = c.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = error.empty() && dt <= c.budget_s;
    double worst_ratio = 0.0;
    const Part* worst = nullptr;
    for (const auto& p : parts) {
      if (!(p.residual <= p.tol)) ok = false;
      const double r = p.tol > 0 ? p.residual / p.tol : p.residual;
      if (!worst || !(r <= worst_ratio)) {
        worst_ratio = r;
        worst = &p;
      }
    }
    std::printf("%s %2d  %-50s", ok ? "PASS" : "FAIL", c.id, c.name.c_str());
    if (worst)
      std::printf("  worst %-24s residual %.3e tol %.0e", worst->what.c_str(), worst->residual, worst->tol);
    std::printf("  time %.2fs/%gs\n", dt, c.budget_s);
    if (!error.empty()) std::printf("      error: %s\n", error.c_str());
    if (!ok)
      for (const auto& p : parts)
        std::printf("      %-4s %-30s residual %.3e tol %.0e\n", p.residual <= p.tol ? "ok" : "over", p.what.c_str(),
                    p.residual, p.tol);
    if (!ok) ++failed;
  }
  std::printf("%d of 12 criteria passed\n", 12 - failed);
  return failed ? 1 : 0;
}

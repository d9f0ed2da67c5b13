#pragma once

// Independent reference implementations used as test oracles. None of these
// call into the solver code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Pair = std::pair<int, int>;  // x[first] <= x[second]

inline std::vector<Pair> GridPairs(int r, int s) {
  std::vector<Pair> out;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < s; ++j) {
      if (j + 1 < s) out.emplace_back(i * s + j, i * s + j + 1);
      if (i + 1 < r) out.emplace_back(i * s + j, (i + 1) * s + j);
    }
  }
  return out;
}

inline bool Feasible(const Vec& x, const std::vector<Pair>& pairs, double tol = 0.0) {
  for (auto [u, v] : pairs) {
    if (x[u] > x[v] + tol) return false;
  }
  return true;
}

// Every feasible 0/1 vector, found by counting through all bit patterns.
inline std::vector<Vec> Extremals(int p, const std::vector<Pair>& pairs) {
  std::vector<Vec> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
    Vec e(p);
    for (int u = 0; u < p; ++u) e[u] = (mask >> u) & 1u ? 1.0 : 0.0;
    if (Feasible(e, pairs)) out.push_back(e);
  }
  return out;
}

inline double MinLinear(const Vec& a, const std::vector<Vec>& extremals) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : extremals) best = std::min(best, a.dot(e));
  return best;
}

inline double Binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return std::round(b);
}

// Weighted isotonic regression by the max-min formula
//   x_u = max over upper sets U containing u of min over lower sets L
//         containing u of the weighted mean of z on U and L.
// Upper sets are the supports of the 0/1 extremals. Weights must be positive.
inline Vec MinMaxIsotonic(const Vec& z, const Vec& w, const std::vector<Pair>& pairs) {
  const int p = static_cast<int>(z.size());
  const auto uppers = Extremals(p, pairs);
  Vec x(p);
  for (int u = 0; u < p; ++u) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& up : uppers) {
      if (up[u] == 0.0) continue;
      double worst = std::numeric_limits<double>::infinity();
      for (const auto& lowc : uppers) {
        if (lowc[u] != 0.0) continue;  // complement of lowc is a lower set containing u
        double sw = 0.0, sz = 0.0;
        for (int t = 0; t < p; ++t) {
          if (up[t] != 0.0 && lowc[t] == 0.0) {
            sw += w[t];
            sz += w[t] * z[t];
          }
        }
        worst = std::min(worst, sz / sw);
      }
      best = std::max(best, worst);
    }
    x[u] = best;
  }
  return x;
}

// Chain isotonic regression via x_i = max_{j<=i} min_{k>=i} mean(z_j..z_k).
inline Vec ChainMinMax(const Vec& z, const Vec& w) {
  const int m = static_cast<int>(z.size());
  Vec x(m);
  for (int i = 0; i < m; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= i; ++j) {
      double worst = std::numeric_limits<double>::infinity();
      for (int k = i; k < m; ++k) {
        const double sw = w.segment(j, k - j + 1).sum();
        worst = std::min(worst, w.segment(j, k - j + 1).dot(z.segment(j, k - j + 1)) / sw);
      }
      best = std::max(best, worst);
    }
    x[i] = best;
  }
  return x;
}

// Minimizes 0.5 x'Hx + g'x subject to x[u] <= x[v] for every pair. Hildreth's
// dual coordinate ascent gives the active set; the KKT system on that set is
// then solved exactly. H must be positive definite.
inline Vec DenseQp(const Mat& h, const Vec& g, const std::vector<Pair>& pairs, int sweeps = 20000) {
  const int p = static_cast<int>(g.size());
  const Mat hinv = h.inverse();
  Vec x = -hinv * g;
  std::vector<double> mu(pairs.size(), 0.0);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t c = 0; c < pairs.size(); ++c) {
      const auto [u, v] = pairs[c];
      const double slack = x[u] - x[v];
      const double denom = hinv(u, u) + hinv(v, v) - 2.0 * hinv(u, v);
      const double next = std::max(0.0, mu[c] + slack / denom);
      const double d = next - mu[c];
      if (d != 0.0) {
        x -= d * (hinv.col(u) - hinv.col(v));
        mu[c] = next;
        change = std::max(change, std::abs(d));
      }
    }
    if (change < 1e-15) break;
  }

  auto objective = [&](const Vec& y) { return 0.5 * y.dot(h * y) + g.dot(y); };
  std::vector<Pair> active;
  for (std::size_t c = 0; c < pairs.size(); ++c) {
    const auto [u, v] = pairs[c];
    if (mu[c] > 0.0 || std::abs(x[u] - x[v]) < 1e-7) active.push_back(pairs[c]);
  }
  const int m = static_cast<int>(active.size());
  Mat kkt = Mat::Zero(p + m, p + m);
  Vec rhs = Vec::Zero(p + m);
  kkt.topLeftCorner(p, p) = h;
  rhs.head(p) = -g;
  for (int c = 0; c < m; ++c) {
    kkt(p + c, active[c].first) = kkt(active[c].first, p + c) = 1.0;
    kkt(p + c, active[c].second) = kkt(active[c].second, p + c) = -1.0;
  }
  const Vec sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  const Vec polished = sol.head(p);
  if (Feasible(polished, pairs, 1e-12) && objective(polished) <= objective(x) + 1e-12) return polished;
  return x;
}

inline Vec WlsQp(const Vec& z, const Vec& w, const std::vector<Pair>& pairs) {
  const Mat h = (2.0 * w).asDiagonal();
  return DenseQp(h, -2.0 * w.cwiseProduct(z), pairs);
}

inline Vec CentralDifferenceGradient(const std::function<double(const Vec&)>& f, const Vec& x,
                                     double step = 1e-5) {
  Vec g(x.size());
  for (Eigen::Index u = 0; u < x.size(); ++u) {
    Vec a = x, b = x;
    a[u] += step;
    b[u] -= step;
    g[u] = (f(a) - f(b)) / (2.0 * step);
  }
  return g;
}

inline Mat Gaussian(std::mt19937_64& rng, int r, int s, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  Mat m(r, s);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < s; ++j) m(i, j) = n(rng);
  }
  return m;
}

inline Vec GaussianVec(std::mt19937_64& rng, int p, double sd = 1.0) {
  return Gaussian(rng, p, 1, sd).col(0);
}

// Row-major flatten, independent of the library helper.
inline Vec RowMajor(const Mat& m) {
  Vec v(m.size());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
  }
  return v;
}

// A random bimonotone matrix: cumulative sums of nonnegative increments,
// rounded to a few levels so that ties occur.
inline Mat RandomBimonotone(std::mt19937_64& rng, int r, int s, int levels = 4) {
  std::uniform_int_distribution<int> step(0, levels);
  Mat m(r, s);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < s; ++j) {
      double base = 0.0;
      if (i > 0) base = std::max(base, m(i - 1, j));
      if (j > 0) base = std::max(base, m(i, j - 1));
      m(i, j) = base + 0.25 * std::max(0, step(rng) - levels / 2);
    }
  }
  return m;
}

}  // namespace oracle

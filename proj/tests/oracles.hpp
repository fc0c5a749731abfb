#pragma once

// Independent reference computations used by the tests. Deliberately naive:
// plain loops, no shared code with the library.

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

// Min-max formula, evaluated literally over every (t, s) with t <= i <= s.
inline std::vector<double> minmax(const std::vector<double>& x, const std::vector<double>& w) {
  const std::size_t p = x.size();
  std::vector<double> out(p);
  for (std::size_t i = 0; i < p; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = i; s < p; ++s) {
      double inner = -std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t <= i; ++t) {
        double num = 0, den = 0;
        for (std::size_t j = t; j <= s; ++j) {
          num += w[j] * x[j];
          den += w[j];
        }
        inner = std::max(inner, num / den);
      }
      best = std::min(best, inner);
    }
    out[i] = best;
  }
  return out;
}

// Weighted least squares over the nondecreasing cone, by enumerating every
// split of 0..p-1 into contiguous level sets. The optimum is one of the
// candidates whose block means are nondecreasing.
inline std::vector<double> isotonic_qp(const std::vector<double>& x, const std::vector<double>& w) {
  const std::size_t p = x.size();
  std::vector<double> best;
  double best_loss = std::numeric_limits<double>::infinity();
  for (unsigned long mask = 0; mask < (1ul << (p - 1)); ++mask) {
    std::vector<double> y(p);
    bool ok = true;
    double prev = -std::numeric_limits<double>::infinity();
    std::size_t start = 0;
    for (std::size_t k = 0; k < p; ++k) {
      const bool cut = k == p - 1 || (mask >> k) & 1ul;
      if (!cut) continue;
      double num = 0, den = 0;
      for (std::size_t j = start; j <= k; ++j) {
        num += w[j] * x[j];
        den += w[j];
      }
      const double m = num / den;
      if (m < prev - 1e-13) ok = false;
      prev = m;
      for (std::size_t j = start; j <= k; ++j) y[j] = m;
      start = k + 1;
    }
    if (!ok) continue;
    double loss = 0;
    for (std::size_t j = 0; j < p; ++j) loss += w[j] * (y[j] - x[j]) * (y[j] - x[j]);
    if (loss < best_loss) {
      best_loss = loss;
      best = y;
    }
  }
  return best;
}

// Umbrella p = 5, peak index 2, written out as the published closed forms.
inline std::vector<double> umbrella5(const std::vector<double>& e, const std::vector<double>& w) {
  // Reindexed sequence: e1, e2, e5, e4, e3.
  const double we[5] = {w[0], w[1], w[4], w[3], w[2]};
  const double ee[5] = {e[0], e[1], e[4], e[3], e[2]};
  double peak = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 5; ++i) {
    double num = 0, den = 0;
    for (int j = i; j < 5; ++j) {
      num += we[j] * ee[j];
      den += we[j];
    }
    peak = std::max(peak, num / den);
  }
  const double a12 = (w[0] * e[0] + w[1] * e[1]) / (w[0] + w[1]);
  const double a54 = (w[4] * e[4] + w[3] * e[3]) / (w[4] + w[3]);
  std::vector<double> out(5);
  out[2] = peak;
  out[0] = std::min({e[0], a12, peak});
  out[1] = std::min(std::max(a12, e[1]), peak);
  out[4] = std::min({e[4], a54, peak});
  out[3] = std::min(std::max(a54, e[3]), peak);
  return out;
}

// (1/n) sum_{r<=j} sum_{s<=j} [pi_r (1 - pi_r) 1(r = s) - pi_r pi_s 1(r != s)].
inline double null_variance_double_sum(const std::vector<double>& pi, std::size_t j, long long n) {
  double v = 0;
  for (std::size_t r = 0; r <= j; ++r)
    for (std::size_t s = 0; s <= j; ++s) v += r == s ? pi[r] * (1 - pi[r]) : -pi[r] * pi[s];
  return v / static_cast<double>(n);
}

// max_j (F2(j) - F1(j)) over j < J - 1 from raw counts.
inline double ks_brute(const std::vector<std::vector<long long>>& c) {
  const std::size_t J = c[0].size();
  double n1 = 0, n2 = 0;
  for (std::size_t j = 0; j < J; ++j) {
    n1 += static_cast<double>(c[0][j]);
    n2 += static_cast<double>(c[1][j]);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < J; ++j) {
    double f1 = 0, f2 = 0;
    for (std::size_t k = 0; k <= j; ++k) {
      f1 += static_cast<double>(c[0][k]);
      f2 += static_cast<double>(c[1][k]);
    }
    best = std::max(best, f2 / n2 - f1 / n1);
  }
  return best;
}

inline std::vector<double> uniform_vector(std::mt19937_64& g, std::size_t p, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(p);
  for (auto& x : v) x = d(g);
  return v;
}

// Values on a coarse grid so ties and pooling both occur.
inline std::vector<double> grid_vector(std::mt19937_64& g, std::size_t p) {
  std::uniform_int_distribution<int> d(-4, 4);
  std::vector<double> v(p);
  for (auto& x : v) x = 0.5 * d(g);
  return v;
}

}  // namespace oracle

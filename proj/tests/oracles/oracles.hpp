#pragma once

// Independent numerical reference routines for the tests. Nothing here calls into qnoise.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using CMat = std::vector<std::vector<cplx>>;
using RMat = std::vector<std::vector<double>>;

/// Golden-section minimum of a unimodal f on [a, b].
inline std::pair<double, double> golden_min(const std::function<double(double)>& f, double a, double b,
                                            double tol = 1e-12, int max_iter = 400) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iter && std::abs(b - a) > tol * (std::abs(c) + std::abs(d)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  const double x = fc < fd ? c : d;
  return {x, f(x)};
}

/// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double eps = 1e-10,
                      int depth = 50) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double e, int d) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * e)
          return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, flo, flm, fmid, left, e / 2, d - 1) + rec(mid, hi, fmid, frm, fhi, right, e / 2, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, depth);
}

/// Gauss-Jordan inverse with partial pivoting.
inline CMat inverse(CMat m) {
  const std::size_t n = m.size();
  CMat inv(n, std::vector<cplx>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) == 0) throw std::runtime_error("singular");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    const cplx p = m[col][col];
    for (std::size_t k = 0; k < n; ++k) {
      m[col][k] /= p;
      inv[col][k] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const cplx f = m[r][col];
      if (f == cplx(0.0)) continue;
      for (std::size_t k = 0; k < n; ++k) {
        m[r][k] -= f * m[col][k];
        inv[r][k] -= f * inv[col][k];
      }
    }
  }
  return inv;
}

/// Characteristic polynomial det(sI - A) by Faddeev-LeVerrier; returns c with c[0] = 1 (highest power first).
inline std::vector<double> char_poly(const RMat& A) {
  const std::size_t n = A.size();
  std::vector<double> c(n + 1, 0.0);
  c[0] = 1.0;
  RMat M(n, std::vector<double>(n, 0.0));  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    // M_k = A M_{k-1} + c_{k-1} I
    RMat next(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t l = 0; l < n; ++l) s += A[i][l] * M[l][j];
        next[i][j] = s + (i == j ? c[k - 1] : 0.0);
      }
    M = next;
    double tr = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) tr += A[i][l] * M[l][i];
    c[k] = -tr / static_cast<double>(k);
  }
  return c;
}

/// Routh-Hurwitz test on a real polynomial (highest power first, leading coefficient > 0).
inline bool hurwitz_stable(const std::vector<double>& c) {
  const std::size_t n = c.size() - 1;
  std::vector<std::vector<double>> rows(n + 1);
  for (std::size_t i = 0; i <= n; i += 2) rows[0].push_back(c[i]);
  for (std::size_t i = 1; i <= n; i += 2) rows[1].push_back(c[i]);
  const std::size_t w = rows[0].size();
  for (auto& r : rows) r.resize(w + 1, 0.0);
  for (std::size_t i = 2; i <= n; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const double a = rows[i - 1][0];
      if (a == 0) return false;
      rows[i][j] = (a * rows[i - 2][j + 1] - rows[i - 2][0] * rows[i - 1][j + 1]) / a;
    }
  }
  for (std::size_t i = 0; i <= n; ++i)
    if (!(rows[i][0] > 0)) return false;
  return true;
}

/// Bisection for a sign change of f on [a, b].
inline double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-14) {
  double fa = f(a);
  for (int i = 0; i < 300 && (b - a) > tol * std::max(1.0, std::abs(a)); ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace oracle

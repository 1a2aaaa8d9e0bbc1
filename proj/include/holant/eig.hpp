#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "holant/error.hpp"

namespace holant {

// Dense eigenvalue routines for the small matrices this library produces
// (influence matrices up to ~28x28, symmetrized transition operators up to
// ~2^10). Row-major storage.

struct Spectrum {
  std::vector<double> re, im;

  double spectral_radius() const {
    double r = 0.0;
    for (std::size_t i = 0; i < re.size(); ++i)
      r = std::max(r, std::hypot(re[i], im[i]));
    return r;
  }
  double max_abs_imag() const {
    double r = 0.0;
    for (double x : im) r = std::max(r, std::fabs(x));
    return r;
  }
  double max_real() const {
    double r = -std::numeric_limits<double>::infinity();
    for (double x : re) r = std::max(r, x);
    return re.empty() ? 0.0 : r;
  }
};

namespace detail {

inline double& at(std::vector<double>& a, int n, int i, int j) {
  return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
}
inline double at(const std::vector<double>& a, int n, int i, int j) {
  return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
}

// Householder similarity reduction to upper Hessenberg form.
inline void hessenberg_reduce(std::vector<double>& a, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int col = 0; col + 2 < n; ++col) {
    double norm2 = 0.0;
    for (int i = col + 1; i < n; ++i) norm2 += at(a, n, i, col) * at(a, n, i, col);
    if (norm2 == 0.0) continue;
    double head = at(a, n, col + 1, col);
    double alpha = -std::copysign(std::sqrt(norm2), head == 0.0 ? 1.0 : head);
    double v0 = head - alpha;
    if (v0 == 0.0) continue;
    v[static_cast<std::size_t>(col) + 1] = 1.0;
    for (int i = col + 2; i < n; ++i)
      v[static_cast<std::size_t>(i)] = at(a, n, i, col) / v0;
    double vtv = 1.0;
    for (int i = col + 2; i < n; ++i)
      vtv += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    double beta = 2.0 / vtv;
    // Left: A <- (I - beta v v^T) A on rows col+1..n-1
    for (int j = col; j < n; ++j) {
      double dot = 0.0;
      for (int i = col + 1; i < n; ++i) dot += v[static_cast<std::size_t>(i)] * at(a, n, i, j);
      dot *= beta;
      for (int i = col + 1; i < n; ++i) at(a, n, i, j) -= dot * v[static_cast<std::size_t>(i)];
    }
    // Right: A <- A (I - beta v v^T) on cols col+1..n-1
    for (int i = 0; i < n; ++i) {
      double dot = 0.0;
      for (int j = col + 1; j < n; ++j) dot += at(a, n, i, j) * v[static_cast<std::size_t>(j)];
      dot *= beta;
      for (int j = col + 1; j < n; ++j) at(a, n, i, j) -= dot * v[static_cast<std::size_t>(j)];
    }
    // Clean the annihilated entries.
    at(a, n, col + 1, col) = alpha;
    for (int i = col + 2; i < n; ++i) at(a, n, i, col) = 0.0;
  }
}

}  // namespace detail

// Eigenvalues of an upper Hessenberg matrix by the implicitly shifted Francis
// double-step QR iteration with deflation. Destroys its argument.
inline Spectrum eig_hessenberg(std::vector<double> h, int n) {
  using detail::at;
  Spectrum out;
  out.re.assign(static_cast<std::size_t>(n), 0.0);
  out.im.assign(static_cast<std::size_t>(n), 0.0);
  if (n == 0) return out;
  const double eps = std::numeric_limits<double>::epsilon();
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(at(h, n, i, j));
  if (anorm == 0.0) return out;  // zero matrix

  int bottom = n - 1;
  double shift_total = 0.0;
  while (bottom >= 0) {
    int iters = 0;
    int low;
    do {
      for (low = bottom; low >= 1; --low) {
        double s = std::fabs(at(h, n, low - 1, low - 1)) + std::fabs(at(h, n, low, low));
        if (s == 0.0) s = anorm;
        if (std::fabs(at(h, n, low, low - 1)) <= eps * s) {
          at(h, n, low, low - 1) = 0.0;
          break;
        }
      }
      double x = at(h, n, bottom, bottom);
      if (low == bottom) {
        out.re[static_cast<std::size_t>(bottom)] = x + shift_total;
        out.im[static_cast<std::size_t>(bottom)] = 0.0;
        --bottom;
      } else {
        double y = at(h, n, bottom - 1, bottom - 1);
        double w = at(h, n, bottom, bottom - 1) * at(h, n, bottom - 1, bottom);
        if (low == bottom - 1) {
          double p = 0.5 * (y - x);
          double q = p * p + w;
          double z = std::sqrt(std::fabs(q));
          x += shift_total;
          if (q >= 0.0) {
            z = p + std::copysign(z, p);
            out.re[static_cast<std::size_t>(bottom) - 1] = x + z;
            out.re[static_cast<std::size_t>(bottom)] =
                (z != 0.0) ? x - w / z : x + z;
            out.im[static_cast<std::size_t>(bottom) - 1] = 0.0;
            out.im[static_cast<std::size_t>(bottom)] = 0.0;
          } else {
            out.re[static_cast<std::size_t>(bottom) - 1] = x + p;
            out.re[static_cast<std::size_t>(bottom)] = x + p;
            out.im[static_cast<std::size_t>(bottom)] = z;
            out.im[static_cast<std::size_t>(bottom) - 1] = -z;
          }
          bottom -= 2;
        } else {
          if (iters == 30)
            throw HolantError(Errc::invalid_argument, "QR iteration did not converge");
          if (iters == 10 || iters == 20) {
            // exceptional shift
            shift_total += x;
            for (int i = 0; i <= bottom; ++i) at(h, n, i, i) -= x;
            double s = std::fabs(at(h, n, bottom, bottom - 1)) +
                       std::fabs(at(h, n, bottom - 1, bottom - 2));
            x = y = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++iters;
          // find two consecutive small subdiagonal elements
          int m;
          double p = 0.0, q = 0.0, r = 0.0;
          for (m = bottom - 2; m >= low; --m) {
            double z = at(h, n, m, m);
            double rr = x - z;
            double ss = y - z;
            p = (rr * ss - w) / at(h, n, m + 1, m) + at(h, n, m, m + 1);
            q = at(h, n, m + 1, m + 1) - z - rr - ss;
            r = at(h, n, m + 2, m + 1);
            double scale = std::fabs(p) + std::fabs(q) + std::fabs(r);
            p /= scale;
            q /= scale;
            r /= scale;
            if (m == low) break;
            double u = std::fabs(at(h, n, m, m - 1)) * (std::fabs(q) + std::fabs(r));
            double v = std::fabs(p) * (std::fabs(at(h, n, m - 1, m - 1)) + std::fabs(z) +
                                       std::fabs(at(h, n, m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m + 2; i <= bottom; ++i) {
            at(h, n, i, i - 2) = 0.0;
            if (i != m + 2) at(h, n, i, i - 3) = 0.0;
          }
          // double QR step: chase the bulge from m to bottom
          for (int k = m; k <= bottom - 1; ++k) {
            if (k != m) {
              p = at(h, n, k, k - 1);
              q = at(h, n, k + 1, k - 1);
              r = (k != bottom - 1) ? at(h, n, k + 2, k - 1) : 0.0;
              x = std::fabs(p) + std::fabs(q) + std::fabs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            double s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (low != m) at(h, n, k, k - 1) = -at(h, n, k, k - 1);
            } else {
              at(h, n, k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            double y2 = q / s;
            double z2 = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= bottom; ++j) {
              double pp = at(h, n, k, j) + q * at(h, n, k + 1, j);
              if (k != bottom - 1) {
                pp += r * at(h, n, k + 2, j);
                at(h, n, k + 2, j) -= pp * z2;
              }
              at(h, n, k + 1, j) -= pp * y2;
              at(h, n, k, j) -= pp * x;
            }
            int top = std::min(bottom, k + 3);
            for (int i = low; i <= top; ++i) {
              double pp = x * at(h, n, i, k) + y2 * at(h, n, i, k + 1);
              if (k != bottom - 1) {
                pp += z2 * at(h, n, i, k + 2);
                at(h, n, i, k + 2) -= pp * r;
              }
              at(h, n, i, k + 1) -= pp * q;
              at(h, n, i, k) -= pp;
            }
          }
        }
      }
    } while (low < bottom - 1);
  }
  return out;
}

// Eigenvalues of a general real square matrix.
inline Spectrum eig_general(std::vector<double> a, int n) {
  if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != a.size())
    throw HolantError(Errc::invalid_argument, "matrix size mismatch");
  detail::hessenberg_reduce(a, n);
  return eig_hessenberg(std::move(a), n);
}

// Eigenvalues of a symmetric matrix by the cyclic Jacobi method, ascending.
inline std::vector<double> eig_symmetric(std::vector<double> a, int n) {
  using detail::at;
  if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != a.size())
    throw HolantError(Errc::invalid_argument, "matrix size mismatch");
  double frob = 0.0;
  for (double x : a) frob += x * x;
  frob = std::sqrt(frob);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(a, n, i, j) * at(a, n, i, j);
    off = std::sqrt(2.0 * off);
    if (off <= 1e-300 || off <= 1e-15 * frob) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = at(a, n, p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        double theta = (at(a, n, q, q) - at(a, n, p, p)) / (2.0 * apq);
        double t;
        if (std::fabs(theta) > 1e154) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = std::copysign(1.0, theta) /
              (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        }
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        double app = at(a, n, p, p), aqq = at(a, n, q, q);
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          double aip = at(a, n, i, p), aiq = at(a, n, i, q);
          at(a, n, i, p) = at(a, n, p, i) = c * aip - s * aiq;
          at(a, n, i, q) = at(a, n, q, i) = s * aip + c * aiq;
        }
        at(a, n, p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
        at(a, n, q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
        at(a, n, p, q) = at(a, n, q, p) = 0.0;
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = at(a, n, i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace holant

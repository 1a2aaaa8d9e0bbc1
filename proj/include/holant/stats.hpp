#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "holant/error.hpp"

namespace holant::stats {

// Regularized upper incomplete gamma Q(a, x): series for the lower tail when
// x < a+1, modified Lentz continued fraction otherwise.
inline double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw HolantError(Errc::invalid_argument, "gamma_q domain error");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return 1.0 - p;
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double chi_square_p_value(double stat, long df) {
  if (df <= 0) return 1.0;
  return gamma_q(0.5 * static_cast<double>(df), 0.5 * stat);
}

struct ChiSquare {
  double stat = 0.0;
  long df = 0;
  double p_value = 1.0;
  long buckets = 0;
};

// Pearson goodness-of-fit with deterministic pooling: cells whose expected
// count is below min_expected are merged into one bucket; if that bucket is
// itself too small it is folded into the last regular bucket.
inline ChiSquare chi_square_gof(std::span<const long> counts, std::span<const double> probs,
                                double min_expected = 5.0) {
  if (counts.size() != probs.size())
    throw HolantError(Errc::invalid_argument, "counts/probs size mismatch");
  long n = 0;
  for (long c : counts) n += c;
  std::vector<double> bucket_exp;
  std::vector<double> bucket_obs;
  double pooled_exp = 0.0, pooled_obs = 0.0;
  ChiSquare out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double expct = probs[i] * static_cast<double>(n);
    if (probs[i] <= 0.0) {
      if (counts[i] > 0) {  // mass observed where the model has none
        out.stat = std::numeric_limits<double>::infinity();
        out.df = 1;
        out.p_value = 0.0;
        out.buckets = static_cast<long>(bucket_exp.size());
        return out;
      }
      continue;
    }
    if (expct < min_expected) {
      pooled_exp += expct;
      pooled_obs += static_cast<double>(counts[i]);
    } else {
      bucket_exp.push_back(expct);
      bucket_obs.push_back(static_cast<double>(counts[i]));
    }
  }
  if (pooled_exp > 0.0) {
    if (pooled_exp >= min_expected || bucket_exp.empty()) {
      bucket_exp.push_back(pooled_exp);
      bucket_obs.push_back(pooled_obs);
    } else {
      bucket_exp.back() += pooled_exp;
      bucket_obs.back() += pooled_obs;
    }
  }
  out.buckets = static_cast<long>(bucket_exp.size());
  out.df = out.buckets - 1;
  if (out.df <= 0) {
    out.stat = 0.0;
    out.df = 0;
    out.p_value = 1.0;
    return out;
  }
  for (std::size_t b = 0; b < bucket_exp.size(); ++b) {
    double diff = bucket_obs[b] - bucket_exp[b];
    out.stat += diff * diff / bucket_exp[b];
  }
  out.p_value = chi_square_p_value(out.stat, out.df);
  return out;
}

}  // namespace holant::stats

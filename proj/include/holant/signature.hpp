#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "holant/error.hpp"

namespace holant {

// Symmetric vertex constraint as the value sequence f(0..d). Construction
// validates the two defining properties: log-concavity f(k)^2 >= f(k-1)f(k+1)
// and consecutive support. Values outside 0..d read as 0, matching the
// convention f : N -> R>=0 with finite support.
class Signature {
public:
  // Relative slack admitted in the log-concavity comparison, so signatures
  // produced by arithmetic (e.g. repeated shifts) still validate.
  static constexpr double kLogConcavityTol = 1e-12;

  static Signature checked(std::vector<double> values) {
    if (values.empty())
      throw HolantError(Errc::invalid_argument, "signature must be non-empty");
    int d = static_cast<int>(values.size()) - 1;
    for (int k = 0; k <= d; ++k) {
      double x = values[static_cast<std::size_t>(k)];
      if (!(x >= 0.0) || !std::isfinite(x))
        throw HolantError(Errc::negative_entry,
                          "signature entry " + std::to_string(k) + " not a finite non-negative real", k);
    }
    int lo = -1, hi = -1;
    for (int k = 0; k <= d; ++k) {
      if (values[static_cast<std::size_t>(k)] > 0.0) {
        if (lo < 0) lo = k;
        hi = k;
      }
    }
    if (lo >= 0) {
      for (int k = lo; k <= hi; ++k)
        if (values[static_cast<std::size_t>(k)] == 0.0)
          throw HolantError(Errc::internal_zero,
                            "signature support has internal zero at " + std::to_string(k), k);
    }
    for (int k = 1; k < d; ++k) {
      double lhs = values[static_cast<std::size_t>(k)] * values[static_cast<std::size_t>(k)];
      double rhs = values[static_cast<std::size_t>(k) - 1] * values[static_cast<std::size_t>(k) + 1];
      if (lhs < rhs * (1.0 - kLogConcavityTol))
        throw HolantError(Errc::not_log_concave,
                          "log-concavity fails at index " + std::to_string(k), k);
    }
    Signature s;
    s.values_ = std::move(values);
    return s;
  }

  int degree() const { return static_cast<int>(values_.size()) - 1; }

  // f(k), with f(k) = 0 outside the stored range.
  double operator()(int k) const {
    if (k < 0 || k > degree()) return 0.0;
    return values_[static_cast<std::size_t>(k)];
  }

  std::span<const double> values() const { return values_; }

  bool all_zero() const {
    for (double x : values_)
      if (x > 0.0) return false;
    return true;
  }

  int support_min() const {
    for (int k = 0; k <= degree(); ++k)
      if ((*this)(k) > 0.0) return k;
    return -1;
  }

  int support_max() const {
    for (int k = degree(); k >= 0; --k)
      if ((*this)(k) > 0.0) return k;
    return -1;
  }

  // D^m f as a sequence: values f(m..d), attached degree d - m.
  Signature shifted(int m) const {
    if (m < 0 || m > degree())
      throw HolantError(Errc::invalid_argument, "shift amount exceeds degree");
    std::vector<double> v(values_.begin() + m, values_.end());
    return checked(std::move(v));
  }

  // D f keeping the attached degree: [f(1), ..., f(d), 0]. This is the form
  // used when a signature is shifted without removing an incident edge.
  Signature shifted_same_degree() const {
    std::vector<double> v(values_.begin() + 1, values_.end());
    v.push_back(0.0);
    return checked(std::move(v));
  }

  // Restriction to a smaller degree (edge removal without occupation).
  Signature truncated(int new_degree) const {
    if (new_degree < 0 || new_degree > degree())
      throw HolantError(Errc::invalid_argument, "bad truncation degree");
    std::vector<double> v(values_.begin(), values_.begin() + new_degree + 1);
    return checked(std::move(v));
  }

  // Normalized generating polynomial P_f(x) = (1/f(0)) sum_k C(d,k) f(k) x^k,
  // evaluated by Horner on the coefficient sequence C(d,k) f(k).
  double gen_poly(double x) const {
    if (!((*this)(0) > 0.0))
      throw HolantError(Errc::precondition_violated, "generating polynomial needs f(0) > 0");
    int d = degree();
    double acc = 0.0;
    for (int k = d; k >= 0; --k) acc = acc * x + binomial(d, k) * (*this)(k);
    return acc / (*this)(0);
  }

  bool operator==(const Signature&) const = default;

  // C(d, k) as a floating product; exact for the desk-scale degrees used here
  // (d <= 64 by construction of instances).
  static double binomial(int d, int k) {
    if (k < 0 || k > d) return 0.0;
    k = std::min(k, d - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(d - k + i) / static_cast<double>(i);
    return r;
  }

private:
  Signature() = default;
  std::vector<double> values_;
};

// b-matching indicator [1,...,1,0,...,0] with min(b, degree)+1 ones.
inline Signature b_matching_signature(int degree, int b) {
  if (degree < 0 || b < 0)
    throw HolantError(Errc::invalid_argument, "bad b-matching signature parameters");
  std::vector<double> v(static_cast<std::size_t>(degree) + 1, 0.0);
  int ones = std::min(b, degree) + 1;
  for (int k = 0; k < ones; ++k) v[static_cast<std::size_t>(k)] = 1.0;
  return Signature::checked(std::move(v));
}

// At-least-b indicator [0,...,0,1,...,1]. Note f(0) = 0 when b > 0: such
// signatures are outside the mixing theorem's hypotheses and are used for
// the influence counterexamples and custom models only.
inline Signature at_least_signature(int degree, int b) {
  if (degree < 0 || b < 0)
    throw HolantError(Errc::invalid_argument, "bad at-least signature parameters");
  std::vector<double> v(static_cast<std::size_t>(degree) + 1, 0.0);
  for (int k = b; k <= degree; ++k) v[static_cast<std::size_t>(k)] = 1.0;
  return Signature::checked(std::move(v));
}

}  // namespace holant

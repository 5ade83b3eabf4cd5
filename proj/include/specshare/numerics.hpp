#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace specshare {

inline constexpr double kLn2 = 0.69314718055994530941723212145818;

using Complex = std::complex<double>;

// Compensated (Neumaier) accumulator. Sums are reproducible under
// permutation to a few ulps, which the Monte Carlo reductions rely on.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

// Power series for I_nu, nu in {0,1}. All terms are positive so there is
// no cancellation; usable up to x ~ 700 before the sum overflows.
inline double bessel_i_series(int order, double x) {
  const double q = 0.25 * x * x;
  double term = (order == 0) ? 1.0 : 0.5 * x;
  double sum = term;
  for (int k = 1; k < 1500; ++k) {
    term *= q / (static_cast<double>(k) * (k + order));
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

// Asymptotic expansion of e^{-x} I_nu(x) for large x.
inline double bessel_i_scaled_asymptotic(int order, double x) {
  const double nu4 = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 30; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(nu4 - odd * odd) / (8.0 * k * x);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * 3.14159265358979323846 * x);
}

inline void check_bessel_args(int order, double x) {
  if (order != 0 && order != 1)
    throw std::domain_error("bessel_i: order must be 0 or 1");
  if (!(x >= 0.0) || !std::isfinite(x))
    throw std::domain_error("bessel_i: x must be finite and >= 0");
}

}  // namespace detail

// Modified Bessel function of the first kind, orders 0 and 1.
inline double bessel_i(int order, double x) {
  detail::check_bessel_args(order, x);
  if (x <= 700.0) return detail::bessel_i_series(order, x);
  // Large arguments: scaled evaluation, overflow only in the final exp.
  return detail::bessel_i_scaled_asymptotic(order, x) * std::exp(x);
}

// e^{-x} I_order(x); stays O(1) for all x >= 0.
inline double bessel_i_scaled(int order, double x) {
  detail::check_bessel_args(order, x);
  if (x <= 700.0) return detail::bessel_i_series(order, x) * std::exp(-x);
  return detail::bessel_i_scaled_asymptotic(order, x);
}

// Laguerre polynomial of order 1/2 on the non-positive axis, through
// L_{1/2}(x) = e^{x/2} [(1-x) I_0(-x/2) - x I_1(-x/2)]. With the scaled
// Bessel functions the e^{x/2} factor cancels exactly, so the value
// stays finite for arbitrarily large |x|.
inline double laguerre_half(double x) {
  if (!(x <= 0.0) || !std::isfinite(x))
    throw std::domain_error("laguerre_half: x must be finite and <= 0");
  const double y = -0.5 * x;
  return (1.0 - x) * bessel_i_scaled(0, y) - x * bessel_i_scaled(1, y);
}

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  double tail_cutoff_mass = 1e-12;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw std::invalid_argument("QuadratureSpec: tolerances must be > 0");
    if (max_subdivisions < 1)
      throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
    if (!(tail_cutoff_mass > 0.0) || !(tail_cutoff_mass <= 1e-6))
      throw std::invalid_argument("QuadratureSpec: tail_cutoff_mass must be in (0, 1e-6]");
  }
};

// Thrown when adaptive refinement hits max_subdivisions or a tail bound
// cannot be established; carries the best estimate so far.
struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double partial, double err)
      : std::runtime_error(what), partial_estimate(partial), error_estimate(err) {}
  double partial_estimate;
  double error_estimate;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss (QUADPACK constants).
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kGk15WeightsK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGk15WeightsG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  double integral;
  double error;
};

template <class F>
PanelResult gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kGk15Nodes[i]);
    fv[14 - i] = f(c + h * kGk15Nodes[i]);
  }
  fv[7] = f(c);
  double resk = 0.0;
  for (int i = 0; i < 7; ++i) resk += kGk15WeightsK[i] * (fv[i] + fv[14 - i]);
  resk += kGk15WeightsK[7] * fv[7];
  // The embedded Gauss rule uses the odd Kronrod nodes plus the center.
  double resg = kGk15WeightsG[3] * fv[7];
  for (int i = 1; i < 7; i += 2) resg += kGk15WeightsG[i / 2] * (fv[i] + fv[14 - i]);

  const double reskh = resk * 0.5;
  double resasc = kGk15WeightsK[7] * std::abs(fv[7] - reskh);
  for (int i = 0; i < 7; ++i)
    resasc += kGk15WeightsK[i] * (std::abs(fv[i] - reskh) + std::abs(fv[14 - i] - reskh));
  resasc *= std::abs(h);

  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  return {resk * h, err};
}

struct Interval {
  double a, b, integral, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

template <class F>
double adapt(F&& f, std::vector<std::pair<double, double>> panels,
             const QuadratureSpec& spec) {
  std::priority_queue<Interval> heap;
  double total = 0.0, total_err = 0.0;
  for (const auto& [a, b] : panels) {
    const PanelResult r = gk15(f, a, b);
    heap.push({a, b, r.integral, r.error});
    total += r.integral;
    total_err += r.error;
  }
  int splits = 0;
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (splits >= spec.max_subdivisions)
      throw QuadratureError("integrate: max_subdivisions reached", total, total_err);
    const Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b)
      throw QuadratureError("integrate: interval underflow", total, total_err);
    const PanelResult left = gk15(f, worst.a, mid);
    const PanelResult right = gk15(f, mid, worst.b);
    total += left.integral + right.integral - worst.integral;
    total_err += left.error + right.error - worst.error;
    heap.push({worst.a, mid, left.integral, left.error});
    heap.push({mid, worst.b, right.integral, right.error});
    ++splits;
  }
  return total;
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over (lower, upper); upper may be
// +infinity, in which case the domain is truncated once the locally fitted
// exponential tail bound drops below spec.tail_cutoff_mass.
template <class F>
double integrate(F&& f, double lower, double upper,
                 const QuadratureSpec& spec = QuadratureSpec{}) {
  spec.validate();
  if (!(lower < upper)) throw std::invalid_argument("integrate: requires lower < upper");

  std::vector<std::pair<double, double>> panels;
  if (std::isfinite(upper)) {
    panels.emplace_back(lower, upper);
    return detail::adapt(f, std::move(panels), spec);
  }

  // Semi-infinite: geometric scan outward from the lower limit. The decay
  // rate between successive probes gives an exponential bound on the
  // remaining mass; quadrature panels reuse the scan intervals.
  const double h0 = std::max(1.0, std::abs(lower));
  double prev_x = lower;
  double prev_f = std::abs(f(lower + 1e-3 * h0));
  bool bounded = false;
  for (int k = 0; k < 60; ++k) {
    const double x = lower + h0 * std::ldexp(1.0, k);
    const double fx = std::abs(f(x));
    panels.emplace_back(prev_x, x);
    if (fx == 0.0 && prev_f == 0.0 && k >= 1) {
      bounded = true;
      break;
    }
    if (k >= 1 && fx > 0.0 && fx < prev_f) {
      const double rate = std::log(prev_f / fx) / (x - prev_x);
      const double tail = fx / rate;
      if (tail < spec.tail_cutoff_mass && fx < spec.tail_cutoff_mass) {
        bounded = true;
        break;
      }
    }
    prev_x = x;
    prev_f = fx;
  }
  if (!bounded)
    throw QuadratureError("integrate: tail bound not established on semi-infinite domain",
                          0.0, std::numeric_limits<double>::infinity());
  return detail::adapt(f, std::move(panels), spec);
}

}  // namespace specshare

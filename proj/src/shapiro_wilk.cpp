// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

// Royston (1995) algorithm AS R94 for the Shapiro-Wilk W test.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "clonefuse/distributions.hpp"
#include "clonefuse/error.hpp"
#include "clonefuse/statlab.hpp"

namespace clonefuse {

namespace {

// Evaluates c[0] + c[1] x + ... + c[k-1] x^(k-1).
double poly(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

const std::vector<double> kC1{0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
const std::vector<double> kC2{0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
const std::vector<double> kC3{0.544, -0.39978, 0.025054, -6.714e-4};
const std::vector<double> kC4{1.3822, -0.77857, 0.062767, -0.0020322};
const std::vector<double> kC5{-1.5861, -0.31082, -0.083751, 0.0038915};
const std::vector<double> kC6{-0.4803, -0.082676, 0.0030302};
const std::vector<double> kG{-2.273, 0.459};

// Half of the antisymmetric coefficient vector: a[i] weights x(n-i) - x(i+1).
std::vector<double> coefficients(std::size_t n) {
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::sqrt(0.5);
    return a;
  }
  const double an = static_cast<double>(n);
  std::vector<double> m(half);
  double summ2 = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
    summ2 += m[i] * m[i];
  }
  summ2 *= 2.0;
  const double ssumm2 = std::sqrt(summ2);
  const double rsn = 1.0 / std::sqrt(an);
  const double a1 = poly(kC1, rsn) - m[0] / ssumm2;
  std::size_t first = 1;
  double fac = 0.0;
  if (n > 5) {
    const double a2 = -m[1] / ssumm2 + poly(kC2, rsn);
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
    a[1] = a2;
    first = 2;
  } else {
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
  }
  a[0] = a1;
  for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
  return a;
}

}  // namespace

NormalityResult shapiro_wilk(const Eigen::Ref<const Eigen::VectorXd>& sample) {
  const auto n = static_cast<std::size_t>(sample.size());
  if (n < 3) throw Error(ErrorCode::kTooFewSamples, "Shapiro-Wilk needs at least 3 values");
  if (n > 5000) throw Error(ErrorCode::kInvalidArgument, "Shapiro-Wilk is calibrated for n <= 5000");
  if (!sample.allFinite()) throw Error(ErrorCode::kInvalidArgument, "sample has non-finite values");
  std::vector<double> x(sample.data(), sample.data() + n);
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 0.0)) throw Error(ErrorCode::kDegenerateSample, "all values are equal");

  const auto a = coefficients(n);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  double num = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) num += a[i] * (x[n - 1 - i] - x[i]);
  double w = num * num / ss;
  w = std::min(w, 1.0);

  NormalityResult out{w, 1.0};
  if (n == 3) {
    const double p = 6.0 / std::numbers::pi * (std::asin(std::sqrt(w)) - std::numbers::pi / 3.0);
    out.p = std::clamp(p, 0.0, 1.0);
    return out;
  }
  const double an = static_cast<double>(n);
  double y = std::log1p(-w);
  double m = 0.0;
  double s = 0.0;
  if (n <= 11) {
    const double gamma = poly(kG, an);
    if (y >= gamma) {
      out.p = 1e-99;
      return out;
    }
    y = -std::log(gamma - y);
    m = poly(kC3, an);
    s = std::exp(poly(kC4, an));
  } else {
    const double xx = std::log(an);
    m = poly(kC5, xx);
    s = std::exp(poly(kC6, xx));
  }
  out.p = normal_sf((y - m) / s);
  return out;
}

}  // namespace clonefuse

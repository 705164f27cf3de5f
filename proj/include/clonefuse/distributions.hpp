// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace clonefuse {

/// I_x(a, b) by the modified Lentz continued fraction, relative accuracy ~1e-14.
double incomplete_beta(double a, double b, double x);

double normal_cdf(double z);
/// Upper tail P(Z > z).
double normal_sf(double z);
/// Inverse standard normal CDF (Wichura's AS241, about 16 digits).
double normal_quantile(double p);

double student_t_cdf(double t, double df);
/// P(|T| >= |t|).
double student_t_two_sided(double t, double df);
/// Critical value c with P(|T| >= c) = alpha.
double student_t_critical(double alpha, double df);

/// Upper tail P(F >= f) of the F distribution.
double f_sf(double f, double df1, double df2);

}  // namespace clonefuse

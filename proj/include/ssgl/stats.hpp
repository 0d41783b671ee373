#pragma once

namespace ssgl {

/// Standard normal quantile (Wichura's AS 241, double precision).
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double x);

/// Quantile of the chi-squared distribution with 3 degrees of freedom.
/// The CDF has the closed form F(x) = 2*Phi(sqrt(x)) - 1 - sqrt(2x/pi) e^{-x/2};
/// the quantile is solved by Newton iteration on it.
double chi2_3_quantile(double p);

/// log(1 + e^x) without overflow.
double log1p_exp(double x);

} // namespace ssgl

#pragma once

namespace vulnfwd {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF, accurate in both tails (erfc-based).
double norm_cdf(double x);

/// Inverse standard normal CDF (Wichura's AS 241, double precision).
/// p outside (0,1) returns +/-infinity at the endpoints and NaN otherwise.
double norm_ppf(double p);

}  // namespace vulnfwd

#pragma once

namespace fairq::normal {

// Standard Gaussian density, distribution and quantile functions.
double pdf(double z);
double cdf(double z);
// Requires 0 < p < 1; returns -inf / +inf at the closed endpoints.
double quantile(double p);

}  // namespace fairq::normal

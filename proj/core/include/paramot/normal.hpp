#pragma once

namespace paramot {

// Standard normal quantile (inverse CDF). Acklam's rational approximation
// refined by one Halley step against erfc; absolute error below 1e-13 on
// (0,1), far tighter than any tolerance this library certifies.
double inverse_normal_cdf(double p);

double normal_pdf(double x);
double normal_cdf(double x);

}  // namespace paramot

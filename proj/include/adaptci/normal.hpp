#pragma once

namespace adaptci {

double normal_cdf(double x);
// 1 - Phi(x), accurate in the upper tail
double normal_sf(double x);
// z_p = Phi^{-1}(p) for p in (0, 1)
double normal_quantile(double p);
// z_{1-a}, computed from the complement so tiny a keep full precision
double normal_upper_quantile(double a);

} // namespace adaptci

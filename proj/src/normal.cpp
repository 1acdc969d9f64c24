#include "adaptci/normal.hpp"

#include "adaptci/errors.hpp"

#include <boost/math/distributions/normal.hpp>

namespace adaptci {

namespace {
const boost::math::normal_distribution<double> standard{};
}

double normal_cdf(double x)
{
  return boost::math::cdf(standard, x);
}

double normal_sf(double x)
{
  return boost::math::cdf(boost::math::complement(standard, x));
}

double normal_quantile(double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw ValidationError("normal quantile needs p in (0, 1)");
  return boost::math::quantile(standard, p);
}

double normal_upper_quantile(double a)
{
  if (!(a > 0.0 && a < 1.0))
    throw ValidationError("normal quantile needs a level in (0, 1)");
  return boost::math::quantile(boost::math::complement(standard, a));
}

} // namespace adaptci

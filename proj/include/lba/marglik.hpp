#ifndef LBA_MARGLIK_HPP
#define LBA_MARGLIK_HPP

#include "lba/dtsmc.hpp"

namespace lba {

// Product of stage evidence ratios, in logs.
double logml_standard(const TemperTrace& trace);

// Trapezoid quadrature of the expected log-likelihood over the temperature path.
double logml_ti1(const TemperTrace& trace);

// Variance-corrected trapezoid; the variance is the temperature derivative of
// the expected log-likelihood.
double logml_ti2(const TemperTrace& trace);

struct TiFromPmwgResult {
  TemperTrace trace;
  double ti1 = 0.0;
  double ti2 = 0.0;
};

// Tempered-chain route: run the PMwG sampler at every temperature in the
// schedule and integrate the chain averages.
TiFromPmwgResult ti_from_pmwg(const Dataset& data, const Design& design,
                              const std::vector<double>& schedule,
                              const PmwgConfig& config, const HyperConfig& hyper = {});

// The schedule a_p = ((p-1)/(P-1))^(1/0.3) commonly used for tempered chains,
// with P+1 points including the endpoint pair {0, 1}.
std::vector<double> power_schedule(int n_stages, double exponent = 1.0 / 0.3);

}  // namespace lba

#endif

#ifndef LBA_DIAGNOSTICS_HPP
#define LBA_DIAGNOSTICS_HPP

#include <limits>
#include <string>
#include <vector>

#include "lba/dtsmc.hpp"
#include "lba/pmwg.hpp"
#include "lba/types.hpp"

namespace lba {

struct SummaryRow {
  std::string label;
  double mean = 0.0;
  double sd = 0.0;
  double iact = std::numeric_limits<double>::quiet_NaN();  // chains only
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
};

// Integrated autocorrelation time 1 + 2*sum(rho_t), truncated by Geyer's
// initial positive sequence.
double iact(const Vector& series);

// Quantile of a weighted sample (inverse of the weighted empirical CDF).
double weighted_quantile(const Vector& values, const Vector& weights, double q);

// One row per scalar parameter: mu components, Sigma lower triangle,
// correlations below the diagonal, and natural-scale group means.
std::vector<SummaryRow> summarize_chain(const ChainOutput& chain, const Design& design,
                                        bool include_alphas = false);
std::vector<SummaryRow> summarize_cloud(const ParticleCloud& cloud, const Design& design,
                                        bool include_alphas = false);

}  // namespace lba

#endif

#ifndef LBA_DTSMC_HPP
#define LBA_DTSMC_HPP

#include <cstdint>
#include <vector>

#include "lba/pmwg.hpp"
#include "lba/proposals.hpp"
#include "lba/types.hpp"

namespace lba {

struct SmcConfig {
  int cloud_size = 250;      // M
  int particles = 100;       // R per Markov move
  int moves = 10;            // L per temperature
  double ess_target = -1.0;  // <0: 0.8 * M
  int grid_size = 1000;      // G candidates per temperature search
  double prior_switch = 0.1; // prior proposals below this temperature
  bool systematic_resampling = false;  // documented deviation from multinomial
  std::uint64_t seed = 1;
  int workers = 1;

  double effective_ess_target() const {
    return ess_target < 0.0 ? 0.8 * cloud_size : ess_target;
  }
  void validate() const;
};

// Weighted mean and variance of the total log-likelihood at one temperature,
// plus the evidence increment; everything the marginal-likelihood estimators
// consume.
struct StageStats {
  double a = 0.0;
  double log_increment = 0.0;
  double ess = 0.0;
  double loglik_mean = 0.0;  // E_p
  double loglik_var = 0.0;   // V_p
};

using TemperTrace = std::vector<StageStats>;

struct CloudEntry {
  GroupParams group;
  std::vector<Vector> alphas;
  Vector subject_logliks;  // untempered, cached

  double total_loglik() const { return subject_logliks.sum(); }
};

struct ParticleCloud {
  std::vector<CloudEntry> entries;
  Vector weights;
  double temperature = 0.0;
  TemperTrace trace;

  int size() const { return static_cast<int>(entries.size()); }
};

// 1 / sum(W^2) for normalized weights.
double ess(const Vector& weights);

// Grid search over (a_prev, 1] for the candidate whose reweighted ESS is
// closest to the target; 1 if even the full step keeps ESS >= target.
double find_next_temperature(const Vector& total_logliks, const Vector& weights,
                             double a_prev, double ess_target, int grid_size);

struct ReweightResult {
  Vector weights;        // normalized
  double log_increment;  // log of sum of pre-normalization weights
};

// Incremental importance step from a_prev to a_next.
ReweightResult reweight(const Vector& total_logliks, const Vector& weights,
                        double delta_a);

std::vector<int> multinomial_resample(const Vector& weights, int count, RngStream& rng);
std::vector<int> systematic_resample(const Vector& weights, int count, RngStream& rng);

// L tempered PMwG iterations on one cloud entry. On a degenerate-weight
// failure the iteration is retried once with prior proposals.
void markov_move(CloudEntry& entry, double temperature, const Dataset& data,
                 const Design& design, const SmcConfig& config, const HyperConfig& hyper,
                 const ProposalSpec& spec, const RngFactory& entry_rng);

ParticleCloud run_dtsmc(const Dataset& data, const Design& design, const SmcConfig& config,
                        const HyperConfig& hyper = {});

}  // namespace lba

#endif

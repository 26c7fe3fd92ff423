#ifndef LBA_PMWG_HPP
#define LBA_PMWG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "lba/proposals.hpp"
#include "lba/types.hpp"

namespace lba {

enum class Stage { Burnin, Adapt, Sampling };

inline const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Burnin: return "burnin";
    case Stage::Adapt: return "adapt";
    default: return "sampling";
  }
}

struct PmwgConfig {
  int particles_burnin = 100;
  int particles_adapt = 100;
  int particles_sampling = 100;
  long iters_burnin = 500;
  long iters_adapt = 500;
  long iters_sampling = 10000;
  double w_mix = 0.9;
  double epsilon = 1.0;
  double temperature = 1.0;  // likelihood exponent in [0, 1]
  std::uint64_t seed = 1;
  int workers = 1;

  void validate() const;
};

struct ChainDraw {
  Stage stage = Stage::Sampling;
  GroupParams group;
  std::vector<Vector> alphas;  // selected particle per subject
  double total_loglik = 0.0;   // untempered, summed over subjects
};

struct ChainOutput {
  std::vector<ChainDraw> draws;
  PmwgConfig config;
  bool adaptation_succeeded = true;

  std::vector<const ChainDraw*> sampling_draws() const {
    std::vector<const ChainDraw*> out;
    for (const auto& d : draws)
      if (d.stage == Stage::Sampling) out.push_back(&d);
    return out;
  }
};

// Prior draws restricted to effects with positive likelihood (tau below the
// fastest response, b >= A); the group is resampled when a subject cannot be
// initialized under it.
void init_from_prior(const Dataset& data, const Design& design, const HyperConfig& hyper,
                     GroupParams& group, std::vector<Vector>& alphas, RngStream& rng);

// Gibbs full conditionals for the group-level parameters.
Vector gibbs_update_mu(const std::vector<Vector>& alpha_k, const Matrix& sigma,
                       RngStream& rng);
Matrix gibbs_update_sigma(const std::vector<Vector>& alpha_k, const Vector& mu,
                          const Vector& a_vec, const HyperConfig& hyper, RngStream& rng);
Vector gibbs_update_a(const Matrix& sigma, const HyperConfig& hyper, RngStream& rng);

ChainOutput run_pmwg(const Dataset& data, const Design& design, const PmwgConfig& config,
                     const HyperConfig& hyper = {});

}  // namespace lba

#endif

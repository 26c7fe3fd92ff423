#ifndef LBA_SIMULATE_HPP
#define LBA_SIMULATE_HPP

#include <vector>

#include "lba/density.hpp"
#include "lba/model.hpp"
#include "lba/rng.hpp"
#include "lba/types.hpp"

namespace lba {

// Synthetic-experiment layout: the design determines conditions and the
// threshold map, truth determines the group the random effects come from.
struct ExperimentDesign {
  int n_subjects = 10;
  std::vector<long> trials_per_condition;  // one entry per condition
  Design design;
  GroupParams truth;

  void validate() const;
};

struct SimulatedTrial {
  int choice = 1;
  double rt = 0.0;
};

struct SimulatedDataset {
  Dataset data;
  std::vector<Vector> true_alphas;  // one log-scale effects vector per subject
};

// One race: uniform start points, normal drifts, smallest finishing time wins.
// Trials where every drift is negative are redrawn.
SimulatedTrial simulate_trial(const NaturalLbaParams& params, RngStream& rng);

SimulatedDataset simulate_dataset(const ExperimentDesign& experiment, const RngFactory& rng);

}  // namespace lba

#endif

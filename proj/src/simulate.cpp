#include "lba/simulate.hpp"

#include <limits>

namespace lba {

void ExperimentDesign::validate() const {
  if (n_subjects < 1) throw ParameterError("need at least one subject");
  if (static_cast<int>(trials_per_condition.size()) != design.n_conditions)
    throw ParameterError("trials_per_condition must cover every condition");
  for (long n : trials_per_condition)
    if (n < 0) throw ParameterError("trial counts must be nonnegative");
  if (truth.dim() != design.dim())
    throw ParameterError("ground-truth dimension does not match the design");
}

SimulatedTrial simulate_trial(const NaturalLbaParams& params, RngStream& rng) {
  params.validate();
  const int C = static_cast<int>(params.v.size());
  while (true) {
    SimulatedTrial trial;
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < C; ++c) {
      const double d = params.v(c) + params.s * rng.normal();
      if (d <= 0.0) continue;
      const double k = params.A * rng.uniform();
      const double t = (params.b - k) / d + params.tau;
      if (t < best) {
        best = t;
        trial.choice = c + 1;
      }
    }
    if (std::isfinite(best)) {
      trial.rt = best;
      return trial;
    }
  }
}

SimulatedDataset simulate_dataset(const ExperimentDesign& experiment, const RngFactory& rng) {
  experiment.validate();
  const Design& design = experiment.design;
  GroupChol chol(experiment.truth.sigma);

  SimulatedDataset out;
  for (int j = 0; j < experiment.n_subjects; ++j) {
    RngStream stream = rng.stream({static_cast<std::uint64_t>(j)});
    // The group prior has support on b < A, where no trial can finish; such
    // subjects are redrawn, as they could never be observed.
    Vector alpha;
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 1000)
        throw ParameterError("group truth places almost no mass on valid subjects");
      alpha = sample_mvn(experiment.truth.mu, chol, stream);
      bool ok = true;
      for (int z = 1; z <= design.n_conditions && ok; ++z) {
        const NaturalLbaParams p = natural_for_condition(alpha, design, z);
        ok = p.b >= p.A;
      }
      if (ok) break;
    }
    out.true_alphas.push_back(alpha);

    SubjectData trials;
    for (int z = 1; z <= design.n_conditions; ++z) {
      const NaturalLbaParams params = natural_for_condition(alpha, design, z);
      for (long i = 0; i < experiment.trials_per_condition[static_cast<size_t>(z - 1)]; ++i) {
        const SimulatedTrial t = simulate_trial(params, stream);
        trials.push_back({j, z, t.choice, t.rt});
      }
    }
    out.data.subjects.push_back(std::move(trials));
    out.data.subject_ids.push_back(j);
  }
  return out;
}

}  // namespace lba

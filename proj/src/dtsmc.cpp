#include "lba/dtsmc.hpp"

#include <algorithm>
#include <cmath>

#include "lba/density.hpp"
#include "lba/math.hpp"
#include "lba/parallel.hpp"

namespace lba {

void SmcConfig::validate() const {
  if (cloud_size < 2) throw ParameterError("cloud size M must be >= 2");
  const double t = effective_ess_target();
  if (!(t >= 1.0 && t <= cloud_size))
    throw ParameterError("ess_target must lie in [1, M]");
  if (!(prior_switch > 0.0 && prior_switch < 1.0))
    throw ParameterError("prior_switch must lie in (0, 1)");
  if (grid_size < 1) throw ParameterError("grid size must be >= 1");
  if (particles < 1 || moves < 1) throw ParameterError("R and L must be >= 1");
  if (workers < 1) throw ParameterError("worker count must be >= 1");
}

double ess(const Vector& weights) { return 1.0 / weights.squaredNorm(); }

double find_next_temperature(const Vector& total_logliks, const Vector& weights,
                             double a_prev, double ess_target, int grid_size) {
  Vector logw0 = weights.array().log();
  auto candidate_ess = [&](double a) {
    const Vector logw = logw0 + (a - a_prev) * total_logliks;
    return ess(normalized_weights(logw));
  };
  if (candidate_ess(1.0) >= ess_target) return 1.0;
  double best_a = 1.0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= grid_size; ++i) {
    const double a = a_prev + (1.0 - a_prev) * i / grid_size;
    const double gap = std::abs(candidate_ess(a) - ess_target);
    if (gap < best_gap) {
      best_gap = gap;
      best_a = a;
    }
  }
  return best_a;
}

ReweightResult reweight(const Vector& total_logliks, const Vector& weights,
                        double delta_a) {
  const Vector logw = weights.array().log() + delta_a * total_logliks.array();
  ReweightResult r;
  r.log_increment = log_sum_exp(logw);
  if (!std::isfinite(r.log_increment))
    throw DegenerateWeightsError(-1, -1, "all cloud weights vanished during reweighting");
  r.weights = (logw.array() - r.log_increment).exp();
  return r;
}

std::vector<int> multinomial_resample(const Vector& weights, int count, RngStream& rng) {
  const int m = static_cast<int>(weights.size());
  Vector cum(m);
  double acc = 0.0;
  for (int i = 0; i < m; ++i) { acc += weights(i); cum(i) = acc; }
  cum(m - 1) = 1.0;
  std::vector<int> out(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double u = rng.uniform();
    const int idx = static_cast<int>(
        std::lower_bound(cum.data(), cum.data() + m, u) - cum.data());
    out[static_cast<size_t>(i)] = std::min(idx, m - 1);
  }
  return out;
}

std::vector<int> systematic_resample(const Vector& weights, int count, RngStream& rng) {
  const int m = static_cast<int>(weights.size());
  std::vector<int> out(static_cast<size_t>(count));
  const double u0 = rng.uniform() / count;
  double acc = weights(0);
  int idx = 0;
  for (int i = 0; i < count; ++i) {
    const double u = u0 + static_cast<double>(i) / count;
    while (u > acc && idx < m - 1) acc += weights(++idx);
    out[static_cast<size_t>(i)] = idx;
  }
  return out;
}

namespace {

constexpr std::uint64_t kKeyInit = 10;
constexpr std::uint64_t kKeyResample = 11;
constexpr std::uint64_t kKeyMove = 12;
constexpr std::uint64_t kKeyGibbs = 13;
constexpr std::uint64_t kKeyIndex = 14;

void one_pmwg_iteration(CloudEntry& entry, double temperature, const Dataset& data,
                        const Design& design, int n_particles, const HyperConfig& hyper,
                        const ProposalSpec& spec, const RngFactory& rng,
                        std::uint64_t move_idx, int workers) {
  RngStream gibbs = rng.stream({kKeyGibbs, move_idx});
  entry.group.mu = gibbs_update_mu(entry.alphas, entry.group.sigma, gibbs);
  entry.group.sigma =
      gibbs_update_sigma(entry.alphas, entry.group.mu, entry.group.a, hyper, gibbs);
  entry.group.a = gibbs_update_a(entry.group.sigma, hyper, gibbs);

  ParticleSet particles =
      conditional_mc(data, design, entry.group, entry.alphas, spec, temperature,
                     n_particles, rng, move_idx, workers);

  RngStream index_stream = rng.stream({kKeyIndex, move_idx});
  const std::vector<int> k = sample_index(particles, index_stream);
  for (int j = 0; j < data.n_subjects(); ++j) {
    const int kj = k[static_cast<size_t>(j)];
    entry.alphas[static_cast<size_t>(j)] = particles.particles[static_cast<size_t>(j)].row(kj);
    entry.subject_logliks(j) = particles.logliks[static_cast<size_t>(j)](kj);
  }
}

void record_stage(ParticleCloud& cloud, double a, double log_increment, double realized_ess) {
  Vector ll(cloud.size());
  for (int m = 0; m < cloud.size(); ++m) ll(m) = cloud.entries[static_cast<size_t>(m)].total_loglik();
  StageStats s;
  s.a = a;
  s.log_increment = log_increment;
  s.ess = realized_ess;
  s.loglik_mean = cloud.weights.dot(ll);
  s.loglik_var = cloud.weights.dot((ll.array() - s.loglik_mean).square().matrix());
  cloud.trace.push_back(s);
}

}  // namespace

void markov_move(CloudEntry& entry, double temperature, const Dataset& data,
                 const Design& design, const SmcConfig& config, const HyperConfig& hyper,
                 const ProposalSpec& spec, const RngFactory& entry_rng) {
  // Moves run in parallel across entries, so the inner conditional MC is serial.
  for (int l = 0; l < config.moves; ++l) {
    try {
      one_pmwg_iteration(entry, temperature, data, design, config.particles, hyper, spec,
                         entry_rng, static_cast<std::uint64_t>(l), 1);
    } catch (const DegenerateWeightsError&) {
      ProposalSpec prior_spec;
      prior_spec.kind = ProposalKind::Prior;
      one_pmwg_iteration(entry, temperature, data, design, config.particles, hyper,
                         prior_spec, entry_rng.derived({99}),
                         static_cast<std::uint64_t>(l), 1);
    }
  }
}

ParticleCloud run_dtsmc(const Dataset& data, const Design& design, const SmcConfig& config,
                        const HyperConfig& hyper) {
  config.validate();
  const int M = config.cloud_size;
  const int S = data.n_subjects();
  const int D = design.dim();
  const RngFactory rng(config.seed);

  ParticleCloud cloud;
  cloud.entries.resize(static_cast<size_t>(M));
  cloud.weights = Vector::Constant(M, 1.0 / M);
  cloud.temperature = 0.0;

  // Initial cloud from the prior restricted to positive-likelihood effects,
  // so the expected log likelihood at temperature 0 is finite.
  parallel_for(M, config.workers, [&](long m) {
    RngStream stream = rng.stream({kKeyInit, static_cast<std::uint64_t>(m)});
    CloudEntry& e = cloud.entries[static_cast<size_t>(m)];
    init_from_prior(data, design, hyper, e.group, e.alphas, stream);
    e.subject_logliks.resize(S);
    for (int j = 0; j < S; ++j)
      e.subject_logliks(j) =
          subject_loglik(data.subjects[static_cast<size_t>(j)], e.alphas[static_cast<size_t>(j)], design);
  });

  record_stage(cloud, 0.0, 0.0, static_cast<double>(M));

  int stage = 0;
  while (cloud.temperature < 1.0) {
    ++stage;
    Vector total_ll(M);
    for (int m = 0; m < M; ++m) total_ll(m) = cloud.entries[static_cast<size_t>(m)].total_loglik();

    const double a_next = find_next_temperature(total_ll, cloud.weights, cloud.temperature,
                                                config.effective_ess_target(),
                                                config.grid_size);
    const ReweightResult rw = reweight(total_ll, cloud.weights, a_next - cloud.temperature);
    const double realized_ess = ess(rw.weights);

    RngStream resample_stream = rng.stream({kKeyResample, static_cast<std::uint64_t>(stage)});
    const std::vector<int> picks =
        config.systematic_resampling ? systematic_resample(rw.weights, M, resample_stream)
                                     : multinomial_resample(rw.weights, M, resample_stream);
    std::vector<CloudEntry> resampled;
    resampled.reserve(static_cast<size_t>(M));
    for (int idx : picks) resampled.push_back(cloud.entries[static_cast<size_t>(idx)]);
    cloud.entries = std::move(resampled);
    cloud.weights = Vector::Constant(M, 1.0 / M);

    // Proposal for the Markov moves: prior at low temperature, otherwise a
    // normal fitted to the current cloud, refit once per temperature.
    ProposalSpec spec;
    if (a_next < config.prior_switch) {
      spec.kind = ProposalKind::Prior;
    } else {
      std::vector<Matrix> draws_alpha(static_cast<size_t>(S), Matrix(M, D));
      Matrix draws_cond(M, theta_cond_dim(D));
      for (int m = 0; m < M; ++m) {
        const CloudEntry& e = cloud.entries[static_cast<size_t>(m)];
        draws_cond.row(m) = theta_cond_vector(e.group.mu, e.group.sigma);
        for (int j = 0; j < S; ++j)
          draws_alpha[static_cast<size_t>(j)].row(m) = e.alphas[static_cast<size_t>(j)];
      }
      FitOptions options;
      options.n_min = 0;  // the cloud is all there is; structural minimum applies
      auto fitted = fit_adapted_proposals(draws_alpha, draws_cond, options);
      if (fitted) {
        spec.kind = ProposalKind::AdaptedMixture;
        spec.adapted = std::make_shared<const std::vector<AdaptedProposal>>(std::move(*fitted));
      } else {
        spec.kind = ProposalKind::Prior;
      }
    }

    parallel_for(M, config.workers, [&](long m) {
      const RngFactory entry_rng =
          rng.derived({kKeyMove, static_cast<std::uint64_t>(stage), static_cast<std::uint64_t>(m)});
      markov_move(cloud.entries[static_cast<size_t>(m)], a_next, data, design, config, hyper,
                  spec, entry_rng);
    });

    cloud.temperature = a_next;
    record_stage(cloud, a_next, rw.log_increment, realized_ess);
  }
  return cloud;
}

}  // namespace lba

#include "lba/pmwg.hpp"

#include <cmath>
#include <cstdio>

#include "lba/density.hpp"
#include "lba/math.hpp"

namespace lba {

void PmwgConfig::validate() const {
  if (particles_burnin < 1 || particles_adapt < 1 || particles_sampling < 1)
    throw ParameterError("particle counts must be >= 1");
  if (iters_burnin < 0 || iters_adapt < 0 || iters_sampling < 0)
    throw ParameterError("iteration counts must be >= 0");
  if (!(temperature >= 0.0 && temperature <= 1.0))
    throw ParameterError("temperature must lie in [0, 1]");
  if (workers < 1) throw ParameterError("worker count must be >= 1");
}

void init_from_prior(const Dataset& data, const Design& design, const HyperConfig& hyper,
                     GroupParams& group, std::vector<Vector>& alphas, RngStream& rng) {
  const int S = data.n_subjects();
  const int D = design.dim();
  alphas.assign(static_cast<size_t>(S), Vector());
  for (int round = 0; round < 200; ++round) {
    group = sample_group_prior(D, hyper, rng);
    GroupChol chol(group.sigma);
    bool ok = true;
    for (int j = 0; j < S && ok; ++j) {
      ok = false;
      for (int attempt = 0; attempt < 2000; ++attempt) {
        const Vector alpha = sample_mvn(group.mu, chol, rng);
        if (std::isfinite(subject_loglik(data.subjects[static_cast<size_t>(j)], alpha, design))) {
          alphas[static_cast<size_t>(j)] = alpha;
          ok = true;
          break;
        }
      }
    }
    if (ok) return;
  }
  throw DataError("could not find positive-likelihood starting values for the data");
}

Vector gibbs_update_mu(const std::vector<Vector>& alpha_k, const Matrix& sigma,
                       RngStream& rng) {
  const int d = static_cast<int>(sigma.rows());
  const int S = static_cast<int>(alpha_k.size());
  GroupChol chol(sigma);
  const Matrix sigma_inv = chol.llt.solve(Matrix::Identity(d, d));
  const Matrix post_prec = static_cast<double>(S) * sigma_inv + Matrix::Identity(d, d);
  Eigen::LLT<Matrix> prec_llt(post_prec);
  Vector alpha_sum = Vector::Zero(d);
  for (const Vector& a : alpha_k) alpha_sum += a;
  const Vector post_mean = prec_llt.solve(sigma_inv * alpha_sum);
  // Draw from N(mean, prec^{-1}) via the precision Cholesky.
  Vector z(d);
  for (int i = 0; i < d; ++i) z(i) = rng.normal();
  const Matrix lt = prec_llt.matrixL().toDenseMatrix().transpose();
  return post_mean + lt.triangularView<Eigen::Upper>().solve(z);
}

Matrix gibbs_update_sigma(const std::vector<Vector>& alpha_k, const Vector& mu,
                          const Vector& a_vec, const HyperConfig& hyper, RngStream& rng) {
  const int d = static_cast<int>(mu.size());
  const double k_alpha = hyper.v_alpha + d - 1 + static_cast<double>(alpha_k.size());
  Matrix b = (2.0 * hyper.v_alpha * a_vec.cwiseInverse()).asDiagonal();
  for (const Vector& a : alpha_k) {
    const Vector r = a - mu;
    b.noalias() += r * r.transpose();
  }
  return sample_inverse_wishart(k_alpha, b, rng);
}

Vector gibbs_update_a(const Matrix& sigma, const HyperConfig& hyper, RngStream& rng) {
  const int d = static_cast<int>(sigma.rows());
  GroupChol chol(sigma);
  const Matrix sigma_inv = chol.llt.solve(Matrix::Identity(d, d));
  const Vector A = hyper.scales(d);
  const double shape = 0.5 * (hyper.v_alpha + d);
  Vector a(d);
  for (int i = 0; i < d; ++i)
    a(i) = rng.inverse_gamma(shape, hyper.v_alpha * sigma_inv(i, i) + 1.0 / (A(i) * A(i)));
  return a;
}

namespace {

constexpr std::uint64_t kKeyInit = 0;
constexpr std::uint64_t kKeyGibbs = 1;
constexpr std::uint64_t kKeyParticles = 2;
constexpr std::uint64_t kKeyIndex = 3;

struct StagePlan {
  Stage stage;
  long iters;
  int particles;
};

}  // namespace

ChainOutput run_pmwg(const Dataset& data, const Design& design, const PmwgConfig& config,
                     const HyperConfig& hyper) {
  config.validate();
  if (data.n_subjects() == 0) throw DataError("dataset has no subjects");
  const int S = data.n_subjects();
  const int D = design.dim();
  const RngFactory rng(config.seed);

  ChainOutput out;
  out.config = config;
  out.draws.reserve(static_cast<size_t>(config.iters_burnin + config.iters_adapt +
                                        config.iters_sampling));

  RngStream init_stream = rng.stream({kKeyInit});
  GroupParams group;
  std::vector<Vector> alpha_k;
  init_from_prior(data, design, hyper, group, alpha_k, init_stream);

  const StagePlan plan[] = {
      {Stage::Burnin, config.iters_burnin, config.particles_burnin},
      {Stage::Adapt, config.iters_adapt, config.particles_adapt},
      {Stage::Sampling, config.iters_sampling, config.particles_sampling},
  };

  ProposalSpec spec;
  spec.kind = ProposalKind::PrevMixture;
  spec.w_mix = config.w_mix;
  spec.epsilon = config.epsilon;

  long iteration = 0;
  for (const StagePlan& stage : plan) {
    if (stage.stage == Stage::Sampling && stage.iters > 0) {
      // Build adapted proposals from the adaptation-stage draws (the burn-in
      // transient would act as high-leverage noise in the regression); fall
      // back to all pre-sampling draws when the adaptation stage is short.
      // Keep the mixture proposal if the fit is unavailable or degenerate.
      long first = static_cast<long>(out.draws.size()) - config.iters_adapt;
      if (config.iters_adapt < 20L * (D + theta_cond_dim(D))) first = 0;
      const long n = static_cast<long>(out.draws.size()) - first;
      std::vector<Matrix> draws_alpha(static_cast<size_t>(S));
      Matrix draws_cond(n, theta_cond_dim(D));
      for (int j = 0; j < S; ++j) draws_alpha[static_cast<size_t>(j)].resize(n, D);
      for (long i = 0; i < n; ++i) {
        const ChainDraw& d = out.draws[static_cast<size_t>(first + i)];
        draws_cond.row(i) = theta_cond_vector(d.group.mu, d.group.sigma);
        for (int j = 0; j < S; ++j)
          draws_alpha[static_cast<size_t>(j)].row(i) = d.alphas[static_cast<size_t>(j)];
      }
      auto fitted = fit_adapted_proposals(draws_alpha, draws_cond);
      if (fitted) {
        spec.kind = ProposalKind::AdaptedMixture;
        spec.adapted = std::make_shared<const std::vector<AdaptedProposal>>(std::move(*fitted));
      } else {
        out.adaptation_succeeded = false;
        std::fprintf(stderr,
                     "pmwg: adaptation fit unavailable (%ld draws); sampling stage keeps "
                     "the mixture proposal\n",
                     n);
      }
    }

    for (long it = 0; it < stage.iters; ++it, ++iteration) {
      const std::uint64_t ikey = static_cast<std::uint64_t>(iteration);
      RngStream gibbs_stream = rng.stream({kKeyGibbs, ikey});
      group.mu = gibbs_update_mu(alpha_k, group.sigma, gibbs_stream);
      group.sigma = gibbs_update_sigma(alpha_k, group.mu, group.a, hyper, gibbs_stream);
      group.a = gibbs_update_a(group.sigma, hyper, gibbs_stream);

      ParticleSet particles = conditional_mc(
          data, design, group, alpha_k, spec, config.temperature, stage.particles, rng,
          (kKeyParticles << 56) | ikey, config.workers, iteration);

      RngStream index_stream = rng.stream({kKeyIndex, ikey});
      const std::vector<int> k = sample_index(particles, index_stream);

      ChainDraw draw;
      draw.stage = stage.stage;
      draw.group = group;
      draw.alphas.resize(static_cast<size_t>(S));
      draw.total_loglik = 0.0;
      for (int j = 0; j < S; ++j) {
        const int kj = k[static_cast<size_t>(j)];
        draw.alphas[static_cast<size_t>(j)] = particles.particles[static_cast<size_t>(j)].row(kj);
        draw.total_loglik += particles.logliks[static_cast<size_t>(j)](kj);
      }
      alpha_k = draw.alphas;
      out.draws.push_back(std::move(draw));
    }
  }
  return out;
}

}  // namespace lba

#include "lba/proposals.hpp"

#include <algorithm>
#include <cmath>

#include "lba/density.hpp"
#include "lba/math.hpp"
#include "lba/parallel.hpp"

namespace lba {

int theta_cond_dim(int d) { return d + d * (d + 1) / 2; }

Vector theta_cond_vector(const Vector& mu, const Matrix& sigma) {
  const int d = static_cast<int>(mu.size());
  GroupChol chol(sigma);
  const Matrix l = chol.llt.matrixL();
  Vector out(theta_cond_dim(d));
  out.head(d) = mu;
  int idx = d;
  for (int j = 0; j < d; ++j) {
    out(idx++) = std::log(l(j, j));
    for (int i = j + 1; i < d; ++i) out(idx++) = l(i, j);
  }
  return out;
}

namespace {

void check_spec(const ProposalSpec& spec, const Vector* conditioned) {
  if (!(spec.w_mix > 0.0 && spec.w_mix <= 1.0))
    throw ParameterError("w_mix must lie in (0, 1]");
  if (!(spec.epsilon > 0.0 && spec.epsilon <= 1.0))
    throw ParameterError("epsilon must lie in (0, 1]");
  if (spec.kind == ProposalKind::PrevMixture && conditioned == nullptr)
    throw ParameterError("PrevMixture proposal needs a conditioned particle");
  if (spec.kind == ProposalKind::AdaptedMixture && !spec.adapted)
    throw ParameterError("AdaptedMixture proposal needs fitted maps");
}

}  // namespace

Vector propose(int subject, const ProposalSpec& spec, const GroupParams& group,
               const GroupChol& chol, const Vector* conditioned, RngStream& rng) {
  check_spec(spec, conditioned);
  switch (spec.kind) {
    case ProposalKind::Prior:
      return sample_mvn(group.mu, chol, rng);
    case ProposalKind::PrevMixture: {
      if (rng.uniform() >= spec.w_mix) return sample_mvn(group.mu, chol, rng);
      Vector z(group.dim());
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
      const Vector step = chol.llt.matrixL() * z;
      return *conditioned + std::sqrt(spec.epsilon) * step;
    }
    case ProposalKind::AdaptedMixture: {
      if (rng.uniform() >= spec.w_mix) return sample_mvn(group.mu, chol, rng);
      const AdaptedProposal& ap = (*spec.adapted)[static_cast<size_t>(subject)];
      const Vector mean = ap.mean_given(theta_cond_vector(group.mu, group.sigma));
      GroupChol pc(ap.cov);
      return sample_mvn(mean, pc, rng);
    }
  }
  throw ParameterError("unknown proposal kind");
}

double proposal_logdensity(const Vector& alpha, int subject, const ProposalSpec& spec,
                           const GroupParams& group, const GroupChol& chol,
                           const Vector* conditioned) {
  check_spec(spec, conditioned);
  const double log_prior = mvn_logpdf(alpha, group.mu, chol);
  if (spec.kind == ProposalKind::Prior || spec.w_mix == 0.0) return log_prior;

  double log_comp;
  if (spec.kind == ProposalKind::PrevMixture) {
    GroupChol scaled(spec.epsilon * group.sigma);
    log_comp = mvn_logpdf(alpha, *conditioned, scaled);
  } else {
    const AdaptedProposal& ap = (*spec.adapted)[static_cast<size_t>(subject)];
    const Vector mean = ap.mean_given(theta_cond_vector(group.mu, group.sigma));
    GroupChol pc(ap.cov);
    log_comp = mvn_logpdf(alpha, mean, pc);
  }
  if (spec.w_mix >= 1.0) return log_comp;
  return log_sum_exp(std::log(spec.w_mix) + log_comp,
                     std::log1p(-spec.w_mix) + log_prior);
}

double importance_logweight(double loglik, double log_prior, double log_proposal,
                            double temperature) {
  if (temperature == 0.0) return log_prior - log_proposal;  // lik^0 even at zero likelihood
  if (loglik == kLogZero) return kLogZero;
  return temperature * loglik + log_prior - log_proposal;
}

ParticleSet conditional_mc(const Dataset& data, const Design& design,
                           const GroupParams& group, const std::vector<Vector>& conditioned,
                           const ProposalSpec& spec, double temperature, int n_particles,
                           const RngFactory& rng, std::uint64_t iter_key, int workers,
                           long iteration_for_error) {
  const int S = data.n_subjects();
  const int R = n_particles;
  if (R < 1) throw ParameterError("particle count must be >= 1");
  if (static_cast<int>(conditioned.size()) != S)
    throw ParameterError("conditioned particle count mismatch");

  GroupChol chol(group.sigma);
  ParticleSet set;
  set.particles.assign(static_cast<size_t>(S), Matrix(R, design.dim()));
  set.logliks.assign(static_cast<size_t>(S), Vector(R));
  set.logweights.assign(static_cast<size_t>(S), Vector(R));
  set.weights.assign(static_cast<size_t>(S), Vector(R));

  for (int j = 0; j < S; ++j) set.particles[static_cast<size_t>(j)].row(0) = conditioned[static_cast<size_t>(j)];

  parallel_for(static_cast<long>(S) * R, workers, [&](long idx) {
    const int j = static_cast<int>(idx / R);
    const int r = static_cast<int>(idx % R);
    auto& particles = set.particles[static_cast<size_t>(j)];
    if (r > 0) {
      RngStream stream = rng.stream({iter_key, static_cast<std::uint64_t>(j),
                                     static_cast<std::uint64_t>(r)});
      particles.row(r) =
          propose(j, spec, group, chol, &conditioned[static_cast<size_t>(j)], stream);
    }
    const Vector alpha = particles.row(r);
    const double ll = subject_loglik(data.subjects[static_cast<size_t>(j)], alpha, design);
    const double lp = mvn_logpdf(alpha, group.mu, chol);
    const double lq =
        proposal_logdensity(alpha, j, spec, group, chol, &conditioned[static_cast<size_t>(j)]);
    set.logliks[static_cast<size_t>(j)](r) = ll;
    set.logweights[static_cast<size_t>(j)](r) = importance_logweight(ll, lp, lq, temperature);
  });

  for (int j = 0; j < S; ++j) {
    auto& logw = set.logweights[static_cast<size_t>(j)];
    const double lse = log_sum_exp(logw);
    if (!std::isfinite(lse))
      throw DegenerateWeightsError(
          j, iteration_for_error,
          "all importance weights vanished for subject " + std::to_string(j) +
              (iteration_for_error >= 0
                   ? " at iteration " + std::to_string(iteration_for_error)
                   : ""));
    set.weights[static_cast<size_t>(j)] = (logw.array() - lse).exp();
  }
  return set;
}

std::vector<int> sample_index(const ParticleSet& particles, RngStream& rng) {
  std::vector<int> k(static_cast<size_t>(particles.n_subjects()), 0);
  for (int j = 0; j < particles.n_subjects(); ++j) {
    const Vector& w = particles.weights[static_cast<size_t>(j)];
    const double u = rng.uniform();
    double acc = 0.0;
    int pick = static_cast<int>(w.size()) - 1;
    for (int r = 0; r < w.size(); ++r) {
      acc += w(r);
      if (u <= acc) { pick = r; break; }
    }
    k[static_cast<size_t>(j)] = pick;
  }
  return k;
}

std::optional<std::vector<AdaptedProposal>> fit_adapted_proposals(
    const std::vector<Matrix>& draws_alpha, const Matrix& draws_cond,
    const FitOptions& options) {
  if (draws_alpha.empty()) return std::nullopt;
  const long n = draws_cond.rows();
  const int dc = static_cast<int>(draws_cond.cols());
  const int da = static_cast<int>(draws_alpha.front().cols());
  const int joint = da + dc;
  const long n_min = options.n_min >= 0 ? options.n_min : 20L * joint;
  if (n < n_min || n < joint + 2) return std::nullopt;

  const Vector cond_mean = draws_cond.colwise().mean();
  const Matrix cond_centered = draws_cond.rowwise() - cond_mean.transpose();

  // Resampled or autocorrelated histories carry fewer distinct conditioning
  // draws than rows; shrink the regression toward the marginal so that the
  // conditional covariance is not eaten by spurious fit (dc regressors on
  // n_distinct observations explain ~dc/n_distinct of the variance by chance).
  std::vector<double> keys(static_cast<size_t>(n));
  const Vector probe = Vector::LinSpaced(dc, 1.0, 2.0);
  for (long i = 0; i < n; ++i) keys[static_cast<size_t>(i)] = draws_cond.row(i) * probe;
  std::sort(keys.begin(), keys.end());
  const long n_distinct =
      std::unique(keys.begin(), keys.end()) - keys.begin();
  const double lambda =
      std::clamp(1.0 - static_cast<double>(dc + 2) / static_cast<double>(n_distinct), 0.0, 1.0);

  std::vector<AdaptedProposal> out;
  out.reserve(draws_alpha.size());
  for (const Matrix& a : draws_alpha) {
    if (a.rows() != n) throw ParameterError("draw count mismatch in adaptation fit");
    AdaptedProposal ap;
    ap.mean_alpha = a.colwise().mean();
    ap.mean_cond = cond_mean;
    const Matrix a_centered = a.rowwise() - ap.mean_alpha.transpose();
    const double denom = static_cast<double>(n - 1);
    Matrix s_aa = a_centered.transpose() * a_centered / denom;
    const Matrix s_ac = a_centered.transpose() * cond_centered / denom;
    Matrix s_cc = cond_centered.transpose() * cond_centered / denom;

    auto solve_cc = [&](const Matrix& cc) -> std::optional<AdaptedProposal> {
      Eigen::LLT<Matrix> llt(cc);
      if (llt.info() != Eigen::Success) return std::nullopt;
      AdaptedProposal fit = ap;
      const Matrix gain_full = llt.solve(s_ac.transpose()).transpose();
      fit.gain = lambda * gain_full;
      // Exact residual covariance of the shrunk predictor alpha - lambda*G*c.
      fit.cov = s_aa - lambda * (2.0 - lambda) * gain_full * s_ac.transpose();
      fit.cov = 0.5 * (fit.cov + fit.cov.transpose());
      if (Eigen::LLT<Matrix>(fit.cov).info() != Eigen::Success) return std::nullopt;
      return fit;
    };

    auto fitted = solve_cc(s_cc);
    if (!fitted) {
      // Near-singular with few unique particles: ridge the joint blocks once.
      const double ridge_cc = options.ridge * s_cc.diagonal().mean();
      const double ridge_aa = options.ridge * s_aa.diagonal().mean();
      s_cc.diagonal().array() += ridge_cc;
      s_aa.diagonal().array() += ridge_aa;
      fitted = solve_cc(s_cc);
      if (!fitted) return std::nullopt;
    }
    out.push_back(std::move(*fitted));
  }
  return out;
}

}  // namespace lba

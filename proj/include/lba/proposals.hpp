#ifndef LBA_PROPOSALS_HPP
#define LBA_PROPOSALS_HPP

#include <memory>
#include <optional>
#include <vector>

#include "lba/model.hpp"
#include "lba/types.hpp"

namespace lba {

// Linear-Gaussian conditional map for one subject: the fitted normal of
// alpha_j given the (mu, L) block, with L the Cholesky factor of Sigma
// (log-transformed diagonal).
struct AdaptedProposal {
  Vector mean_alpha;   // marginal mean of alpha_j in the joint fit
  Vector mean_cond;    // mean of the conditioning vector
  Matrix gain;         // cross-cov * inv(cond-cov)
  Matrix cov;          // conditional covariance (Schur complement)

  Vector mean_given(const Vector& cond) const {
    return mean_alpha + gain * (cond - mean_cond);
  }
};

enum class ProposalKind { Prior, PrevMixture, AdaptedMixture };

struct ProposalSpec {
  ProposalKind kind = ProposalKind::Prior;
  double w_mix = 0.9;    // weight on the non-prior mixture component, (0, 1]
  double epsilon = 1.0;  // covariance scale for PrevMixture, (0, 1]
  // One entry per subject for AdaptedMixture.
  std::shared_ptr<const std::vector<AdaptedProposal>> adapted;
};

// (mu, vech(L)) with log-transformed diagonal of L; the conditioning vector
// of the adapted proposal fit.
Vector theta_cond_vector(const Vector& mu, const Matrix& sigma);
int theta_cond_dim(int d);

// Weighted per-subject particles after a conditional Monte Carlo pass.
struct ParticleSet {
  // particles[j] is R x D; row 0 holds the conditioned particle.
  std::vector<Matrix> particles;
  std::vector<Vector> logliks;      // untempered subject log-likelihoods
  std::vector<Vector> logweights;   // unnormalized
  std::vector<Vector> weights;      // normalized per subject

  int n_subjects() const { return static_cast<int>(particles.size()); }
};

Vector propose(int subject, const ProposalSpec& spec, const GroupParams& group,
               const GroupChol& chol, const Vector* conditioned, RngStream& rng);

double proposal_logdensity(const Vector& alpha, int subject, const ProposalSpec& spec,
                           const GroupParams& group, const GroupChol& chol,
                           const Vector* conditioned);

// a * loglik + log prior - log proposal; requires the subject loglik already
// evaluated so callers can cache it.
double importance_logweight(double loglik, double log_prior, double log_proposal,
                            double temperature);

// Alg. refresh of R-1 particles per subject with the conditioned particle kept
// in slot 0; weights computed for all R. Throws DegenerateWeightsError when a
// subject's weights all vanish.
ParticleSet conditional_mc(const Dataset& data, const Design& design,
                           const GroupParams& group, const std::vector<Vector>& conditioned,
                           const ProposalSpec& spec, double temperature, int n_particles,
                           const RngFactory& rng, std::uint64_t iter_key, int workers,
                           long iteration_for_error = -1);

// One categorical index per subject from the normalized weights.
std::vector<int> sample_index(const ParticleSet& particles, RngStream& rng);

struct FitOptions {
  long n_min = -1;        // -1: 20 x joint dimension
  double ridge = 1e-8;    // scaled by mean diagonal before the retry
};

// Fit a joint normal to (alpha_j, mu, vech-L) draws and return the
// conditional map per subject. draws_alpha[j] is n x D; draws_cond is n x Dc.
// Subjects whose fit fails (or n below n_min) get no entry.
std::optional<std::vector<AdaptedProposal>> fit_adapted_proposals(
    const std::vector<Matrix>& draws_alpha, const Matrix& draws_cond,
    const FitOptions& options = {});

}  // namespace lba

#endif

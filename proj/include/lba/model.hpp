#ifndef LBA_MODEL_HPP
#define LBA_MODEL_HPP

#include <Eigen/Cholesky>

#include "lba/rng.hpp"
#include "lba/types.hpp"

namespace lba {

// Group-level parameters theta = (mu, Sigma, a_1..a_D).
struct GroupParams {
  Vector mu;
  Matrix sigma;  // symmetric positive definite
  Vector a;      // auxiliary covariance-prior scales, > 0

  int dim() const { return static_cast<int>(mu.size()); }
  void validate() const;
};

// Hyperparameters of the group prior.
struct HyperConfig {
  double v_alpha = 2.0;
  Vector A_scales;  // empty means all ones

  Vector scales(int dim) const {
    if (A_scales.size() == 0) return Vector::Ones(dim);
    return A_scales;
  }
};

// Cached Cholesky of a group covariance, shared across the particles that
// evaluate the same prior.
struct GroupChol {
  Eigen::LLT<Matrix> llt;
  double log_det = 0.0;  // log |Sigma|

  explicit GroupChol(const Matrix& sigma);
};

Vector to_natural(const Vector& alpha);   // componentwise exp
Vector from_natural(const Vector& nat);   // componentwise log

// Multivariate normal log density N(alpha | mu, Sigma).
double log_prior_alpha(const Vector& alpha, const GroupParams& group);
double log_prior_alpha(const Vector& alpha, const Vector& mu, const GroupChol& chol);

double mvn_logpdf(const Vector& x, const Vector& mu, const GroupChol& chol);

// Exact log densities, normalizing constants included.
double inverse_wishart_logpdf(const Matrix& x, double dof, const Matrix& scale);
double inverse_gamma_logpdf(double x, double shape, double scale);

// N(0,I) on mu + inverse Wishart on Sigma given a + inverse gamma on each a_d.
double log_prior_theta(const GroupParams& group, const HyperConfig& hyper);

// Sampling. Inverse Wishart draws go through a Bartlett factor of the inverse
// and triangular solves.
Matrix sample_wishart(double dof, const Matrix& scale_chol_lower, RngStream& rng);
Matrix sample_inverse_wishart(double dof, const Matrix& scale, RngStream& rng);
GroupParams sample_group_prior(int dim, const HyperConfig& hyper, RngStream& rng);
Vector sample_alpha_prior(const GroupParams& group, RngStream& rng);
Vector sample_mvn(const Vector& mu, const GroupChol& chol, RngStream& rng);

// Moments of exp(alpha) on the natural scale.
void lognormal_moments(const GroupParams& group, Vector& mean_out, Matrix& cov_out);

Matrix cov_to_corr(const Matrix& sigma);

}  // namespace lba

#endif

#include "lba/model.hpp"

#include <cmath>

#include "lba/math.hpp"

namespace lba {

namespace {

double log_multigamma(double a, int d) {
  double out = 0.25 * d * (d - 1) * std::log(M_PI);
  for (int j = 0; j < d; ++j) out += std::lgamma(a - 0.5 * j);
  return out;
}

}  // namespace

void GroupParams::validate() const {
  const int d = dim();
  if (sigma.rows() != d || sigma.cols() != d)
    throw ParameterError("covariance dimension mismatch");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ParameterError("covariance not symmetric");
  if (Eigen::LLT<Matrix>(sigma).info() != Eigen::Success)
    throw ParameterError("covariance not positive definite");
  if (a.size() > 0 && a.minCoeff() <= 0.0)
    throw ParameterError("auxiliary scales must be positive");
}

GroupChol::GroupChol(const Matrix& sigma) : llt(sigma) {
  if (llt.info() != Eigen::Success)
    throw ParameterError("covariance not positive definite");
  log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Vector to_natural(const Vector& alpha) { return alpha.array().exp(); }
Vector from_natural(const Vector& nat) { return nat.array().log(); }

double mvn_logpdf(const Vector& x, const Vector& mu, const GroupChol& chol) {
  const Vector z = chol.llt.matrixL().solve(x - mu);
  return -0.5 * (x.size() * kLog2Pi + chol.log_det + z.squaredNorm());
}

double log_prior_alpha(const Vector& alpha, const GroupParams& group) {
  GroupChol chol(group.sigma);
  return mvn_logpdf(alpha, group.mu, chol);
}

double log_prior_alpha(const Vector& alpha, const Vector& mu, const GroupChol& chol) {
  return mvn_logpdf(alpha, mu, chol);
}

double inverse_wishart_logpdf(const Matrix& x, double dof, const Matrix& scale) {
  const int d = static_cast<int>(x.rows());
  GroupChol cx(x);
  GroupChol cs(scale);
  // tr(S X^{-1}) = || L_x^{-1} L_s ||_F^2
  const Matrix m = cx.llt.matrixL().solve(cs.llt.matrixL().toDenseMatrix());
  const double trace_term = m.squaredNorm();
  return 0.5 * dof * cs.log_det - 0.5 * dof * d * std::log(2.0) -
         log_multigamma(0.5 * dof, d) - 0.5 * (dof + d + 1) * cx.log_det -
         0.5 * trace_term;
}

double inverse_gamma_logpdf(double x, double shape, double scale) {
  if (x <= 0.0) return kLogZero;
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) -
         scale / x;
}

double log_prior_theta(const GroupParams& group, const HyperConfig& hyper) {
  group.validate();
  const int d = group.dim();
  const Vector A = hyper.scales(d);
  double out = 0.0;
  out += -0.5 * (d * kLog2Pi + group.mu.squaredNorm());  // mu ~ N(0, I)
  Matrix scale = (2.0 * hyper.v_alpha * group.a.cwiseInverse()).asDiagonal();
  out += inverse_wishart_logpdf(group.sigma, hyper.v_alpha + d - 1, scale);
  for (int i = 0; i < d; ++i)
    out += inverse_gamma_logpdf(group.a(i), 0.5, 1.0 / (A(i) * A(i)));
  return out;
}

Matrix sample_wishart(double dof, const Matrix& scale_chol_lower, RngStream& rng) {
  const int d = static_cast<int>(scale_chol_lower.rows());
  Matrix bart = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    bart(i, i) = std::sqrt(rng.chi_squared(dof - i));
    for (int j = 0; j < i; ++j) bart(i, j) = rng.normal();
  }
  const Matrix t = scale_chol_lower * bart;
  return t * t.transpose();
}

Matrix sample_inverse_wishart(double dof, const Matrix& scale, RngStream& rng) {
  const int d = static_cast<int>(scale.rows());
  GroupChol cs(scale);  // scale = L L^T
  // W ~ Wishart(dof, scale^{-1}) from a Bartlett factor: W = (L^{-T} B)(.)^T.
  Matrix bart = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    bart(i, i) = std::sqrt(rng.chi_squared(dof - i));
    for (int j = 0; j < i; ++j) bart(i, j) = rng.normal();
  }
  // Sigma = W^{-1} = M^T M with M = B^{-1} L^T; only triangular solves.
  const Matrix lt = cs.llt.matrixL().toDenseMatrix().transpose();
  const Matrix m = bart.triangularView<Eigen::Lower>().solve(lt);
  return m.transpose() * m;
}

GroupParams sample_group_prior(int dim, const HyperConfig& hyper, RngStream& rng) {
  GroupParams g;
  const Vector A = hyper.scales(dim);
  g.a.resize(dim);
  for (int i = 0; i < dim; ++i) g.a(i) = rng.inverse_gamma(0.5, 1.0 / (A(i) * A(i)));
  Matrix scale = (2.0 * hyper.v_alpha * g.a.cwiseInverse()).asDiagonal();
  g.sigma = sample_inverse_wishart(hyper.v_alpha + dim - 1, scale, rng);
  g.mu.resize(dim);
  for (int i = 0; i < dim; ++i) g.mu(i) = rng.normal();
  return g;
}

Vector sample_mvn(const Vector& mu, const GroupChol& chol, RngStream& rng) {
  Vector z(mu.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mu + chol.llt.matrixL() * z;
}

Vector sample_alpha_prior(const GroupParams& group, RngStream& rng) {
  GroupChol chol(group.sigma);
  return sample_mvn(group.mu, chol, rng);
}

void lognormal_moments(const GroupParams& group, Vector& mean_out, Matrix& cov_out) {
  const int d = group.dim();
  mean_out.resize(d);
  cov_out.resize(d, d);
  for (int i = 0; i < d; ++i)
    mean_out(i) = std::exp(group.mu(i) + 0.5 * group.sigma(i, i));
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      cov_out(i, k) = std::exp(group.mu(i) + group.mu(k) +
                               0.5 * (group.sigma(i, i) + group.sigma(k, k))) *
                      (std::exp(group.sigma(i, k)) - 1.0);
}

Matrix cov_to_corr(const Matrix& sigma) {
  const int d = static_cast<int>(sigma.rows());
  for (int i = 0; i < d; ++i)
    if (!(sigma(i, i) > 0.0)) throw ParameterError("zero diagonal in covariance");
  const Vector inv_sd = sigma.diagonal().array().sqrt().inverse();
  return inv_sd.asDiagonal() * sigma * inv_sd.asDiagonal();
}

}  // namespace lba

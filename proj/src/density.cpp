#include "lba/density.hpp"

#include <algorithm>
#include <cmath>

#include "lba/math.hpp"

namespace lba {

namespace {

constexpr double kMinDecisionTime = 1e-10;

// Raw CDF/PDF for decision time dt = t - tau > 0. The CDF expression is a sum
// of terms that individually leave [0,1] in floating point, so both results
// are clipped by the callers.
struct CdfPdf {
  double F;
  double f;
};

inline CdfPdf raw_cdf_pdf(double dt, double b, double A, double v, double s) {
  const double w1 = (b - dt * v) / (dt * s);
  const double w2 = A / (dt * s);
  const double Phi1 = norm_cdf(w1);
  const double Phi12 = norm_cdf(w1 - w2);
  const double phi1 = norm_pdf(w1);
  const double phi12 = norm_pdf(w1 - w2);
  CdfPdf r;
  r.F = 1.0 + (b - A - dt * v) / A * Phi12 - (b - dt * v) / A * Phi1 +
        (phi12 - phi1) / w2;
  r.f = (-v * Phi12 + s * phi12 + v * Phi1 - s * phi1) / A;
  return r;
}

}  // namespace

void NaturalLbaParams::validate() const {
  if (!(A > 0.0)) throw ParameterError("start-point bound A must be positive");
  if (!(b >= A)) throw ParameterError("threshold b must satisfy b >= A");
  if (!(tau > 0.0)) throw ParameterError("non-decision time tau must be positive");
  if (!(s > 0.0)) throw ParameterError("drift SD s must be positive");
  if (v.size() < 1) throw ParameterError("at least one accumulator required");
}

double lba_cdf(double t, const NaturalLbaParams& params, int accumulator) {
  params.validate();
  if (accumulator < 1 || accumulator > params.v.size())
    throw ParameterError("accumulator index out of range");
  const double dt = t - params.tau;
  if (dt <= kMinDecisionTime) return 0.0;
  const CdfPdf r = raw_cdf_pdf(dt, params.b, params.A, params.v(accumulator - 1), params.s);
  return std::clamp(r.F, 0.0, 1.0);
}

double lba_pdf(double t, const NaturalLbaParams& params, int accumulator) {
  params.validate();
  if (accumulator < 1 || accumulator > params.v.size())
    throw ParameterError("accumulator index out of range");
  const double dt = t - params.tau;
  if (dt <= kMinDecisionTime) return 0.0;
  const CdfPdf r = raw_cdf_pdf(dt, params.b, params.A, params.v(accumulator - 1), params.s);
  return std::max(r.f, 0.0);
}

double lba_joint_logdensity(int choice, double t, const NaturalLbaParams& params) {
  params.validate();
  const int C = static_cast<int>(params.v.size());
  if (choice < 1 || choice > C) throw ParameterError("choice index out of range");
  const double dt = t - params.tau;
  if (dt <= kMinDecisionTime) return kLogZero;

  const CdfPdf winner = raw_cdf_pdf(dt, params.b, params.A, params.v(choice - 1), params.s);
  const double f = std::max(winner.f, 0.0);
  if (f <= 0.0) return kLogZero;
  double logdens = std::log(f);
  for (int k = 1; k <= C; ++k) {
    if (k == choice) continue;
    const CdfPdf loser = raw_cdf_pdf(dt, params.b, params.A, params.v(k - 1), params.s);
    const double surv = std::clamp(1.0 - loser.F, 0.0, 1.0);
    if (surv <= 0.0) return kLogZero;
    logdens += std::log(surv);
  }
  return logdens;
}

NaturalLbaParams natural_for_condition(const Vector& alpha, const Design& design, int condition) {
  NaturalLbaParams p;
  p.b = std::exp(alpha(design.idx_threshold(condition)));
  p.A = std::exp(alpha(design.idx_A()));
  p.v.resize(design.n_accumulators);
  for (int c = 1; c <= design.n_accumulators; ++c)
    p.v(c - 1) = std::exp(alpha(design.idx_drift(c)));
  p.tau = std::exp(alpha(design.idx_tau()));
  p.s = 1.0;
  return p;
}

double subject_loglik(const SubjectData& data, const Vector& alpha, const Design& design) {
  if (alpha.size() != design.dim())
    throw ParameterError("random-effects vector has wrong dimension");

  // One parameter set per condition; only the threshold varies across them.
  std::vector<NaturalLbaParams> per_condition;
  per_condition.reserve(static_cast<size_t>(design.n_conditions));
  for (int z = 1; z <= design.n_conditions; ++z) {
    NaturalLbaParams p = natural_for_condition(alpha, design, z);
    if (p.b < p.A) return kLogZero;  // zero-likelihood region, not an error
    per_condition.push_back(std::move(p));
  }

  double total = 0.0;
  for (const TrialObservation& trial : data) {
    if (trial.condition < 1 || trial.condition > design.n_conditions)
      throw DataError("unknown condition index: " + std::to_string(trial.condition));
    const double ld =
        lba_joint_logdensity(trial.choice, trial.rt, per_condition[trial.condition - 1]);
    if (ld == kLogZero) return kLogZero;
    total += ld;
  }
  return total;
}

}  // namespace lba

#ifndef LBA_DENSITY_HPP
#define LBA_DENSITY_HPP

#include "lba/types.hpp"

namespace lba {

// Natural-scale parameters for one condition. Drift SD is a per-accumulator
// constant; the conventional scaling choice s = 1 is the default, not baked in.
struct NaturalLbaParams {
  double b = 1.0;    // response threshold
  double A = 0.5;    // start-point upper bound, 0 < A <= b
  Vector v;          // drift-rate means, one per accumulator
  double s = 1.0;    // drift-rate SD
  double tau = 0.2;  // non-decision time, > 0

  void validate() const;
};

// Finishing-time CDF of a single accumulator; 0 for t <= tau, clipped to [0,1].
double lba_cdf(double t, const NaturalLbaParams& params, int accumulator);

// Finishing-time density of a single accumulator; 0 for t <= tau.
double lba_pdf(double t, const NaturalLbaParams& params, int accumulator);

// log[ f_c(t) * prod_{k != c} (1 - F_k(t)) ]; -inf where the density is zero.
double lba_joint_logdensity(int choice, double t, const NaturalLbaParams& params);

// Natural parameters implied by a log-scale effects vector for one condition.
// Does not validate: b < A simply yields zero likelihood downstream.
NaturalLbaParams natural_for_condition(const Vector& alpha, const Design& design, int condition);

// Sum of per-trial joint log-densities for one subject; -inf if any trial has
// zero density (including the b < A region of the effects space).
double subject_loglik(const SubjectData& data, const Vector& alpha, const Design& design);

}  // namespace lba

#endif

#ifndef LBA_TYPES_HPP
#define LBA_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lba {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Invalid parameter values (A > b, tau <= 0, non-PD covariance, ...).
class ParameterError : public std::runtime_error {
 public:
  explicit ParameterError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or out-of-range observations.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// All importance weights for a subject collapsed to zero.
class DegenerateWeightsError : public std::runtime_error {
 public:
  DegenerateWeightsError(int subject, long iteration, const std::string& msg)
      : std::runtime_error(msg), subject(subject), iteration(iteration) {}
  int subject;
  long iteration;
};

struct TrialObservation {
  int subject_id = 0;   // >= 0
  int condition = 1;    // 1..Z
  int choice = 1;       // accumulator index, 1..C
  double rt = 0.0;      // seconds, > 0
};

using SubjectData = std::vector<TrialObservation>;

// Trials grouped by subject, subjects ordered by first appearance.
struct Dataset {
  std::vector<SubjectData> subjects;
  std::vector<int> subject_ids;

  int n_subjects() const { return static_cast<int>(subjects.size()); }
  long n_trials() const {
    long n = 0;
    for (const auto& s : subjects) n += static_cast<long>(s.size());
    return n;
  }
};

// Experimental design: how conditions map onto threshold components and how
// the per-subject parameter vector is laid out. The vector ordering is fixed:
//   [b components..., A, drift means..., tau]
// all on the log scale for the random effects.
struct Design {
  int n_conditions = 3;
  int n_accumulators = 2;
  std::vector<int> threshold_of_condition = {0, 1, 2};  // condition z-1 -> b index

  int n_thresholds() const {
    int m = 0;
    for (int t : threshold_of_condition) m = std::max(m, t + 1);
    return m;
  }
  int dim() const { return n_thresholds() + 1 + n_accumulators + 1; }
  int idx_threshold(int condition) const {  // condition in 1..Z
    if (condition < 1 || condition > n_conditions)
      throw DataError("condition index out of range: " + std::to_string(condition));
    return threshold_of_condition[static_cast<size_t>(condition - 1)];
  }
  int idx_A() const { return n_thresholds(); }
  int idx_drift(int accumulator) const {  // accumulator in 1..C
    return n_thresholds() + 1 + (accumulator - 1);
  }
  int idx_tau() const { return n_thresholds() + 1 + n_accumulators; }

  // Variant with k free thresholds for the standard 3-condition experiment:
  // k=3 -> (0,1,2); k=2 -> accuracy and neutral share a threshold (0,0,1);
  // k=1 -> all conditions share (0,0,0).
  static Design forstmann(int free_thresholds = 3) {
    Design d;
    switch (free_thresholds) {
      case 3: d.threshold_of_condition = {0, 1, 2}; break;
      case 2: d.threshold_of_condition = {0, 0, 1}; break;
      case 1: d.threshold_of_condition = {0, 0, 0}; break;
      default:
        throw ParameterError("threshold variant must be 1, 2, or 3");
    }
    return d;
  }

  // Human-readable labels in the fixed vector order.
  std::vector<std::string> param_labels() const {
    std::vector<std::string> out;
    for (int i = 0; i < n_thresholds(); ++i) out.push_back("b" + std::to_string(i + 1));
    out.push_back("A");
    for (int c = 1; c <= n_accumulators; ++c) out.push_back("v" + std::to_string(c));
    out.push_back("tau");
    return out;
  }
};

}  // namespace lba

#endif

#include "lba/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lba/model.hpp"

namespace lba {

double iact(const Vector& series) {
  const long n = series.size();
  if (n < 50) throw ParameterError("IACT needs at least 50 iterates");
  const double mean = series.mean();
  const Vector centered = series.array() - mean;
  const double c0 = centered.squaredNorm() / n;
  if (c0 <= 0.0) throw ParameterError("IACT undefined for a zero-variance series");

  auto rho = [&](long lag) {
    return centered.head(n - lag).dot(centered.tail(n - lag)) / (n * c0);
  };

  // Sum of paired autocorrelations, truncated at the first non-positive pair.
  double total = 0.0;
  for (long m = 0; 2 * m + 1 < n; ++m) {
    const double pair = rho(2 * m) + rho(2 * m + 1);
    if (pair <= 0.0) break;
    total += pair;
  }
  return -1.0 + 2.0 * total;
}

double weighted_quantile(const Vector& values, const Vector& weights, double q) {
  const long n = values.size();
  std::vector<long> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(),
            [&](long a, long b) { return values(a) < values(b); });
  double acc = 0.0;
  for (long i : order) {
    acc += weights(i);
    if (acc >= q - 1e-12) return values(i);
  }
  return values(order.back());
}

namespace {

// Scalar series per parameter, shared by the chain and cloud summaries.
struct FlatDraws {
  std::vector<std::string> labels;
  Matrix values;  // one row per draw
};

template <typename GroupOf, typename AlphasOf>
FlatDraws flatten(long count, const Design& design, bool include_alphas,
                  const GroupOf& group_of, const AlphasOf& alphas_of) {
  const int D = design.dim();
  const auto names = design.param_labels();

  FlatDraws flat;
  for (int d = 0; d < D; ++d) flat.labels.push_back("mu_" + names[static_cast<size_t>(d)]);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j <= i; ++j)
      flat.labels.push_back("sigma_" + names[static_cast<size_t>(i)] + "_" +
                            names[static_cast<size_t>(j)]);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < i; ++j)
      flat.labels.push_back("corr_" + names[static_cast<size_t>(i)] + "_" +
                            names[static_cast<size_t>(j)]);
  for (int d = 0; d < D; ++d)
    flat.labels.push_back("natmean_" + names[static_cast<size_t>(d)]);
  const int n_subjects =
      include_alphas && count > 0 ? static_cast<int>(alphas_of(0).size()) : 0;
  for (int j = 0; j < n_subjects; ++j)
    for (int d = 0; d < D; ++d)
      flat.labels.push_back("alpha_" + std::to_string(j + 1) + "_" +
                            names[static_cast<size_t>(d)]);

  flat.values.resize(count, static_cast<long>(flat.labels.size()));
  Vector nat_mean;
  Matrix nat_cov;
  for (long r = 0; r < count; ++r) {
    const GroupParams& g = group_of(r);
    long c = 0;
    for (int d = 0; d < D; ++d) flat.values(r, c++) = g.mu(d);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j <= i; ++j) flat.values(r, c++) = g.sigma(i, j);
    const Matrix corr = cov_to_corr(g.sigma);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < i; ++j) flat.values(r, c++) = corr(i, j);
    lognormal_moments(g, nat_mean, nat_cov);
    for (int d = 0; d < D; ++d) flat.values(r, c++) = nat_mean(d);
    if (include_alphas) {
      const auto& alphas = alphas_of(r);
      for (int j = 0; j < n_subjects; ++j)
        for (int d = 0; d < D; ++d) flat.values(r, c++) = alphas[static_cast<size_t>(j)](d);
    }
  }
  return flat;
}

std::vector<SummaryRow> rows_from(const FlatDraws& flat, const Vector& weights,
                                  bool with_iact) {
  std::vector<SummaryRow> rows;
  for (long c = 0; c < flat.values.cols(); ++c) {
    const Vector col = flat.values.col(c);
    SummaryRow row;
    row.label = flat.labels[static_cast<size_t>(c)];
    row.mean = weights.dot(col);
    row.sd = std::sqrt(std::max(0.0, weights.dot((col.array() - row.mean).square().matrix())));
    row.q025 = weighted_quantile(col, weights, 0.025);
    row.q50 = weighted_quantile(col, weights, 0.5);
    row.q975 = weighted_quantile(col, weights, 0.975);
    if (with_iact && row.sd > 1e-12 * (1.0 + std::abs(row.mean))) row.iact = iact(col);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<SummaryRow> summarize_chain(const ChainOutput& chain, const Design& design,
                                        bool include_alphas) {
  const auto draws = chain.sampling_draws();
  if (draws.empty()) throw ParameterError("chain has no sampling draws to summarize");
  const long n = static_cast<long>(draws.size());
  const FlatDraws flat = flatten(
      n, design, include_alphas,
      [&](long r) -> const GroupParams& { return draws[static_cast<size_t>(r)]->group; },
      [&](long r) -> const std::vector<Vector>& { return draws[static_cast<size_t>(r)]->alphas; });
  const Vector weights = Vector::Constant(n, 1.0 / n);
  return rows_from(flat, weights, n >= 50);
}

std::vector<SummaryRow> summarize_cloud(const ParticleCloud& cloud, const Design& design,
                                        bool include_alphas) {
  if (cloud.size() == 0) throw ParameterError("empty cloud");
  const FlatDraws flat = flatten(
      static_cast<long>(cloud.size()), design, include_alphas,
      [&](long r) -> const GroupParams& { return cloud.entries[static_cast<size_t>(r)].group; },
      [&](long r) -> const std::vector<Vector>& { return cloud.entries[static_cast<size_t>(r)].alphas; });
  return rows_from(flat, cloud.weights, false);
}

}  // namespace lba

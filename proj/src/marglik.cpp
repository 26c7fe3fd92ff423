#include "lba/marglik.hpp"

#include <cmath>

#include "lba/math.hpp"

namespace lba {

namespace {

void check_trace(const TemperTrace& trace) {
  if (trace.size() < 2) throw ParameterError("tempering trace is incomplete");
  if (trace.front().a != 0.0) throw ParameterError("trace must start at temperature 0");
  if (trace.back().a != 1.0) throw ParameterError("trace must end at temperature 1");
  for (size_t p = 1; p < trace.size(); ++p)
    if (!(trace[p].a > trace[p - 1].a))
      throw ParameterError("trace temperatures must be strictly increasing");
}

}  // namespace

double logml_standard(const TemperTrace& trace) {
  check_trace(trace);
  double total = 0.0;
  for (size_t p = 1; p < trace.size(); ++p) total += trace[p].log_increment;
  return total;
}

double logml_ti1(const TemperTrace& trace) {
  check_trace(trace);
  double total = 0.0;
  for (size_t p = 1; p < trace.size(); ++p)
    total += 0.5 * (trace[p].a - trace[p - 1].a) *
             (trace[p].loglik_mean + trace[p - 1].loglik_mean);
  return total;
}

double logml_ti2(const TemperTrace& trace) {
  double total = logml_ti1(trace);
  for (size_t p = 1; p < trace.size(); ++p)
    total -= sq(trace[p].a - trace[p - 1].a) / 12.0 *
             (trace[p].loglik_var - trace[p - 1].loglik_var);
  return total;
}

TiFromPmwgResult ti_from_pmwg(const Dataset& data, const Design& design,
                              const std::vector<double>& schedule,
                              const PmwgConfig& config, const HyperConfig& hyper) {
  if (schedule.size() < 2 || schedule.front() != 0.0 || schedule.back() != 1.0)
    throw ParameterError("temperature schedule must run from 0 to 1");
  TiFromPmwgResult result;
  for (size_t p = 0; p < schedule.size(); ++p) {
    PmwgConfig c = config;
    c.temperature = schedule[p];
    c.seed = RngFactory(config.seed).derived({static_cast<std::uint64_t>(p)}).seed();
    const ChainOutput chain = run_pmwg(data, design, c, hyper);
    // At temperature zero the chain visits zero-likelihood effects; the
    // expectation is over the prior restricted to the support of the data,
    // matching the tempered-cloud initialization.
    std::vector<const ChainDraw*> draws;
    for (const ChainDraw* d : chain.sampling_draws())
      if (std::isfinite(d->total_loglik)) draws.push_back(d);
    if (draws.empty()) throw ParameterError("no sampling draws for TI stage");
    double mean = 0.0;
    for (const ChainDraw* d : draws) mean += d->total_loglik;
    mean /= static_cast<double>(draws.size());
    double var = 0.0;
    for (const ChainDraw* d : draws) var += sq(d->total_loglik - mean);
    var /= static_cast<double>(draws.size());

    StageStats s;
    s.a = schedule[p];
    s.loglik_mean = mean;
    s.loglik_var = var;
    s.ess = static_cast<double>(draws.size());
    result.trace.push_back(s);
  }
  result.ti1 = logml_ti1(result.trace);
  result.ti2 = logml_ti2(result.trace);
  return result;
}

std::vector<double> power_schedule(int n_stages, double exponent) {
  if (n_stages < 2) throw ParameterError("schedule needs at least two stages");
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n_stages));
  for (int p = 1; p <= n_stages; ++p)
    out.push_back(std::pow(static_cast<double>(p - 1) / (n_stages - 1), exponent));
  out.back() = 1.0;
  return out;
}

}  // namespace lba

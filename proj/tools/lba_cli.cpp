#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "lba/diagnostics.hpp"
#include "lba/dtsmc.hpp"
#include "lba/io.hpp"
#include "lba/marglik.hpp"
#include "lba/pmwg.hpp"
#include "lba/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string model_id(int thresholds) { return "lba-thresholds-" + std::to_string(thresholds); }

// Reference group truth for synthetic data: one b per free threshold, then
// A, two drift means, and tau, all stored on the log scale.
lba::GroupParams default_truth(const lba::Design& design, double sd) {
  const std::vector<double> b_all = {1.36, 1.30, 1.06};
  std::vector<double> natural;
  for (int t = 0; t < design.n_thresholds(); ++t) {
    for (int z = 0; z < design.n_conditions; ++z)
      if (design.threshold_of_condition[static_cast<size_t>(z)] == t) {
        natural.push_back(b_all[static_cast<size_t>(z)]);
        break;
      }
  }
  natural.insert(natural.end(), {0.70, 1.52, 3.14, 0.18});
  lba::GroupParams g;
  g.mu.resize(static_cast<long>(natural.size()));
  for (size_t i = 0; i < natural.size(); ++i)
    g.mu(static_cast<long>(i)) = std::log(natural[i]);
  g.sigma = sd * sd * lba::Matrix::Identity(g.mu.size(), g.mu.size());
  g.a = lba::Vector::Ones(g.mu.size());
  return g;
}

json pmwg_json(const lba::PmwgConfig& c) {
  return {{"particles_burnin", c.particles_burnin},
          {"particles_adapt", c.particles_adapt},
          {"particles_sampling", c.particles_sampling},
          {"iters_burnin", c.iters_burnin},
          {"iters_adapt", c.iters_adapt},
          {"iters_sampling", c.iters_sampling},
          {"w_mix", c.w_mix},
          {"epsilon", c.epsilon},
          {"temperature", c.temperature},
          {"workers", c.workers}};
}

json smc_json(const lba::SmcConfig& c) {
  return {{"cloud_size", c.cloud_size},
          {"particles", c.particles},
          {"moves", c.moves},
          {"ess_target", c.effective_ess_target()},
          {"grid_size", c.grid_size},
          {"prior_switch", c.prior_switch},
          {"systematic_resampling", c.systematic_resampling},
          {"workers", c.workers}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical linear ballistic accumulator: simulation and Bayesian inference"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  int sim_subjects = 10;
  long sim_trials = 100;
  int sim_thresholds = 3;
  double sim_sd = 0.2;
  std::uint64_t sim_seed = 1;
  std::vector<double> sim_mu;
  std::string sim_out = ".";
  sim->add_option("--subjects", sim_subjects, "Number of subjects")->check(CLI::PositiveNumber);
  sim->add_option("--trials-per-condition", sim_trials, "Trials per condition per subject")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--thresholds", sim_thresholds, "Free threshold parameters (1-3)")
      ->check(CLI::Range(1, 3));
  sim->add_option("--effect-sd", sim_sd, "Group SD of each log-scale effect");
  sim->add_option("--mu", sim_mu, "Group mean on the log scale (overrides the default)");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "Output directory");

  // fit-pmwg
  auto* pmwg = app.add_subcommand("fit-pmwg", "Particle Metropolis-within-Gibbs sampler");
  std::string pmwg_trials, pmwg_out = ".";
  int pmwg_thresholds = 3;
  lba::PmwgConfig pmwg_cfg;
  pmwg->add_option("--trials", pmwg_trials, "Trials CSV")->required();
  pmwg->add_option("--thresholds", pmwg_thresholds, "Free threshold parameters (1-3)")
      ->check(CLI::Range(1, 3));
  pmwg->add_option("--burnin", pmwg_cfg.iters_burnin, "Burn-in iterations");
  pmwg->add_option("--adapt", pmwg_cfg.iters_adapt, "Adaptation iterations");
  pmwg->add_option("--draws", pmwg_cfg.iters_sampling, "Sampling iterations");
  pmwg->add_option("--particles", pmwg_cfg.particles_sampling, "Particles in the sampling stage");
  pmwg->add_option("--particles-burnin", pmwg_cfg.particles_burnin, "Particles before adaptation");
  pmwg->add_option("--w-mix", pmwg_cfg.w_mix, "Mixture weight of the adapted component");
  pmwg->add_option("--epsilon", pmwg_cfg.epsilon, "Covariance inflation before adaptation");
  pmwg->add_option("--temperature", pmwg_cfg.temperature, "Likelihood exponent in [0,1]");
  pmwg->add_option("--seed", pmwg_cfg.seed, "RNG seed");
  pmwg->add_option("--workers", pmwg_cfg.workers, "Worker threads");
  pmwg->add_option("--out", pmwg_out, "Output directory");

  // fit-dtsmc
  auto* smc = app.add_subcommand("fit-dtsmc", "Density-tempered SMC sampler");
  std::string smc_trials, smc_out = ".";
  int smc_thresholds = 3;
  int smc_replicates = 1;
  lba::SmcConfig smc_cfg;
  smc->add_option("--trials", smc_trials, "Trials CSV")->required();
  smc->add_option("--thresholds", smc_thresholds, "Free threshold parameters (1-3)")
      ->check(CLI::Range(1, 3));
  smc->add_option("--cloud-size", smc_cfg.cloud_size, "Cloud size M");
  smc->add_option("--particles", smc_cfg.particles, "Particles R per Markov move");
  smc->add_option("--moves", smc_cfg.moves, "Markov moves L per temperature");
  smc->add_option("--ess-target", smc_cfg.ess_target, "ESS target (default 0.8M)");
  smc->add_option("--grid", smc_cfg.grid_size, "Temperature search grid size");
  smc->add_option("--replicates", smc_replicates, "Independent runs")->check(CLI::PositiveNumber);
  smc->add_option("--seed", smc_cfg.seed, "RNG seed");
  smc->add_option("--workers", smc_cfg.workers, "Worker threads");
  smc->add_option("--out", smc_out, "Output directory");

  // marglik
  auto* ml = app.add_subcommand("marglik", "Marginal-likelihood estimation and aggregation");
  std::vector<std::string> ml_evidence;
  std::string ml_trials, ml_out;
  int ml_thresholds = 3;
  int ml_stages = 0;
  lba::PmwgConfig ml_cfg;
  ml->add_option("evidence", ml_evidence, "Per-replicate evidence JSON files to aggregate");
  ml->add_option("--trials", ml_trials, "Trials CSV (thermodynamic integration from tempered chains)");
  ml->add_option("--thresholds", ml_thresholds, "Free threshold parameters (1-3)")
      ->check(CLI::Range(1, 3));
  ml->add_option("--stages", ml_stages, "Temperature stages for the tempered-chain route");
  ml->add_option("--burnin", ml_cfg.iters_burnin, "Burn-in iterations per stage");
  ml->add_option("--adapt", ml_cfg.iters_adapt, "Adaptation iterations per stage");
  ml->add_option("--draws", ml_cfg.iters_sampling, "Sampling iterations per stage");
  ml->add_option("--particles", ml_cfg.particles_sampling, "Particles per stage");
  ml->add_option("--seed", ml_cfg.seed, "RNG seed");
  ml->add_option("--workers", ml_cfg.workers, "Worker threads");
  ml->add_option("--out", ml_out, "Output JSON path (default stdout)");

  // summarize
  auto* summ = app.add_subcommand("summarize", "Posterior summary tables");
  std::string summ_chain, summ_cloud, summ_out;
  int summ_thresholds = 3;
  bool summ_alphas = false;
  summ->add_option("--chain", summ_chain, "Chain CSV from fit-pmwg");
  summ->add_option("--cloud", summ_cloud, "Cloud CSV from fit-dtsmc");
  summ->add_option("--thresholds", summ_thresholds, "Free threshold parameters (1-3)")
      ->check(CLI::Range(1, 3));
  summ->add_flag("--alphas", summ_alphas, "Include per-subject effects");
  summ->add_option("--out", summ_out, "Output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      lba::ExperimentDesign ex;
      ex.n_subjects = sim_subjects;
      ex.design = lba::Design::forstmann(sim_thresholds);
      ex.trials_per_condition.assign(static_cast<size_t>(ex.design.n_conditions), sim_trials);
      ex.truth = default_truth(ex.design, sim_sd);
      if (!sim_mu.empty()) {
        if (static_cast<int>(sim_mu.size()) != ex.design.dim())
          throw lba::ParameterError("--mu needs " + std::to_string(ex.design.dim()) +
                                    " components");
        for (size_t i = 0; i < sim_mu.size(); ++i) ex.truth.mu(static_cast<long>(i)) = sim_mu[i];
      }
      const lba::SimulatedDataset result = lba::simulate_dataset(ex, lba::RngFactory(sim_seed));

      fs::create_directories(sim_out);
      lba::save_trials((fs::path(sim_out) / "trials.csv").string(), result.data);
      json truth;
      truth["model-id"] = model_id(sim_thresholds);
      truth["mu"] = std::vector<double>(ex.truth.mu.data(), ex.truth.mu.data() + ex.truth.mu.size());
      truth["effect_sd"] = sim_sd;
      truth["alphas"] = json::array();
      for (const lba::Vector& a : result.true_alphas)
        truth["alphas"].push_back(std::vector<double>(a.data(), a.data() + a.size()));
      lba::save_json((fs::path(sim_out) / "truth.json").string(), truth);
      const json cfg = {{"subjects", sim_subjects},
                        {"trials_per_condition", sim_trials},
                        {"thresholds", sim_thresholds},
                        {"effect_sd", sim_sd}};
      lba::save_metadata((fs::path(sim_out) / "meta.json").string(), "simulate", cfg, sim_seed);
    } else if (pmwg->parsed()) {
      const lba::Dataset data = lba::load_trials(pmwg_trials);
      const lba::Design design = lba::Design::forstmann(pmwg_thresholds);
      const lba::ChainOutput chain = lba::run_pmwg(data, design, pmwg_cfg);

      fs::create_directories(pmwg_out);
      lba::save_chain_csv((fs::path(pmwg_out) / "chain.csv").string(), chain, design);
      json cfg = pmwg_json(pmwg_cfg);
      cfg["thresholds"] = pmwg_thresholds;
      cfg["adaptation_succeeded"] = chain.adaptation_succeeded;
      lba::save_metadata((fs::path(pmwg_out) / "meta.json").string(), "fit-pmwg", cfg,
                         pmwg_cfg.seed);
    } else if (smc->parsed()) {
      const lba::Dataset data = lba::load_trials(smc_trials);
      const lba::Design design = lba::Design::forstmann(smc_thresholds);
      fs::create_directories(smc_out);
      for (int r = 0; r < smc_replicates; ++r) {
        lba::SmcConfig cfg = smc_cfg;
        cfg.seed = lba::RngFactory(smc_cfg.seed).derived({static_cast<std::uint64_t>(r)}).seed();
        const lba::ParticleCloud cloud = lba::run_dtsmc(data, design, cfg);
        const std::string tag = std::to_string(r);
        lba::save_cloud_csv((fs::path(smc_out) / ("cloud_" + tag + ".csv")).string(), cloud,
                            design);
        lba::save_trace_csv((fs::path(smc_out) / ("trace_" + tag + ".csv")).string(),
                            cloud.trace);
        const json evidence = {{"model-id", model_id(smc_thresholds)},
                               {"replicate", r},
                               {"seed", cfg.seed},
                               {"standard", lba::logml_standard(cloud.trace)},
                               {"ti1", lba::logml_ti1(cloud.trace)},
                               {"ti2", lba::logml_ti2(cloud.trace)}};
        lba::save_json((fs::path(smc_out) / ("evidence_" + tag + ".json")).string(), evidence);
      }
      json cfg = smc_json(smc_cfg);
      cfg["thresholds"] = smc_thresholds;
      cfg["replicates"] = smc_replicates;
      lba::save_metadata((fs::path(smc_out) / "meta.json").string(), "fit-dtsmc", cfg,
                         smc_cfg.seed);
    } else if (ml->parsed()) {
      json report = json::array();
      if (!ml_trials.empty()) {
        if (ml_stages < 2) throw lba::ParameterError("--stages must be >= 2 with --trials");
        const lba::Dataset data = lba::load_trials(ml_trials);
        const lba::Design design = lba::Design::forstmann(ml_thresholds);
        const auto schedule = lba::power_schedule(ml_stages);
        const lba::TiFromPmwgResult ti = lba::ti_from_pmwg(data, design, schedule, ml_cfg);
        for (const char* est : {"ti1", "ti2"})
          report.push_back({{"model-id", model_id(ml_thresholds)},
                            {"estimator", std::string(est) + "-pmwg"},
                            {"log-ml", std::string(est) == "ti1" ? ti.ti1 : ti.ti2},
                            {"replicate-SD", nullptr},
                            {"n-replicates", 1}});
      }
      if (!ml_evidence.empty()) {
        // Group replicate estimates by model and estimator.
        std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
        for (const std::string& path : ml_evidence) {
          const json e = lba::load_json(path);
          for (const char* est : {"standard", "ti1", "ti2"})
            if (e.contains(est))
              groups[{e.at("model-id"), est}].push_back(e.at(est).get<double>());
        }
        for (const auto& [key, vals] : groups) {
          double mean = 0.0;
          for (double v : vals) mean += v;
          mean /= static_cast<double>(vals.size());
          double var = 0.0;
          for (double v : vals) var += (v - mean) * (v - mean);
          const json sd = vals.size() > 1
                              ? json(std::sqrt(var / static_cast<double>(vals.size() - 1)))
                              : json(nullptr);
          report.push_back({{"model-id", key.first},
                            {"estimator", key.second},
                            {"log-ml", mean},
                            {"replicate-SD", sd},
                            {"n-replicates", vals.size()}});
        }
      }
      if (report.empty())
        throw lba::ParameterError("marglik needs evidence files or --trials with --stages");
      if (ml_out.empty())
        std::cout << report.dump(2) << '\n';
      else
        lba::save_json(ml_out, report);
    } else if (summ->parsed()) {
      if (summ_chain.empty() == summ_cloud.empty())
        throw lba::ParameterError("summarize needs exactly one of --chain or --cloud");
      const lba::Design design = lba::Design::forstmann(summ_thresholds);
      std::vector<lba::SummaryRow> rows;
      if (!summ_chain.empty()) {
        const lba::ChainOutput chain = lba::load_chain_csv(summ_chain, design);
        rows = lba::summarize_chain(chain, design, summ_alphas);
      } else {
        const lba::ParticleCloud cloud = lba::load_cloud_csv(summ_cloud, design);
        rows = lba::summarize_cloud(cloud, design, summ_alphas);
      }
      if (summ_out.empty()) {
        std::cout << "parameter,mean,sd,iact,q025,q50,q975\n";
        for (const auto& r : rows) {
          std::cout << r.label << ',' << r.mean << ',' << r.sd << ',';
          if (std::isfinite(r.iact)) std::cout << r.iact;
          std::cout << ',' << r.q025 << ',' << r.q50 << ',' << r.q975 << '\n';
        }
      } else {
        lba::save_summary_csv(summ_out, rows);
      }
    }
  } catch (const lba::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const lba::DegenerateWeightsError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const lba::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}

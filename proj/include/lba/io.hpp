#ifndef LBA_IO_HPP
#define LBA_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "lba/diagnostics.hpp"
#include "lba/dtsmc.hpp"
#include "lba/pmwg.hpp"
#include "lba/types.hpp"

namespace lba {

// Canonical trial format: CSV with header subject,condition,choice,rt.
Dataset load_trials(const std::string& path);
void save_trials(const std::string& path, const Dataset& data);

// One row per draw / cloud entry: mu, Sigma lower triangle, then per-subject
// effects; clouds carry a leading weight column, chains a leading stage column.
void save_chain_csv(const std::string& path, const ChainOutput& chain, const Design& design);
void save_cloud_csv(const std::string& path, const ParticleCloud& cloud, const Design& design);
ChainOutput load_chain_csv(const std::string& path, const Design& design);
ParticleCloud load_cloud_csv(const std::string& path, const Design& design);
void save_trace_csv(const std::string& path, const TemperTrace& trace);
void save_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);

// Reproducibility manifest written next to every artifact.
void save_metadata(const std::string& path, const std::string& command,
                   const nlohmann::json& config, std::uint64_t seed);

void save_json(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json(const std::string& path);

}  // namespace lba

#endif

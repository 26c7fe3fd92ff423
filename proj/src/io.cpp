#include "lba/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace lba {

namespace {

constexpr const char* kVersion = "1.0.0";

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out.precision(17);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

void write_entry_columns(std::ofstream& out, const GroupParams& g,
                         const std::vector<Vector>& alphas) {
  const int D = g.dim();
  for (int d = 0; d < D; ++d) out << ',' << g.mu(d);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j <= i; ++j) out << ',' << g.sigma(i, j);
  for (const Vector& a : alphas)
    for (int d = 0; d < D; ++d) out << ',' << a(d);
}

void write_entry_header(std::ofstream& out, const Design& design, int n_subjects) {
  const auto names = design.param_labels();
  const int D = design.dim();
  for (int d = 0; d < D; ++d) out << ",mu_" << names[static_cast<size_t>(d)];
  for (int i = 0; i < D; ++i)
    for (int j = 0; j <= i; ++j)
      out << ",sigma_" << names[static_cast<size_t>(i)] << '_' << names[static_cast<size_t>(j)];
  for (int s = 1; s <= n_subjects; ++s)
    for (int d = 0; d < D; ++d)
      out << ",alpha_" << s << '_' << names[static_cast<size_t>(d)];
  out << '\n';
}

}  // namespace

Dataset load_trials(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trials file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty trials file: " + path);
  if (split_csv(line) != std::vector<std::string>{"subject", "condition", "choice", "rt"})
    throw DataError(path + ": expected header subject,condition,choice,rt");

  Dataset data;
  std::map<int, int> slot_of;  // subject id -> position, by first appearance
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    const std::string where = path + " line " + std::to_string(line_no);
    if (fields.size() != 4) throw DataError(where + ": expected 4 fields");
    TrialObservation t;
    try {
      t.subject_id = std::stoi(fields[0]);
      t.condition = std::stoi(fields[1]);
      t.choice = std::stoi(fields[2]);
      t.rt = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw DataError(where + ": malformed field");
    }
    if (t.subject_id < 0) throw DataError(where + ": negative subject id");
    if (t.condition < 1) throw DataError(where + ": condition must be >= 1");
    if (t.choice < 1) throw DataError(where + ": choice must be >= 1");
    if (!(t.rt > 0.0)) throw DataError(where + ": rt must be positive");

    auto it = slot_of.find(t.subject_id);
    if (it == slot_of.end()) {
      it = slot_of.emplace(t.subject_id, data.n_subjects()).first;
      data.subjects.emplace_back();
      data.subject_ids.push_back(t.subject_id);
    }
    data.subjects[static_cast<size_t>(it->second)].push_back(t);
  }
  if (data.subjects.empty()) throw DataError(path + ": no trials");
  return data;
}

void save_trials(const std::string& path, const Dataset& data) {
  std::ofstream out = open_out(path);
  out << "subject,condition,choice,rt\n";
  for (size_t j = 0; j < data.subjects.size(); ++j)
    for (const TrialObservation& t : data.subjects[j])
      out << data.subject_ids[j] << ',' << t.condition << ',' << t.choice << ',' << t.rt
          << '\n';
}

void save_chain_csv(const std::string& path, const ChainOutput& chain, const Design& design) {
  std::ofstream out = open_out(path);
  const int S = chain.draws.empty() ? 0 : static_cast<int>(chain.draws.front().alphas.size());
  out << "iteration,stage,total_loglik";
  write_entry_header(out, design, S);
  long i = 0;
  for (const ChainDraw& d : chain.draws) {
    out << i++ << ',' << stage_name(d.stage) << ',' << d.total_loglik;
    write_entry_columns(out, d.group, d.alphas);
    out << '\n';
  }
}

void save_cloud_csv(const std::string& path, const ParticleCloud& cloud, const Design& design) {
  std::ofstream out = open_out(path);
  const int S = cloud.entries.empty() ? 0 : static_cast<int>(cloud.entries.front().alphas.size());
  out << "entry,weight,total_loglik";
  write_entry_header(out, design, S);
  for (int m = 0; m < cloud.size(); ++m) {
    const CloudEntry& e = cloud.entries[static_cast<size_t>(m)];
    out << m << ',' << cloud.weights(m) << ',' << e.total_loglik();
    write_entry_columns(out, e.group, e.alphas);
    out << '\n';
  }
}

namespace {

// Shared row layout of the chain and cloud files after the leading columns.
struct EntryLayout {
  int D;
  int n_subjects;

  static EntryLayout deduce(const Design& design, size_t n_fields, size_t leading,
                            const std::string& path) {
    const int D = design.dim();
    const long tail = static_cast<long>(n_fields) - static_cast<long>(leading) - D -
                      D * (D + 1) / 2;
    if (tail < 0 || tail % D != 0)
      throw DataError(path + ": column count does not match the design");
    return {D, static_cast<int>(tail / D)};
  }

  void read(const std::vector<std::string>& fields, size_t at, GroupParams& g,
            std::vector<Vector>& alphas) const {
    g.mu.resize(D);
    g.sigma.resize(D, D);
    g.a = Vector::Ones(D);  // auxiliary scales are not persisted
    for (int d = 0; d < D; ++d) g.mu(d) = std::stod(fields[at++]);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j <= i; ++j) {
        g.sigma(i, j) = std::stod(fields[at++]);
        g.sigma(j, i) = g.sigma(i, j);
      }
    alphas.assign(static_cast<size_t>(n_subjects), Vector(D));
    for (int s = 0; s < n_subjects; ++s)
      for (int d = 0; d < D; ++d) alphas[static_cast<size_t>(s)](d) = std::stod(fields[at++]);
  }
};

std::vector<std::vector<std::string>> read_csv_body(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(split_csv(line));
  if (rows.empty()) throw DataError(path + ": no rows");
  return rows;
}

}  // namespace

ChainOutput load_chain_csv(const std::string& path, const Design& design) {
  const auto rows = read_csv_body(path);
  const EntryLayout layout = EntryLayout::deduce(design, rows.front().size(), 3, path);
  ChainOutput chain;
  for (const auto& fields : rows) {
    ChainDraw d;
    const std::string& stage = fields[1];
    d.stage = stage == "burnin" ? Stage::Burnin
              : stage == "adapt" ? Stage::Adapt
                                 : Stage::Sampling;
    d.total_loglik = std::stod(fields[2]);
    layout.read(fields, 3, d.group, d.alphas);
    chain.draws.push_back(std::move(d));
  }
  return chain;
}

ParticleCloud load_cloud_csv(const std::string& path, const Design& design) {
  const auto rows = read_csv_body(path);
  const EntryLayout layout = EntryLayout::deduce(design, rows.front().size(), 3, path);
  ParticleCloud cloud;
  cloud.weights.resize(static_cast<long>(rows.size()));
  long m = 0;
  for (const auto& fields : rows) {
    CloudEntry e;
    cloud.weights(m++) = std::stod(fields[1]);
    layout.read(fields, 3, e.group, e.alphas);
    e.subject_logliks = Vector::Zero(layout.n_subjects);
    if (layout.n_subjects > 0)
      e.subject_logliks(0) = std::stod(fields[2]);  // only the total is persisted
    cloud.entries.push_back(std::move(e));
  }
  cloud.temperature = 1.0;
  return cloud;
}

void save_trace_csv(const std::string& path, const TemperTrace& trace) {
  std::ofstream out = open_out(path);
  out << "stage,a,log_increment,ess,loglik_mean,loglik_var\n";
  long p = 0;
  for (const StageStats& s : trace)
    out << p++ << ',' << s.a << ',' << s.log_increment << ',' << s.ess << ','
        << s.loglik_mean << ',' << s.loglik_var << '\n';
}

void save_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out = open_out(path);
  out << "parameter,mean,sd,iact,q025,q50,q975\n";
  for (const SummaryRow& r : rows) {
    out << r.label << ',' << r.mean << ',' << r.sd << ',';
    if (std::isfinite(r.iact)) out << r.iact;
    out << ',' << r.q025 << ',' << r.q50 << ',' << r.q975 << '\n';
  }
}

void save_metadata(const std::string& path, const std::string& command,
                   const nlohmann::json& config, std::uint64_t seed) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = config;
  j["seed"] = seed;
  save_json(path, j);
}

void save_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open JSON file: " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace lba

#include "runner.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "datagen.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "limits.hpp"
#include "version.hpp"

namespace ndcglab {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

int exit_code(Errc c) {
  switch (c) {
    case Errc::config:
    case Errc::invalid_argument:
    case Errc::resource:
      return 2;
    case Errc::assumption_violated:
      return 3;
    case Errc::io:
      return 4;
    default:
      return 1;
  }
}

const char* feas_str(FeasibilityClass f) {
  switch (f) {
    case FeasibilityClass::Feasible:
      return "feasible";
    case FeasibilityClass::Borderline:
      return "borderline";
    default:
      return "infeasible";
  }
}

// Shortest round-trip decimal form, locale independent.
std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (const char ch : s) {
    if (ch == '"') quoted += "\"\"";
    else quoted += ch;
  }
  quoted += '"';
  return quoted;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), Errc::io, "cannot open for writing: " + path.string());
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  f.flush();
  require(f.good(), Errc::io, "write failed: " + path.string());
}

void write_out(const fs::path& out, const std::string& name, const std::string& body,
               std::vector<std::string>& outputs, std::ostream& log) {
  write_text(out / name, body);
  outputs.push_back(name);
  log << "wrote " << name << "\n";
}

json run_curve(const RunConfig& cfg, std::uint32_t threads, const fs::path& out,
               std::vector<std::string>& outputs, std::ostream& log) {
  log << "curve: " << cfg.scorers.size() << " scorer(s), " << cfg.n_grid.size()
      << " grid point(s), " << cfg.trials << " trials\n";
  const auto pts = convergence_curve(cfg.world, cfg.scorers, cfg.discount, cfg.n_grid,
                                     cfg.trials, cfg.seed, threads);
  std::string csv = "n,scorer,mean,sd,ci,trials,skipped\n";
  std::uint64_t skipped = 0;
  for (const auto& p : pts) {
    csv += std::to_string(p.n) + ',' + csv_field(p.scorer) + ',' + fmt(p.mean) + ',' +
           fmt(p.sd) + ',' + fmt(p.ci) + ',' + std::to_string(p.trials) + ',' +
           std::to_string(p.skipped) + '\n';
    skipped += p.skipped;
  }
  write_out(out, "curve.csv", csv, outputs, log);
  const Feasibility fz = cfg.discount.classify();
  json r;
  r["classification"] = feas_str(fz.value);
  r["ambiguous"] = fz.ambiguous;
  r["rows"] = pts.size();
  r["skipped_total"] = skipped;
  return r;
}

json run_limit(const RunConfig& cfg, const fs::path& out, std::vector<std::string>& outputs,
               std::ostream& log) {
  log << "limit: " << cfg.discount.label() << "\n";
  const LimitResult res = asymptotic_limit(cfg.world, cfg.discount);
  json lj;
  if (res.value) lj["value"] = *res.value;
  else lj["value"] = nullptr;
  lj["theorem"] = res.theorem;
  json checks = json::array();
  for (const auto& [name, pass] : res.assumptions) {
    checks.push_back(json{{"name", name}, {"pass", pass}});
  }
  lj["assumptions"] = std::move(checks);
  lj["quadrature_error_bound"] = res.quadrature_error_bound;
  lj["note"] = res.note;
  const Feasibility fz = cfg.discount.classify();
  lj["classification"] = feas_str(fz.value);
  lj["ambiguous"] = fz.ambiguous;
  write_out(out, "limit.json", lj.dump(2) + "\n", outputs, log);
  json r;
  r["value"] = lj["value"];
  r["theorem"] = res.theorem;
  return r;
}

json run_distinguish(const RunConfig& cfg, std::uint32_t threads, const fs::path& out,
                     std::vector<std::string>& outputs, std::ostream& log) {
  log << "distinguish: " << cfg.f0.label() << " vs " << cfg.f1.label() << ", " << cfg.trials
      << " trials\n";
  const auto rep = distinguish(cfg.world, cfg.f0, cfg.f1, cfg.discount, cfg.N_grid,
                               cfg.n_per_decade, cfg.trials, cfg.seed, threads);
  std::string csv = "N,flip_rate,ties,winner\n";
  for (std::size_t i = 0; i < rep.thresholds.size(); ++i) {
    csv += std::to_string(rep.thresholds[i]) + ',' + fmt(rep.flip_rate[i]) + ',' +
           std::to_string(rep.tie_count) + ',' + csv_field(rep.winner) + '\n';
  }
  write_out(out, "distinguish.csv", csv, outputs, log);
  json r;
  r["winner"] = rep.winner;
  r["winner_share"] = rep.winner_share;
  r["tie_count"] = rep.tie_count;
  r["eval_count"] = rep.eval_count;
  r["eval_grid"] = rep.eval_grid;
  return r;
}

json run_nonconverge(const RunConfig& cfg, std::uint32_t threads, const fs::path& out,
                     std::vector<std::string>& outputs, std::ostream& log) {
  log << "nonconverge: " << cfg.discount.label() << ", " << cfg.n_grid.size()
      << " grid point(s), " << cfg.trials << " trials\n";
  const auto rep = nonconvergence_test(cfg.world, cfg.nc_scorer, cfg.discount, cfg.n_grid,
                                       cfg.trials, cfg.seed, cfg.theta_hi, cfg.theta_lo,
                                       cfg.floor_high, cfg.floor_low, threads);
  std::string csv = "n,freq_high,freq_low,sd,trials,skipped\n";
  std::uint64_t skipped = 0;
  for (const auto& p : rep.points) {
    csv += std::to_string(p.n) + ',' + fmt(p.freq_high) + ',' + fmt(p.freq_low) + ',' +
           fmt(p.sd) + ',' + std::to_string(p.trials) + ',' + std::to_string(p.skipped) + '\n';
    skipped += p.skipped;
  }
  write_out(out, "nonconverge.csv", csv, outputs, log);
  json r;
  r["non_convergent"] = rep.non_convergent;
  r["skipped_total"] = skipped;
  return r;
}

json run_ingest(const RunConfig& cfg, const fs::path& out, std::vector<std::string>& outputs,
                std::ostream& log) {
  log << "ingest: " << cfg.input << "\n";
  const ClickLog cl = ingest_click_log(cfg.input, cfg.clicks_high, cfg.clicks_low, cfg.columns);
  std::string qcsv = "query_id,file,items\n";
  json queries = json::array();
  for (std::size_t q = 0; q < cl.queries.size(); ++q) {
    const ClickQuery& query = cl.queries[q];
    const std::string file = "query_" + std::to_string(q + 1) + ".csv";
    std::string body = "doc_id,timestamp,grade";
    for (const auto& name : cl.score_names) body += ',' + csv_field(name);
    body += '\n';
    for (std::size_t i = 0; i < query.doc_ids.size(); ++i) {
      body += csv_field(query.doc_ids[i]) + ',' + std::to_string(query.timestamps[i]) + ',' +
              fmt(query.grades[i]);
      for (std::size_t s = 0; s < cl.score_names.size(); ++s) {
        body += ',' + fmt(query.scores[s][i]);
      }
      body += '\n';
    }
    write_out(out, file, body, outputs, log);
    qcsv += csv_field(query.query_id) + ',' + file + ',' +
            std::to_string(query.doc_ids.size()) + '\n';
    queries.push_back(json{{"query_id", query.query_id},
                           {"file", file},
                           {"items", query.doc_ids.size()}});
  }
  write_out(out, "queries.csv", qcsv, outputs, log);
  json r;
  r["score_columns"] = cl.score_names;
  r["queries"] = std::move(queries);
  return r;
}

}  // namespace

int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir, std::optional<std::uint64_t> seed_override,
                std::uint32_t threads, std::ostream& log) {
  try {
    RunConfig cfg = load_config(config_path, command);
    if (seed_override) cfg.seed = *seed_override;
    log << "loaded " << config_path << " (command " << cfg.command << ", seed " << cfg.seed
        << ")\n";
    const fs::path out = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    require(!ec, Errc::io, "cannot create output directory: " + out.string());

    std::vector<std::string> outputs;
    json results;
    if (cfg.command == "curve") {
      results = run_curve(cfg, threads, out, outputs, log);
    } else if (cfg.command == "limit") {
      results = run_limit(cfg, out, outputs, log);
    } else if (cfg.command == "distinguish") {
      results = run_distinguish(cfg, threads, out, outputs, log);
    } else if (cfg.command == "nonconverge") {
      results = run_nonconverge(cfg, threads, out, outputs, log);
    } else {
      results = run_ingest(cfg, out, outputs, log);
    }

    json manifest;
    manifest["tool"] = "ndcglab";
    manifest["version"] = kVersion;
    manifest["command"] = cfg.command;
    manifest["seed"] = cfg.seed;
    manifest["config"] = config_to_json(cfg);
    manifest["outputs"] = outputs;
    manifest["results"] = std::move(results);
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
    log << "wrote manifest.json\n";
    return 0;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ndcglab

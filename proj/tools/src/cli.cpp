#include "pimmmu_cli/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>

#include "pimmmu/config.hpp"
#include "pimmmu/engine.hpp"
#include "pimmmu/error.hpp"
#include "pimmmu/report.hpp"

namespace pimmmu::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string out_dir = ".";
  std::vector<std::string> sets;
  std::int64_t seed = -1;
  unsigned jobs = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_output) {
  cmd->add_option("-c,--config", c.config, "JSON config (defaults when omitted)");
  cmd->add_option("-s,--set", c.sets, "Override, dotted.path=value (repeatable)");
  cmd->add_option("--seed", c.seed, "Override the seed");
  if (with_output) {
    cmd->add_option("-o,--out", c.out_dir, "Output directory for reports");
    cmd->add_option("-j,--jobs", c.jobs, "Worker threads for ablation and sweep points")
        ->check(CLI::Range(1u, 256u));
  }
}

SimConfig load(const Common& c, std::vector<std::string> extra) {
  std::vector<std::string> overrides = c.sets;
  if (c.seed >= 0) overrides.push_back("seed=" + std::to_string(c.seed));
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  if (c.config.empty()) return make_config(overrides);
  return load_config(c.config, overrides);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw ValidationError({"output: cannot write " + p.string()});
  f << text;
}

int execute(const Common& c, const std::vector<std::string>& extra, bool trace, bool dce_log,
            std::uint64_t watchdog, std::ostream& out) {
  SimConfig cfg = load(c, extra);
  fs::create_directories(c.out_dir);
  const fs::path dir(c.out_dir);

  std::unique_ptr<std::ofstream> tdram, tpim, elog;
  RunOptions opts;
  if (watchdog > 0) opts.stall_limit = watchdog;
  if (trace) {
    tdram = std::make_unique<std::ofstream>(dir / "trace_dram.txt");
    tpim = std::make_unique<std::ofstream>(dir / "trace_pim.txt");
    opts.trace_dram = tdram.get();
    opts.trace_pim = tpim.get();
  }
  if (dce_log) {
    elog = std::make_unique<std::ofstream>(dir / "dce_events.txt");
    opts.dce_log = elog.get();
  }

  std::vector<SimReport> reports;
  json doc;
  switch (cfg.kind) {
    case ScenarioKind::CpuDpu:
    case ScenarioKind::Memcpy:
      reports.push_back(run_scenario(cfg, opts));
      doc = report_document(to_string(cfg.kind), reports);
      break;
    case ScenarioKind::Ablation:
      reports = ablation(cfg, c.jobs);
      doc = report_document("ablation", reports);
      doc["summary"] = ablation_summary(reports);
      break;
    case ScenarioKind::Sweep:
      reports = sweep(cfg, c.jobs);
      doc = report_document("sweep", reports);
      break;
  }
  const std::string stem = to_string(cfg.kind);
  write_file(dir / (stem + ".json"), doc.dump(2) + "\n");
  write_file(dir / (stem + ".csv"), to_csv(reports));

  if (cfg.kind == ScenarioKind::Ablation) {
    out << format_ablation_table(reports);
  } else {
    out << std::fixed << std::setprecision(2);
    for (const auto& r : reports) {
      out << (r.label.empty() ? r.scenario : r.label) << ": " << r.transfer_bytes << " bytes in "
          << r.elapsed_ns / 1e3 << " us, " << r.throughput_gbps << " GB/s, PIM write util "
          << r.pim.write_utilization * 100 << "%, energy " << r.energy.total_j() * 1e3
          << " mJ, data " << r.data_check << '\n';
    }
  }
  out << "wrote " << (dir / (stem + ".json")).string() << " and " << (dir / (stem + ".csv")).string()
      << '\n';
  return 0;
}

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError({"cannot open " + path});
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded()) throw ValidationError({path + " is not valid JSON"});
  return j;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cycle-level DRAM/PIM transfer simulator"};
  app.require_subcommand(1);

  Common common;
  bool trace = false, dce_log = false;
  std::uint64_t watchdog = 0;
  auto* run_cmd = app.add_subcommand("run", "Run the scenario named by the config");
  add_common(run_cmd, common, true);
  run_cmd->add_flag("--trace", trace, "Write DRAM and PIM command traces");
  run_cmd->add_flag("--dce-log", dce_log, "Write the DCE event log");
  run_cmd->add_option("--watchdog", watchdog,
                      "Abort when no request completes for this many DRAM cycles");

  auto* ablate_cmd = app.add_subcommand("ablate", "Run Base, +D, +D+H and +D+H+P");
  add_common(ablate_cmd, common, true);

  std::string axis;
  std::vector<unsigned> values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep channels or ranks");
  add_common(sweep_cmd, common, true);
  sweep_cmd->add_option("--axis", axis, "channels or ranks")->check(CLI::IsMember({"channels", "ranks"}));
  sweep_cmd->add_option("--values", values, "Axis values (powers of two)");

  auto* check_cmd = app.add_subcommand("check-config", "Validate a config and exit");
  add_common(check_cmd, common, false);

  std::string report_a, report_b;
  double tolerance = 0.0;
  std::vector<std::string> metric_tols;
  bool show_all = false;
  auto* diff_cmd = app.add_subcommand("diff-report", "Compare two report files metric by metric");
  diff_cmd->add_option("a", report_a, "Reference report")->required();
  diff_cmd->add_option("b", report_b, "Candidate report")->required();
  diff_cmd->add_option("-t,--tolerance", tolerance, "Default relative tolerance");
  diff_cmd->add_option("-m,--metric-tolerance", metric_tols, "metric=tolerance (repeatable)");
  diff_cmd->add_flag("--all", show_all, "Print passing rows too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return execute(common, {}, trace, dce_log, watchdog, out);
    if (ablate_cmd->parsed()) return execute(common, {"scenario.kind=ablation"}, false, false, 0, out);
    if (sweep_cmd->parsed()) {
      std::vector<std::string> extra{"scenario.kind=sweep"};
      if (!axis.empty()) extra.push_back("scenario.sweep.axis=" + axis);
      if (!values.empty()) {
        json arr = values;
        extra.push_back("scenario.sweep.values=" + arr.dump());
      }
      return execute(common, extra, false, false, 0, out);
    }
    if (check_cmd->parsed()) {
      SimConfig cfg = load(common, {});
      out << "config ok: scenario " << to_string(cfg.kind) << '\n';
      return 0;
    }
    if (diff_cmd->parsed()) {
      std::map<std::string, double> tols;
      for (const auto& mt : metric_tols) {
        const auto eq = mt.find('=');
        if (eq == std::string::npos) throw ValidationError({"metric-tolerance '" + mt + "': expected metric=value"});
        tols[mt.substr(0, eq)] = std::stod(mt.substr(eq + 1));
      }
      const DiffResult res = diff_report(read_json(report_a), read_json(report_b), tolerance, tols);
      std::size_t breaches = 0;
      out << std::left << std::setw(56) << "metric" << std::right << std::setw(16) << "a"
          << std::setw(16) << "b" << std::setw(12) << "rel_delta" << std::setw(10) << "tol"
          << "  result\n";
      for (const auto& row : res.rows) {
        if (!row.pass) ++breaches;
        if (row.pass && !show_all) continue;
        out << std::left << std::setw(56) << row.metric << std::right << std::setprecision(6)
            << std::setw(16) << row.a << std::setw(16) << row.b << std::setw(12) << row.rel_delta
            << std::setw(10) << row.tolerance << "  " << (row.pass ? "pass" : "FAIL") << '\n';
      }
      out << res.rows.size() << " metrics compared, " << breaches << " outside tolerance\n";
      return res.ok ? 0 : 1;
    }
  } catch (const ValidationError& e) {
    for (const auto& m : e.errors()) err << "error: " << m << '\n';
    return 1;
  } catch (const SimulationAbort& e) {
    err << "simulation aborted: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace pimmmu::cli

#include "pimmmu/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pimmmu {

using nlohmann::json;

namespace {

json to_json(const ChannelReport& c) {
  return json{{"act", c.act},
              {"pre", c.pre},
              {"rd", c.rd},
              {"wr", c.wr},
              {"ref", c.ref},
              {"bytes_read", c.bytes_read},
              {"bytes_written", c.bytes_written},
              {"bandwidth_gbps", c.bandwidth_gbps},
              {"utilization", c.utilization},
              {"timeline", c.timeline_utilization}};
}

json to_json(const RegionReport& r) {
  json channels = json::array();
  for (const auto& c : r.channels) channels.push_back(to_json(c));
  return json{{"channels", channels},
              {"commands", {{"act", r.act}, {"pre", r.pre}, {"rd", r.rd}, {"wr", r.wr}, {"ref", r.ref}}},
              {"bytes_read", r.bytes_read},
              {"bytes_written", r.bytes_written},
              {"ranks", r.ranks},
              {"peak_gbps", r.peak_gbps},
              {"read_gbps", r.read_gbps},
              {"write_gbps", r.write_gbps},
              {"write_utilization", r.write_utilization},
              {"utilization", r.utilization}};
}

void flatten(const json& j, const std::string& prefix, std::map<std::string, double>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "config" || it.key() == "timeline") continue;
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_boolean()) {
    out[prefix] = j.get<bool>() ? 1.0 : 0.0;
  } else if (j.is_number()) {
    out[prefix] = j.get<double>();
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

json to_json(const SimReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["scenario"] = r.scenario;
  j["label"] = r.label;
  j["engine"] = r.engine;
  j["scheduler"] = r.scheduler;
  j["direction"] = r.direction;
  j["dram_mapping"] = r.dram_mapping;
  j["seed"] = r.seed;
  j["transfer_bytes"] = r.transfer_bytes;
  j["bytes_read"] = r.bytes_read;
  j["bytes_written"] = r.bytes_written;
  j["dram_cycles"] = r.dram_cycles;
  j["frontend_cycles"] = r.frontend_cycles;
  j["elapsed_ns"] = r.elapsed_ns;
  j["throughput_gbps"] = r.throughput_gbps;
  j["dram"] = to_json(r.dram);
  j["pim"] = to_json(r.pim);
  j["checker"] = {{"enabled", r.checker_enabled},
                  {"clean", r.checker_clean},
                  {"commands_checked", r.commands_checked}};
  j["data_check"] = r.data_check;
  j["host"] = {{"cpu_active_ns", r.cpu_active_ns},
               {"threads", r.threads},
               {"dispatches", r.dispatches},
               {"preemptions", r.preemptions},
               {"dispatch_waves", r.dispatch_waves},
               {"max_active_dst_banks", r.max_active_dst_banks},
               {"thread_active_spread_ns", r.thread_active_spread_ns}};
  j["dce"] = {{"used", r.dce_used},
              {"active_ns", r.dce_active_ns},
              {"waves", r.dce_waves},
              {"max_buffer_lines", r.dce_max_buffer_lines},
              {"max_address_entries", r.dce_max_address_entries}};
  j["energy"] = {{"act_pre_j", r.energy.act_pre_j},
                 {"burst_j", r.energy.burst_j},
                 {"io_j", r.energy.io_j},
                 {"cpu_j", r.energy.cpu_j},
                 {"dce_j", r.energy.dce_j},
                 {"background_j", r.energy.background_j},
                 {"dynamic_j", r.energy.dynamic_j()},
                 {"total_j", r.energy.total_j()}};
  j["config"] = r.config;
  return j;
}

json report_document(const std::string& kind, const std::vector<SimReport>& reports) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["kind"] = kind;
  doc["reports"] = json::array();
  for (const auto& r : reports) doc["reports"].push_back(to_json(r));
  return doc;
}

std::map<std::string, double> flatten_metrics(const json& doc) {
  std::map<std::string, double> out;
  flatten(doc, "", out);
  return out;
}

std::string to_csv(const std::vector<SimReport>& reports) {
  std::vector<std::map<std::string, double>> rows;
  std::set<std::string> columns;
  for (const auto& r : reports) {
    json j = to_json(r);
    j.erase("dram");
    j.erase("pim");
    auto m = flatten_metrics(j);
    // Region totals without the per-channel breakdown.
    for (const char* region : {"dram", "pim"}) {
      json reg = to_json(region[0] == 'd' ? r.dram : r.pim);
      reg.erase("channels");
      for (const auto& [k, v] : flatten_metrics(reg)) m[std::string(region) + "." + k] = v;
    }
    for (const auto& [k, v] : m) columns.insert(k);
    rows.push_back(std::move(m));
  }
  std::ostringstream os;
  os.precision(17);
  os << "scenario,label,engine,scheduler,direction,dram_mapping,data_check";
  for (const auto& c : columns) os << ',' << c;
  os << '\n';
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    os << csv_escape(r.scenario) << ',' << csv_escape(r.label) << ',' << r.engine << ','
       << r.scheduler << ',' << r.direction << ',' << r.dram_mapping << ',' << r.data_check;
    for (const auto& c : columns) {
      os << ',';
      auto it = rows[i].find(c);
      if (it != rows[i].end()) os << it->second;
    }
    os << '\n';
  }
  return os.str();
}

DiffResult diff_report(const json& a, const json& b, double default_tolerance,
                       const std::map<std::string, double>& tolerances) {
  auto version = [](const json& j, const char* side) {
    if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
      throw std::runtime_error(std::string("report ") + side + " has no schema_version");
    }
    return j["schema_version"].get<int>();
  };
  const int va = version(a, "a");
  const int vb = version(b, "b");
  if (va != vb) {
    throw std::runtime_error("schema_version mismatch: " + std::to_string(va) + " vs " +
                             std::to_string(vb));
  }
  const auto ma = flatten_metrics(a);
  const auto mb = flatten_metrics(b);
  std::set<std::string> keys;
  for (const auto& [k, v] : ma) keys.insert(k);
  for (const auto& [k, v] : mb) keys.insert(k);

  DiffResult res;
  for (const auto& k : keys) {
    DiffRow row;
    row.metric = k;
    auto tol = tolerances.find(k);
    row.tolerance = tol == tolerances.end() ? default_tolerance : tol->second;
    auto ia = ma.find(k);
    auto ib = mb.find(k);
    if (ia == ma.end() || ib == mb.end()) {
      row.a = ia == ma.end() ? std::nan("") : ia->second;
      row.b = ib == mb.end() ? std::nan("") : ib->second;
      row.rel_delta = std::numeric_limits<double>::infinity();
      row.pass = false;
    } else {
      row.a = ia->second;
      row.b = ib->second;
      const double scale = std::max(std::fabs(row.a), 1e-12);
      row.rel_delta = row.a == row.b ? 0.0 : std::fabs(row.b - row.a) / scale;
      row.pass = row.rel_delta <= row.tolerance;
    }
    res.ok = res.ok && row.pass;
    res.rows.push_back(row);
  }
  return res;
}

}  // namespace pimmmu

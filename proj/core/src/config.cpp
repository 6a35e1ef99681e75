#include "pimmmu/config.hpp"

#include <fstream>
#include <sstream>

#include "pimmmu/error.hpp"

namespace pimmmu {

using nlohmann::json;

namespace {

constexpr const char* kDefaults = R"json({
  "schema_version": 1,
  "seed": 1,
  "check_protocol": true,
  "verify_data": true,
  "dram": {
    "geometry": {"channels": 4, "ranks": 2, "bankgroups": 4, "banks": 4,
                 "rows": 4096, "columns": 128, "line_bytes": 64},
    "timing": {"tCK_ns": 0.833, "CL": 17, "CWL": 12, "tRCD": 17, "tRP": 17, "tRAS": 39,
               "tRC": 56, "tCCD_S": 4, "tCCD_L": 6, "tRRD_S": 4, "tRRD_L": 6, "tFAW": 26,
               "tWR": 18, "tWTR_S": 3, "tWTR_L": 9, "tRTP": 9, "burst_length": 8,
               "refresh": false, "tREFI": 9363, "tRFC": 420},
    "mapping": "mlp",
    "xor_masks": [],
    "bank_hash": true
  },
  "pim": {
    "geometry": {"channels": 4, "ranks": 2, "bankgroups": 4, "banks": 16,
                 "rows": 8192, "columns": 128, "line_bytes": 64},
    "timing": {"tCK_ns": 0.833, "CL": 17, "CWL": 12, "tRCD": 17, "tRP": 17, "tRAS": 39,
               "tRC": 56, "tCCD_S": 4, "tCCD_L": 6, "tRRD_S": 4, "tRRD_L": 6, "tFAW": 26,
               "tWR": 18, "tWTR_S": 3, "tWTR_L": 9, "tRTP": 9, "burst_length": 8,
               "refresh": false, "tREFI": 9363, "tRFC": 420},
    "mapping": "locality"
  },
  "controller": {"read_queue": 64, "write_queue": 64, "write_high": 48, "write_low": 16,
                 "timeline_bin_cycles": 12000},
  "host": {"cores": 8, "clock_ghz": 3.2, "quantum_ms": 1.5, "mshrs": 64,
           "issue_gap_cycles": 4, "transpose_cycles": 8},
  "dce": {"clock_ghz": 3.2, "data_buffer_bytes": 16384, "address_buffer_bytes": 65536,
          "scheduler": "pim_ms"},
  "energy": {"act_pre_nj": 2.0, "burst_nj": 1.5, "io_nj_per_64b": 0.5, "cpu_w_per_core": 5.0,
             "dce_w": 0.5, "dram_background_w_per_device": 0.15, "devices_per_rank": 8,
             "dce_submit_uj": 50.0},
  "scenario": {
    "kind": "cpu_dpu",
    "transfer": {"engine": "dce", "direction": "dram_to_pim", "cores": 0,
                 "xfer_per_bank": 65536, "heap_base": 0, "dram_base": 0},
    "memcpy": {"bytes": 67108864, "threads": 8},
    "ablation": {"sizes_mib": [1, 4, 16, 64, 256], "directions": ["dram_to_pim", "pim_to_dram"]},
    "sweep": {"axis": "channels", "values": [1, 2, 4], "workload": "memcpy"}
  }
})json";

json::json_pointer dotted_to_pointer(const std::string& dotted) {
  std::string p = "/" + dotted;
  for (auto& c : p) {
    if (c == '.') c = '/';
  }
  return json::json_pointer(p);
}

// Keys of `user` absent from `schema`, as dotted paths.
void unknown_keys(const json& user, const json& schema, const std::string& at,
                  std::vector<std::string>& errors) {
  if (!user.is_object() || !schema.is_object()) return;
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = at.empty() ? it.key() : at + "." + it.key();
    if (!schema.contains(it.key())) {
      errors.push_back(path + ": unknown field");
    } else {
      unknown_keys(it.value(), schema[it.key()], path, errors);
    }
  }
}

// Typed field access that records an error instead of throwing.
class Reader {
 public:
  Reader(const json& doc, std::vector<std::string>& errors) : doc_(doc), errors_(errors) {}

  const json* at(const std::string& path) {
    const auto ptr = dotted_to_pointer(path);
    if (!doc_.contains(ptr)) {
      errors_.push_back(path + ": missing");
      return nullptr;
    }
    return &doc_.at(ptr);
  }

  std::uint64_t u64(const std::string& path) {
    const json* v = at(path);
    if (!v) return 0;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer() && v->get<std::int64_t>() >= 0) return v->get<std::uint64_t>();
    errors_.push_back(path + ": expected a non-negative integer");
    return 0;
  }

  std::uint32_t u32(const std::string& path) {
    const std::uint64_t v = u64(path);
    if (v > 0xffffffffULL) {
      errors_.push_back(path + ": value too large");
      return 0;
    }
    return static_cast<std::uint32_t>(v);
  }

  double number(const std::string& path) {
    const json* v = at(path);
    if (!v) return 0.0;
    if (v->is_number()) return v->get<double>();
    errors_.push_back(path + ": expected a number");
    return 0.0;
  }

  bool boolean(const std::string& path) {
    const json* v = at(path);
    if (!v) return false;
    if (v->is_boolean()) return v->get<bool>();
    errors_.push_back(path + ": expected true or false");
    return false;
  }

  // Index of the value within `choices`, or 0 after recording an error.
  std::size_t choice(const std::string& path, const std::vector<std::string>& choices) {
    const json* v = at(path);
    if (!v) return 0;
    if (v->is_string()) {
      for (std::size_t i = 0; i < choices.size(); ++i) {
        if (v->get<std::string>() == choices[i]) return i;
      }
    }
    std::string allowed;
    for (const auto& c : choices) allowed += (allowed.empty() ? "" : "|") + c;
    errors_.push_back(path + ": expected one of " + allowed);
    return 0;
  }

  std::vector<std::uint64_t> u64_list(const std::string& path) {
    std::vector<std::uint64_t> out;
    const json* v = at(path);
    if (!v) return out;
    if (!v->is_array()) {
      errors_.push_back(path + ": expected an array");
      return out;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      if (e.is_number_unsigned() || (e.is_number_integer() && e.get<std::int64_t>() >= 0)) {
        out.push_back(e.get<std::uint64_t>());
      } else {
        errors_.push_back(path + "[" + std::to_string(i) + "]: expected a non-negative integer");
      }
    }
    return out;
  }

  std::vector<std::size_t> choice_list(const std::string& path,
                                       const std::vector<std::string>& choices) {
    std::vector<std::size_t> out;
    const json* v = at(path);
    if (!v) return out;
    if (!v->is_array()) {
      errors_.push_back(path + ": expected an array");
      return out;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      bool ok = false;
      for (std::size_t c = 0; c < choices.size(); ++c) {
        if ((*v)[i].is_string() && (*v)[i].get<std::string>() == choices[c]) {
          out.push_back(c);
          ok = true;
        }
      }
      if (!ok) errors_.push_back(path + "[" + std::to_string(i) + "]: unknown value");
    }
    return out;
  }

 private:
  const json& doc_;
  std::vector<std::string>& errors_;
};

Geometry read_geometry(Reader& r, const std::string& p) {
  Geometry g;
  g.channels = r.u32(p + ".channels");
  g.ranks = r.u32(p + ".ranks");
  g.bankgroups = r.u32(p + ".bankgroups");
  g.banks = r.u32(p + ".banks");
  g.rows = r.u64(p + ".rows");
  g.columns = r.u32(p + ".columns");
  g.line_bytes = r.u32(p + ".line_bytes");
  return g;
}

TimingParams read_timing(Reader& r, const std::string& p) {
  TimingParams t;
  t.tCK_ns = r.number(p + ".tCK_ns");
  t.CL = r.u32(p + ".CL");
  t.CWL = r.u32(p + ".CWL");
  t.tRCD = r.u32(p + ".tRCD");
  t.tRP = r.u32(p + ".tRP");
  t.tRAS = r.u32(p + ".tRAS");
  t.tRC = r.u32(p + ".tRC");
  t.tCCD_S = r.u32(p + ".tCCD_S");
  t.tCCD_L = r.u32(p + ".tCCD_L");
  t.tRRD_S = r.u32(p + ".tRRD_S");
  t.tRRD_L = r.u32(p + ".tRRD_L");
  t.tFAW = r.u32(p + ".tFAW");
  t.tWR = r.u32(p + ".tWR");
  t.tWTR_S = r.u32(p + ".tWTR_S");
  t.tWTR_L = r.u32(p + ".tWTR_L");
  t.tRTP = r.u32(p + ".tRTP");
  t.burst_length = r.u32(p + ".burst_length");
  t.refresh = r.boolean(p + ".refresh");
  t.tREFI = r.u32(p + ".tREFI");
  t.tRFC = r.u32(p + ".tRFC");
  return t;
}

const std::vector<std::string> kMappings = {"mlp", "locality"};
const std::vector<std::string> kDirections = {"dram_to_pim", "pim_to_dram"};
const std::vector<std::string> kKinds = {"cpu_dpu", "memcpy", "ablation", "sweep"};

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::CpuDpu: return "cpu_dpu";
    case ScenarioKind::Memcpy: return "memcpy";
    case ScenarioKind::Ablation: return "ablation";
    case ScenarioKind::Sweep: return "sweep";
  }
  return "?";
}

const char* to_string(TransferEngine e) { return e == TransferEngine::Host ? "host" : "dce"; }

const json& default_config() {
  static const json doc = json::parse(kDefaults);
  return doc;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError({"override '" + assignment + "': expected dotted.path=value"});
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  const auto ptr = dotted_to_pointer(path);
  if (!default_config().contains(ptr)) {
    throw ValidationError({path + ": unknown field"});
  }
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  doc[ptr] = value;
}

json resolve_config(const json& user, const std::vector<std::string>& overrides) {
  std::vector<std::string> errors;
  if (!user.is_object()) throw ValidationError({"config: expected a JSON object"});
  unknown_keys(user, default_config(), "", errors);
  if (user.contains("schema_version") && user["schema_version"] != kConfigSchemaVersion) {
    errors.push_back("schema_version: expected " + std::to_string(kConfigSchemaVersion));
  }
  json doc = default_config();
  doc.merge_patch(user);
  for (const auto& o : overrides) {
    try {
      apply_override(doc, o);
    } catch (const ValidationError& e) {
      errors.insert(errors.end(), e.errors().begin(), e.errors().end());
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return doc;
}

SimConfig parse_config(const json& doc) {
  std::vector<std::string> errors;
  unknown_keys(doc, default_config(), "", errors);
  Reader r(doc, errors);
  SimConfig c;
  c.document = doc;
  c.seed = r.u64("seed");
  c.verify_data = r.boolean("verify_data");

  auto& m = c.memory;
  m.check_protocol = r.boolean("check_protocol");
  m.dram.geometry = read_geometry(r, "dram.geometry");
  m.dram.timing = read_timing(r, "dram.timing");
  m.dram.mapping = r.choice("dram.mapping", kMappings) == 0 ? MappingKind::MlpCentric
                                                             : MappingKind::LocalityCentric;
  m.dram.xor_masks = r.u64_list("dram.xor_masks");
  m.dram.bank_hash = r.boolean("dram.bank_hash");
  m.pim.geometry = read_geometry(r, "pim.geometry");
  m.pim.timing = read_timing(r, "pim.timing");
  if (r.choice("pim.mapping", kMappings) != 1) {
    errors.push_back("pim.mapping: the PIM region must use the locality mapping");
  }
  m.pim.mapping = MappingKind::LocalityCentric;

  m.controller.read_queue = r.u32("controller.read_queue");
  m.controller.write_queue = r.u32("controller.write_queue");
  m.controller.write_high = r.u32("controller.write_high");
  m.controller.write_low = r.u32("controller.write_low");
  m.controller.timeline_bin_cycles = r.u64("controller.timeline_bin_cycles");

  c.host.cores = r.u32("host.cores");
  c.host.clock_ghz = r.number("host.clock_ghz");
  c.host.quantum_ms = r.number("host.quantum_ms");
  c.host.mshrs = r.u32("host.mshrs");
  c.host.issue_gap_cycles = r.u32("host.issue_gap_cycles");
  c.host.transpose_cycles = r.u32("host.transpose_cycles");

  c.dce.clock_ghz = r.number("dce.clock_ghz");
  c.dce.data_buffer_bytes = r.u32("dce.data_buffer_bytes");
  c.dce.address_buffer_bytes = r.u32("dce.address_buffer_bytes");
  c.dce.scheduler = r.choice("dce.scheduler", {"pim_ms", "naive"}) == 0 ? SchedulerKind::PimMs
                                                                         : SchedulerKind::Naive;

  c.energy.act_pre_nj = r.number("energy.act_pre_nj");
  c.energy.burst_nj = r.number("energy.burst_nj");
  c.energy.io_nj_per_64b = r.number("energy.io_nj_per_64b");
  c.energy.cpu_w_per_core = r.number("energy.cpu_w_per_core");
  c.energy.dce_w = r.number("energy.dce_w");
  c.energy.dram_background_w_per_device = r.number("energy.dram_background_w_per_device");
  c.energy.devices_per_rank = r.u32("energy.devices_per_rank");
  c.energy.dce_submit_uj = r.number("energy.dce_submit_uj");

  c.kind = static_cast<ScenarioKind>(r.choice("scenario.kind", kKinds));
  auto& t = c.transfer;
  t.engine = r.choice("scenario.transfer.engine", {"host", "dce"}) == 0 ? TransferEngine::Host
                                                                       : TransferEngine::Dce;
  t.direction = static_cast<Direction>(r.choice("scenario.transfer.direction", kDirections));
  t.cores = r.u32("scenario.transfer.cores");
  t.xfer_per_bank = r.u64("scenario.transfer.xfer_per_bank");
  t.heap_base = r.u64("scenario.transfer.heap_base");
  t.dram_base = r.u64("scenario.transfer.dram_base");
  c.memcpy.bytes = r.u64("scenario.memcpy.bytes");
  c.memcpy.threads = r.u32("scenario.memcpy.threads");
  c.ablation.sizes_mib = r.u64_list("scenario.ablation.sizes_mib");
  for (auto d : r.choice_list("scenario.ablation.directions", kDirections)) {
    c.ablation.directions.push_back(static_cast<Direction>(d));
  }
  c.sweep.axis = r.choice("scenario.sweep.axis", {"channels", "ranks"}) == 0 ? SweepAxis::Channels
                                                                           : SweepAxis::Ranks;
  for (auto v : r.u64_list("scenario.sweep.values")) {
    if (!is_pow2(v) || v > 1024) {
      errors.push_back("scenario.sweep.values: " + std::to_string(v) +
                       " is not a power of two in [1, 1024]");
    } else {
      c.sweep.values.push_back(static_cast<std::uint32_t>(v));
    }
  }
  c.sweep.workload = r.choice("scenario.sweep.workload", {"memcpy", "cpu_dpu"}) == 0
                         ? ScenarioKind::Memcpy
                         : ScenarioKind::CpuDpu;

  // Semantic checks, only on fields that parsed.
  append_scoped(errors, "dram.geometry", m.dram.geometry.validate());
  append_scoped(errors, "dram.timing", m.dram.timing.validate());
  append_scoped(errors, "pim.geometry", m.pim.geometry.validate());
  append_scoped(errors, "pim.timing", m.pim.timing.validate());
  append_scoped(errors, "controller", m.controller.validate());
  append_scoped(errors, "host", c.host.validate());
  append_scoped(errors, "dce", c.dce.validate());
  append_scoped(errors, "energy", c.energy.validate());
  if (m.dram.timing.tCK_ns != m.pim.timing.tCK_ns) {
    errors.push_back("pim.timing.tCK_ns: must equal dram.timing.tCK_ns (one memory clock)");
  }
  if (m.dram.geometry.validate().empty() && m.dram.mapping == MappingKind::MlpCentric) {
    try {
      (void)MappingFunction::mlp_centric(m.dram.geometry, m.dram.xor_masks, m.dram.bank_hash);
    } catch (const std::exception& e) {
      errors.push_back(std::string("dram.") + e.what());
    }
  }
  if (m.pim.geometry.line_bytes % 64 != 0) {
    errors.push_back("pim.geometry.line_bytes: transfers need a multiple of 64");
  }
  if (m.pim.geometry.validate().empty() && t.cores > m.pim.geometry.total_banks()) {
    errors.push_back("scenario.transfer.cores: exceeds the " +
                     std::to_string(m.pim.geometry.total_banks()) + " PIM banks");
  }
  if (c.memcpy.threads == 0) errors.push_back("scenario.memcpy.threads: must be >= 1");
  if (c.kind == ScenarioKind::Ablation && c.ablation.sizes_mib.empty()) {
    errors.push_back("scenario.ablation.sizes_mib: must not be empty");
  }
  if (c.kind == ScenarioKind::Sweep && c.sweep.values.empty()) {
    errors.push_back("scenario.sweep.values: must not be empty");
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return c;
}

SimConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ValidationError({"config: cannot open " + path.string()});
  json user = json::parse(in, nullptr, false);
  if (user.is_discarded()) throw ValidationError({"config: " + path.string() + " is not valid JSON"});
  return parse_config(resolve_config(user, overrides));
}

SimConfig make_config(const std::vector<std::string>& overrides) {
  return parse_config(resolve_config(json::object(), overrides));
}

}  // namespace pimmmu

#include "pimmmu/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "pimmmu/dce.hpp"
#include "pimmmu/error.hpp"
#include "pimmmu/hostmodel.hpp"

namespace pimmmu {

using nlohmann::json;

namespace {

std::uint64_t period_fs(double ghz) {
  return static_cast<std::uint64_t>(std::llround(1e6 / ghz));
}

RegionReport region_report(const MemorySystem& mem, Region region, const SubsystemConfig& sub,
                           const ControllerParams& cp, double elapsed_ns, std::uint64_t cycles) {
  RegionReport rr;
  const TimingParams& t = sub.timing;
  const double line = sub.geometry.line_bytes;
  const double burst = t.burst_cycles();
  const double chan_peak = line / (burst * t.tCK_ns);  // bytes per ns == GB/s
  const double bin_capacity = static_cast<double>(cp.timeline_bin_cycles) / burst * line;
  const std::size_t bins = cycles == 0 ? 0 : (cycles - 1) / cp.timeline_bin_cycles + 1;
  for (const Controller& c : mem.controllers(region)) {
    const ControllerStats& s = c.stats();
    ChannelReport ch;
    ch.act = s.act;
    ch.pre = s.pre;
    ch.rd = s.rd;
    ch.wr = s.wr;
    ch.ref = s.ref;
    ch.bytes_read = s.bytes_read;
    ch.bytes_written = s.bytes_written;
    const double bytes = static_cast<double>(s.bytes_read + s.bytes_written);
    ch.bandwidth_gbps = elapsed_ns > 0 ? bytes / elapsed_ns : 0.0;
    ch.utilization = ch.bandwidth_gbps / chan_peak;
    ch.timeline_utilization.assign(bins, 0.0);
    for (std::size_t b = 0; b < std::min(bins, s.timeline.size()); ++b) {
      ch.timeline_utilization[b] = static_cast<double>(s.timeline[b]) / bin_capacity;
    }
    rr.act += s.act;
    rr.pre += s.pre;
    rr.rd += s.rd;
    rr.wr += s.wr;
    rr.ref += s.ref;
    rr.bytes_read += s.bytes_read;
    rr.bytes_written += s.bytes_written;
    rr.channels.push_back(std::move(ch));
  }
  rr.ranks = sub.geometry.channels * sub.geometry.ranks;
  rr.peak_gbps = chan_peak * sub.geometry.channels;
  if (elapsed_ns > 0) {
    rr.read_gbps = static_cast<double>(rr.bytes_read) / elapsed_ns;
    rr.write_gbps = static_cast<double>(rr.bytes_written) / elapsed_ns;
  }
  rr.write_utilization = rr.write_gbps / rr.peak_gbps;
  rr.utilization = (rr.read_gbps + rr.write_gbps) / rr.peak_gbps;
  return rr;
}

bool verify_memcpy(std::uint64_t bytes, PhysAddr src, PhysAddr dst, const MemoryImage& image) {
  std::vector<std::uint8_t> a(4096), b(4096);
  for (std::uint64_t off = 0; off < bytes; off += a.size()) {
    const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(a.size(), bytes - off));
    image.read(src + off, std::span(a.data(), n));
    image.read(dst + off, std::span(b.data(), n));
    if (!std::equal(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n), b.begin())) return false;
  }
  return true;
}

}  // namespace

Simulation::Simulation(const MemorySystemConfig& cfg, std::uint64_t seed, bool track_data)
    : mem_(std::make_unique<MemorySystem>(cfg)),
      image_(track_data ? std::make_unique<MemoryImage>(seed) : nullptr),
      dram_period_fs_(static_cast<std::uint64_t>(std::llround(cfg.dram.timing.tCK_ns * 1e6))),
      next_dram_fs_(dram_period_fs_) {}

Simulation::Span Simulation::run(Frontend& fe, double frontend_clock_ghz,
                                 std::uint64_t stall_limit) {
  Span span;
  span.start_fs = now_fs_;
  const std::uint64_t fe_period = period_fs(frontend_clock_ghz);
  std::uint64_t next_fe = now_fs_ + fe_period;
  std::uint64_t completions = 0;
  mem_->set_completion_handler([&](const Completion& c) {
    ++completions;
    fe.on_completion(c);
  });

  std::uint64_t last_progress_cycle = mem_->cycle();
  std::uint64_t last_completions = 0;
  while (!(fe.done() && mem_->idle())) {
    if (next_dram_fs_ <= next_fe) {
      now_fs_ = next_dram_fs_;
      next_dram_fs_ += dram_period_fs_;
      mem_->tick();
      ++span.dram_cycles;
      if (completions != last_completions) {
        last_completions = completions;
        last_progress_cycle = mem_->cycle();
      } else if (mem_->cycle() - last_progress_cycle > stall_limit) {
        mem_->set_completion_handler(nullptr);
        throw SimulationAbort("no request completed for " + std::to_string(stall_limit) +
                              " DRAM cycles");
      }
    } else {
      now_fs_ = next_fe;
      next_fe += fe_period;
      fe.tick(span.frontend_cycles++);
    }
  }
  mem_->set_completion_handler(nullptr);
  span.end_fs = now_fs_;
  return span;
}

TransferDescriptor make_descriptor(const SimConfig& cfg, const HetMap& map) {
  const auto& t = cfg.transfer;
  const std::uint32_t cores = t.cores == 0 ? map.pim_fn().geometry().total_banks() : t.cores;
  TransferDescriptor d;
  d.direction = t.direction;
  d.xfer_per_bank = t.xfer_per_bank;
  d.pim_heap_base = t.heap_base;
  for (std::uint32_t i = 0; i < cores; ++i) {
    d.pim_core_ids.push_back(i);
    d.dram_bases.push_back(t.dram_base + std::uint64_t{i} * t.xfer_per_bank);
  }
  return d;
}

bool verify_transfer(const TransferDescriptor& d, const HetMap& map, const MemoryImage& image) {
  const std::uint32_t line = map.pim_fn().geometry().line_bytes;
  std::vector<std::uint8_t> src(line), dst(line);
  for (std::size_t i = 0; i < d.pim_core_ids.size(); ++i) {
    const PhysAddr pim = pim_core_base(d.pim_core_ids[i], d.pim_heap_base, map);
    const PhysAddr from = d.direction == Direction::DramToPim ? d.dram_bases[i] : pim;
    const PhysAddr to = d.direction == Direction::DramToPim ? pim : d.dram_bases[i];
    for (std::uint64_t off = 0; off < d.xfer_per_bank; off += line) {
      image.read(from + off, src);
      image.read(to + off, dst);
      transpose_line(src);
      if (src != dst) return false;
    }
  }
  return true;
}

SimReport run_scenario(const SimConfig& cfg, const RunOptions& opts) {
  if (cfg.kind != ScenarioKind::CpuDpu && cfg.kind != ScenarioKind::Memcpy) {
    throw std::invalid_argument(std::string("run_scenario: scenario '") + to_string(cfg.kind) +
                                "' is not a single run");
  }
  Simulation sim(cfg.memory, cfg.seed, cfg.verify_data);
  MemorySystem& mem = sim.memory();
  mem.set_trace_streams(opts.trace_dram, opts.trace_pim);

  SimReport r;
  r.scenario = to_string(cfg.kind);
  r.seed = cfg.seed;
  r.dram_mapping = to_string(cfg.memory.dram.mapping);
  r.config = cfg.document;
  r.checker_enabled = cfg.memory.check_protocol;
  Simulation::Span span;

  auto fill_host = [&](HostModel& host, double ghz) {
    const HostStats& s = host.stats();
    r.bytes_read = s.bytes_read;
    r.bytes_written = s.bytes_written;
    r.cpu_active_ns = static_cast<double>(s.busy_cycles) / ghz;
    r.threads = s.threads;
    r.dispatches = s.dispatches;
    r.preemptions = s.preemptions;
    r.dispatch_waves = (s.dispatches + cfg.host.cores - 1) / cfg.host.cores;
    r.max_active_dst_banks = s.max_active_dst_banks;
    if (!s.thread_active_cycles.empty()) {
      auto [lo, hi] = std::minmax_element(s.thread_active_cycles.begin(), s.thread_active_cycles.end());
      r.thread_active_spread_ns = static_cast<double>(*hi - *lo) / ghz;
    }
  };

  if (cfg.kind == ScenarioKind::Memcpy) {
    r.engine = "host";
    r.scheduler = "none";
    r.direction = "dram_to_dram";
    r.transfer_bytes = cfg.memcpy.bytes;
    HostModel host(mem, sim.image(), cfg.host);
    host.start_memcpy(cfg.memcpy.bytes, cfg.memcpy.threads, 0, cfg.memcpy.bytes);
    span = sim.run(host, cfg.host.clock_ghz, opts.stall_limit);
    fill_host(host, cfg.host.clock_ghz);
    if (sim.image()) {
      r.data_check = verify_memcpy(cfg.memcpy.bytes, 0, cfg.memcpy.bytes, *sim.image()) ? "pass" : "fail";
    }
  } else {
    const TransferDescriptor d = make_descriptor(cfg, mem.map());
    r.engine = to_string(cfg.transfer.engine);
    r.direction = to_string(d.direction);
    r.transfer_bytes = d.total_bytes();
    if (cfg.transfer.engine == TransferEngine::Host) {
      r.scheduler = "none";
      HostModel host(mem, sim.image(), cfg.host);
      host.start_transfer(d);
      span = sim.run(host, cfg.host.clock_ghz, opts.stall_limit);
      fill_host(host, cfg.host.clock_ghz);
    } else {
      r.scheduler = to_string(cfg.dce.scheduler);
      DataCopyEngine dce(mem, sim.image(), cfg.dce);
      dce.set_event_log(opts.dce_log);
      dce.start(d);
      span = sim.run(dce, cfg.dce.clock_ghz, opts.stall_limit);
      const DceStats& s = dce.stats();
      r.bytes_read = s.bytes_read;
      r.bytes_written = s.bytes_written;
      r.dce_used = true;
      r.dce_active_ns = static_cast<double>(s.cycles) / cfg.dce.clock_ghz;
      r.dce_waves = s.waves;
      r.dce_max_buffer_lines = s.max_buffer_lines;
      r.dce_max_address_entries = s.max_address_entries;
    }
    if (sim.image()) r.data_check = verify_transfer(d, mem.map(), *sim.image()) ? "pass" : "fail";
  }

  r.dram_cycles = span.dram_cycles;
  r.frontend_cycles = span.frontend_cycles;
  r.elapsed_ns = span.elapsed_ns();
  r.throughput_gbps = r.elapsed_ns > 0 ? static_cast<double>(r.transfer_bytes) / r.elapsed_ns : 0.0;
  r.dram = region_report(mem, Region::Dram, cfg.memory.dram, cfg.memory.controller, r.elapsed_ns,
                         span.dram_cycles);
  r.pim = region_report(mem, Region::Pim, cfg.memory.pim, cfg.memory.controller, r.elapsed_ns,
                        span.dram_cycles);
  r.commands_checked = mem.commands_checked();
  r.checker_clean = true;  // a violation aborts the run
  r.energy = compute_energy(r, cfg.energy);
  return r;
}

SimConfig derive_config(const SimConfig& base, const std::vector<std::string>& overrides) {
  json doc = base.document;
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_config(doc);
}

const std::vector<AblationVariant>& ablation_variants() {
  static const std::vector<AblationVariant> v = {
      {"Base", {"scenario.transfer.engine=host", "dram.mapping=locality"}},
      {"Base+D", {"scenario.transfer.engine=dce", "dce.scheduler=naive", "dram.mapping=locality"}},
      {"Base+D+H", {"scenario.transfer.engine=dce", "dce.scheduler=naive", "dram.mapping=mlp"}},
      {"Base+D+H+P", {"scenario.transfer.engine=dce", "dce.scheduler=pim_ms", "dram.mapping=mlp"}},
  };
  return v;
}

namespace {

std::vector<SimReport> run_points(const std::vector<SimConfig>& points,
                                  const std::vector<std::string>& labels, unsigned jobs) {
  std::vector<SimReport> out(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        out[i] = run_scenario(points[i]);
        out[i].label = labels[i];
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(points.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

std::vector<SimReport> ablation(const SimConfig& cfg, unsigned jobs) {
  const std::uint32_t cores =
      cfg.transfer.cores == 0 ? cfg.memory.pim.geometry.total_banks() : cfg.transfer.cores;
  std::vector<SimConfig> points;
  std::vector<std::string> labels;
  for (Direction dir : cfg.ablation.directions) {
    for (std::uint64_t mib : cfg.ablation.sizes_mib) {
      const std::uint64_t total = mib << 20;
      if (total % (std::uint64_t{cores} * 64) != 0) {
        throw ValidationError({"scenario.ablation.sizes_mib: " + std::to_string(mib) +
                               " MiB does not split into whole lines over " +
                               std::to_string(cores) + " cores"});
      }
      for (const auto& v : ablation_variants()) {
        std::vector<std::string> o = v.overrides;
        o.push_back("scenario.kind=cpu_dpu");
        o.push_back(std::string("scenario.transfer.direction=") + to_string(dir));
        o.push_back("scenario.transfer.xfer_per_bank=" + std::to_string(total / cores));
        points.push_back(derive_config(cfg, o));
        labels.push_back(v.name);
      }
    }
  }
  return run_points(points, labels, jobs);
}

std::vector<SimReport> sweep(const SimConfig& cfg, unsigned jobs) {
  const char* axis = cfg.sweep.axis == SweepAxis::Channels ? "channels" : "ranks";
  std::vector<SimConfig> points;
  std::vector<std::string> labels;
  for (std::uint32_t v : cfg.sweep.values) {
    const std::string value = std::to_string(v);
    points.push_back(derive_config(cfg, {std::string("scenario.kind=") + to_string(cfg.sweep.workload),
                                         std::string("dram.geometry.") + axis + "=" + value,
                                         std::string("pim.geometry.") + axis + "=" + value}));
    labels.push_back(std::string(axis) + "=" + value);
  }
  return run_points(points, labels, jobs);
}

json ablation_summary(const std::vector<SimReport>& reports) {
  std::map<std::pair<std::string, std::uint64_t>, const SimReport*> base;
  for (const auto& r : reports) {
    if (r.label == "Base") base[{r.direction, r.transfer_bytes}] = &r;
  }
  json rows = json::array();
  for (const auto& r : reports) {
    auto it = base.find({r.direction, r.transfer_bytes});
    json row{{"variant", r.label},
             {"direction", r.direction},
             {"size_mib", r.transfer_bytes >> 20},
             {"throughput_gbps", r.throughput_gbps},
             {"energy_j", r.energy.total_j()}};
    if (it != base.end()) {
      row["norm_throughput"] = r.throughput_gbps / it->second->throughput_gbps;
      row["norm_energy"] = r.energy.total_j() / it->second->energy.total_j();
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_ablation_table(const std::vector<SimReport>& reports) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "direction" << std::right << std::setw(9) << "size_MiB"
     << "  " << std::left << std::setw(12) << "variant" << std::right << std::setw(12) << "GB/s"
     << std::setw(12) << "norm_tput" << std::setw(12) << "norm_energy" << '\n';
  os << std::fixed;
  for (const auto& row : ablation_summary(reports)) {
    os << std::left << std::setw(12) << row["direction"].get<std::string>() << std::right
       << std::setw(9) << row["size_mib"].get<std::uint64_t>() << "  " << std::left
       << std::setw(12) << row["variant"].get<std::string>() << std::right << std::setprecision(2)
       << std::setw(12) << row["throughput_gbps"].get<double>() << std::setprecision(3)
       << std::setw(12) << row.value("norm_throughput", 0.0) << std::setw(12)
       << row.value("norm_energy", 0.0) << '\n';
  }
  return os.str();
}

json run_config(const SimConfig& cfg, unsigned jobs, const RunOptions& opts) {
  switch (cfg.kind) {
    case ScenarioKind::CpuDpu:
    case ScenarioKind::Memcpy:
      return report_document(to_string(cfg.kind), {run_scenario(cfg, opts)});
    case ScenarioKind::Ablation: {
      auto reports = ablation(cfg, jobs);
      json doc = report_document("ablation", reports);
      doc["summary"] = ablation_summary(reports);
      return doc;
    }
    case ScenarioKind::Sweep:
      return report_document("sweep", sweep(cfg, jobs));
  }
  return {};
}

}  // namespace pimmmu

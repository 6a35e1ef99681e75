#include "pimmmu/trace_checker.hpp"

#include <sstream>
#include <stdexcept>

namespace pimmmu {

std::string Violation::describe() const {
  std::ostringstream os;
  os << constraint;
  if (required > 0) os << " (needs " << required << " cycles)";
  os << ": [" << format_command(earlier) << "] -> [" << format_command(later) << "]";
  return os.str();
}

std::uint64_t TraceChecker::rank_key(const DramCoord& c) {
  return (std::uint64_t{c.channel} << 40) | (std::uint64_t{c.rank} << 32);
}

std::uint64_t TraceChecker::group_key(const DramCoord& c) {
  return rank_key(c) | (std::uint64_t{c.bankgroup} << 16);
}

std::uint64_t TraceChecker::bank_key(const DramCoord& c) { return group_key(c) | c.bank; }

std::optional<Violation> TraceChecker::feed(const Command& cmd) {
  if (last_cycle_ && cmd.cycle < *last_cycle_) {
    throw std::logic_error("check_trace: command at cycle " + std::to_string(cmd.cycle) +
                           " follows cycle " + std::to_string(*last_cycle_));
  }
  last_cycle_ = cmd.cycle;
  ++count_;

  auto& bank = banks_[bank_key(cmd.coord)];
  auto& group = groups_[group_key(cmd.coord)];
  auto& rank = ranks_[rank_key(cmd.coord)];
  auto& chan = channels_[cmd.coord.channel];

  std::optional<Violation> found;
  auto need = [&](const std::optional<Command>& earlier, std::uint64_t distance,
                  const char* name) {
    if (found || !earlier) return;
    if (cmd.cycle < earlier->cycle + distance) {
      found = Violation{name, distance, *earlier, cmd};
    }
  };
  auto state = [&](bool ok, const std::optional<Command>& earlier, const char* name) {
    if (found || ok) return;
    found = Violation{name, 0, earlier.value_or(cmd), cmd};
  };

  need(chan.any, 1, "command-bus");

  switch (cmd.kind) {
    case CommandKind::ACT: {
      state(!bank.open, bank.act, "act-to-open-bank");
      need(bank.act, p_.tRC, "tRC");
      need(bank.pre, p_.tRP, "tRP");
      need(group.act, p_.tRRD_L, "tRRD_L");
      need(rank.act, p_.tRRD_S, "tRRD_S");
      need(rank.acts[rank.next_act_slot], p_.tFAW, "tFAW");
      need(rank.ref, p_.tRFC, "tRFC");
      break;
    }
    case CommandKind::PRE: {
      need(bank.act, p_.tRAS, "tRAS");
      need(bank.rd, p_.tRTP, "tRTP");
      need(bank.wr, p_.write_to_precharge(), "tWR");
      break;
    }
    case CommandKind::RD:
    case CommandKind::WR: {
      const bool is_read = cmd.kind == CommandKind::RD;
      state(bank.open && bank.row == cmd.coord.row, bank.act, "row-not-open");
      need(bank.act, p_.tRCD, "tRCD");
      need(chan.column, p_.burst_cycles(), "tBURST");
      if (is_read) {
        need(group.rd, p_.tCCD_L, "tCCD_L");
        need(rank.rd, p_.tCCD_S, "tCCD_S");
        need(group.wr, p_.write_to_read(true), "tWTR_L");
        need(rank.wr, p_.write_to_read(false), "tWTR_S");
      } else {
        need(group.wr, p_.tCCD_L, "tCCD_L");
        need(rank.wr, p_.tCCD_S, "tCCD_S");
        need(chan.rd, p_.read_to_write(), "tRTW");
      }
      break;
    }
    case CommandKind::REF: {
      state(rank.open_banks == 0, rank.act, "ref-with-open-bank");
      need(rank.pre, p_.tRP, "tRP");
      need(rank.ref, p_.tRFC, "tRFC");
      break;
    }
  }

  // Record regardless of outcome so the checker keeps tracking the stream.
  chan.any = cmd;
  switch (cmd.kind) {
    case CommandKind::ACT:
      if (!bank.open) ++rank.open_banks;
      bank.open = true;
      bank.row = cmd.coord.row;
      bank.act = cmd;
      group.act = cmd;
      rank.act = cmd;
      rank.acts[rank.next_act_slot] = cmd;
      rank.next_act_slot = (rank.next_act_slot + 1) % 4;
      break;
    case CommandKind::PRE:
      if (bank.open) --rank.open_banks;
      bank.open = false;
      bank.pre = cmd;
      rank.pre = cmd;
      break;
    case CommandKind::RD:
      bank.rd = cmd;
      group.rd = cmd;
      rank.rd = cmd;
      chan.column = cmd;
      chan.rd = cmd;
      break;
    case CommandKind::WR:
      bank.wr = cmd;
      group.wr = cmd;
      rank.wr = cmd;
      chan.column = cmd;
      break;
    case CommandKind::REF:
      rank.ref = cmd;
      break;
  }
  return found;
}

std::optional<Violation> check_trace(std::span<const Command> commands,
                                     const TimingParams& params) {
  for (std::size_t i = 1; i < commands.size(); ++i) {
    if (commands[i].cycle < commands[i - 1].cycle) {
      throw std::logic_error("check_trace: trace is not cycle-ordered at index " +
                             std::to_string(i));
    }
  }
  TraceChecker checker(params);
  for (const auto& c : commands) {
    if (auto v = checker.feed(c)) return v;
  }
  return std::nullopt;
}

}  // namespace pimmmu

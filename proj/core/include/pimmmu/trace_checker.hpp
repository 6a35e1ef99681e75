#pragma once

// Independent DDR4 protocol checker. It re-derives every constraint from the
// command stream alone and shares no bookkeeping with the controller.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>

#include "pimmmu/timing.hpp"

namespace pimmmu {

struct Violation {
  std::string constraint;     // e.g. "tRRD_S", "row-not-open"
  std::uint64_t required = 0; // minimum distance in cycles, 0 for state rules
  Command earlier;
  Command later;

  std::string describe() const;
};

class TraceChecker {
 public:
  explicit TraceChecker(const TimingParams& params) : p_(params) {}

  // Throws std::logic_error when commands arrive out of cycle order.
  // Returns the first violation involving `cmd`; later commands are still
  // accepted so a streaming user can keep feeding.
  std::optional<Violation> feed(const Command& cmd);

  std::uint64_t commands_checked() const { return count_; }

 private:
  struct BankHistory {
    std::optional<Command> act, pre, rd, wr;
    bool open = false;
    std::uint64_t row = 0;
  };
  struct GroupHistory {
    std::optional<Command> act, rd, wr;
  };
  struct RankHistory {
    std::array<std::optional<Command>, 4> acts;  // ring of the last four ACTs
    unsigned next_act_slot = 0;
    std::optional<Command> act, rd, wr, pre, ref;
    std::uint32_t open_banks = 0;
  };
  struct ChannelHistory {
    std::optional<Command> any, column, rd;
  };

  static std::uint64_t bank_key(const DramCoord& c);
  static std::uint64_t group_key(const DramCoord& c);
  static std::uint64_t rank_key(const DramCoord& c);

  TimingParams p_;
  std::uint64_t count_ = 0;
  std::optional<std::uint64_t> last_cycle_;
  std::unordered_map<std::uint64_t, BankHistory> banks_;
  std::unordered_map<std::uint64_t, GroupHistory> groups_;
  std::unordered_map<std::uint64_t, RankHistory> ranks_;
  std::unordered_map<std::uint32_t, ChannelHistory> channels_;
};

// Validates a whole cycle-ordered trace. Throws std::logic_error on unordered input.
std::optional<Violation> check_trace(std::span<const Command> commands,
                                     const TimingParams& params);

}  // namespace pimmmu

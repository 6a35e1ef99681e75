#include "pimmmu/timing.hpp"

#include <sstream>

namespace pimmmu {

std::vector<std::string> TimingParams::validate() const {
  std::vector<std::string> errors;
  if (!(tCK_ns > 0.0)) errors.push_back("tCK: must be > 0");
  auto positive = [&](const char* name, std::uint32_t v) {
    if (v == 0) errors.push_back(std::string(name) + ": must be > 0");
  };
  positive("CL", CL);
  positive("CWL", CWL);
  positive("tRCD", tRCD);
  positive("tRP", tRP);
  positive("tRAS", tRAS);
  positive("tRC", tRC);
  positive("tCCD_S", tCCD_S);
  positive("tCCD_L", tCCD_L);
  positive("tRRD_S", tRRD_S);
  positive("tRRD_L", tRRD_L);
  positive("tFAW", tFAW);
  positive("tWR", tWR);
  positive("tWTR_S", tWTR_S);
  positive("tWTR_L", tWTR_L);
  positive("tRTP", tRTP);
  positive("burst_length", burst_length);
  if (refresh) {
    positive("tREFI", tREFI);
    positive("tRFC", tRFC);
  }
  if (burst_length % 2 != 0) errors.push_back("burst_length: must be even");
  if (tRC != tRAS + tRP) {
    errors.push_back("tRC: must equal tRAS + tRP (" + std::to_string(tRAS + tRP) + ")");
  }
  if (tCCD_L < tCCD_S) errors.push_back("tCCD_L: must be >= tCCD_S");
  if (tCCD_S < burst_length / 2) errors.push_back("tCCD_S: must be >= burst_length/2");
  if (CL + burst_length / 2 + 2 <= CWL) errors.push_back("CWL: must be < CL + burst/2 + 2");
  return errors;
}

const char* to_string(CommandKind k) {
  switch (k) {
    case CommandKind::ACT: return "ACT";
    case CommandKind::PRE: return "PRE";
    case CommandKind::RD: return "RD";
    case CommandKind::WR: return "WR";
    case CommandKind::REF: return "REF";
  }
  return "?";
}

std::string format_command(const Command& c) {
  std::ostringstream os;
  os << c.cycle << ' ' << to_string(c.kind) << ' ' << c.coord.channel << ' ' << c.coord.rank
     << ' ' << c.coord.bankgroup << ' ' << c.coord.bank << ' ' << c.coord.row << ' '
     << c.coord.column;
  return os.str();
}

}  // namespace pimmmu

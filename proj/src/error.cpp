#include "dmimo/error.hpp"

namespace dmimo {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Domain: return "domain error";
    case ErrorCode::Singularity: return "singularity";
    case ErrorCode::PlacementInfeasible: return "placement infeasible";
    case ErrorCode::RankDeficiency: return "rank deficiency";
    case ErrorCode::FullySuppressed: return "fully suppressed";
    case ErrorCode::DegenerateChannel: return "degenerate channel";
    case ErrorCode::NoData: return "no data";
    case ErrorCode::Unidentifiable: return "unidentifiable";
    case ErrorCode::Coverage: return "coverage error";
    case ErrorCode::Access: return "information access violation";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Io: return "I/O error";
    case ErrorCode::Consistency: return "consistency error";
    case ErrorCode::Version: return "unsupported version";
    case ErrorCode::Config: return "configuration error";
  }
  return "error";
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Config:
    case ErrorCode::Access:
      return 1;
    case ErrorCode::NoData:
    case ErrorCode::Coverage:
    case ErrorCode::Parse:
    case ErrorCode::Io:
    case ErrorCode::Consistency:
    case ErrorCode::Version:
      return 2;
    case ErrorCode::Domain:
    case ErrorCode::Singularity:
    case ErrorCode::PlacementInfeasible:
    case ErrorCode::RankDeficiency:
    case ErrorCode::FullySuppressed:
    case ErrorCode::DegenerateChannel:
    case ErrorCode::Unidentifiable:
      return 3;
  }
  return 3;
}

}  // namespace dmimo

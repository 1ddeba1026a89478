#pragma once

#include <stdexcept>
#include <string>

namespace dmimo {

enum class ErrorCode {
  Domain,
  Singularity,
  PlacementInfeasible,
  RankDeficiency,
  FullySuppressed,
  DegenerateChannel,
  NoData,
  Unidentifiable,
  Coverage,
  Access,
  Parse,
  Io,
  Consistency,
  Version,
  Config,
};

const char* to_string(ErrorCode code) noexcept;

/// Exit-code class used by the command line tool: 1 config, 2 data, 3 numerical.
int exit_code_for(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace dmimo

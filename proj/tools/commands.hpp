#pragma once

#include <cstdint>
#include <string>

#include "config.hpp"

namespace tdsr::cli {

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::string format = "text";      // text | json
  bool complete_type_flag = false;  // bounds --complete-type
  std::string functional_override;  // verify / simulate --functional
};

inline constexpr int kExitOk = 0;            // certified / success
inline constexpr int kExitDenied = 1;        // denied / violation observed
inline constexpr int kExitAssumption = 2;    // an assumption check failed
inline constexpr int kExitInput = 3;         // config / input error
inline constexpr int kExitInconclusive = 4;  // margin within refinement tolerance

int cmd_bounds(const ProblemConfig& cfg, const CliOptions& opt);
int cmd_certify(const ProblemConfig& cfg, const CliOptions& opt);
int cmd_construct(const ProblemConfig& cfg, const CliOptions& opt);
int cmd_verify(const ProblemConfig& cfg, const CliOptions& opt);
int cmd_ellipse(const ProblemConfig& cfg, const CliOptions& opt);
int cmd_complete_type(const ProblemConfig& cfg, const CliOptions& opt);
int cmd_spectrum(const ProblemConfig& cfg, const CliOptions& opt);
int cmd_simulate(const ProblemConfig& cfg, const CliOptions& opt);

}  // namespace tdsr::cli

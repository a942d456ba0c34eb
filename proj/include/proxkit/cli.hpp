#pragma once

#include <ostream>
#include <string>

#include "proxkit/io.hpp"

// Command implementations behind the proxkit executable.
namespace proxkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitSuiteFailure = 4;

// Writes the result of `job` to `out` in the configured format and a short
// summary to `log`. Returns kExitDiverged when any solve reported Diverged and
// kExitSuiteFailure when a verification suite or a figure flag failed.
// Configuration problems surface as exceptions derived from proxkit::Error.
int run_job(const io::JobConfig& job, std::ostream& out, std::ostream& log);

// 17 significant digits, dot decimal, "inf" for +inf.
std::string format_double(double v);

}  // namespace proxkit::cli

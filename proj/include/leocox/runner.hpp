#pragma once

#include <iosfwd>

#include "leocox/config.hpp"

namespace leocox::cli {

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDisagreement = 3;

/// Executes one run and writes its CSV to `csv`; summaries and diagnostics
/// go to `log`. With engine = both, returns kExitDisagreement when an
/// analytic value and its Monte Carlo estimate differ by more than five
/// binomial standard errors.
int run(const RunConfig& cfg, std::ostream& csv, std::ostream& log);

}  // namespace leocox::cli

#pragma once

#include "qhgeo/io.hpp"

#include <iosfwd>

namespace qhgeo {

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitNonConvergence = 2, kExitCertificate = 3 };

/// Executes config.command, writing <output>.json (plus .csv / .svg where the
/// command produces them). The report's "meta" block holds the only
/// non-deterministic data.
int run(const RunConfig& config, std::ostream& err);

/// Report body without side effects; `status` receives the exit code.
Json execute(const RunConfig& config, int& status, SvgScene* scene = nullptr, std::string* csv = nullptr);

}  // namespace qhgeo

#pragma once

#include "qeilab/config.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace qeilab::cli {

struct RunArtifacts {
    nlohmann::ordered_json summary;          // also written to <prefix>-<analysis>.json
    std::vector<std::string> files_written;  // every path emitted, in emission order
    bool theorem_ok = true;                  // false maps to exit status 4
};

// Runs the configured analysis and writes its CSV/JSON (and SVG when enabled)
// into the output directory.  Deterministic given (config, seed).
RunArtifacts run(const RunConfig& config);

}  // namespace qeilab::cli

#pragma once

#include "bhq/io/config.hpp"

namespace bhq::io {

inline constexpr const char* kCodeVersion = "0.1.0";

// Executes one configured run and writes its CSV artifacts plus
// run_manifest.json into config.output_dir. CSV bodies depend only on the
// config (byte-identical across runs); wall-clock data lives in the manifest
// alone. Hard failures (solver errors, NaN guards, I/O) are recorded in the
// manifest when possible and then rethrown.
void run(const RunConfig& config);

}  // namespace bhq::io

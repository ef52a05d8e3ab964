#pragma once

#include "app/config.hpp"
#include "hyperfuse/error.hpp"

/// Pipeline stages as run by the CLI. Each stage reads its inputs from the
/// configured paths (by default the files earlier stages left in
/// `paths.out`), writes its outputs atomically, and leaves a
/// `manifest_<stage>.json` with the resolved configuration next to them.
/// Errors surface as hyperfuse::Error.
namespace hyperfuse::app {

void cmd_simulate(const PipelineConfig& cfg);
void cmd_unmix(const PipelineConfig& cfg);
void cmd_fuse(const PipelineConfig& cfg);
void cmd_evaluate(const PipelineConfig& cfg);
void cmd_pipeline(const PipelineConfig& cfg);

/// Process exit code for an error category: 2 for io/format, 3 for domain.
int exit_code(ErrorKind kind) noexcept;

}  // namespace hyperfuse::app

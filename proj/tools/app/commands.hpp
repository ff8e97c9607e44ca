#pragma once

#include <iosfwd>

#include "config.hpp"

namespace smi::app {

// Each command reads its inputs from the config, writes into
// config.output_dir and reports progress and warnings to `log`. Failures are
// raised as DataError or ConfigError.
void cmd_ingest(const PipelineConfig& config, std::ostream& log);
void cmd_compute(const PipelineConfig& config, std::ostream& log);
void cmd_report(const PipelineConfig& config, std::ostream& log);
void cmd_changepoint(const PipelineConfig& config, std::ostream& log);
void cmd_correlate(const PipelineConfig& config, std::ostream& log);
void cmd_synth(const PipelineConfig& config, std::ostream& log);

}  // namespace smi::app

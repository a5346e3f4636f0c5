#pragma once

// Subcommand dispatch: runs one experiment and writes its outputs.
//
//   <out>/<subcommand>.csv         data series
//   <out>/<subcommand>.json        config echo, derived scalars, metadata
//   <out>/config.resolved.json     fully resolved config
//   <out>/<subcommand>.log         wall-clock timestamps (kept out of data files)

#include "twinbeam/config.hpp"
#include "twinbeam/errors.hpp"

#include <string>
#include <vector>

namespace twinbeam {

const std::vector<std::string>& subcommands();

/// Runs `name` with `cfg`, writing into cfg.out_dir. Throws Error; returns the
/// paths written, data files first.
std::vector<std::string> run_subcommand(const std::string& name, const RunConfig& cfg);

/// Process exit status for an error kind: 2 validation, 3 numerical, 1 other.
int exit_code(ErrorKind kind);

}  // namespace twinbeam

#pragma once

#include <string>

#include "ggbm/simulate.hpp"

namespace ggbm {

/// Binary ensemble container: magic "GGBM", format version u16, the config
/// record (beta f64, alpha f64, d i32, n_steps i32, horizon f64,
/// n_paths i64, seed u64), then the row-major f64 path data. All fields
/// little-endian. A JSON sidecar at <path>.json carries the same config for
/// human and tooling consumption; the binary file is the source of truth.

inline constexpr std::uint16_t kEnsembleFormatVersion = 1;

/// Writes the container and its sidecar. Output depends only on the
/// ensemble contents (no timestamps), so identical ensembles produce
/// byte-identical files. Throws std::runtime_error on I/O failure.
void save_ensemble(const PathEnsemble& ens, const std::string& path);

/// Reads and fully validates a container: magic, version, config bounds,
/// exact payload size, origin-start and finiteness of every path. Throws
/// std::runtime_error on any violation.
PathEnsemble load_ensemble(const std::string& path);

/// The sidecar text for an ensemble config (stable key order, trailing
/// newline): {"config":{...},"format":{...}}.
std::string ensemble_sidecar_text(const SimConfig& config);

} // namespace ggbm

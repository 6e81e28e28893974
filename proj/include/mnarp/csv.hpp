#pragma once

#include <mnarp/dynamics.hpp>
#include <mnarp/pulseshape.hpp>
#include <mnarp/sweep.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mnarp {

/// Extra `# key = value` lines written above the column header.
using CsvMetadata = std::vector<std::pair<std::string, std::string>>;

/// theta_rad,<spacing_meV|width_meV>,emitter_index,occupation with one row per
/// (area, axis value, emitter), emitter_index 1-based. A comment block above
/// the header holds the tool version and the full job config, so
/// `read_map_csv` can rebuild the map and the job can be re-run from it.
/// With `emitter` set, only that emitter's rows are written.
void write_map_csv(const OccupationMap& map, const std::filesystem::path& path,
                   std::optional<std::size_t> emitter = std::nullopt);

/// Inverse of write_map_csv for full maps. Throws Error on malformed input.
OccupationMap read_map_csv(const std::filesystem::path& path);

/// energy_meV,re_S,im_S (S in rad ps^-1/2).
void write_spectrum_csv(const SpectralPulse& pulse, const std::filesystem::path& path,
                        const CsvMetadata& metadata = {});

/// t_ps,re_rabi_radps,im_rabi_radps.
void write_envelope_csv(const TemporalPulse& pulse, const std::filesystem::path& path,
                        const CsvMetadata& metadata = {});

/// t_ps,rho11,re_rho01,im_rho01.
void write_trajectory_csv(const Trajectory& trajectory, const std::filesystem::path& path,
                          const CsvMetadata& metadata = {});

} // namespace mnarp

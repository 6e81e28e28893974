#pragma once

#include <mnarp/sweep.hpp>

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace mnarp {

/// A sweep job as read from a config file: the sweep itself plus output settings.
///
/// Grammar (see README): INI sections with `key = value` lines; lines whose
/// first non-blank character is `#` or `;` are comments. Lists are either
/// comma separated numbers or `linspace(first, last, count)`.
struct RunConfig
{
    SweepSpec spec;
    std::string output_dir = ".";
    bool emit_plots = true;
    int workers = 0; ///< 0: MNARP_WORKERS / OpenMP default
};

/// Parses and validates. Throws ConfigError carrying the dotted key path
/// ("phonon.temperature_K") of the first offending entry.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form of a config; parse_config_string(format_config(c))
/// reproduces c exactly (numbers are written in shortest round-trip form).
std::string format_config(const RunConfig& config);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// "1, 2.5, 3" or "linspace(0, 20, 81)" -> values. Throws ConfigError keyed by `key`.
std::vector<double> parse_number_list(const std::string& text, const std::string& key);

} // namespace mnarp

#include <mnarp/sweep.hpp>

#include <mnarp/errors.hpp>
#include <mnarp/units.hpp>

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>


#ifndef MNARP_VERSION
#define MNARP_VERSION "dev"
#endif

namespace mnarp {

namespace {

void require(bool ok, const char* field, const char* what)
{
    if (!ok) {
        throw InvalidArgument(std::string(field) + ": " + what);
    }
}

bool strictly_increasing(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) {
            return false;
        }
    }
    return true;
}

bool all_finite(const std::vector<double>& v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::string shortest(double value)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

std::string cell_label(const SweepSpec& spec, std::size_t area, std::size_t axis, std::size_t emitter)
{
    return "cell theta_rad=" + shortest(spec.areas_rad[area]) +
           (spec.axis == SweepAxis::spacing ? " spacing_meV=" : " width_meV=") +
           shortest(spec.axis_values_meV[axis]) + " emitter=" + std::to_string(emitter + 1);
}

OccupationMap empty_map(const SweepSpec& spec)
{
    OccupationMap map;
    map.spec = spec;
    map.version = MNARP_VERSION;
    map.values.assign(spec.areas_rad.size() * spec.axis_values_meV.size() * spec.n_emitters, 0.0);
    return map;
}

// Columns are synthesized a batch at a time to bound memory; each synthesized
// column is then shared read-only by all of its cells.
constexpr std::size_t column_batch = 8;

} // namespace

void SweepSpec::validate() const
{
    require(!areas_rad.empty(), "areas_rad", "grid must be nonempty");
    require(strictly_increasing(areas_rad), "areas_rad", "grid must be strictly increasing");
    require(all_finite(areas_rad) && areas_rad.front() >= 0.0, "areas_rad", "areas must be finite and >= 0");
    require(!axis_values_meV.empty(), "axis_values_meV", "grid must be nonempty");
    require(strictly_increasing(axis_values_meV), "axis_values_meV", "grid must be strictly increasing");
    require(all_finite(axis_values_meV), "axis_values_meV", "values must be finite");
    if (axis == SweepAxis::spacing) {
        require(axis_values_meV.front() >= 0.0, "axis_values_meV", "spacings must be >= 0");
        require(width_meV > 0.0 && std::isfinite(width_meV), "width_meV", "must be > 0");
    } else {
        require(axis_values_meV.front() > 0.0, "axis_values_meV", "widths must be > 0");
        require(spacing_meV >= 0.0 && std::isfinite(spacing_meV), "spacing_meV", "must be >= 0");
    }
    require(n_emitters >= 1, "n_emitters", "must be >= 1");
    require(std::isfinite(chirp_ps2), "chirp_ps2", "must be finite");
    require(tau0_ps > 0.0 && std::isfinite(tau0_ps), "tau0_ps", "must be > 0");
    require(std::isfinite(carrier_meV), "carrier_meV", "must be finite");
    require(dipole_scales.empty() || dipole_scales.size() == n_emitters, "dipole_scales",
            "needs one entry per emitter");
    require(std::all_of(dipole_scales.begin(), dipole_scales.end(),
                        [](double d) { return d > 0.0 && std::isfinite(d); }),
            "dipole_scales", "must be > 0");
    require(grid_points >= (std::size_t{1} << 12) && (grid_points & (grid_points - 1)) == 0, "grid_points",
            "must be a power of two >= 4096");
    require(span_factor >= 8.0 && std::isfinite(span_factor), "span_factor", "must be >= 8");
    require(max_phase_step > 0.0 && max_phase_step <= 1.0, "max_phase_step", "must be in (0, 1]");
    if (phonons) {
        try {
            phonons->validate();
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(std::string("phonons: ") + e.what());
        }
    }
}

double SweepSpec::spacing_at(std::size_t axis_index) const
{
    return axis == SweepAxis::spacing ? axis_values_meV.at(axis_index) : spacing_meV;
}

double SweepSpec::width_at(std::size_t axis_index) const
{
    return axis == SweepAxis::width ? axis_values_meV.at(axis_index) : width_meV;
}

std::vector<double> SweepSpec::layout(double spacing) const
{
    std::vector<double> offsets(n_emitters);
    const double middle = 0.5 * static_cast<double>(n_emitters + 1);
    for (std::size_t i = 0; i < n_emitters; ++i) {
        offsets[i] = (static_cast<double>(i + 1) - middle) * spacing;
    }
    return offsets;
}

double SweepSpec::dipole(std::size_t emitter) const
{
    return dipole_scales.empty() ? 1.0 : dipole_scales.at(emitter);
}

TemporalPulse synthesize_for_drive(const SpectralPulse& spectrum, double drive_scale, double max_detuning_meV,
                                   double max_phase_step)
{
    if (!(max_phase_step > 0.0) || !(drive_scale >= 0.0) || !std::isfinite(drive_scale + max_detuning_meV)) {
        throw InvalidArgument("synthesize_for_drive: step and drive must be positive and finite");
    }
    // The grid-native sampling resolves the envelope magnitude; its peak sets
    // the step for the fine synthesis.
    const TemporalPulse coarse = synthesize(spectrum);
    double peak = 0.0;
    for (const auto& v : coarse.envelope) {
        peak = std::max(peak, std::abs(v));
    }
    const double rate = drive_scale * peak + units::meV_to_radps(std::abs(max_detuning_meV)) +
                        4.0 * units::ln2 / spectrum.tau0_ps;
    SynthesisOptions options;
    options.max_dt_ps = 0.5 * max_phase_step / rate;
    return synthesize(spectrum, options);
}

TemporalPulse column_pulse(const SweepSpec& spec, std::size_t axis_index)
{
    const double spacing = spec.spacing_at(axis_index);
    const double width = spec.width_at(axis_index);

    FrequencyGrid grid;
    grid.center_meV = spec.carrier_meV;
    grid.n_points = spec.grid_points;
    grid.span_meV = spec.span_factor * spectral_fwhm_meV(spec.tau0_ps);

    NotchSpec notches;
    notches.width_meV = width;
    notches.centers_meV = spec.layout(spacing);
    for (double& c : notches.centers_meV) {
        c += spec.carrier_meV;
    }

    SpectralPulse spectrum = make_gaussian_spectrum(spec.tau0_ps, spec.carrier_meV, 1.0, grid);
    spectrum = apply_phase_mask(std::move(spectrum), ChirpSpec{spec.chirp_ps2});
    spectrum = apply_notch_mask(std::move(spectrum), notches);

    double max_dipole = 1.0;
    if (!spec.dipole_scales.empty()) {
        max_dipole = *std::max_element(spec.dipole_scales.begin(), spec.dipole_scales.end());
    }
    const double max_detuning = 0.5 * static_cast<double>(spec.n_emitters - 1) * spacing;
    return synthesize_for_drive(spectrum, spec.areas_rad.back() * max_dipole, max_detuning, spec.max_phase_step);
}

double cell_occupation(const SweepSpec& spec, const TemporalPulse& column, std::size_t area_index,
                       std::size_t axis_index, std::size_t emitter)
{
    const double area = spec.areas_rad.at(area_index);
    if (area == 0.0) {
        return 0.0;
    }
    EmitterParams params;
    params.detuning_meV = spec.layout(spec.spacing_at(axis_index)).at(emitter);
    params.dipole_scale = area * spec.dipole(emitter);
    return final_occupation(column, params, spec.phonons);
}

OccupationMap run_sweep_serial(const SweepSpec& spec, const ProgressCallback& progress)
{
    spec.validate();
    OccupationMap map = empty_map(spec);
    const std::size_t total = map.values.size();
    std::size_t done = 0;
    for (std::size_t j = 0; j < map.n_axis(); ++j) {
        const TemporalPulse column = column_pulse(spec, j);
        for (std::size_t a = 0; a < map.n_areas(); ++a) {
            for (std::size_t e = 0; e < map.n_emitters(); ++e) {
                try {
                    map.values[map.index(a, j, e)] = cell_occupation(spec, column, a, j, e);
                } catch (const NumericalError& err) {
                    throw NumericalError(cell_label(spec, a, j, e) + ": " + err.what());
                }
                if (progress) {
                    progress(++done, total);
                }
            }
        }
    }
    return map;
}

OccupationMap run_sweep(const SweepSpec& spec, const ProgressCallback& progress, int workers)
{
    spec.validate();
    OccupationMap map = empty_map(spec);
    const std::size_t n_axis = map.n_axis();
    const std::size_t cells_per_column = map.n_areas() * map.n_emitters();
    const std::size_t total = map.values.size();
    const int team = workers > 0 ? workers : omp_get_max_threads();

    std::size_t done = 0;
    for (std::size_t first = 0; first < n_axis; first += column_batch) {
        const std::size_t count = std::min(column_batch, n_axis - first);
        std::vector<TemporalPulse> columns(count);

        // Failures are collected per slot and the lowest-indexed one is
        // rethrown, so the reported cell does not depend on scheduling.
        std::vector<std::exception_ptr> column_errors(count);
#pragma omp parallel for schedule(dynamic) num_threads(team)
        for (std::size_t c = 0; c < count; ++c) {
            try {
                columns[c] = column_pulse(spec, first + c);
            } catch (...) {
                column_errors[c] = std::current_exception();
            }
        }
        for (const auto& err : column_errors) {
            if (err) {
                std::rethrow_exception(err);
            }
        }

        const std::size_t tasks = count * cells_per_column;
        std::vector<std::string> cell_errors(tasks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
        for (std::size_t t = 0; t < tasks; ++t) {
            const std::size_t c = t / cells_per_column;
            const std::size_t a = (t % cells_per_column) / map.n_emitters();
            const std::size_t e = t % map.n_emitters();
            const std::size_t j = first + c;
            try {
                map.values[map.index(a, j, e)] = cell_occupation(spec, columns[c], a, j, e);
            } catch (const std::exception& err) {
                cell_errors[t] = cell_label(spec, a, j, e) + ": " + err.what();
            }
            if (progress) {
#pragma omp critical(mnarp_progress)
                progress(++done, total);
            }
        }
        for (const auto& err : cell_errors) {
            if (!err.empty()) {
                throw NumericalError(err);
            }
        }
    }
    return map;
}

std::vector<double> linspace(double first, double last, std::size_t count)
{
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = first;
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

std::vector<std::string> preset_names()
{
    return {"fig2", "fig2e", "fig3c", "fig4a", "fig4b", "fig4c", "figS3_10qd"};
}

SweepSpec preset(std::string_view name)
{
    SweepSpec spec;
    spec.name = std::string(name);
    spec.tau0_ps = 0.120;
    spec.width_meV = 1.0;
    spec.chirp_ps2 = 0.5;
    spec.n_emitters = 5;
    spec.axis = SweepAxis::spacing;
    spec.areas_rad = linspace(0.0, 20.0 * units::pi, 81);

    if (name == "fig2") {
        spec.axis_values_meV = linspace(1.0, 6.0, 51);
    } else if (name == "fig2e") {
        spec.axis_values_meV = {3.4};
        spec.phonons = PhononEnvironment{};
    } else if (name == "fig3c") {
        spec.n_emitters = 2;
        spec.chirp_ps2 = 0.3;
        spec.axis_values_meV = {7.0};
    } else if (name == "fig4a" || name == "fig4b" || name == "fig4c") {
        spec.n_emitters = 2;
        spec.chirp_ps2 = 0.3;
        spec.width_meV = name == "fig4a" ? 1.0 : name == "fig4b" ? 1.5 : 2.0;
        spec.axis_values_meV = linspace(0.1, 8.0, 80);
    } else if (name == "figS3_10qd") {
        spec.n_emitters = 10;
        spec.axis_values_meV = linspace(0.5, 3.0, 26);
    } else {
        throw InvalidArgument("unknown preset '" + std::string(name) + "'");
    }
    return spec;
}

double plateau_occupation(const OccupationMap& map, std::size_t axis_index, std::size_t emitter,
                          double lo_rad, double hi_rad)
{
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < map.n_areas(); ++a) {
        const double area = map.spec.areas_rad[a];
        if (area >= lo_rad * (1.0 - 1e-12) && area <= hi_rad * (1.0 + 1e-12)) {
            lowest = std::min(lowest, map.at(a, axis_index, emitter));
        }
    }
    if (!std::isfinite(lowest)) {
        throw InvalidArgument("no area grid points inside the plateau window");
    }
    return lowest;
}

} // namespace mnarp

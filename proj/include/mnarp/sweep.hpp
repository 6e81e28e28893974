#pragma once

#include <mnarp/dynamics.hpp>
#include <mnarp/phonon.hpp>
#include <mnarp/pulseshape.hpp>
#include <mnarp/units.hpp>

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mnarp {

/// Second map axis: notch spacing at fixed width, or notch width at fixed spacing.
enum class SweepAxis
{
    spacing,
    width
};

/// A 2-D job: pulse area x (notch spacing | notch width) for N emitters.
/// Emitter i (1-based) and notch i are both centered at
/// carrier + (i - (N + 1) / 2) * spacing.
struct SweepSpec
{
    std::string name = "custom";
    std::vector<double> areas_rad;
    SweepAxis axis = SweepAxis::spacing;
    std::vector<double> axis_values_meV;
    double spacing_meV = 3.4; ///< used when axis == width
    double width_meV = 1.0;   ///< used when axis == spacing
    std::size_t n_emitters = 5;
    double chirp_ps2 = 0.5;
    double tau0_ps = 0.120;
    double carrier_meV = 0.0;
    std::optional<PhononEnvironment> phonons;
    std::vector<double> dipole_scales; ///< empty means 1 for every emitter

    std::size_t grid_points = std::size_t{1} << 14;
    double span_factor = 16.0; ///< frequency span in TL spectral FWHM
    /// RK4 step times the largest rate in the problem.
    double max_phase_step = 0.1;

    /// Throws InvalidArgument naming the offending field.
    void validate() const;

    double spacing_at(std::size_t axis_index) const;
    double width_at(std::size_t axis_index) const;
    /// Notch centers / emitter transition energies relative to the carrier.
    std::vector<double> layout(double spacing_meV) const;
    double dipole(std::size_t emitter) const;
};

/// Final occupations indexed (area, axis value, emitter).
struct OccupationMap
{
    SweepSpec spec;
    std::vector<double> values;
    std::string version;

    std::size_t n_areas() const { return spec.areas_rad.size(); }
    std::size_t n_axis() const { return spec.axis_values_meV.size(); }
    std::size_t n_emitters() const { return spec.n_emitters; }
    std::size_t index(std::size_t area, std::size_t axis, std::size_t emitter) const
    {
        return (area * n_axis() + axis) * n_emitters() + emitter;
    }
    double at(std::size_t area, std::size_t axis, std::size_t emitter) const
    {
        return values[index(area, axis, emitter)];
    }
};

/// Called with (cells finished, total cells); a cell is one (area, axis, emitter)
/// integration. Invoked from worker threads, one call at a time.
using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Synthesizes `spectrum` finely enough for RK4 when the envelope is scaled
/// by up to `drive_scale` and the detuning reaches `max_detuning_meV`: the
/// step times (peak drive + |detuning| + TL bandwidth) is at most
/// `max_phase_step`.
TemporalPulse synthesize_for_drive(const SpectralPulse& spectrum, double drive_scale, double max_detuning_meV,
                                   double max_phase_step);

/// Unit-area (Theta = 1 rad) shaped pulse for one axis column, sampled finely
/// enough for the largest area * dipole in the job. Cell (a, j, e) integrates
/// this pulse with dipole scale areas_rad[a] * dipole(e).
TemporalPulse column_pulse(const SweepSpec& spec, std::size_t axis_index);

double cell_occupation(const SweepSpec& spec, const TemporalPulse& column, std::size_t area_index,
                       std::size_t axis_index, std::size_t emitter);

/// OpenMP sweep. workers <= 0 uses the OpenMP default team size. Output is
/// bitwise independent of the worker count.
OccupationMap run_sweep(const SweepSpec& spec, const ProgressCallback& progress = {}, int workers = 0);

/// Single-threaded reference implementation of run_sweep.
OccupationMap run_sweep_serial(const SweepSpec& spec, const ProgressCallback& progress = {});

std::vector<std::string> preset_names();

/// Throws InvalidArgument for an unknown name.
SweepSpec preset(std::string_view name);

/// Minimum occupation over area grid points in [lo, hi] (defaults 8 pi .. 16 pi).
double plateau_occupation(const OccupationMap& map, std::size_t axis_index, std::size_t emitter,
                          double lo_rad = 8.0 * units::pi, double hi_rad = 16.0 * units::pi);

std::vector<double> linspace(double first, double last, std::size_t count);

} // namespace mnarp

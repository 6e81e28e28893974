#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mnarp {

using complex = std::complex<double>;

/// Uniform photon-energy grid, n_points samples spanning `span_meV` around
/// `center_meV`. Sample n_points/2 sits exactly on the center. The center is
/// the rotating-frame reference (laser carrier) for every synthesized pulse.
struct FrequencyGrid
{
    double center_meV = 0.0;
    double span_meV = 0.0;
    std::size_t n_points = std::size_t{1} << 14;

    /// Default grid for a transform-limited pulse: 2^14 points over
    /// 16 spectral FWHM.
    static FrequencyGrid for_pulse(double tau0_ps, double center_meV = 0.0);

    double step_meV() const { return span_meV / static_cast<double>(n_points); }
    double offset_meV(std::size_t i) const;
    double energy_meV(std::size_t i) const { return center_meV + offset_meV(i); }

    /// Throws GridError unless n_points is a power of two >= 2^12 and span > 0.
    void validate() const;
};

/// Complex field spectrum S on a FrequencyGrid, normalized so that
/// Omega(t) = (2 pi)^-1/2 * integral S(nu) exp(-i nu t) dnu  (nu in rad/ps)
/// is the rotating-frame Rabi envelope in rad/ps.
struct SpectralPulse
{
    FrequencyGrid grid;
    std::vector<complex> amplitude;
    double carrier_meV = 0.0;      ///< spectral peak omega_0
    double tau0_ps = 0.0;          ///< transform-limited intensity FWHM
    double nominal_area_rad = 0.0; ///< area of the unmasked TL pulse
    double chirp_ps2 = 0.0;        ///< accumulated quadratic spectral phase
};

/// Notch centers (meV, same energy axis as the grid) and common width.
struct NotchSpec
{
    std::vector<double> centers_meV;
    double width_meV = 1.0;

    void validate() const;
};

struct ChirpSpec
{
    double phi2_ps2 = 0.0;
};

/// Rabi envelope Omega(t) on a uniform, odd-length time grid centered on t = 0.
struct TemporalPulse
{
    double t_start_ps = 0.0;
    double dt_ps = 0.0;
    std::vector<complex> envelope; ///< rad/ps
    double chirp_rate_ps2 = 0.0;   ///< alpha; instantaneous frequency is omega_L + 2 alpha t
    double tau0_ps = 0.0;
    double nominal_area_rad = 0.0;

    std::size_t size() const { return envelope.size(); }
    double time(std::size_t i) const { return t_start_ps + dt_ps * static_cast<double>(i); }
    double t_end_ps() const { return size() == 0 ? t_start_ps : time(size() - 1); }
};

struct SynthesisOptions
{
    /// Total time window kept around t = 0; 0 selects it automatically.
    double t_span_ps = 0.0;
    /// Upper bound on the sample spacing; 0 keeps the grid-native spacing.
    /// Finer spacing is reached by zero-padding the spectrum.
    double max_dt_ps = 0.0;
};

/// Intensity FWHM of the transform-limited Gaussian spectrum, in meV.
double spectral_fwhm_meV(double tau0_ps);

/// Intensity FWHM of a Gaussian pulse after quadratic spectral phase phi2.
double chirped_duration_ps(double tau0_ps, double phi2_ps2);

SpectralPulse make_gaussian_spectrum(double tau0_ps, double carrier_meV, double area_rad,
                                     const FrequencyGrid& grid);

SpectralPulse apply_phase_mask(SpectralPulse pulse, const ChirpSpec& chirp);

/// A(omega) = prod_i [1 - exp(-(omega - omega_i)^2 / delta^2)].
double notch_transmission(double energy_meV, const NotchSpec& notches);

SpectralPulse apply_notch_mask(SpectralPulse pulse, const NotchSpec& notches);

/// Linear frequency sweep rate alpha = 2 phi2 / [tau0^4 / (2 ln 2)^2 + (2 phi2)^2].
double chirp_rate(const ChirpSpec& chirp, double tau0_ps);

TemporalPulse synthesize(const SpectralPulse& pulse, const SynthesisOptions& options = {});

/// Sum |Omega| dt.
double pulse_area(const TemporalPulse& pulse);

/// Sum |S|^2 dnu with nu in rad/ps.
double spectral_energy(const SpectralPulse& pulse);

/// Sum |Omega|^2 dt.
double temporal_energy(const TemporalPulse& pulse);

/// Upper bound on max_t |Omega(t)| from the spectrum (triangle inequality).
double peak_rabi_bound(const SpectralPulse& pulse);

} // namespace mnarp

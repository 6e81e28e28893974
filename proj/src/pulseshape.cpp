#include <mnarp/pulseshape.hpp>

#include <mnarp/errors.hpp>
#include <mnarp/units.hpp>

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <sstream>

namespace mnarp {

namespace {

using units::hbar;
using units::ln2;
using units::pi;

// FFTW planning is not thread-safe; execution is.
std::mutex fftw_planner_mutex;

void forward_fft_inplace(std::vector<complex>& data)
{
    auto* buffer = reinterpret_cast<fftw_complex*>(data.data());
    const int n = static_cast<int>(data.size());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex);
        plan = fftw_plan_dft_1d(n, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(fftw_planner_mutex);
    fftw_destroy_plan(plan);
}

double max_abs(std::span<const complex> values)
{
    double peak = 0.0;
    for (const auto& v : values) {
        peak = std::max(peak, std::abs(v));
    }
    return peak;
}

// Smallest span, symmetric about t = 0, that keeps a pulse down to the
// 1e-7 level.
constexpr double support_level = 1e-7;
constexpr double edge_level = 1e-6;
constexpr double parseval_tolerance = 1e-10;

} // namespace

FrequencyGrid FrequencyGrid::for_pulse(double tau0_ps, double center_meV)
{
    FrequencyGrid grid;
    grid.center_meV = center_meV;
    grid.span_meV = 16.0 * spectral_fwhm_meV(tau0_ps);
    grid.n_points = std::size_t{1} << 14;
    return grid;
}

double FrequencyGrid::offset_meV(std::size_t i) const
{
    return (static_cast<double>(i) - static_cast<double>(n_points / 2)) * step_meV();
}

void FrequencyGrid::validate() const
{
    if (n_points < (std::size_t{1} << 12) || !std::has_single_bit(n_points)) {
        std::ostringstream msg;
        msg << "frequency grid needs a power-of-two point count >= 4096, got " << n_points;
        throw GridError(msg.str());
    }
    if (!(span_meV > 0.0) || !std::isfinite(span_meV) || !std::isfinite(center_meV)) {
        throw GridError("frequency grid span must be positive and finite");
    }
}

void NotchSpec::validate() const
{
    if (centers_meV.empty()) {
        throw InvalidArgument("notch spec needs at least one center");
    }
    if (!(width_meV > 0.0) || !std::isfinite(width_meV)) {
        throw InvalidArgument("notch width must be positive");
    }
    if (!std::is_sorted(centers_meV.begin(), centers_meV.end())) {
        throw InvalidArgument("notch centers must be sorted ascending");
    }
    for (double c : centers_meV) {
        if (!std::isfinite(c)) {
            throw InvalidArgument("notch centers must be finite");
        }
    }
}

double spectral_fwhm_meV(double tau0_ps)
{
    // Gaussian time-bandwidth product: dnu * tau0 = 4 ln 2 (angular units).
    return 4.0 * ln2 / tau0_ps * hbar;
}

double chirped_duration_ps(double tau0_ps, double phi2_ps2)
{
    const double stretch = 4.0 * ln2 * phi2_ps2 / (tau0_ps * tau0_ps);
    return tau0_ps * std::sqrt(1.0 + stretch * stretch);
}

SpectralPulse make_gaussian_spectrum(double tau0_ps, double carrier_meV, double area_rad,
                                     const FrequencyGrid& grid)
{
    if (!(tau0_ps > 0.0) || !std::isfinite(tau0_ps)) {
        throw InvalidArgument("tau0 must be positive");
    }
    if (!(area_rad >= 0.0) || !std::isfinite(area_rad)) {
        throw InvalidArgument("pulse area must be non-negative");
    }
    grid.validate();

    const double fwhm = spectral_fwhm_meV(tau0_ps);
    const double reach = std::abs(carrier_meV - grid.center_meV) + 4.0 * fwhm;
    if (reach > 0.5 * grid.span_meV) {
        std::ostringstream msg;
        msg << "frequency grid span " << grid.span_meV << " meV does not cover carrier +/- 4 FWHM ("
            << 2.0 * reach << " meV needed)";
        throw GridError(msg.str());
    }
    if (fwhm < 8.0 * grid.step_meV()) {
        std::ostringstream msg;
        msg << "frequency grid step " << grid.step_meV() << " meV too coarse for spectral FWHM "
            << fwhm << " meV";
        throw GridError(msg.str());
    }

    // Omega_TL(t) = peak exp(-a t^2), a = 2 ln2 / tau0^2, area = peak tau0 sqrt(pi / (2 ln2)).
    const double a = 2.0 * ln2 / (tau0_ps * tau0_ps);
    const double peak = area_rad / (tau0_ps * std::sqrt(pi / (2.0 * ln2)));
    const double scale = peak / std::sqrt(2.0 * a);

    SpectralPulse pulse;
    pulse.grid = grid;
    pulse.carrier_meV = carrier_meV;
    pulse.tau0_ps = tau0_ps;
    pulse.nominal_area_rad = area_rad;
    pulse.amplitude.resize(grid.n_points);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const double nu = units::meV_to_radps(grid.energy_meV(i) - carrier_meV);
        pulse.amplitude[i] = scale * std::exp(-nu * nu / (4.0 * a));
    }
    return pulse;
}

SpectralPulse apply_phase_mask(SpectralPulse pulse, const ChirpSpec& chirp)
{
    if (chirp.phi2_ps2 == 0.0) {
        return pulse;
    }
    for (std::size_t i = 0; i < pulse.amplitude.size(); ++i) {
        const double nu = units::meV_to_radps(pulse.grid.energy_meV(i) - pulse.carrier_meV);
        pulse.amplitude[i] *= std::polar(1.0, 0.5 * chirp.phi2_ps2 * nu * nu);
    }
    pulse.chirp_ps2 += chirp.phi2_ps2;
    return pulse;
}

double notch_transmission(double energy_meV, const NotchSpec& notches)
{
    const double inv_width2 = 1.0 / (notches.width_meV * notches.width_meV);
    double transmission = 1.0;
    for (double center : notches.centers_meV) {
        const double d = energy_meV - center;
        transmission *= 1.0 - std::exp(-d * d * inv_width2);
    }
    return transmission;
}

SpectralPulse apply_notch_mask(SpectralPulse pulse, const NotchSpec& notches)
{
    notches.validate();
    for (std::size_t i = 0; i < pulse.amplitude.size(); ++i) {
        pulse.amplitude[i] *= notch_transmission(pulse.grid.energy_meV(i), notches);
    }
    return pulse;
}

double chirp_rate(const ChirpSpec& chirp, double tau0_ps)
{
    if (!(tau0_ps > 0.0)) {
        throw InvalidArgument("tau0 must be positive");
    }
    const double tl = std::pow(tau0_ps, 4) / std::pow(2.0 * ln2, 2);
    const double phi = 2.0 * chirp.phi2_ps2;
    return phi / (tl + phi * phi);
}

TemporalPulse synthesize(const SpectralPulse& pulse, const SynthesisOptions& options)
{
    const auto& grid = pulse.grid;
    grid.validate();
    if (pulse.amplitude.size() != grid.n_points) {
        throw InvalidArgument("spectral amplitude size does not match its grid");
    }

    const std::size_t n = grid.n_points;
    const double dnu = units::meV_to_radps(grid.step_meV());
    const double native_dt = 2.0 * pi / (static_cast<double>(n) * dnu);
    const double window = 2.0 * pi / dnu;

    std::size_t oversample = 1;
    if (options.max_dt_ps > 0.0) {
        while (native_dt / static_cast<double>(oversample) > options.max_dt_ps) {
            oversample *= 2;
        }
    }
    const std::size_t n_fft = n * oversample;
    const double dt = window / static_cast<double>(n_fft);

    // Zero-padded spectrum with nu = 0 on index n_fft/2. The (-1)^j and
    // (-1)^k factors shift both axes so a forward FFT yields samples at
    // t_k = (k - n_fft/2) dt.
    std::vector<complex> buffer(n_fft, complex{0.0, 0.0});
    const std::size_t pad = (n_fft - n) / 2;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t jj = j + pad;
        buffer[jj] = (jj % 2 == 0) ? pulse.amplitude[j] : -pulse.amplitude[j];
    }
    forward_fft_inplace(buffer);
    const double norm = dnu / std::sqrt(2.0 * pi);
    for (std::size_t k = 0; k < n_fft; ++k) {
        buffer[k] *= (k % 2 == 0) ? norm : -norm;
    }

    const double peak = max_abs(buffer);
    const std::size_t mid = n_fft / 2;

    double support = 0.0;
    for (std::size_t k = 0; k < n_fft; ++k) {
        if (std::abs(buffer[k]) > support_level * peak) {
            support = std::max(support, std::abs((static_cast<double>(k) - static_cast<double>(mid)) * dt));
        }
    }
    const double chirped = chirped_duration_ps(pulse.tau0_ps, pulse.chirp_ps2);
    const double required = std::max(10.0 * chirped, 2.2 * support);

    if (std::max(std::abs(buffer.front()), std::abs(buffer.back())) > edge_level * peak) {
        std::ostringstream msg;
        msg << "frequency grid too coarse: pulse wraps around the " << window
            << " ps synthesis window";
        throw GridError(msg.str());
    }

    double t_span = options.t_span_ps;
    if (t_span <= 0.0) {
        t_span = required;
    } else if (t_span < 10.0 * chirped) {
        std::ostringstream msg;
        msg << "time span " << t_span << " ps shorter than 10x chirped duration (" << 10.0 * chirped
            << " ps)";
        throw InvalidArgument(msg.str());
    }
    if (t_span > window) {
        std::ostringstream msg;
        msg << "time span " << t_span << " ps exceeds the " << window
            << " ps window of the frequency grid; refine the grid step";
        throw GridError(msg.str());
    }

    const auto half = static_cast<std::size_t>(std::floor(0.5 * t_span / dt));
    const std::size_t first = mid - std::min(half, mid);
    const std::size_t last = std::min(mid + half, n_fft - 1);

    TemporalPulse out;
    out.dt_ps = dt;
    out.t_start_ps = (static_cast<double>(first) - static_cast<double>(mid)) * dt;
    out.envelope.assign(buffer.begin() + static_cast<std::ptrdiff_t>(first),
                        buffer.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    if (out.envelope.size() % 2 == 0) {
        out.envelope.pop_back();
    }
    out.chirp_rate_ps2 = chirp_rate(ChirpSpec{pulse.chirp_ps2}, pulse.tau0_ps);
    out.tau0_ps = pulse.tau0_ps;
    out.nominal_area_rad = pulse.nominal_area_rad;

    const double edge = std::max(std::abs(out.envelope.front()), std::abs(out.envelope.back()));
    if (edge > edge_level * peak) {
        std::ostringstream msg;
        msg << "envelope not decayed at +/-" << 0.5 * t_span << " ps (edge/peak " << edge / peak
            << "); required t_span >= " << required << " ps";
        throw GridError(msg.str());
    }

    const double e_spec = spectral_energy(pulse);
    if (e_spec > 0.0) {
        const double residual = std::abs(temporal_energy(out) - e_spec) / e_spec;
        if (residual > parseval_tolerance) {
            std::ostringstream msg;
            msg << "Parseval residual " << residual << " exceeds " << parseval_tolerance
                << "; required t_span >= " << required << " ps";
            throw GridError(msg.str());
        }
    }
    return out;
}

double pulse_area(const TemporalPulse& pulse)
{
    double sum = 0.0;
    for (const auto& v : pulse.envelope) {
        sum += std::abs(v);
    }
    return sum * pulse.dt_ps;
}

double spectral_energy(const SpectralPulse& pulse)
{
    double sum = 0.0;
    for (const auto& v : pulse.amplitude) {
        sum += std::norm(v);
    }
    return sum * units::meV_to_radps(pulse.grid.step_meV());
}

double temporal_energy(const TemporalPulse& pulse)
{
    double sum = 0.0;
    for (const auto& v : pulse.envelope) {
        sum += std::norm(v);
    }
    return sum * pulse.dt_ps;
}

double peak_rabi_bound(const SpectralPulse& pulse)
{
    double sum = 0.0;
    for (const auto& v : pulse.amplitude) {
        sum += std::abs(v);
    }
    return sum * units::meV_to_radps(pulse.grid.step_meV()) / std::sqrt(2.0 * pi);
}

} // namespace mnarp

#include <mnarp/dynamics.hpp>

#include <mnarp/errors.hpp>
#include <mnarp/units.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace mnarp {

namespace {

constexpr double edge_level = 1e-6;

void check_pulse(const TemporalPulse& pulse, const EmitterParams& emitter)
{
    if (pulse.size() < 3 || pulse.size() % 2 == 0) {
        throw InvalidArgument("pulse needs an odd number (>= 3) of samples");
    }
    if (!(pulse.dt_ps > 0.0)) {
        throw InvalidArgument("pulse time step must be positive");
    }
    if (!(emitter.dipole_scale > 0.0) || !std::isfinite(emitter.dipole_scale)) {
        throw InvalidArgument("dipole scale must be positive");
    }
    if (!std::isfinite(emitter.detuning_meV)) {
        throw InvalidArgument("detuning must be finite");
    }
    double peak = 0.0;
    for (const auto& v : pulse.envelope) {
        peak = std::max(peak, std::abs(v));
    }
    const double edge = std::max(std::abs(pulse.envelope.front()), std::abs(pulse.envelope.back()));
    if (edge > edge_level * peak) {
        std::ostringstream msg;
        msg << "pulse envelope not decayed at the grid ends (edge/peak " << edge / peak << ")";
        throw InvalidArgument(msg.str());
    }
}

[[noreturn]] void fail_tolerance(double error, double time, double tolerance)
{
    std::ostringstream msg;
    msg << "RK4 step too coarse: norm error " << error << " at t = " << time
        << " ps exceeds tolerance " << tolerance << "; synthesize the pulse on a finer time grid";
    throw NumericalError(msg.str());
}

struct Amplitudes
{
    complex ground;
    complex excited;
};

// d/dt (c0, c1) = -i H (c0, c1), with w = Omega_d / 2.
inline Amplitudes schroedinger_rhs(const Amplitudes& c, complex w, double detuning)
{
    constexpr complex minus_i{0.0, -1.0};
    return {minus_i * (std::conj(w) * c.excited), minus_i * (detuning * c.excited + w * c.ground)};
}

inline Amplitudes axpy(const Amplitudes& c, double h, const Amplitudes& k)
{
    return {c.ground + h * k.ground, c.excited + h * k.excited};
}

// Density matrix of the normalized state; the norm drift itself is checked
// against the tolerance separately.
BlochState to_bloch(const Amplitudes& c)
{
    const double norm = std::norm(c.ground) + std::norm(c.excited);
    return {std::norm(c.excited) / norm, c.ground * std::conj(c.excited) / norm};
}

Trajectory integrate_coherent(const TemporalPulse& pulse, const EmitterParams& emitter,
                              const IntegrateOptions& options)
{
    const double detuning = units::meV_to_radps(emitter.detuning_meV);
    const double half_scale = 0.5 * emitter.dipole_scale;
    const double h = 2.0 * pulse.dt_ps;
    const std::size_t steps = (pulse.size() - 1) / 2;
    const std::size_t stride = std::max<std::size_t>(options.stride, 1);

    Trajectory traj;
    Amplitudes c{{1.0, 0.0}, {0.0, 0.0}};
    if (options.store_states) {
        traj.times_ps.push_back(pulse.time(0));
        traj.states.push_back(to_bloch(c));
    }

    double worst = 0.0;
    double worst_time = pulse.time(0);
    for (std::size_t s = 0; s < steps; ++s) {
        const complex w0 = half_scale * pulse.envelope[2 * s];
        const complex w1 = half_scale * pulse.envelope[2 * s + 1];
        const complex w2 = half_scale * pulse.envelope[2 * s + 2];

        const Amplitudes k1 = schroedinger_rhs(c, w0, detuning);
        const Amplitudes k2 = schroedinger_rhs(axpy(c, 0.5 * h, k1), w1, detuning);
        const Amplitudes k3 = schroedinger_rhs(axpy(c, 0.5 * h, k2), w1, detuning);
        const Amplitudes k4 = schroedinger_rhs(axpy(c, h, k3), w2, detuning);
        c.ground += (h / 6.0) * (k1.ground + 2.0 * k2.ground + 2.0 * k3.ground + k4.ground);
        c.excited += (h / 6.0) * (k1.excited + 2.0 * k2.excited + 2.0 * k3.excited + k4.excited);

        const double err = std::abs(std::norm(c.ground) + std::norm(c.excited) - 1.0);
        if (!(err <= worst)) {
            worst = err;
            worst_time = pulse.time(2 * s + 2);
        }
        if (options.store_states && ((s + 1) % stride == 0 || s + 1 == steps)) {
            traj.times_ps.push_back(pulse.time(2 * s + 2));
            traj.states.push_back(to_bloch(c));
        }
    }
    if (!(worst <= options.norm_tolerance)) {
        fail_tolerance(worst, worst_time, options.norm_tolerance);
    }
    traj.max_norm_error = worst;
    traj.final_occupation = to_bloch(c).occupation;
    if (!options.store_states) {
        traj.times_ps.push_back(pulse.t_end_ps());
        traj.states.push_back(to_bloch(c));
    }
    return traj;
}

using Vec3 = std::array<double, 3>;

inline Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Per-sample drive and dressed-frame relaxation data.
struct BlochSample
{
    Vec3 field;       // precession vector (Re Omega_d, -Im Omega_d, Delta)
    Vec3 axis;        // upper dressed state direction
    double total;     // gamma_emit + gamma_abs
    double imbalance; // gamma_emit - gamma_abs
};

// Bloch vector r = (2 Re rho_10, -2 Im rho_10, rho_11 - rho_00) obeys
//   dr/dt = B x r - (G/2) r - (G/2)(r.n) n - (ge - ga) n
// for Lindblad jumps |-><+| at ge and |+><-| at ga along dressed axis n.
inline Vec3 bloch_rhs(const Vec3& r, const BlochSample& p)
{
    const Vec3 rot = cross(p.field, r);
    const double rn = dot(r, p.axis);
    const double along = 0.5 * p.total * rn + p.imbalance;
    return {rot[0] - 0.5 * p.total * r[0] - along * p.axis[0],
            rot[1] - 0.5 * p.total * r[1] - along * p.axis[1],
            rot[2] - 0.5 * p.total * r[2] - along * p.axis[2]};
}

inline Vec3 axpy(const Vec3& r, double h, const Vec3& k)
{
    return {r[0] + h * k[0], r[1] + h * k[1], r[2] + h * k[2]};
}

BlochState to_bloch(const Vec3& r)
{
    return {0.5 * (1.0 + r[2]), complex{0.5 * r[0], 0.5 * r[1]}};
}

Trajectory integrate_phonon(const TemporalPulse& pulse, const EmitterParams& emitter,
                            const PhononEnvironment& env, const IntegrateOptions& options)
{
    env.validate();
    const double detuning = units::meV_to_radps(emitter.detuning_meV);
    const double alpha = pulse.chirp_rate_ps2;

    std::vector<BlochSample> samples(pulse.size());
    for (std::size_t i = 0; i < pulse.size(); ++i) {
        const complex drive = emitter.dipole_scale * pulse.envelope[i];
        const double rabi = std::abs(drive);
        const double inst = detuning - 2.0 * alpha * pulse.time(i);
        const double splitting = std::hypot(rabi, inst);

        BlochSample& p = samples[i];
        p.field = {drive.real(), -drive.imag(), detuning};
        p.axis = {0.0, 0.0, 0.0};
        p.total = 0.0;
        p.imbalance = 0.0;
        if (splitting > 0.0) {
            p.axis = {drive.real() / splitting, -drive.imag() / splitting, inst / splitting};
            const DressedRates rates = dressed_rates(units::radps_to_meV(splitting), env);
            const double mixing = (rabi / splitting) * (rabi / splitting);
            p.total = mixing * (rates.emission + rates.absorption);
            p.imbalance = mixing * (rates.emission - rates.absorption);
        }
    }

    const double h = 2.0 * pulse.dt_ps;
    const std::size_t steps = (pulse.size() - 1) / 2;
    const std::size_t stride = std::max<std::size_t>(options.stride, 1);

    Trajectory traj;
    Vec3 r{0.0, 0.0, -1.0};
    if (options.store_states) {
        traj.times_ps.push_back(pulse.time(0));
        traj.states.push_back(to_bloch(r));
    }

    double worst = 0.0;
    double worst_time = pulse.time(0);
    for (std::size_t s = 0; s < steps; ++s) {
        const BlochSample& p0 = samples[2 * s];
        const BlochSample& p1 = samples[2 * s + 1];
        const BlochSample& p2 = samples[2 * s + 2];

        const Vec3 k1 = bloch_rhs(r, p0);
        const Vec3 k2 = bloch_rhs(axpy(r, 0.5 * h, k1), p1);
        const Vec3 k3 = bloch_rhs(axpy(r, 0.5 * h, k2), p1);
        const Vec3 k4 = bloch_rhs(axpy(r, h, k3), p2);
        for (int j = 0; j < 3; ++j) {
            r[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }

        const double length = std::sqrt(dot(r, r));
        const double excess = std::max(0.0, length - 1.0);
        if (!(excess <= worst)) {
            worst = excess;
            worst_time = pulse.time(2 * s + 2);
        }
        // Pull overshoots back onto the Bloch sphere so rho stays positive.
        if (length > 1.0) {
            for (double& x : r) {
                x /= length;
            }
        }
        if (options.store_states && ((s + 1) % stride == 0 || s + 1 == steps)) {
            traj.times_ps.push_back(pulse.time(2 * s + 2));
            traj.states.push_back(to_bloch(r));
        }
    }
    if (!(worst <= options.norm_tolerance)) {
        fail_tolerance(worst, worst_time, options.norm_tolerance);
    }
    traj.max_norm_error = worst;
    traj.final_occupation = std::clamp(0.5 * (1.0 + r[2]), 0.0, 1.0);
    if (!options.store_states) {
        traj.times_ps.push_back(pulse.t_end_ps());
        traj.states.push_back(to_bloch(r));
    }
    return traj;
}

} // namespace

Trajectory integrate(const TemporalPulse& pulse, const EmitterParams& emitter,
                     const std::optional<PhononEnvironment>& env, const IntegrateOptions& options)
{
    check_pulse(pulse, emitter);
    if (env && env->enabled) {
        return integrate_phonon(pulse, emitter, *env, options);
    }
    return integrate_coherent(pulse, emitter, options);
}

double final_occupation(const TemporalPulse& pulse, const EmitterParams& emitter,
                        const std::optional<PhononEnvironment>& env)
{
    IntegrateOptions options;
    options.store_states = false;
    return integrate(pulse, emitter, env, options).final_occupation;
}

DressedEnergies dressed_energies(double rabi, double detuning)
{
    const double half = 0.5 * std::hypot(detuning, rabi);
    return {half, -half};
}

double adiabaticity_margin(const TemporalPulse& pulse, const EmitterParams& emitter)
{
    const std::size_t n = pulse.size();
    if (n < 3) {
        throw InvalidArgument("pulse needs at least 3 samples");
    }
    const double detuning = units::meV_to_radps(emitter.detuning_meV);
    const double sweep = -2.0 * pulse.chirp_rate_ps2;

    double margin = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double rabi = emitter.dipole_scale * std::abs(pulse.envelope[i]);
        const double rabi_rate = emitter.dipole_scale *
                                 (std::abs(pulse.envelope[i + 1]) - std::abs(pulse.envelope[i - 1])) /
                                 (2.0 * pulse.dt_ps);
        const double inst = detuning + sweep * pulse.time(i);
        const double split2 = inst * inst + rabi * rabi;
        // theta = atan2(rabi, inst) / 2
        const double theta_rate = 0.5 * (inst * rabi_rate - rabi * sweep);
        if (theta_rate == 0.0) {
            continue;
        }
        if (split2 == 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        margin = std::max(margin, std::abs(theta_rate) / (split2 * std::sqrt(split2)));
    }
    return margin;
}

} // namespace mnarp

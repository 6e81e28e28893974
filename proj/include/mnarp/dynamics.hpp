#pragma once

#include <mnarp/phonon.hpp>
#include <mnarp/pulseshape.hpp>

#include <optional>
#include <vector>

namespace mnarp {

/// One two-level emitter. The drive seen by the emitter is dipole_scale * Omega(t).
struct EmitterParams
{
    double detuning_meV = 0.0; ///< omega_qd - omega_L
    double dipole_scale = 1.0;
};

/// rho_11 and rho_01 = <0|rho|1> of the two-level density matrix.
struct BlochState
{
    double occupation = 0.0;
    complex coherence{0.0, 0.0};
};

struct Trajectory
{
    std::vector<double> times_ps;
    std::vector<BlochState> states;
    double final_occupation = 0.0;
    /// Largest deviation of the state norm (coherent runs) or of the Bloch
    /// vector length above one (phonon runs) seen during the integration.
    double max_norm_error = 0.0;
};

struct IntegrateOptions
{
    /// Keep every stride-th RK4 step in Trajectory::states.
    std::size_t stride = 1;
    bool store_states = true;
    double norm_tolerance = 1e-6;
};

/// Integrates the driven two-level system from the ground state across the
/// whole pulse, in the frame rotating at the laser carrier:
///
///   H = Delta |1><1| + (Omega_d |1><0| + Omega_d* |0><1|) / 2,  Omega_d = d Omega(t)
///
/// with fixed-step RK4. One step spans two pulse samples; the middle sample
/// supplies the half-step stages, so the stored trajectory lives on every
/// second pulse sample (further decimated by options.stride).
///
/// With an enabled phonon environment the Bloch vector is propagated with
/// Lindblad relaxation between the instantaneous dressed states of the
/// ideal-chirp Hamiltonian (detuning Delta - 2 alpha t).
Trajectory integrate(const TemporalPulse& pulse, const EmitterParams& emitter,
                     const std::optional<PhononEnvironment>& env = std::nullopt,
                     const IntegrateOptions& options = {});

/// integrate() without trajectory storage.
double final_occupation(const TemporalPulse& pulse, const EmitterParams& emitter,
                        const std::optional<PhononEnvironment>& env = std::nullopt);

struct DressedEnergies
{
    double upper = 0.0;
    double lower = 0.0;
};

/// +-1/2 sqrt(detuning^2 + rabi^2), in the units of the arguments.
DressedEnergies dressed_energies(double rabi, double detuning);

/// max_t |dtheta/dt| / splitting(t), with theta = atan2(|Omega|, Delta_inst) / 2
/// and Delta_inst = Delta - 2 alpha t. Values well below one mark the
/// adiabatic regime.
double adiabaticity_margin(const TemporalPulse& pulse, const EmitterParams& emitter);

} // namespace mnarp

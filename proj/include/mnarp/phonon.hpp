#pragma once

namespace mnarp {

/// LA-phonon bath with super-Ohmic spectral density
/// J(omega) = coupling * omega^3 * exp(-omega^2 / cutoff^2), omega in rad/ps.
struct PhononEnvironment
{
    double temperature_K = 4.2;
    double coupling_ps2 = 0.027;
    double cutoff_meV = 2.2;
    bool enabled = true;

    void validate() const;
};

/// J at phonon energy `energy_meV`, in 1/ps.
double spectral_density(double energy_meV, const PhononEnvironment& env);

/// Bose-Einstein occupation; zero at T = 0.
double bose_occupation(double energy_meV, double temperature_K);

struct DressedRates
{
    double emission = 0.0;   ///< upper -> lower dressed state, 1/ps
    double absorption = 0.0; ///< lower -> upper dressed state, 1/ps
};

/// Golden-rule rates (pi/2) J(L) (n + 1) and (pi/2) J(L) n between dressed
/// states split by `splitting_meV`. These are the rates for maximal state
/// mixing; the integrator scales them by (|Omega| / splitting)^2.
DressedRates dressed_rates(double splitting_meV, const PhononEnvironment& env);

} // namespace mnarp

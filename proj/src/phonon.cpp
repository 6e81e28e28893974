#include <mnarp/phonon.hpp>

#include <mnarp/errors.hpp>
#include <mnarp/units.hpp>

#include <cmath>

namespace mnarp {

void PhononEnvironment::validate() const
{
    if (!(temperature_K >= 0.0) || !std::isfinite(temperature_K)) {
        throw InvalidArgument("temperature_K: must be >= 0");
    }
    if (!(coupling_ps2 >= 0.0) || !std::isfinite(coupling_ps2)) {
        throw InvalidArgument("coupling_ps2: must be >= 0");
    }
    if (!(cutoff_meV > 0.0) || !std::isfinite(cutoff_meV)) {
        throw InvalidArgument("cutoff_meV: must be > 0");
    }
}

double spectral_density(double energy_meV, const PhononEnvironment& env)
{
    if (energy_meV <= 0.0) {
        return 0.0;
    }
    const double omega = units::meV_to_radps(energy_meV);
    const double cutoff = units::meV_to_radps(env.cutoff_meV);
    return env.coupling_ps2 * omega * omega * omega * std::exp(-(omega * omega) / (cutoff * cutoff));
}

double bose_occupation(double energy_meV, double temperature_K)
{
    if (temperature_K <= 0.0) {
        return 0.0;
    }
    return 1.0 / std::expm1(energy_meV / (units::k_boltzmann * temperature_K));
}

DressedRates dressed_rates(double splitting_meV, const PhononEnvironment& env)
{
    if (splitting_meV <= 0.0) {
        return {};
    }
    const double j = 0.5 * units::pi * spectral_density(splitting_meV, env);
    const double n = bose_occupation(splitting_meV, env.temperature_K);
    return {j * (n + 1.0), j * n};
}

} // namespace mnarp

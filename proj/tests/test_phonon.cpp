#include <mnarp/dynamics.hpp>
#include <mnarp/errors.hpp>
#include <mnarp/phonon.hpp>
#include <mnarp/sweep.hpp>
#include <mnarp/units.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace mnarp;

namespace {

TemporalPulse fig2_pulse(double theta, double phi2)
{
    SweepSpec spec = preset("fig2");
    spec.axis_values_meV = {3.4};
    spec.areas_rad = {theta};
    spec.chirp_ps2 = phi2;
    TemporalPulse p = column_pulse(spec, 0);
    for (auto& v : p.envelope) {
        v *= theta;
    }
    return p;
}

} // namespace

TEST(SpectralDensity, ShapeAndLimits)
{
    const PhononEnvironment env;
    EXPECT_EQ(spectral_density(0.0, env), 0.0);
    EXPECT_EQ(spectral_density(-1.0, env), 0.0);
    EXPECT_LT(spectral_density(40.0, env), 1e-100);

    // Independent evaluation of A w^3 exp(-w^2/wc^2), w in rad/ps.
    const double w = 1.5 / units::hbar;
    const double wc = env.cutoff_meV / units::hbar;
    EXPECT_NEAR(spectral_density(1.5, env), env.coupling_ps2 * w * w * w * std::exp(-w * w / (wc * wc)),
                1e-14 * spectral_density(1.5, env));

    // Single maximum at wc sqrt(3/2).
    double best_e = 0.0;
    double best = 0.0;
    double previous = 0.0;
    int turns = 0;
    bool rising = true;
    for (double e = 0.0005; e < 15.0; e += 0.0005) {
        const double j = spectral_density(e, env);
        if (j > best) {
            best = j;
            best_e = e;
        }
        if (rising && j < previous) {
            rising = false;
            ++turns;
        } else if (!rising && j > previous) {
            ++turns;
        }
        previous = j;
    }
    EXPECT_EQ(turns, 1);
    EXPECT_NEAR(best_e, env.cutoff_meV * std::sqrt(1.5), 1e-3);
}

TEST(SpectralDensity, LinearInCoupling)
{
    PhononEnvironment a;
    PhononEnvironment b = a;
    b.coupling_ps2 *= 2.0;
    for (double e : {0.1, 1.0, 2.7, 6.0}) {
        EXPECT_DOUBLE_EQ(spectral_density(e, b), 2.0 * spectral_density(e, a));
    }
}

TEST(Bose, Occupation)
{
    EXPECT_EQ(bose_occupation(1.0, 0.0), 0.0);
    const double kt = units::k_boltzmann * 10.0;
    EXPECT_NEAR(bose_occupation(1.0, 10.0), 1.0 / (std::exp(1.0 / kt) - 1.0), 1e-14);
}

TEST(DressedRates, ZeroTemperatureAndZeroSplitting)
{
    PhononEnvironment cold;
    cold.temperature_K = 0.0;
    const DressedRates r = dressed_rates(1.2, cold);
    EXPECT_EQ(r.absorption, 0.0);
    EXPECT_GT(r.emission, 0.0);
    EXPECT_NEAR(r.emission, 0.5 * units::pi * spectral_density(1.2, cold), 1e-15);

    const DressedRates z = dressed_rates(0.0, PhononEnvironment{});
    EXPECT_EQ(z.emission, 0.0);
    EXPECT_EQ(z.absorption, 0.0);
}

TEST(DressedRates, DetailedBalance)
{
    PhononEnvironment env;
    env.temperature_K = 10.0;
    const DressedRates r = dressed_rates(1.0, env);
    const double kt = units::k_boltzmann * 10.0;
    EXPECT_NEAR(1.0 / kt, 1.1605, 1e-4);
    EXPECT_NEAR(r.emission / r.absorption, std::exp(1.0 / kt), 1e-12 * std::exp(1.0 / kt));
    EXPECT_NEAR(r.emission / r.absorption, 3.19, 0.005);

    for (double t : {0.5, 4.2, 30.0, 300.0}) {
        env.temperature_K = t;
        for (double splitting : {0.05, 0.7, 2.0, 5.0}) {
            const DressedRates q = dressed_rates(splitting, env);
            const double ratio = std::exp(splitting / (units::k_boltzmann * t));
            EXPECT_NEAR(q.emission / q.absorption, ratio, 1e-11 * ratio) << "T " << t << " L " << splitting;
        }
    }
}

TEST(PhononEnvironment, Validation)
{
    PhononEnvironment env;
    EXPECT_NO_THROW(env.validate());
    env.temperature_K = -1.0;
    EXPECT_THROW(env.validate(), InvalidArgument);
    env = PhononEnvironment{};
    env.coupling_ps2 = -0.1;
    EXPECT_THROW(env.validate(), InvalidArgument);
    env = PhononEnvironment{};
    env.cutoff_meV = 0.0;
    EXPECT_THROW(env.validate(), InvalidArgument);
}

TEST(PhononDynamics, DisabledEnvironmentIsBitwiseCoherent)
{
    const TemporalPulse p = fig2_pulse(8.0 * units::pi, 0.5);
    PhononEnvironment off;
    off.enabled = false;
    const Trajectory a = integrate(p, EmitterParams{3.4, 1.0});
    const Trajectory b = integrate(p, EmitterParams{3.4, 1.0}, off);
    ASSERT_EQ(a.states.size(), b.states.size());
    EXPECT_EQ(a.final_occupation, b.final_occupation);
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        EXPECT_EQ(a.states[i].occupation, b.states[i].occupation);
        EXPECT_EQ(a.states[i].coherence, b.states[i].coherence);
    }
}

TEST(PhononDynamics, ZeroCouplingMatchesCoherentRun)
{
    const TemporalPulse p = fig2_pulse(7.0 * units::pi, 0.5);
    PhononEnvironment none;
    none.coupling_ps2 = 0.0;
    for (double d : {0.0, 3.4, 6.8}) {
        EXPECT_NEAR(final_occupation(p, EmitterParams{d, 1.0}, none), final_occupation(p, EmitterParams{d, 1.0}),
                    1e-6);
    }
}

TEST(PhononDynamics, StateStaysPhysical)
{
    PhononEnvironment warm;
    warm.temperature_K = 20.0;
    for (double phi2 : {0.5, -0.5}) {
        const TemporalPulse p = fig2_pulse(9.0 * units::pi, phi2);
        const Trajectory traj = integrate(p, EmitterParams{3.4, 1.0}, warm);
        EXPECT_LE(traj.max_norm_error, 1e-6);
        for (const BlochState& s : traj.states) {
            // Trace is fixed by construction; check positivity of rho.
            EXPECT_GE(s.occupation, 0.0);
            EXPECT_LE(s.occupation, 1.0);
            EXPECT_LE(std::norm(s.coherence), s.occupation * (1.0 - s.occupation) + 1e-9);
        }
    }
}

TEST(PhononDynamics, NegativeChirpRelaxesOutOfTheUpperBranch)
{
    const PhononEnvironment env;
    const double theta = 8.0 * units::pi;
    const double plus = final_occupation(fig2_pulse(theta, 0.5), EmitterParams{0.0, 1.0}, env);
    const double minus = final_occupation(fig2_pulse(theta, -0.5), EmitterParams{0.0, 1.0}, env);
    EXPECT_GT(plus, 0.95);
    EXPECT_GT(plus - minus, 0.03);
}

TEST(PhononDynamics, ChirpSignGapShrinksAboveTenPi)
{
    // Five-notch drive with phonons: the +/- chirp gap must not grow with
    // area once the dressed splitting outruns the phonon cutoff.
    const PhononEnvironment env;
    for (double d : {0.0, 3.4, 6.8}) {
        double previous = std::numeric_limits<double>::infinity();
        for (int k = 10; k <= 20; ++k) {
            const double theta = k * units::pi;
            const double gap = final_occupation(fig2_pulse(theta, 0.5), EmitterParams{d, 1.0}, env) -
                               final_occupation(fig2_pulse(theta, -0.5), EmitterParams{d, 1.0}, env);
            EXPECT_LE(std::abs(gap), previous + 1e-9) << "detuning " << d << " theta " << k << " pi";
            previous = std::abs(gap);
        }
    }
}

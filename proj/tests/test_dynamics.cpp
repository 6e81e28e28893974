#include <mnarp/dynamics.hpp>
#include <mnarp/errors.hpp>
#include <mnarp/pulseshape.hpp>
#include <mnarp/sweep.hpp>
#include <mnarp/units.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace mnarp;

namespace {

constexpr double tau0 = 0.120;

SpectralPulse shaped(double area, double phi2, const std::vector<double>& notches = {}, double width = 1.0)
{
    SpectralPulse s = make_gaussian_spectrum(tau0, 0.0, area, FrequencyGrid::for_pulse(tau0));
    s = apply_phase_mask(std::move(s), ChirpSpec{phi2});
    if (!notches.empty()) {
        s = apply_notch_mask(std::move(s), NotchSpec{notches, width});
    }
    return s;
}

std::vector<double> symmetric_layout(std::size_t n, double spacing)
{
    SweepSpec spec;
    spec.n_emitters = n;
    return spec.layout(spacing);
}

TemporalPulse drive(const SpectralPulse& s, double detuning = 0.0, double step = 0.1)
{
    return synthesize_for_drive(s, 1.0, detuning, step);
}

// Flat-top drive with cos^2 ramps and a linear sweep of the laser frequency:
// Omega(t) = Omega0 f(t) exp(-i alpha t^2), so the emitter sees the detuning
// Delta - 2 alpha t pass through zero at t = 0.
TemporalPulse flat_top_chirped(double omega0, double alpha, double half_flat, double ramp, double dt)
{
    const double t_end = half_flat + ramp;
    const auto half = static_cast<std::size_t>(std::ceil(t_end / dt));
    TemporalPulse p;
    p.dt_ps = dt;
    p.t_start_ps = -static_cast<double>(half) * dt;
    p.chirp_rate_ps2 = alpha;
    p.envelope.resize(2 * half + 1);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double t = p.time(i);
        const double u = std::abs(t);
        double f = 1.0;
        if (u >= t_end) {
            f = 0.0;
        } else if (u > half_flat) {
            const double c = std::cos(0.5 * units::pi * (u - half_flat) / ramp);
            f = c * c;
        }
        p.envelope[i] = std::polar(omega0 * f, -alpha * t * t);
    }
    return p;
}

} // namespace

TEST(Rabi, ResonantTransformLimitedFollowsSinSquared)
{
    for (int k = 0; k < 25; ++k) {
        const double theta = 6.0 * units::pi * k / 24.0;
        const TemporalPulse p = drive(shaped(theta, 0.0));
        const double expected = std::pow(std::sin(0.5 * theta), 2);
        EXPECT_NEAR(final_occupation(p, EmitterParams{0.0, 1.0}), expected, 1e-4) << "theta = " << theta;
    }
}

TEST(Rabi, PiAndTwoPi)
{
    EXPECT_NEAR(final_occupation(drive(shaped(units::pi, 0.0)), {}), 1.0, 1e-4);
    EXPECT_NEAR(final_occupation(drive(shaped(2 * units::pi, 0.0)), {}), 0.0, 1e-4);
}

TEST(Rabi, DipoleScaleActsAsArea)
{
    const TemporalPulse p = drive(shaped(1.0, 0.0), 0.0, 0.02);
    EXPECT_NEAR(final_occupation(p, EmitterParams{0.0, units::pi}), 1.0, 1e-6);
}

TEST(Integrator, FourthOrderConvergence)
{
    // Errors against a very fine reference shrink ~16x per halving of dt.
    const SpectralPulse s = shaped(5.0 * units::pi, 0.1, symmetric_layout(3, 4.0));
    const double reference = final_occupation(drive(s, 4.0, 0.005), EmitterParams{4.0, 1.0});
    const double coarse = final_occupation(drive(s, 4.0, 0.4), EmitterParams{4.0, 1.0});
    const double fine = final_occupation(drive(s, 4.0, 0.2), EmitterParams{4.0, 1.0});
    const double ratio = std::abs(coarse - reference) / std::abs(fine - reference);
    EXPECT_GT(ratio, 10.0);
    EXPECT_LT(ratio, 24.0);
}

TEST(LandauZener, FlatTopChirpedDriveMatchesFormula)
{
    const double alpha = 1.0;
    for (double target : {0.2, 0.4, 0.5, 0.7, 0.9}) {
        // P = 1 - exp(-pi Omega0^2 / (2 |2 alpha|))
        const double omega0 = std::sqrt(-4.0 * alpha * std::log(1.0 - target) / units::pi);
        const double half_flat = 40.0;
        const double ramp = 8.0;
        const double dt = 0.5 * 0.05 / (2.0 * alpha * (half_flat + ramp) + omega0);
        const TemporalPulse p = flat_top_chirped(omega0, alpha, half_flat, ramp, dt);
        const double occupation = final_occupation(p, EmitterParams{0.0, 1.0});
        EXPECT_NEAR(occupation, target, 0.02 * target) << "Omega0 = " << omega0;
    }
}

TEST(LandauZener, HalfTransferExample)
{
    const double alpha = chirp_rate(ChirpSpec{0.5}, tau0);
    // pi Omega0^2 / (4 alpha) = ln 2
    const double omega0 = std::sqrt(4.0 * alpha * units::ln2 / units::pi);
    ASSERT_NEAR(units::pi * omega0 * omega0 / (4.0 * alpha), units::ln2, 1e-12);
    const double dt = 0.5 * 0.05 / (2.0 * alpha * 48.0 + omega0);
    const TemporalPulse p = flat_top_chirped(omega0, alpha, 40.0, 8.0, dt);
    EXPECT_NEAR(final_occupation(p, {}), 0.5, 0.01);
}

TEST(Invariance, RotatingAndEmitterFrameAgree)
{
    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> area(1.0, 15.0 * units::pi);
    std::uniform_real_distribution<double> chirp(-0.6, 0.6);
    std::uniform_real_distribution<double> detuning(-8.0, 8.0);
    for (int trial = 0; trial < 6; ++trial) {
        const double theta = area(rng);
        const double phi2 = chirp(rng);
        const double delta = detuning(rng);
        const bool notched = trial % 2 == 0;
        const SpectralPulse s = shaped(theta, phi2, notched ? symmetric_layout(3, 3.0) : std::vector<double>{});
        const TemporalPulse p = drive(s, delta);

        // With the static detuning removed, the emitter sees Omega(t) e^{i Delta t}.
        TemporalPulse emitter_frame = p;
        const double w = units::meV_to_radps(delta);
        for (std::size_t i = 0; i < p.size(); ++i) {
            emitter_frame.envelope[i] *= std::polar(1.0, w * p.time(i));
        }
        const double rotating = final_occupation(p, EmitterParams{delta, 1.0});
        const double bare = final_occupation(emitter_frame, EmitterParams{0.0, 1.0});
        EXPECT_NEAR(rotating, bare, 1e-6) << "theta " << theta << " phi2 " << phi2 << " delta " << delta;
    }
}

TEST(Invariance, DetuningSymmetryWithSymmetricNotches)
{
    const auto centers = symmetric_layout(5, 3.4);
    const SpectralPulse s = shaped(10.0 * units::pi, 0.5, centers);
    const TemporalPulse p = drive(s, 6.8);
    for (double d : {3.4, 6.8, 1.7, 5.0}) {
        const double plus = final_occupation(p, EmitterParams{d, 1.0});
        const double minus = final_occupation(p, EmitterParams{-d, 1.0});
        EXPECT_NEAR(plus, minus, 1e-6) << "detuning " << d;
    }
}

TEST(Invariance, ChirpSignWithoutPhonons)
{
    const auto centers = symmetric_layout(5, 3.4);
    for (double theta : {3.0 * units::pi, 8.0 * units::pi, 14.5 * units::pi}) {
        for (double d : {0.0, 3.4, -6.8}) {
            const double plus = final_occupation(drive(shaped(theta, 0.5, centers), 6.8), EmitterParams{d, 1.0});
            const double minus = final_occupation(drive(shaped(theta, -0.5, centers), 6.8), EmitterParams{d, 1.0});
            EXPECT_NEAR(plus, minus, 1e-6) << "theta " << theta << " detuning " << d;
        }
    }
}

TEST(Invariance, NormAndPurityConserved)
{
    const SpectralPulse s = shaped(20.0 * units::pi, 0.5, symmetric_layout(5, 3.4));
    const TemporalPulse p = drive(s, 6.8);
    const Trajectory traj = integrate(p, EmitterParams{6.8, 1.0});
    EXPECT_LT(traj.max_norm_error, 1e-6);
    for (const BlochState& st : traj.states) {
        EXPECT_GE(st.occupation, -1e-9);
        EXPECT_LE(st.occupation, 1.0 + 1e-6);
        EXPECT_LE(std::norm(st.coherence), st.occupation * (1.0 - st.occupation) + 1e-9);
        EXPECT_NEAR(std::norm(st.coherence), st.occupation * (1.0 - st.occupation), 1e-6);
    }
}

TEST(Trajectory, TimeGridFollowsPulseSamples)
{
    const TemporalPulse p = drive(shaped(units::pi, 0.0));
    IntegrateOptions opts;
    opts.stride = 3;
    const Trajectory traj = integrate(p, {}, std::nullopt, opts);
    ASSERT_EQ(traj.times_ps.size(), traj.states.size());
    EXPECT_EQ(traj.times_ps.front(), p.time(0));
    EXPECT_EQ(traj.times_ps.back(), p.t_end_ps());
    EXPECT_DOUBLE_EQ(traj.times_ps[1], p.time(6));
    EXPECT_EQ(traj.states.front().occupation, 0.0);
    EXPECT_EQ(traj.states.back().occupation, traj.final_occupation);
}

TEST(Arp, PlateauWithoutNotches)
{
    for (int k = 5; k <= 20; ++k) {
        const double theta = k * units::pi;
        const double occ = final_occupation(drive(shaped(theta, 0.5)), {});
        EXPECT_GT(occ, 0.99) << "theta = " << k << " pi";
    }
}

TEST(Arp, FiveNotchPulseInvertsEveryEmitterAtTenPi)
{
    const auto centers = symmetric_layout(5, 3.4);
    const TemporalPulse p = drive(shaped(10.0 * units::pi, 0.5, centers), 6.8);
    for (double d : centers) {
        EXPECT_GT(final_occupation(p, EmitterParams{d, 1.0}), 0.9) << "detuning " << d;
    }
}

TEST(DressedStates, Energies)
{
    const auto a = dressed_energies(0.0, 2.0);
    EXPECT_DOUBLE_EQ(a.upper, 1.0);
    EXPECT_DOUBLE_EQ(a.lower, -1.0);
    const auto b = dressed_energies(3.0, 4.0);
    EXPECT_DOUBLE_EQ(b.upper, 2.5);
    EXPECT_DOUBLE_EQ(b.lower, -2.5);
    for (double r : {-1.5, 0.3, 2.0}) {
        for (double d : {-0.7, 0.0, 4.0}) {
            EXPECT_EQ(dressed_energies(r, d).upper, dressed_energies(-r, -d).upper);
            EXPECT_EQ(dressed_energies(r, d).upper, dressed_energies(r, -d).upper);
            EXPECT_GE(dressed_energies(r, d).upper, dressed_energies(r, d).lower);
        }
    }
    EXPECT_EQ(dressed_energies(0.0, 0.0).upper, dressed_energies(0.0, 0.0).lower);
}

TEST(DressedStates, AdiabaticityMargin)
{
    TemporalPulse dark = drive(shaped(units::pi, 0.5));
    for (auto& v : dark.envelope) {
        v = 0.0;
    }
    EXPECT_EQ(adiabaticity_margin(dark, EmitterParams{2.0, 1.0}), 0.0);

    EXPECT_GT(adiabaticity_margin(drive(shaped(0.5 * units::pi, 0.5)), {}), 1.0);

    const auto centers = symmetric_layout(5, 3.4);
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 8; k <= 16; ++k) {
        const TemporalPulse p = drive(shaped(k * units::pi, 0.5, centers), 6.8);
        const double m = adiabaticity_margin(p, EmitterParams{3.4, 1.0});
        EXPECT_LT(m, previous) << "theta = " << k << " pi";
        previous = m;
    }
}

TEST(Errors, CoarseStepRaisesNumericalError)
{
    const SpectralPulse s = shaped(20.0 * units::pi, 0.5, symmetric_layout(5, 3.4));
    const TemporalPulse coarse = synthesize(s);
    EXPECT_THROW(final_occupation(coarse, EmitterParams{6.8, 1.0}), NumericalError);
}

TEST(Errors, RejectsBadInputs)
{
    TemporalPulse p = drive(shaped(units::pi, 0.0));
    EXPECT_THROW(final_occupation(p, EmitterParams{0.0, 0.0}), InvalidArgument);
    EXPECT_THROW(final_occupation(p, EmitterParams{std::nan(""), 1.0}), InvalidArgument);

    TemporalPulse even = p;
    even.envelope.pop_back();
    EXPECT_THROW(final_occupation(even, {}), InvalidArgument);

    TemporalPulse truncated = p;
    truncated.envelope.assign(p.envelope.begin() + static_cast<long>(p.size() / 2 - 50),
                              p.envelope.begin() + static_cast<long>(p.size() / 2 + 51));
    EXPECT_THROW(final_occupation(truncated, {}), InvalidArgument);
}

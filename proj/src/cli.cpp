#include <mnarp/cli.hpp>

#include <mnarp/config.hpp>
#include <mnarp/csv.hpp>
#include <mnarp/dynamics.hpp>
#include <mnarp/errors.hpp>
#include <mnarp/pulseshape.hpp>
#include <mnarp/svg.hpp>
#include <mnarp/sweep.hpp>
#include <mnarp/units.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace mnarp {

namespace {

namespace fs = std::filesystem;

enum ExitCode : int
{
    exit_ok = 0,
    exit_io = 1,
    exit_config = 2,
    exit_numerical = 3,
};

std::string quoted(const std::string& text)
{
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

int report(int code, const std::string& kind, const std::string& fields, const std::string& message)
{
    std::cerr << "mnarp: error kind=" << kind << (fields.empty() ? "" : " " + fields) << " msg=" << quoted(message)
              << std::endl;
    return code;
}

// NumericalError messages from a sweep start with "cell k=v k=v k=v: reason".
int report_numerical(const std::string& what)
{
    if (what.rfind("cell ", 0) == 0) {
        const auto colon = what.find(": ");
        return report(exit_numerical, "numerical", what.substr(5, colon - 5),
                      colon == std::string::npos ? what : what.substr(colon + 2));
    }
    return report(exit_numerical, "numerical", "", what);
}

// Runs `body`, mapping library exceptions to exit codes.
template <typename F>
int guarded(F&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        const std::string message = e.key().empty() ? what : what.substr(e.key().size() + 2);
        return report(exit_config, "config", e.key().empty() ? "" : "key=" + e.key(), message);
    } catch (const NumericalError& e) {
        return report_numerical(e.what());
    } catch (const InvalidArgument& e) {
        return report(exit_config, "argument", "", e.what());
    } catch (const GridError& e) {
        return report(exit_config, "grid", "", e.what());
    } catch (const IoError& e) {
        return report(exit_io, "io", "", e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return report(exit_io, "io", "", e.what());
    } catch (const std::exception& e) {
        return report(exit_io, "internal", "", e.what());
    }
}

// --workers, then MNARP_WORKERS, then the config value; 0 leaves the choice
// to OpenMP (OMP_NUM_THREADS).
int resolve_workers(int flag, int from_config)
{
    if (flag > 0) {
        return flag;
    }
    if (const char* env = std::getenv("MNARP_WORKERS"); env && *env) {
        int value = 0;
        const char* end = env + std::char_traits<char>::length(env);
        const auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec != std::errc{} || ptr != end || value < 0) {
            throw ConfigError("MNARP_WORKERS", "expected a non-negative integer");
        }
        if (value > 0) {
            return value;
        }
    }
    return from_config;
}

ProgressCallback progress_printer(const std::string& name, bool quiet)
{
    if (quiet) {
        return {};
    }
    return [name, last = -1](std::size_t done, std::size_t total) mutable {
        const int pct = static_cast<int>(100 * done / std::max<std::size_t>(total, 1));
        if (pct / 10 != last / 10 || done == total) {
            last = pct;
            std::cerr << name << ": " << pct << "% (" << done << "/" << total << " cells)" << std::endl;
        }
    };
}

std::string command_line(int argc, char** argv)
{
    std::string out;
    for (int i = 0; i < argc; ++i) {
        out += (i ? " " : "") + std::string(argv[i]);
    }
    return out;
}

struct ShapeArgs
{
    double tau0_ps = 0.120;
    double chirp_ps2 = 0.5;
    double theta_rad = units::pi;
    double carrier_meV = 0.0;
    std::vector<double> notches_meV;
    std::size_t count = 5;
    double spacing_meV = 3.4;
    double width_meV = 1.0;
    bool no_notch = false;
    std::size_t grid_points = std::size_t{1} << 14;
    double span_factor = 16.0;

    void add_to(CLI::App& app)
    {
        app.add_option("--tau0", tau0_ps, "Transform-limited intensity FWHM (ps)")->capture_default_str();
        app.add_option("--chirp", chirp_ps2, "Quadratic spectral phase phi'' (ps^2)")->capture_default_str();
        app.add_option("--theta", theta_rad, "Pulse area of the unshaped pulse (rad)")->capture_default_str();
        app.add_option("--carrier", carrier_meV, "Laser carrier / rotating-frame energy (meV)")
            ->capture_default_str();
        app.add_option("--notches", notches_meV,
                       "Notch centers relative to the carrier (meV); overrides --count/--spacing")
            ->delimiter(',');
        app.add_option("--count", count, "Number of evenly spaced notches centered on the carrier")
            ->capture_default_str();
        app.add_option("--spacing", spacing_meV, "Notch spacing for --count (meV)")->capture_default_str();
        app.add_option("--width", width_meV, "Notch width delta (meV)")->capture_default_str();
        app.add_flag("--no-notch", no_notch, "Skip the notch mask");
        app.add_option("--grid-points", grid_points, "Frequency grid size (power of two >= 4096)")
            ->capture_default_str();
        app.add_option("--span-factor", span_factor, "Frequency span in spectral FWHM")->capture_default_str();
    }

    NotchSpec notch_spec() const
    {
        NotchSpec spec;
        spec.width_meV = width_meV;
        if (!notches_meV.empty()) {
            spec.centers_meV = notches_meV;
        } else {
            SweepSpec layout;
            layout.n_emitters = count;
            spec.centers_meV = layout.layout(spacing_meV);
        }
        for (double& c : spec.centers_meV) {
            c += carrier_meV;
        }
        return spec;
    }

    SpectralPulse spectrum() const
    {
        FrequencyGrid grid;
        grid.center_meV = carrier_meV;
        grid.n_points = grid_points;
        grid.span_meV = span_factor * spectral_fwhm_meV(tau0_ps);
        SpectralPulse s = make_gaussian_spectrum(tau0_ps, carrier_meV, theta_rad, grid);
        s = apply_phase_mask(std::move(s), ChirpSpec{chirp_ps2});
        if (!no_notch) {
            s = apply_notch_mask(std::move(s), notch_spec());
        }
        return s;
    }

    CsvMetadata metadata(const std::string& invocation) const
    {
        std::ostringstream notches;
        if (no_notch) {
            notches << "none";
        } else {
            const NotchSpec spec = notch_spec();
            for (std::size_t i = 0; i < spec.centers_meV.size(); ++i) {
                notches << (i ? " " : "") << format_number(spec.centers_meV[i]);
            }
        }
        return {
            {"command", invocation},
            {"tau0_ps", format_number(tau0_ps)},
            {"chirp_ps2", format_number(chirp_ps2)},
            {"theta_rad", format_number(theta_rad)},
            {"carrier_meV", format_number(carrier_meV)},
            {"notch_centers_meV", notches.str()},
            {"notch_width_meV", format_number(width_meV)},
            {"grid_points", std::to_string(grid_points)},
            {"span_factor", format_number(span_factor)},
        };
    }
};

void prepare_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
}

void write_per_emitter(const OccupationMap& map, const fs::path& dir, const std::string& stem)
{
    for (std::size_t e = 0; e < map.n_emitters(); ++e) {
        write_map_csv(map, dir / (stem + "_qd" + std::to_string(e + 1) + ".csv"), e);
    }
}

// Nearest axis index to `value`, if one lies within `tolerance`.
std::optional<std::size_t> axis_index_near(const OccupationMap& map, double value, double tolerance = 1e-9)
{
    for (std::size_t j = 0; j < map.n_axis(); ++j) {
        if (std::abs(map.spec.axis_values_meV[j] - value) <= tolerance) {
            return j;
        }
    }
    return std::nullopt;
}

struct FigureArgs
{
    std::string preset_name;
    std::string out_dir = ".";
    int workers = 0;
    std::size_t areas = 0;
    std::size_t axis_points = 0;
    double max_phase_step = 0.0;
    bool quiet = false;
};

SweepSpec figure_spec(const FigureArgs& args)
{
    SweepSpec spec = preset(args.preset_name);
    if (args.areas > 0) {
        spec.areas_rad = linspace(spec.areas_rad.front(), spec.areas_rad.back(), args.areas);
    }
    if (args.axis_points > 0 && spec.axis_values_meV.size() > 1) {
        spec.axis_values_meV =
            linspace(spec.axis_values_meV.front(), spec.axis_values_meV.back(), args.axis_points);
    }
    if (args.max_phase_step > 0.0) {
        spec.max_phase_step = args.max_phase_step;
    }
    RunConfig check;
    check.spec = spec;
    // Route through the config validator so errors carry key paths.
    parse_config_string(format_config(check));
    return spec;
}

int run_figure(const FigureArgs& args)
{
    const SweepSpec spec = figure_spec(args);
    const int workers = resolve_workers(args.workers, 0);
    const fs::path dir = args.out_dir;
    const std::string& name = spec.name;

    if (name == "fig2e") {
        // Phonon-assisted runs for both chirp signs plus the phonon-free reference.
        SweepSpec negative = spec;
        negative.chirp_ps2 = -spec.chirp_ps2;
        negative.name = name + "_neg";
        SweepSpec positive = spec;
        positive.name = name + "_pos";
        SweepSpec coherent = spec;
        coherent.phonons.reset();
        coherent.name = name + "_nophonon";
        prepare_dir(dir);
        const OccupationMap pos = run_sweep(positive, progress_printer(positive.name, args.quiet), workers);
        const OccupationMap neg = run_sweep(negative, progress_printer(negative.name, args.quiet), workers);
        const OccupationMap free = run_sweep(coherent, progress_printer(coherent.name, args.quiet), workers);
        write_per_emitter(pos, dir, positive.name);
        write_per_emitter(neg, dir, negative.name);
        write_per_emitter(free, dir, coherent.name);

        LinePlot plot;
        plot.title = name + ": +chirp solid, -chirp dashed (phonons)";
        plot.x_label = "pulse area (π rad)";
        plot.y_label = "exciton occupation";
        for (std::size_t e = 0; e < spec.n_emitters; ++e) {
            for (const OccupationMap* m : {&pos, &neg}) {
                LineSeries s;
                s.label = "QD" + std::to_string(e + 1) + (m == &pos ? " +" : " -");
                s.color = series_color(e);
                s.dashed = m == &neg;
                for (std::size_t a = 0; a < m->n_areas(); ++a) {
                    s.x.push_back(m->spec.areas_rad[a] / units::pi);
                    s.y.push_back(m->at(a, 0, e));
                }
                plot.series.push_back(std::move(s));
            }
        }
        RunConfig echo;
        echo.spec = spec;
        plot.metadata = format_config(echo);
        render_line_plot(plot, dir / (name + ".svg"));
        return exit_ok;
    }

    prepare_dir(dir);
    const OccupationMap map = run_sweep(spec, progress_printer(name, args.quiet), workers);
    write_per_emitter(map, dir, name);
    if (map.n_axis() == 1) {
        render_line_plot(area_cut(map, 0), dir / (name + ".svg"));
    } else {
        render_heatmap_panels(map, dir / (name + ".svg"));
    }
    if (name == "fig2") {
        if (const auto j = axis_index_near(map, 3.4)) {
            render_line_plot(area_cut(map, *j, "fig2 line cut at 3.4 meV spacing"), dir / "fig2d.svg");
        }
    }
    return exit_ok;
}

} // namespace

int cli_main(int argc, char** argv)
{
    CLI::App app{"Multi-notch adiabatic rapid passage simulator: pulse shaping, Bloch dynamics and parameter sweeps",
                 "mnarp"};
    app.set_version_flag("--version", std::string(MNARP_VERSION));
    app.require_subcommand(1);
    const std::string invocation = command_line(argc, argv);

    // shape
    ShapeArgs shape_args;
    std::string shape_dir = ".";
    std::string shape_prefix = "shape";
    double shape_max_dt = 0.0;
    CLI::App* shape = app.add_subcommand("shape", "Write the shaped spectrum and the synthesized Rabi envelope as CSV");
    shape_args.add_to(*shape);
    shape->add_option("--out-dir", shape_dir, "Output directory")->capture_default_str();
    shape->add_option("--prefix", shape_prefix, "File name prefix (<prefix>_spectrum.csv, <prefix>_envelope.csv)")
        ->capture_default_str();
    shape->add_option("--max-dt", shape_max_dt, "Upper bound on the envelope sample spacing (ps); 0 = native");

    // simulate
    ShapeArgs sim_args;
    double detuning_meV = 0.0;
    double dipole = 1.0;
    bool phonons = false;
    PhononEnvironment env;
    double sim_step = 0.1;
    std::size_t stride = 0;
    std::string sim_out = "trajectory.csv";
    CLI::App* simulate = app.add_subcommand("simulate", "Integrate one emitter and write its trajectory as CSV");
    sim_args.add_to(*simulate);
    simulate->add_option("--detuning", detuning_meV, "Emitter energy minus carrier (meV)")->capture_default_str();
    simulate->add_option("--dipole", dipole, "Relative dipole moment of the emitter")->capture_default_str();
    simulate->add_flag("--phonons", phonons, "Enable LA-phonon relaxation");
    simulate->add_option("--temperature", env.temperature_K, "Phonon bath temperature (K)")->capture_default_str();
    simulate->add_option("--coupling", env.coupling_ps2, "Phonon coupling A (ps^2)")->capture_default_str();
    simulate->add_option("--cutoff", env.cutoff_meV, "Phonon cutoff energy (meV)")->capture_default_str();
    simulate->add_option("--max-phase-step", sim_step, "RK4 step times the largest rate")->capture_default_str();
    simulate->add_option("--stride", stride, "Keep every n-th step in the CSV (0: at most ~4000 rows)");
    simulate->add_option("--out", sim_out, "Trajectory CSV path")->capture_default_str();

    // sweep
    std::string config_path;
    int sweep_workers = 0;
    std::string sweep_dir;
    bool sweep_quiet = false;
    CLI::App* sweep = app.add_subcommand("sweep", "Run an occupation-map sweep described by a config file");
    sweep->add_option("config", config_path, "Config file (INI, see README)")->required();
    sweep->add_option("--workers", sweep_workers, "Worker threads (overrides MNARP_WORKERS and output.workers)");
    sweep->add_option("--out-dir", sweep_dir, "Output directory (overrides output.directory)");
    sweep->add_flag("--quiet", sweep_quiet, "No progress output");

    // figure
    FigureArgs fig;
    CLI::App* figure = app.add_subcommand("figure", "Run a preset and write per-emitter CSVs plus an SVG figure");
    figure->add_option("preset", fig.preset_name, "Preset name")
        ->required()
        ->check(CLI::IsMember(preset_names()));
    figure->add_option("--out-dir", fig.out_dir, "Output directory")->capture_default_str();
    figure->add_option("--workers", fig.workers, "Worker threads (overrides MNARP_WORKERS)");
    figure->add_option("--areas", fig.areas, "Number of pulse areas over the preset range (0 = preset grid)");
    figure->add_option("--axis-points", fig.axis_points, "Number of spacing/width values (0 = preset grid)");
    figure->add_option("--max-phase-step", fig.max_phase_step, "Override the integrator step rule (0 = preset)");
    figure->add_flag("--quiet", fig.quiet, "No progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report(exit_config, "usage", "", e.what());
    }

    if (shape->parsed()) {
        return guarded([&] {
            const SpectralPulse spectrum = shape_args.spectrum();
            SynthesisOptions options;
            options.max_dt_ps = shape_max_dt;
            const TemporalPulse pulse = synthesize(spectrum, options);
            const fs::path dir = shape_dir;
            prepare_dir(dir);
            const CsvMetadata meta = shape_args.metadata(invocation);
            write_spectrum_csv(spectrum, dir / (shape_prefix + "_spectrum.csv"), meta);
            write_envelope_csv(pulse, dir / (shape_prefix + "_envelope.csv"), meta);
            std::cout << "area_rad=" << format_number(pulse_area(pulse)) << " samples=" << pulse.size()
                      << " dt_ps=" << format_number(pulse.dt_ps) << "\n";
            return int{exit_ok};
        });
    }

    if (simulate->parsed()) {
        return guarded([&] {
            if (!(dipole > 0.0) || !std::isfinite(dipole)) {
                throw InvalidArgument("--dipole must be > 0");
            }
            if (!(sim_step > 0.0 && sim_step <= 1.0)) {
                throw InvalidArgument("--max-phase-step must be in (0, 1]");
            }
            std::optional<PhononEnvironment> bath;
            if (phonons) {
                env.validate();
                bath = env;
            }
            const SpectralPulse spectrum = sim_args.spectrum();
            const TemporalPulse pulse =
                synthesize_for_drive(spectrum, dipole, detuning_meV, sim_step);
            IntegrateOptions options;
            options.stride = stride > 0 ? stride : std::max<std::size_t>(1, pulse.size() / 8000);
            EmitterParams emitter{detuning_meV, dipole};
            const Trajectory trajectory = integrate(pulse, emitter, bath, options);

            CsvMetadata meta = sim_args.metadata(invocation);
            meta.emplace_back("detuning_meV", format_number(detuning_meV));
            meta.emplace_back("dipole_scale", format_number(dipole));
            meta.emplace_back("phonons", phonons ? "on" : "off");
            if (phonons) {
                meta.emplace_back("temperature_K", format_number(env.temperature_K));
                meta.emplace_back("coupling_ps2", format_number(env.coupling_ps2));
                meta.emplace_back("cutoff_meV", format_number(env.cutoff_meV));
            }
            meta.emplace_back("max_phase_step", format_number(sim_step));
            meta.emplace_back("final_occupation", format_number(trajectory.final_occupation));
            const fs::path out = sim_out;
            if (out.has_parent_path()) {
                prepare_dir(out.parent_path());
            }
            write_trajectory_csv(trajectory, out, meta);
            std::cout << "final_occupation=" << format_number(trajectory.final_occupation) << "\n";
            return int{exit_ok};
        });
    }

    if (sweep->parsed()) {
        return guarded([&] {
            RunConfig config = load_config(config_path);
            if (!sweep_dir.empty()) {
                config.output_dir = sweep_dir;
            }
            const int workers = resolve_workers(sweep_workers, config.workers);
            const fs::path dir = config.output_dir;
            prepare_dir(dir);
            const OccupationMap map = run_sweep(config.spec, progress_printer(config.spec.name, sweep_quiet), workers);
            write_map_csv(map, dir / (config.spec.name + ".csv"));
            if (config.emit_plots) {
                if (map.n_axis() == 1) {
                    render_line_plot(area_cut(map, 0), dir / (config.spec.name + ".svg"));
                } else {
                    render_heatmap_panels(map, dir / (config.spec.name + ".svg"));
                }
            }
            return int{exit_ok};
        });
    }

    return guarded([&] { return run_figure(fig); });
}

} // namespace mnarp

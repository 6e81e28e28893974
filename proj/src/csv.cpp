#include <mnarp/csv.hpp>

#include <mnarp/config.hpp>
#include <mnarp/errors.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace mnarp {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

void write_metadata(std::ostream& out, const std::string& kind, const CsvMetadata& metadata)
{
    out << "# multinarp " << MNARP_VERSION << " " << kind << "\n";
    for (const auto& [key, value] : metadata) {
        out << "# " << key << " = " << value << "\n";
    }
}

const char* axis_column(SweepAxis axis)
{
    return axis == SweepAxis::spacing ? "spacing_meV" : "width_meV";
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> parts;
    std::stringstream in(line);
    std::string part;
    while (std::getline(in, part, sep)) {
        parts.push_back(part);
    }
    return parts;
}

double to_double(const std::string& text, std::size_t line_no)
{
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw IoError("line " + std::to_string(line_no) + ": bad number '" + text + "'");
    }
    return value;
}

} // namespace

void write_map_csv(const OccupationMap& map, const std::filesystem::path& path,
                   std::optional<std::size_t> emitter)
{
    if (map.values.size() != map.n_areas() * map.n_axis() * map.n_emitters()) {
        throw InvalidArgument("occupation map size does not match its spec");
    }
    if (emitter && *emitter >= map.n_emitters()) {
        throw InvalidArgument("emitter index out of range");
    }
    std::ofstream out = open_for_write(path);
    CsvMetadata metadata = {{"rows", emitter ? "emitter " + std::to_string(*emitter + 1) : "all emitters"}};
    write_metadata(out, "occupation map", metadata);
    out << "# config begin\n";
    RunConfig config;
    config.spec = map.spec;
    std::istringstream text(format_config(config));
    std::string line;
    while (std::getline(text, line)) {
        out << "# " << line << "\n";
    }
    out << "# config end\n";
    out << "theta_rad," << axis_column(map.spec.axis) << ",emitter_index,occupation\n";
    for (std::size_t a = 0; a < map.n_areas(); ++a) {
        for (std::size_t j = 0; j < map.n_axis(); ++j) {
            for (std::size_t e = 0; e < map.n_emitters(); ++e) {
                if (emitter && e != *emitter) {
                    continue;
                }
                out << format_number(map.spec.areas_rad[a]) << ',' << format_number(map.spec.axis_values_meV[j])
                    << ',' << e + 1 << ',' << format_number(map.at(a, j, e)) << '\n';
            }
        }
    }
    finish(out, path);
}

OccupationMap read_map_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::string line;
    std::size_t line_no = 0;
    std::string config_text;
    bool in_config = false;
    bool have_config = false;
    std::string version;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.rfind("#", 0) != 0) {
            break;
        }
        const std::string body = line.size() > 2 ? line.substr(2) : std::string();
        if (line_no == 1 && body.rfind("multinarp ", 0) == 0) {
            version = split(body, ' ').at(1);
        } else if (body == "config begin") {
            in_config = true;
        } else if (body == "config end") {
            in_config = false;
            have_config = true;
        } else if (in_config) {
            config_text += body + "\n";
        }
    }
    if (!have_config) {
        throw IoError("'" + path.string() + "' has no config block");
    }
    OccupationMap map;
    try {
        map.spec = parse_config_string(config_text).spec;
    } catch (const ConfigError& e) {
        throw IoError("'" + path.string() + "' config block: " + e.what());
    }
    map.version = version;

    const std::string header = std::string("theta_rad,") + axis_column(map.spec.axis) + ",emitter_index,occupation";
    if (line != header) {
        throw IoError("line " + std::to_string(line_no) + ": expected header '" + header + "'");
    }
    const std::size_t expected = map.n_areas() * map.n_axis() * map.n_emitters();
    map.values.reserve(expected);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 4) {
            throw IoError("line " + std::to_string(line_no) + ": expected 4 columns");
        }
        const std::size_t k = map.values.size();
        if (k >= expected) {
            throw IoError("line " + std::to_string(line_no) + ": more rows than the config describes");
        }
        const std::size_t e = k % map.n_emitters();
        const std::size_t j = (k / map.n_emitters()) % map.n_axis();
        const std::size_t a = k / (map.n_emitters() * map.n_axis());
        if (to_double(fields[0], line_no) != map.spec.areas_rad[a] ||
            to_double(fields[1], line_no) != map.spec.axis_values_meV[j] || fields[2] != std::to_string(e + 1)) {
            throw IoError("line " + std::to_string(line_no) + ": row coordinates do not match the config grid");
        }
        map.values.push_back(to_double(fields[3], line_no));
    }
    if (map.values.size() != expected) {
        throw IoError("'" + path.string() + "' has " + std::to_string(map.values.size()) + " rows, expected " +
                      std::to_string(expected));
    }
    return map;
}

void write_spectrum_csv(const SpectralPulse& pulse, const std::filesystem::path& path, const CsvMetadata& metadata)
{
    std::ofstream out = open_for_write(path);
    write_metadata(out, "shaped spectrum", metadata);
    out << "energy_meV,re_S,im_S\n";
    for (std::size_t i = 0; i < pulse.amplitude.size(); ++i) {
        out << format_number(pulse.grid.energy_meV(i)) << ',' << format_number(pulse.amplitude[i].real()) << ','
            << format_number(pulse.amplitude[i].imag()) << '\n';
    }
    finish(out, path);
}

void write_envelope_csv(const TemporalPulse& pulse, const std::filesystem::path& path, const CsvMetadata& metadata)
{
    std::ofstream out = open_for_write(path);
    write_metadata(out, "rabi envelope", metadata);
    out << "t_ps,re_rabi_radps,im_rabi_radps\n";
    for (std::size_t i = 0; i < pulse.size(); ++i) {
        out << format_number(pulse.time(i)) << ',' << format_number(pulse.envelope[i].real()) << ','
            << format_number(pulse.envelope[i].imag()) << '\n';
    }
    finish(out, path);
}

void write_trajectory_csv(const Trajectory& trajectory, const std::filesystem::path& path,
                          const CsvMetadata& metadata)
{
    std::ofstream out = open_for_write(path);
    write_metadata(out, "trajectory", metadata);
    out << "t_ps,rho11,re_rho01,im_rho01\n";
    for (std::size_t i = 0; i < trajectory.states.size(); ++i) {
        const BlochState& s = trajectory.states[i];
        out << format_number(trajectory.times_ps[i]) << ',' << format_number(s.occupation) << ','
            << format_number(s.coherence.real()) << ',' << format_number(s.coherence.imag()) << '\n';
    }
    finish(out, path);
}

} // namespace mnarp

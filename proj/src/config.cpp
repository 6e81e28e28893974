#include <mnarp/config.hpp>

#include <mnarp/errors.hpp>
#include <mnarp/units.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mnarp {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys()
{
    static const std::map<std::string, std::set<std::string>> keys = {
        {"job", {"name", "preset"}},
        {"pulse", {"tau0_ps", "chirp_ps2", "carrier_meV"}},
        {"sweep", {"area_pi", "area_rad"}},
        {"notches", {"width_meV", "spacing_meV"}},
        {"emitters", {"count", "dipole_scales"}},
        {"phonon", {"enabled", "temperature_K", "coupling_ps2", "cutoff_meV"}},
        {"integrator", {"grid_points", "span_factor", "max_phase_step"}},
        {"output", {"directory", "plots", "workers"}},
    };
    return keys;
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& raw, const std::string& key)
{
    const std::string text = trim(raw);
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw ConfigError(key, "expected a number, got '" + text + "'");
    }
    if (!std::isfinite(value)) {
        throw ConfigError(key, "value must be finite");
    }
    return value;
}

long long parse_integer(const std::string& raw, const std::string& key)
{
    const std::string text = trim(raw);
    long long value = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw ConfigError(key, "expected an integer, got '" + text + "'");
    }
    return value;
}

bool parse_bool(const std::string& raw, const std::string& key)
{
    std::string text = trim(raw);
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
    if (text == "true" || text == "yes" || text == "on" || text == "1") {
        return true;
    }
    if (text == "false" || text == "no" || text == "off" || text == "0") {
        return false;
    }
    throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::string format_list(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += format_number(values[i]);
    }
    return out;
}

// Lines starting with '#' are comments here; the INI reader only knows ';'.
std::string strip_hash_comments(std::istream& in)
{
    std::string out;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t");
        if (first != std::string::npos && line[first] == '#') {
            out += '\n';
        } else {
            out += line;
            out += '\n';
        }
    }
    return out;
}

// SweepSpec::validate names struct fields; report them as config keys.
std::string config_key_for(const std::string& field, const RunConfig& config, const std::string& area_key)
{
    static const std::map<std::string, std::string> keys = {
        {"spacing_meV", "notches.spacing_meV"},
        {"width_meV", "notches.width_meV"},
        {"n_emitters", "emitters.count"},
        {"dipole_scales", "emitters.dipole_scales"},
        {"chirp_ps2", "pulse.chirp_ps2"},
        {"tau0_ps", "pulse.tau0_ps"},
        {"carrier_meV", "pulse.carrier_meV"},
        {"grid_points", "integrator.grid_points"},
        {"span_factor", "integrator.span_factor"},
        {"max_phase_step", "integrator.max_phase_step"},
    };
    if (field == "areas_rad") {
        return area_key;
    }
    if (field == "axis_values_meV") {
        return config.spec.axis == SweepAxis::spacing ? "notches.spacing_meV" : "notches.width_meV";
    }
    const auto it = keys.find(field);
    return it == keys.end() ? field : it->second;
}

void validate(const RunConfig& config, const std::string& area_key)
{
    try {
        config.spec.validate();
    } catch (const InvalidArgument& e) {
        // Messages look like "field: reason" or "phonons: field: reason".
        std::string message = e.what();
        std::string key;
        if (message.rfind("phonons: ", 0) == 0) {
            message = message.substr(9);
            const auto colon = message.find(": ");
            key = "phonon." + message.substr(0, colon);
            message = colon == std::string::npos ? message : message.substr(colon + 2);
        } else {
            const auto colon = message.find(": ");
            key = config_key_for(message.substr(0, colon), config, area_key);
            message = colon == std::string::npos ? message : message.substr(colon + 2);
        }
        throw ConfigError(key, message);
    }
    // The frequency grid must hold the pulse; checking it here keeps a bad
    // span from surfacing only after the job has started.
    try {
        FrequencyGrid grid;
        grid.center_meV = config.spec.carrier_meV;
        grid.n_points = config.spec.grid_points;
        grid.span_meV = config.spec.span_factor * spectral_fwhm_meV(config.spec.tau0_ps);
        make_gaussian_spectrum(config.spec.tau0_ps, config.spec.carrier_meV, 1.0, grid);
    } catch (const GridError& e) {
        throw ConfigError("integrator.span_factor", e.what());
    }
    if (config.workers < 0) {
        throw ConfigError("output.workers", "must be >= 0");
    }
    if (config.output_dir.empty()) {
        throw ConfigError("output.directory", "must not be empty");
    }
}

} // namespace

std::string format_number(double value)
{
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    (void)ec;
    return std::string(buf.data(), ptr);
}

std::vector<double> parse_number_list(const std::string& raw, const std::string& key)
{
    const std::string text = trim(raw);
    if (text.empty()) {
        throw ConfigError(key, "empty list");
    }
    if (text.rfind("linspace", 0) == 0) {
        const auto open = text.find('(');
        const auto close = text.rfind(')');
        if (open == std::string::npos || close != text.size() - 1 || close < open) {
            throw ConfigError(key, "expected linspace(first, last, count)");
        }
        const std::vector<double> args = parse_number_list(text.substr(open + 1, close - open - 1), key);
        if (args.size() != 3) {
            throw ConfigError(key, "linspace takes (first, last, count)");
        }
        if (args[2] < 1.0 || args[2] != std::floor(args[2]) || args[2] > 1e7) {
            throw ConfigError(key, "linspace count must be a positive integer");
        }
        return linspace(args[0], args[1], static_cast<std::size_t>(args[2]));
    }
    std::vector<double> values;
    std::stringstream items(text);
    std::string item;
    while (std::getline(items, item, ',')) {
        values.push_back(parse_number(item, key));
    }
    if (text.back() == ',') {
        throw ConfigError(key, "trailing comma");
    }
    return values;
}

RunConfig parse_config(std::istream& in)
{
    std::istringstream cleaned(strip_hash_comments(in));
    pt::ptree tree;
    try {
        pt::read_ini(cleaned, tree);
    } catch (const pt::ini_parser_error& e) {
        std::ostringstream msg;
        msg << "line " << e.line() << ": " << e.message();
        throw ConfigError("", msg.str());
    }

    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ConfigError(section, "key outside of a section");
        }
        const auto known = known_keys().find(section);
        if (known == known_keys().end()) {
            throw ConfigError(section, "unknown section");
        }
        for (const auto& entry : body) {
            if (!known->second.count(entry.first)) {
                throw ConfigError(section + "." + entry.first, "unknown key");
            }
        }
    }

    auto get = [&tree](const std::string& key) -> std::optional<std::string> {
        const auto node = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'));
        if (node) {
            return *node;
        }
        return std::nullopt;
    };

    RunConfig config;
    if (const auto name = get("job.preset")) {
        try {
            config.spec = preset(trim(*name));
        } catch (const InvalidArgument& e) {
            throw ConfigError("job.preset", e.what());
        }
    } else {
        config.spec = SweepSpec{};
        config.spec.areas_rad = linspace(0.0, 20.0 * units::pi, 81);
        config.spec.axis_values_meV = {config.spec.spacing_meV};
    }
    SweepSpec& spec = config.spec;

    if (const auto v = get("job.name")) {
        spec.name = trim(*v);
        const bool ok = !spec.name.empty() && std::all_of(spec.name.begin(), spec.name.end(), [](unsigned char c) {
            return std::isalnum(c) || c == '_' || c == '-' || c == '.';
        });
        if (!ok || spec.name[0] == '.') {
            throw ConfigError("job.name", "must be a nonempty file stem of letters, digits, '_', '-', '.'");
        }
    }
    if (const auto v = get("pulse.tau0_ps")) {
        spec.tau0_ps = parse_number(*v, "pulse.tau0_ps");
    }
    if (const auto v = get("pulse.chirp_ps2")) {
        spec.chirp_ps2 = parse_number(*v, "pulse.chirp_ps2");
    }
    if (const auto v = get("pulse.carrier_meV")) {
        spec.carrier_meV = parse_number(*v, "pulse.carrier_meV");
    }

    std::string area_key = "sweep.area_rad";
    const auto area_pi = get("sweep.area_pi");
    const auto area_rad = get("sweep.area_rad");
    if (area_pi && area_rad) {
        throw ConfigError("sweep.area_pi", "give either area_pi or area_rad, not both");
    }
    if (area_pi) {
        area_key = "sweep.area_pi";
        spec.areas_rad = parse_number_list(*area_pi, area_key);
        for (double& a : spec.areas_rad) {
            a *= units::pi;
        }
    } else if (area_rad) {
        spec.areas_rad = parse_number_list(*area_rad, area_key);
    }

    // Whichever of spacing / width holds more than one value is the map axis.
    const auto spacing = get("notches.spacing_meV");
    const auto width = get("notches.width_meV");
    std::vector<double> spacings;
    std::vector<double> widths;
    if (spacing) {
        spacings = parse_number_list(*spacing, "notches.spacing_meV");
    }
    if (width) {
        widths = parse_number_list(*width, "notches.width_meV");
    }
    if (spacings.size() > 1 && widths.size() > 1) {
        throw ConfigError("notches.width_meV", "only one of spacing_meV and width_meV may be a list");
    }
    if (widths.size() > 1) {
        if (spacings.size() == 1) {
            spec.spacing_meV = spacings[0];
        } else if (spec.axis == SweepAxis::spacing && spec.axis_values_meV.size() == 1) {
            spec.spacing_meV = spec.axis_values_meV[0];
        }
        spec.axis = SweepAxis::width;
        spec.axis_values_meV = widths;
    } else {
        if (width) {
            spec.width_meV = widths[0];
            if (spec.axis == SweepAxis::width) {
                spec.axis = SweepAxis::spacing;
                spec.axis_values_meV = {spec.spacing_meV};
            }
        }
        if (spacing) {
            spec.axis = SweepAxis::spacing;
            spec.axis_values_meV = spacings;
        }
    }

    if (const auto v = get("emitters.count")) {
        const long long n = parse_integer(*v, "emitters.count");
        if (n < 1 || n > 1000) {
            throw ConfigError("emitters.count", "must be between 1 and 1000");
        }
        spec.n_emitters = static_cast<std::size_t>(n);
    }
    if (const auto v = get("emitters.dipole_scales")) {
        spec.dipole_scales = parse_number_list(*v, "emitters.dipole_scales");
    }

    PhononEnvironment env = spec.phonons.value_or(PhononEnvironment{});
    bool phonons_on = spec.phonons.has_value();
    if (const auto v = get("phonon.enabled")) {
        phonons_on = parse_bool(*v, "phonon.enabled");
    }
    if (const auto v = get("phonon.temperature_K")) {
        env.temperature_K = parse_number(*v, "phonon.temperature_K");
    }
    if (const auto v = get("phonon.coupling_ps2")) {
        env.coupling_ps2 = parse_number(*v, "phonon.coupling_ps2");
    }
    if (const auto v = get("phonon.cutoff_meV")) {
        env.cutoff_meV = parse_number(*v, "phonon.cutoff_meV");
    }
    env.enabled = true;
    spec.phonons = phonons_on ? std::optional<PhononEnvironment>(env) : std::nullopt;

    if (const auto v = get("integrator.grid_points")) {
        const long long n = parse_integer(*v, "integrator.grid_points");
        if (n < 1) {
            throw ConfigError("integrator.grid_points", "must be a power of two >= 4096");
        }
        spec.grid_points = static_cast<std::size_t>(n);
    }
    if (const auto v = get("integrator.span_factor")) {
        spec.span_factor = parse_number(*v, "integrator.span_factor");
    }
    if (const auto v = get("integrator.max_phase_step")) {
        spec.max_phase_step = parse_number(*v, "integrator.max_phase_step");
    }

    if (const auto v = get("output.directory")) {
        config.output_dir = trim(*v);
    }
    if (const auto v = get("output.plots")) {
        config.emit_plots = parse_bool(*v, "output.plots");
    }
    if (const auto v = get("output.workers")) {
        const long long n = parse_integer(*v, "output.workers");
        if (n < 0 || n > 4096) {
            throw ConfigError("output.workers", "must be between 0 and 4096");
        }
        config.workers = static_cast<int>(n);
    }

    validate(config, area_key);
    return config;
}

RunConfig parse_config_string(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", "cannot open config file '" + path.string() + "'");
    }
    return parse_config(in);
}

std::string format_config(const RunConfig& config)
{
    const SweepSpec& spec = config.spec;
    std::ostringstream out;
    out << "[job]\n"
        << "name = " << spec.name << "\n\n"
        << "[pulse]\n"
        << "tau0_ps = " << format_number(spec.tau0_ps) << "\n"
        << "chirp_ps2 = " << format_number(spec.chirp_ps2) << "\n"
        << "carrier_meV = " << format_number(spec.carrier_meV) << "\n\n"
        << "[sweep]\n"
        << "area_rad = " << format_list(spec.areas_rad) << "\n\n"
        << "[notches]\n";
    if (spec.axis == SweepAxis::spacing) {
        out << "width_meV = " << format_number(spec.width_meV) << "\n"
            << "spacing_meV = " << format_list(spec.axis_values_meV) << "\n\n";
    } else {
        out << "spacing_meV = " << format_number(spec.spacing_meV) << "\n"
            << "width_meV = " << format_list(spec.axis_values_meV) << "\n\n";
    }
    out << "[emitters]\n"
        << "count = " << spec.n_emitters << "\n";
    if (!spec.dipole_scales.empty()) {
        out << "dipole_scales = " << format_list(spec.dipole_scales) << "\n";
    }
    out << "\n[phonon]\n";
    if (spec.phonons) {
        out << "enabled = true\n"
            << "temperature_K = " << format_number(spec.phonons->temperature_K) << "\n"
            << "coupling_ps2 = " << format_number(spec.phonons->coupling_ps2) << "\n"
            << "cutoff_meV = " << format_number(spec.phonons->cutoff_meV) << "\n\n";
    } else {
        out << "enabled = false\n\n";
    }
    out << "[integrator]\n"
        << "grid_points = " << spec.grid_points << "\n"
        << "span_factor = " << format_number(spec.span_factor) << "\n"
        << "max_phase_step = " << format_number(spec.max_phase_step) << "\n\n"
        << "[output]\n"
        << "directory = " << config.output_dir << "\n"
        << "plots = " << (config.emit_plots ? "true" : "false") << "\n"
        << "workers = " << config.workers << "\n";
    return out.str();
}

} // namespace mnarp

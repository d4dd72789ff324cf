#include "mbsed/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace mbsed {

double PhysicalConstants::wavenumber() const { return 2.0 * std::numbers::pi / clock_wavelength; }

double Config::volume_si(double bohr_units) const {
    const double l = length_si(bohr_units);
    return l * l * l;
}

std::string to_string(Protocol p) {
    switch (p) {
    case Protocol::Ramsey: return "ramsey";
    case Protocol::Rabi: return "rabi";
    case Protocol::CollectiveRamsey: return "collective-ramsey";
    case Protocol::CollectiveRabi: return "collective-rabi";
    case Protocol::AnalyticRamsey: return "analytic-ramsey";
    }
    return "?";
}

Protocol parse_protocol(const std::string& text) {
    for (auto p : {Protocol::Ramsey, Protocol::Rabi, Protocol::CollectiveRamsey,
                   Protocol::CollectiveRabi, Protocol::AnalyticRamsey}) {
        if (to_string(p) == text) return p;
    }
    throw ConfigError("unknown protocol '" + text + "'");
}

std::vector<double> DetuningGrid::values() const {
    std::vector<double> v(points);
    const double h = step();
    for (int i = 0; i < points; ++i) v[i] = min_hz + h * i;
    v.back() = max_hz;
    return v;
}

std::vector<double> areas_for_excitation_scan(int points, double lo, double hi) {
    std::vector<double> areas;
    for (int i = 0; i < points; ++i) {
        const double pe = points == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (points - 1);
        areas.push_back(std::acos(1.0 - 2.0 * pe) / std::numbers::pi);
    }
    return areas;
}

TrapDerived derive_trap(const TrapConfig& trap, const PhysicalConstants& c) {
    TrapDerived d;
    d.omega_z = 2.0 * std::numbers::pi * trap.nu_z;
    d.omega_r = 2.0 * std::numbers::pi * trap.nu_r;
    d.depth = trap.depth_hbar_omega_z * c.hbar * d.omega_z;
    // Small epsilon keeps exact integer ratios (U_r = 5 hbar w_z) from rounding down.
    d.n_z_bands = static_cast<int>(std::floor(d.depth / (c.hbar * d.omega_z) * (1.0 + 1e-12)));
    d.n_r_bands = static_cast<int>(std::floor(d.depth / (c.hbar * d.omega_r) * (1.0 + 1e-12)));
    d.r_z = std::sqrt(c.atom_mass * d.omega_z / c.hbar);
    d.r_r = std::sqrt(c.atom_mass * d.omega_r / c.hbar);
    d.k = c.wavenumber();
    return d;
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("validation error: " + what);
}

} // namespace

void validate(Config& cfg) {
    const auto& c = cfg.constants;
    require(c.hbar > 0 && c.k_B > 0 && c.atom_mass > 0 && c.bohr_radius > 0 &&
                c.clock_wavelength > 0,
            "physical constants > 0");

    const auto& t = cfg.trap;
    require(t.nu_r > 0, "nu_r > 0");
    require(t.nu_z > t.nu_r, "nu_z > nu_r");
    require(t.depth_hbar_omega_z > 1.0, "trap depth U_r > hbar*omega_z");
    require(std::isfinite(t.misalignment), "misalignment finite");

    const auto& a = cfg.atoms;
    require(a.n_atoms >= 2, "n_atoms >= 2");
    require(a.n_atoms <= kMaxAtoms, "n_atoms <= " + std::to_string(kMaxAtoms));
    require(a.t_z_uk > 0 && a.t_r_uk > 0, "temperatures > 0");
    require(std::isfinite(a.a_eg_minus) && std::isfinite(a.b_gg) && std::isfinite(a.b_ee) &&
                std::isfinite(a.b_eg),
            "scattering lengths finite");

    const auto& p = cfg.protocol;
    require(p.grid.points >= 3, "detuning_points >= 3");
    require(p.grid.max_hz > p.grid.min_hz, "detuning grid strictly increasing");
    require(p.spin_truncation >= -1 && p.spin_truncation <= a.n_atoms / 2,
            "-1 <= spin_truncation <= floor(N/2)");
    require(p.mc.target_stderr_hz > 0, "target_stderr > 0");
    require(p.mc.min_samples >= 30 && p.mc.max_samples >= p.mc.min_samples,
            "30 <= min_samples <= max_samples");
    require(p.mc.bootstrap_resamples >= 10, "bootstrap_resamples >= 10");
    require(p.mc.batch >= 1, "batch >= 1");
    require(p.bare_rabi_hz > 0, "bare_rabi > 0");
    require(p.dark_time_s >= 0, "dark_time >= 0");
    require(!p.pulse_areas_pi.empty() || !p.pulse_times_s.empty(), "at least one pulse");
    for (double x : p.pulse_times_s) require(x >= 0, "pulse times >= 0");
    for (double x : p.pulse_areas_pi) require(x >= 0, "pulse areas >= 0");

    cfg.derived = derive_trap(cfg.trap, cfg.constants);
    require(cfg.derived.n_z_bands >= 1 && cfg.derived.n_r_bands >= 1, "band counts >= 1");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line) {
    double x = 0;
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("line " + std::to_string(line) + ": expected number, got '" + v + "'");
    return x;
}

long long to_int(const std::string& v, int line) {
    long long x = 0;
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("line " + std::to_string(line) + ": expected integer, got '" + v + "'");
    return x;
}

std::vector<double> to_list(const std::string& v, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(item, line));
    }
    return out;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

using Setter = std::function<void(Config&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"constants.hbar", [](Config& c, const std::string& v, int l) { c.constants.hbar = to_double(v, l); }},
        {"constants.k_b", [](Config& c, const std::string& v, int l) { c.constants.k_B = to_double(v, l); }},
        {"constants.atom_mass_kg", [](Config& c, const std::string& v, int l) { c.constants.atom_mass = to_double(v, l); }},
        {"constants.bohr_radius_m", [](Config& c, const std::string& v, int l) { c.constants.bohr_radius = to_double(v, l); }},
        {"constants.clock_wavelength_m", [](Config& c, const std::string& v, int l) { c.constants.clock_wavelength = to_double(v, l); }},
        {"trap.nu_z_hz", [](Config& c, const std::string& v, int l) { c.trap.nu_z = to_double(v, l); }},
        {"trap.nu_r_hz", [](Config& c, const std::string& v, int l) { c.trap.nu_r = to_double(v, l); }},
        {"trap.depth_hbar_omega_z", [](Config& c, const std::string& v, int l) { c.trap.depth_hbar_omega_z = to_double(v, l); }},
        {"trap.misalignment_rad", [](Config& c, const std::string& v, int l) { c.trap.misalignment = to_double(v, l); }},
        {"atoms.n", [](Config& c, const std::string& v, int l) { c.atoms.n_atoms = static_cast<int>(to_int(v, l)); }},
        {"atoms.t_z_uk", [](Config& c, const std::string& v, int l) { c.atoms.t_z_uk = to_double(v, l); }},
        {"atoms.t_r_uk", [](Config& c, const std::string& v, int l) { c.atoms.t_r_uk = to_double(v, l); }},
        {"atoms.a_eg_minus_bohr", [](Config& c, const std::string& v, int l) { c.atoms.a_eg_minus = to_double(v, l); }},
        {"atoms.b_gg_bohr", [](Config& c, const std::string& v, int l) { c.atoms.b_gg = to_double(v, l); }},
        {"atoms.b_ee_bohr", [](Config& c, const std::string& v, int l) { c.atoms.b_ee = to_double(v, l); }},
        {"atoms.b_eg_bohr", [](Config& c, const std::string& v, int l) { c.atoms.b_eg = to_double(v, l); }},
        {"protocol.kind", [](Config& c, const std::string& v, int) { c.protocol.protocol = parse_protocol(v); }},
        {"protocol.rabi_hz", [](Config& c, const std::string& v, int l) { c.protocol.bare_rabi_hz = to_double(v, l); }},
        {"protocol.dark_time_s", [](Config& c, const std::string& v, int l) { c.protocol.dark_time_s = to_double(v, l); }},
        {"protocol.pulse_times_s", [](Config& c, const std::string& v, int l) { c.protocol.pulse_times_s = to_list(v, l); }},
        {"protocol.pulse_areas_pi", [](Config& c, const std::string& v, int l) { c.protocol.pulse_areas_pi = to_list(v, l); }},
        {"protocol.second_area_pi", [](Config& c, const std::string& v, int l) { c.protocol.second_area_pi = to_double(v, l); }},
        {"protocol.detuning_min_hz", [](Config& c, const std::string& v, int l) { c.protocol.grid.min_hz = to_double(v, l); }},
        {"protocol.detuning_max_hz", [](Config& c, const std::string& v, int l) { c.protocol.grid.max_hz = to_double(v, l); }},
        {"protocol.detuning_points", [](Config& c, const std::string& v, int l) { c.protocol.grid.points = static_cast<int>(to_int(v, l)); }},
        {"protocol.spin_truncation", [](Config& c, const std::string& v, int l) { c.protocol.spin_truncation = static_cast<int>(to_int(v, l)); }},
        {"mc.max_samples", [](Config& c, const std::string& v, int l) { c.protocol.mc.max_samples = static_cast<int>(to_int(v, l)); }},
        {"mc.min_samples", [](Config& c, const std::string& v, int l) { c.protocol.mc.min_samples = static_cast<int>(to_int(v, l)); }},
        {"mc.target_stderr_hz", [](Config& c, const std::string& v, int l) { c.protocol.mc.target_stderr_hz = to_double(v, l); }},
        {"mc.seed", [](Config& c, const std::string& v, int l) { c.protocol.mc.master_seed = static_cast<std::uint64_t>(to_int(v, l)); }},
        {"mc.bootstrap_resamples", [](Config& c, const std::string& v, int l) { c.protocol.mc.bootstrap_resamples = static_cast<int>(to_int(v, l)); }},
        {"mc.batch", [](Config& c, const std::string& v, int l) { c.protocol.mc.batch = static_cast<int>(to_int(v, l)); }},
    };
    return table;
}

// Scattering parameters carry no default; they must appear in every file.
const char* const kRequiredKeys[] = {"trap.nu_z_hz", "trap.nu_r_hz", "trap.depth_hbar_omega_z",
                                     "atoms.n", "atoms.t_z_uk", "atoms.t_r_uk",
                                     "atoms.a_eg_minus_bohr", "atoms.b_gg_bohr",
                                     "atoms.b_ee_bohr", "atoms.b_eg_bohr"};

} // namespace

Config parse_config(const std::string& text) {
    Config cfg;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (seen.count(key))
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        seen[key] = line_no;
        it->second(cfg, value, line_no);
    }
    for (const char* key : kRequiredKeys) {
        if (!seen.count(key)) throw ConfigError(std::string("missing required key '") + key + "'");
    }
    // A Rabi probe without an explicit pulse is a pi pulse.
    const Protocol kind = cfg.protocol.protocol;
    if ((kind == Protocol::Rabi || kind == Protocol::CollectiveRabi) && !seen.count("protocol.pulse_areas_pi") &&
        !seen.count("protocol.pulse_times_s"))
        cfg.protocol.pulse_areas_pi = {1.0};
    validate(cfg);
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string serialize_config(const Config& cfg) {
    std::ostringstream o;
    const auto& c = cfg.constants;
    o << "constants.hbar = " << fmt(c.hbar) << "\n"
      << "constants.k_b = " << fmt(c.k_B) << "\n"
      << "constants.atom_mass_kg = " << fmt(c.atom_mass) << "\n"
      << "constants.bohr_radius_m = " << fmt(c.bohr_radius) << "\n"
      << "constants.clock_wavelength_m = " << fmt(c.clock_wavelength) << "\n";
    const auto& t = cfg.trap;
    o << "trap.nu_z_hz = " << fmt(t.nu_z) << "\n"
      << "trap.nu_r_hz = " << fmt(t.nu_r) << "\n"
      << "trap.depth_hbar_omega_z = " << fmt(t.depth_hbar_omega_z) << "\n"
      << "trap.misalignment_rad = " << fmt(t.misalignment) << "\n";
    const auto& a = cfg.atoms;
    o << "atoms.n = " << a.n_atoms << "\n"
      << "atoms.t_z_uk = " << fmt(a.t_z_uk) << "\n"
      << "atoms.t_r_uk = " << fmt(a.t_r_uk) << "\n"
      << "atoms.a_eg_minus_bohr = " << fmt(a.a_eg_minus) << "\n"
      << "atoms.b_gg_bohr = " << fmt(a.b_gg) << "\n"
      << "atoms.b_ee_bohr = " << fmt(a.b_ee) << "\n"
      << "atoms.b_eg_bohr = " << fmt(a.b_eg) << "\n";
    const auto& p = cfg.protocol;
    o << "protocol.kind = " << to_string(p.protocol) << "\n"
      << "protocol.rabi_hz = " << fmt(p.bare_rabi_hz) << "\n"
      << "protocol.dark_time_s = " << fmt(p.dark_time_s) << "\n";
    if (!p.pulse_times_s.empty()) o << "protocol.pulse_times_s = " << fmt_list(p.pulse_times_s) << "\n";
    if (!p.pulse_areas_pi.empty()) o << "protocol.pulse_areas_pi = " << fmt_list(p.pulse_areas_pi) << "\n";
    o << "protocol.second_area_pi = " << fmt(p.second_area_pi) << "\n"
      << "protocol.detuning_min_hz = " << fmt(p.grid.min_hz) << "\n"
      << "protocol.detuning_max_hz = " << fmt(p.grid.max_hz) << "\n"
      << "protocol.detuning_points = " << p.grid.points << "\n"
      << "protocol.spin_truncation = " << p.spin_truncation << "\n"
      << "mc.max_samples = " << p.mc.max_samples << "\n"
      << "mc.min_samples = " << p.mc.min_samples << "\n"
      << "mc.target_stderr_hz = " << fmt(p.mc.target_stderr_hz) << "\n"
      << "mc.seed = " << p.mc.master_seed << "\n"
      << "mc.bootstrap_resamples = " << p.mc.bootstrap_resamples << "\n"
      << "mc.batch = " << p.mc.batch << "\n";
    return o.str();
}

void apply_env_overrides(Config& cfg) {
    if (const char* s = std::getenv("MBSED_SEED"); s && *s) {
        cfg.protocol.mc.master_seed = static_cast<std::uint64_t>(std::strtoull(s, nullptr, 10));
    }
}

} // namespace mbsed

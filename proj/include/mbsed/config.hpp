#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbsed {

/// Largest atom number handled by the dense 2^N machinery.
inline constexpr int kMaxAtoms = 14;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PhysicalConstants {
    double hbar = 1.054571817e-34;          // J s
    double k_B = 1.380649e-23;              // J/K
    double atom_mass = 1.4431e-25;          // kg, 87Sr
    double bohr_radius = 5.29177210903e-11; // m
    double clock_wavelength = 698.4e-9;     // m

    double wavenumber() const;

    bool operator==(const PhysicalConstants&) const = default;
};

struct TrapConfig {
    double nu_z = 0.0;               // Hz
    double nu_r = 0.0;               // Hz
    double depth_hbar_omega_z = 0.0; // U_r in units of hbar*omega_z
    double misalignment = 0.0;       // rad

    bool operator==(const TrapConfig&) const = default;
};

/// Quantities derived from the trap and the constants; filled by validate().
struct TrapDerived {
    double omega_z = 0.0; // rad/s
    double omega_r = 0.0; // rad/s
    double depth = 0.0;   // J
    int n_z_bands = 0;    // floor(U_r / hbar omega_z)
    int n_r_bands = 0;    // floor(U_r / hbar omega_r)
    double r_z = 0.0;     // sqrt(m omega_z / hbar), 1/m
    double r_r = 0.0;     // sqrt(m omega_r / hbar), 1/m
    double k = 0.0;       // probe wavenumber, 1/m

    bool operator==(const TrapDerived&) const = default;
};

struct AtomConfig {
    int n_atoms = 0;
    double t_z_uk = 0.0; // microkelvin
    double t_r_uk = 0.0; // microkelvin
    // Scattering lengths in Bohr radii.
    double a_eg_minus = 0.0;
    double b_gg = 0.0;
    double b_ee = 0.0;
    double b_eg = 0.0;

    double t_z() const { return t_z_uk * 1e-6; } // K
    double t_r() const { return t_r_uk * 1e-6; } // K

    bool operator==(const AtomConfig&) const = default;
};

enum class Protocol { Ramsey, Rabi, CollectiveRamsey, CollectiveRabi, AnalyticRamsey };

std::string to_string(Protocol p);
Protocol parse_protocol(const std::string& text);

struct DetuningGrid {
    double min_hz = -1.0;
    double max_hz = 1.0;
    int points = 41;

    std::vector<double> values() const;
    double step() const { return (max_hz - min_hz) / (points - 1); }

    bool operator==(const DetuningGrid&) const = default;
};

struct MonteCarloConfig {
    int max_samples = 500;
    int min_samples = 30;
    double target_stderr_hz = 1e-3;
    std::uint64_t master_seed = 1;
    int bootstrap_resamples = 200;
    int batch = 32;

    bool operator==(const MonteCarloConfig&) const = default;
};

struct ProtocolConfig {
    Protocol protocol = Protocol::Ramsey;
    double bare_rabi_hz = 500.0;
    double dark_time_s = 0.12;
    // Explicit first-pulse (Ramsey) or pulse (Rabi) durations; when empty the
    // pulse areas below are used with the per-sample mean Rabi frequency.
    std::vector<double> pulse_times_s;
    // Pulse areas in units of pi.  Ramsey: first pulse.  Rabi: the probe pulse
    // (a parsed Rabi config without pulse keys gets a single pi pulse).
    std::vector<double> pulse_areas_pi = {0.5};
    // Ramsey second pulse area in units of pi (t2 = pi/(2 Omega_bar) by default).
    double second_area_pi = 0.5;
    DetuningGrid grid;
    int spin_truncation = -1; // keep S >= N/2 - m; -1 = full space
    MonteCarloConfig mc;

    bool operator==(const ProtocolConfig&) const = default;
};

struct Config {
    PhysicalConstants constants;
    TrapConfig trap;
    AtomConfig atoms;
    ProtocolConfig protocol;
    TrapDerived derived;

    /// Scattering length in metres.
    double length_si(double bohr_units) const { return bohr_units * constants.bohr_radius; }
    /// Scattering volume in cubic metres.
    double volume_si(double bohr_units) const;

    bool operator==(const Config&) const = default;
};

/// Validates all invariants and fills the derived trap quantities.
/// Throws ConfigError naming the violated invariant.
void validate(Config& cfg);

TrapDerived derive_trap(const TrapConfig& trap, const PhysicalConstants& c);

Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);
std::string serialize_config(const Config& cfg);

/// Applies MBSED_SEED from the environment, if set.
void apply_env_overrides(Config& cfg);

/// Areas (units of pi) whose ideal single-atom excitation fractions are
/// evenly spaced in [lo, hi].
std::vector<double> areas_for_excitation_scan(int points, double lo = 0.05, double hi = 0.95);

} // namespace mbsed

#include "cli.hpp"

#include "mbsed/csv.hpp"
#include "mbsed/sampler.hpp"
#include "mbsed/svg.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>

namespace mbsed::cli {

namespace {

// Lattice used for the main-text figures: nu_z = 66 kHz, nu_r = 250 Hz,
// 10 mrad misalignment, Omega_0 = 500 Hz, tau = 120 ms.
const char* kNstc = R"(
trap.nu_z_hz = 66000
trap.nu_r_hz = 250
trap.depth_hbar_omega_z = 5
trap.misalignment_rad = 0.010
atoms.n = 5
atoms.t_z_uk = 3
atoms.t_r_uk = 3
atoms.a_eg_minus_bohr = 68
atoms.b_gg_bohr = 73.8
atoms.b_ee_bohr = 150.19
atoms.b_eg_bohr = 192.34
protocol.kind = ramsey
protocol.rabi_hz = 500
protocol.dark_time_s = 0.12
protocol.detuning_min_hz = -0.5
protocol.detuning_max_hz = 0.5
protocol.detuning_points = 41
mc.seed = 20240601
)";

struct Recipe {
    std::string description;
    std::string expected;
    int default_samples;
    std::function<int(const std::filesystem::path&, int, Manifest&, bool)> run;
};

std::uint64_t g_seed = 20240601;

// Each recipe offsets the master seed so figures use independent streams.
Config base(int samples, std::uint64_t salt) {
    Config cfg = parse_config(kNstc);
    cfg.protocol.mc.max_samples = std::max(samples, 30);
    cfg.protocol.mc.min_samples = std::max(samples, 30);
    cfg.protocol.mc.target_stderr_hz = 1e-2;
    cfg.protocol.mc.master_seed = g_seed + salt;
    validate(cfg);
    return cfg;
}

Config ramsey_scan(Config cfg, int points) {
    cfg.protocol.protocol = Protocol::Ramsey;
    cfg.protocol.pulse_areas_pi = areas_for_excitation_scan(points);
    return cfg;
}

Config rabi_scan(Config cfg, double rabi_hz, int points) {
    cfg.protocol.protocol = Protocol::Rabi;
    cfg.protocol.bare_rabi_hz = rabi_hz;
    cfg.protocol.pulse_areas_pi = areas_for_excitation_scan(points, 0.1, 0.9);
    const double half = std::max(0.5 * rabi_hz, 0.4);
    cfg.protocol.grid = {-half, half, 41};
    return cfg;
}

void set_temperature(Config& cfg, double t_uk) {
    cfg.atoms.t_z_uk = t_uk;
    cfg.atoms.t_r_uk = t_uk;
}

/// Shared collector for one figure: every curve lands in curves.csv and in the plot.
class Curves {
public:
    explicit Curves(bool rescale) : rescale_(rescale) {}

    void add(const std::string& series, const ProtocolRun& run, int n_atoms) {
        PlotSeries s{series, {}, {}, {}};
        for (const auto& r : run.shifts) {
            const double f = rescale_ ? 1.0 / (n_atoms - 1) : 1.0;
            rows_.add({series, std::to_string(n_atoms), format_number(r.pe_op), format_number(r.shift_hz),
                       format_number(r.stderr_hz), format_number(r.shift_hz * f), format_number(r.stderr_hz * f),
                       std::to_string(r.n_samples)});
            s.x.push_back(r.pe_op);
            s.y.push_back(r.shift_hz * f);
            s.err.push_back(r.stderr_hz * f);
        }
        plot_.push_back(std::move(s));
    }

    void write(const std::filesystem::path& dir, Manifest& m, bool svg, const std::string& title) const {
        rows_.write(dir / "curves.csv");
        m.output("curves.csv");
        if (svg) {
            write_text_file(dir / "curves.svg",
                            line_plot_svg({title, "excitation fraction",
                                           rescale_ ? "shift / (N-1) (Hz)" : "shift (Hz)"},
                                          plot_));
            m.output("curves.svg");
        }
    }

private:
    bool rescale_;
    CsvWriter rows_{{"series", "N", "pe_op", "shift_hz", "shift_stderr_hz", "scaled_shift_hz", "scaled_stderr_hz",
                     "n_samples"}};
    std::vector<PlotSeries> plot_;
};

ProtocolRun run_curve(const Config& cfg, const std::string& label, const std::filesystem::path& dir, Manifest& m,
                      bool svg) {
    const ProtocolRun run = run_with_progress(cfg, label);
    for (const auto& p : write_run(run, cfg, dir, svg, label + "_")) m.output(p);
    return run;
}

/// Excitation fraction where the shift changes sign, by linear interpolation.
double zero_crossing(const ProtocolRun& run) {
    for (std::size_t k = 0; k + 1 < run.shifts.size(); ++k) {
        const auto& a = run.shifts[k];
        const auto& b = run.shifts[k + 1];
        if ((a.shift_hz <= 0.0) != (b.shift_hz <= 0.0))
            return a.pe_op + (b.pe_op - a.pe_op) * a.shift_hz / (a.shift_hz - b.shift_hz);
    }
    return std::nan("");
}

int fig1(const std::filesystem::path& dir, int samples, Manifest& m, bool svg) {
    Config cfg = base(30, 1);
    std::vector<double> t;
    for (int i = 0; i <= 8; ++i) t.push_back(1.0 + 0.5 * i);
    const auto map = rabi_inhomogeneity_map(cfg, t, t, samples);
    CsvWriter w({"T_z_uK", "T_r_uK", "mean_rabi_hz", "std_rabi_hz", "ratio"});
    std::vector<std::vector<double>> grid(t.size(), std::vector<double>(t.size()));
    for (std::size_t i = 0; i < map.size(); ++i) {
        const auto& p = map[i];
        w.add({format_number(p.t_z_uk), format_number(p.t_r_uk), format_number(p.mean_rabi_hz),
               format_number(p.std_rabi_hz), format_number(p.ratio())});
        grid[i % t.size()][i / t.size()] = p.ratio();
    }
    w.write(dir / "rabi_spread.csv");
    m.output("rabi_spread.csv");
    if (svg) {
        write_text_file(dir / "rabi_spread.svg", heatmap_svg({"Delta Omega / Omega_bar", "T_z (uK)", "T_r (uK)"}, t, t, grid));
        m.output("rabi_spread.svg");
    }
    return kOk;
}

int fig4(const std::filesystem::path& dir, int samples, Manifest& m, bool svg) {
    Curves curves(false);
    for (double tau : {0.02, 0.06, 0.12}) {
        Config cfg = ramsey_scan(base(samples, 4), 8);
        cfg.protocol.dark_time_s = tau;
        char label[32];
        std::snprintf(label, sizeof label, "tau_%03dms", static_cast<int>(std::lround(tau * 1e3)));
        curves.add(label, run_curve(cfg, label, dir, m, svg), cfg.atoms.n_atoms);
    }
    curves.write(dir, m, svg, "Ramsey shift vs dark time (3 uK, N = 5)");
    return kOk;
}

int fig5(const std::filesystem::path& dir, int samples, Manifest& m, bool svg) {
    Curves curves(false);
    for (double t : {1.0, 3.0, 5.0}) {
        for (Protocol p : {Protocol::Ramsey, Protocol::CollectiveRamsey}) {
            Config cfg = ramsey_scan(base(samples, 5), 8);
            set_temperature(cfg, t);
            cfg.protocol.protocol = p;
            const std::string label = std::string(p == Protocol::Ramsey ? "mbsed" : "collective") + "_T" +
                                      std::to_string(static_cast<int>(t)) + "uK";
            curves.add(label, run_curve(cfg, label, dir, m, svg), cfg.atoms.n_atoms);
        }
    }
    curves.write(dir, m, svg, "Ramsey: MBSED vs collective (N = 5)");
    return kOk;
}

int fig6(const std::filesystem::path& dir, int samples, Manifest& m, bool svg) {
    CsvWriter p0({"T_uK", "p0_mbsed", "p0_collective"});
    PlotSeries mb{"MBSED", {}, {}, {}}, co{"collective", {}, {}, {}};
    for (double t : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        double z[2];
        int i = 0;
        for (Protocol p : {Protocol::Ramsey, Protocol::CollectiveRamsey}) {
            Config cfg = ramsey_scan(base(samples, 6), 10);
            set_temperature(cfg, t);
            cfg.protocol.protocol = p;
            const std::string label = std::string(p == Protocol::Ramsey ? "mbsed" : "collective") + "_T" +
                                      std::to_string(static_cast<int>(t)) + "uK";
            z[i++] = zero_crossing(run_curve(cfg, label, dir, m, false));
        }
        p0.add({format_number(t), format_number(z[0]), format_number(z[1])});
        mb.x.push_back(t);
        mb.y.push_back(z[0]);
        co.x.push_back(t);
        co.y.push_back(z[1]);
    }
    p0.write(dir / "p0.csv");
    m.output("p0.csv");
    if (svg) {
        write_text_file(dir / "p0.svg", line_plot_svg({"Zero-shift excitation fraction", "T (uK)", "P_0"}, {mb, co}));
        m.output("p0.svg");
    }
    return kOk;
}

int atom_number_scan(const std::filesystem::path& dir, int samples, Manifest& m, bool svg, bool rabi) {
    Curves curves(true);
    CsvWriter lin({"N", "pe_op", "shift_hz", "shift_stderr_hz"});
    std::vector<double> ns, shifts;
    for (int n : {3, 4, 5, 6}) {
        Config cfg = rabi ? rabi_scan(base(samples, 7), 5.0, 8) : ramsey_scan(base(samples, 7), 8);
        cfg.atoms.n_atoms = n;
        validate(cfg);
        const std::string label = "N" + std::to_string(n);
        curves.add(label, run_curve(cfg, label, dir, m, svg), n);

        // Single operating point at P_e = 0.2 for the linearity check.
        cfg.protocol.pulse_areas_pi = areas_for_excitation_scan(1, 0.2, 0.2);
        const ProtocolRun one = run_with_progress(cfg, label + "_pe0.2");
        const auto& r = one.shifts.front();
        lin.add({std::to_string(n), format_number(r.pe_op), format_number(r.shift_hz), format_number(r.stderr_hz)});
        ns.push_back(n);
        shifts.push_back(r.shift_hz);
    }
    // Coefficient of determination of the straight-line fit.
    const double mx = (ns[0] + ns[1] + ns[2] + ns[3]) / 4.0;
    double my = 0.0;
    for (double s : shifts) my += s / 4.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        sxy += (ns[i] - mx) * (shifts[i] - my);
        sxx += (ns[i] - mx) * (ns[i] - mx);
        syy += (shifts[i] - my) * (shifts[i] - my);
    }
    const double r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    lin.write(dir / "linearity.csv");
    m.output("linearity.csv");
    m.note("linear_fit_r2", format_number(r2));
    curves.write(dir, m, svg, rabi ? "Rabi: rescaled shift vs N" : "Ramsey: rescaled shift vs N");
    std::printf("linear fit of shift vs N at P_e = 0.2: R^2 = %.4f\n", r2);
    return kOk;
}

int fig9(const std::filesystem::path& dir, int samples, Manifest& m, bool svg) {
    Curves curves(false);
    for (double rabi : {0.2, 2.0, 5.0, 10.0}) {
        Config cfg = rabi_scan(base(samples, 9), rabi, 8);
        char label[32];
        std::snprintf(label, sizeof label, "rabi_%gHz", rabi);
        curves.add(label, run_curve(cfg, label, dir, m, svg), cfg.atoms.n_atoms);
    }
    curves.write(dir, m, svg, "Rabi shift vs bare Rabi frequency (3 uK, N = 5)");
    return kOk;
}

int fig10(const std::filesystem::path& dir, int samples, Manifest& m, bool svg) {
    Curves curves(false);
    for (double t : {1.0, 3.0, 5.0}) {
        for (Protocol p : {Protocol::Rabi, Protocol::CollectiveRabi}) {
            Config cfg = rabi_scan(base(samples, 10), 5.0, 8);
            set_temperature(cfg, t);
            cfg.protocol.protocol = p;
            const std::string label = std::string(p == Protocol::Rabi ? "mbsed" : "collective") + "_T" +
                                      std::to_string(static_cast<int>(t)) + "uK";
            curves.add(label, run_curve(cfg, label, dir, m, svg), cfg.atoms.n_atoms);
        }
    }
    curves.write(dir, m, svg, "Rabi: MBSED vs collective (N = 5)");
    return kOk;
}

const std::map<std::string, Recipe>& recipes() {
    static const std::map<std::string, Recipe> r = {
        {"fig1", {"Delta Omega / Omega_bar over T_z, T_r in [1, 5] uK",
                  "ratio grows with T_z and T_r; above ~0.3 for T_r >= 3 uK", 100, fig1}},
        {"fig4", {"Ramsey shift vs excitation fraction for tau = 20, 60, 120 ms at 3 uK",
                  "curves differ at short tau; the 60 and 120 ms curves nearly coincide", 64, fig4}},
        {"fig5", {"Ramsey MBSED vs collective at 1, 3, 5 uK",
                  "agreement at 1 uK, growing deviation at higher temperature", 64, fig5}},
        {"fig6", {"Zero-shift excitation fraction vs temperature",
                  "collective P_0 ~ 0.643 at every T; MBSED P_0 below it and decreasing with T", 64, fig6}},
        {"fig7", {"Ramsey shift / (N-1) for N = 3..6 at 3 uK",
                  "rescaled curves collapse; shift vs N at P_e = 0.2 is linear", 64,
                  [](const std::filesystem::path& d, int s, Manifest& m, bool svg) {
                      return atom_number_scan(d, s, m, svg, false);
                  }}},
        {"fig9", {"Rabi shift for Omega_0 = 0.2, 2, 5, 10 Hz at 3 uK",
                  "2, 5 and 10 Hz curves converge; 0.2 Hz deviates", 64, fig9}},
        {"fig10", {"Rabi MBSED vs collective at 1, 3, 5 uK (Omega_0 = 5 Hz)",
                   "agreement at low temperature; collective overestimates at high temperature", 64, fig10}},
        {"fig11", {"Rabi shift / (N-1) for N = 3..6 at 3 uK",
                   "rescaled curves overlap only at high excitation fraction", 64,
                   [](const std::filesystem::path& d, int s, Manifest& m, bool svg) {
                       return atom_number_scan(d, s, m, svg, true);
                   }}},
    };
    return r;
}

} // namespace

std::vector<std::string> reproducible_figures() {
    std::vector<std::string> out;
    for (const auto& [k, v] : recipes()) out.push_back(k);
    return out;
}

int cmd_reproduce(const CommonOptions& opt, const std::string& figure, int samples) {
    const auto it = recipes().find(figure);
    if (it == recipes().end()) throw ConfigError("unknown figure '" + figure + "'");
    const Recipe& recipe = it->second;
    const int n = samples > 0 ? samples : recipe.default_samples;
    const std::filesystem::path dir = opt.out.empty() ? std::filesystem::path("runs") / figure : std::filesystem::path(opt.out);

    g_seed = opt.seed.value_or(20240601);
    Config snapshot = base(n, 0);
    Manifest manifest(opt, snapshot);
    manifest.note("figure", figure);
    manifest.note("description", recipe.description);
    manifest.note("expected", recipe.expected);
    manifest.note("samples", std::to_string(n));
    std::cout << figure << ": " << recipe.description << "\n";
    const int code = recipe.run(dir, n, manifest, opt.svg);
    manifest.write(dir);
    std::cout << "expected: " << recipe.expected << "\nwrote " << dir.string() << "\n";
    return code;
}

} // namespace mbsed::cli

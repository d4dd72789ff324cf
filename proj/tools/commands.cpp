#include "cli.hpp"

#include "mbsed/csv.hpp"
#include "mbsed/sampler.hpp"
#include "mbsed/svg.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <sstream>

#ifndef MBSED_VERSION
#define MBSED_VERSION "unknown"
#endif

namespace mbsed::cli {

namespace {

std::string now_iso() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::filesystem::path out_dir(const CommonOptions& opt) {
    return opt.out.empty() ? std::filesystem::path("mbsed_out") : std::filesystem::path(opt.out);
}

} // namespace

Config load(const CommonOptions& opt) {
    if (opt.config.empty()) throw ConfigError("--config is required");
    Config cfg = load_config(opt.config);
    apply_env_overrides(cfg);
    if (opt.seed) cfg.protocol.mc.master_seed = *opt.seed;
    validate(cfg);
    return cfg;
}

Manifest::Manifest(const CommonOptions& opt, const Config& cfg)
    : version_(MBSED_VERSION), command_(opt.command_line), started_(now_iso()),
      config_text_(serialize_config(cfg)), seed_(cfg.protocol.mc.master_seed) {}

void Manifest::output(const std::filesystem::path& file) { outputs_.push_back(file.generic_string()); }

void Manifest::note(const std::string& key, const std::string& value) { notes_.emplace_back(key, value); }

void Manifest::write(const std::filesystem::path& dir) const {
    std::ostringstream os;
    os << "version = " << version_ << "\n"
       << "command = " << command_ << "\n"
       << "master_seed = " << seed_ << "\n"
       << "started = " << started_ << "\n"
       << "finished = " << now_iso() << "\n";
    for (const auto& [k, v] : notes_) os << k << " = " << v << "\n";
    for (const auto& o : outputs_) os << "output = " << o << "\n";
    os << "config = config.cfg\n";
    write_text_file(dir / "manifest.txt", os.str());
    // The snapshot reruns the command bit-exactly: mbsed <cmd> --config <dir>/config.cfg
    write_text_file(dir / "config.cfg", config_text_);
}

ProtocolRun run_with_progress(const Config& cfg, const std::string& label) {
    const auto t0 = std::chrono::steady_clock::now();
    ProtocolRun run = run_protocol(cfg, Execution::Parallel, [&](std::size_t done, std::size_t max) {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::fprintf(stderr, "\r[%s] %zu/%zu samples, %.1f s", label.c_str(), done, max, s);
        std::fflush(stderr);
    });
    if (cfg.protocol.protocol != Protocol::AnalyticRamsey) std::fprintf(stderr, "\n");
    return run;
}

std::vector<std::filesystem::path> write_run(const ProtocolRun& run, const Config& cfg,
                                             const std::filesystem::path& dir, bool svg, const std::string& stem) {
    std::vector<std::filesystem::path> written;
    ShiftRowContext ctx{cfg.atoms.n_atoms, cfg.atoms.t_z_uk, cfg.atoms.t_r_uk};
    const std::filesystem::path shift = stem + "shift.csv";
    shift_csv(run.shifts, ctx).write(dir / shift);
    written.push_back(shift);

    for (std::size_t k = 0; k < run.spectra.size(); ++k) {
        char name[48];
        if (run.spectra.size() == 1)
            std::snprintf(name, sizeof name, "spectrum.csv");
        else
            std::snprintf(name, sizeof name, "spectrum_%03zu.csv", k);
        const std::filesystem::path p = stem + name;
        spectrum_csv(run.spectra[k]).write(dir / p);
        written.push_back(p);
    }

    if (svg) {
        PlotSeries s{to_string(run.protocol), {}, {}, {}};
        for (const auto& r : run.shifts) {
            s.x.push_back(r.pe_op);
            s.y.push_back(r.shift_hz);
            s.err.push_back(r.stderr_hz);
        }
        const std::filesystem::path p = stem + "shift.svg";
        write_text_file(dir / p, line_plot_svg({"Density shift", "excitation fraction", "shift (Hz)"}, {s}));
        written.push_back(p);
        if (!run.spectra.empty()) {
            std::vector<PlotSeries> spectra;
            for (std::size_t k = 0; k < run.spectra.size(); ++k)
                spectra.push_back({"P_e = " + format_number(run.shifts[k].pe_op).substr(0, 5), run.spectra[k].detuning_hz,
                                   run.spectra[k].pe_mean, {}});
            const std::filesystem::path q = stem + "spectrum.svg";
            write_text_file(dir / q, line_plot_svg({"Averaged spectra", "detuning (Hz)", "P_e"}, spectra));
            written.push_back(q);
        }
    }
    return written;
}

int cmd_sample_stats(const CommonOptions& opt, const std::vector<double>& tz, const std::vector<double>& tr,
                     int ensembles) {
    const Config cfg = load(opt);
    const auto dir = out_dir(opt);
    Manifest manifest(opt, cfg);

    const auto map = rabi_inhomogeneity_map(cfg, tz, tr, ensembles);
    CsvWriter w({"T_z_uK", "T_r_uK", "mean_rabi_hz", "std_rabi_hz", "ratio"});
    std::vector<std::vector<double>> grid(tr.size(), std::vector<double>(tz.size()));
    for (std::size_t i = 0; i < map.size(); ++i) {
        const auto& p = map[i];
        w.add({format_number(p.t_z_uk), format_number(p.t_r_uk), format_number(p.mean_rabi_hz),
               format_number(p.std_rabi_hz), format_number(p.ratio())});
        grid[i % tr.size()][i / tr.size()] = p.ratio();
    }
    w.write(dir / "rabi_spread.csv");
    manifest.output("rabi_spread.csv");

    // Pauli rejections at the configured temperature.
    const ProbabilityTable table = partition_table(cfg);
    long long rejected = 0;
    for (int k = 0; k < ensembles; ++k)
        rejected += draw_ensemble(table, cfg.atoms.n_atoms, cfg.protocol.mc.master_seed, static_cast<std::uint64_t>(k),
                                  cfg.derived, cfg.constants)
                        .rejections;
    const double rate = double(rejected) / double(rejected + ensembles);
    CsvWriter pw({"T_z_uK", "T_r_uK", "N", "ensembles", "rejected", "rejection_rate", "table_entries"});
    pw.add({format_number(cfg.atoms.t_z_uk), format_number(cfg.atoms.t_r_uk), std::to_string(cfg.atoms.n_atoms),
            std::to_string(ensembles), std::to_string(rejected), format_number(rate), std::to_string(table.size())});
    pw.write(dir / "pauli.csv");
    manifest.output("pauli.csv");

    if (opt.svg && tz.size() >= 2 && tr.size() >= 2) {
        write_text_file(dir / "rabi_spread.svg",
                        heatmap_svg({"Delta Omega / Omega_bar", "T_z (uK)", "T_r (uK)"}, tz, tr, grid));
        manifest.output("rabi_spread.svg");
    }
    manifest.write(dir);
    std::cout << "wrote " << (dir / "rabi_spread.csv").string() << " (" << map.size() << " grid points); "
              << "Pauli rejection rate " << rate << "\n";
    return kOk;
}

int cmd_couplings_dump(const CommonOptions& opt, int samples) {
    const Config cfg = load(opt);
    const auto dir = out_dir(opt);
    Manifest manifest(opt, cfg);
    const ProbabilityTable table = partition_table(cfg);

    CsvWriter modes({"sample", "atom", "nx", "ny", "nz", "energy_J", "rabi_hz"});
    CsvWriter pairs({"sample", "i", "j", "g_s", "g_p", "J_rad_s", "C_rad_s", "X_rad_s"});
    for (int k = 0; k < samples; ++k) {
        const SampleEnsemble e = draw_ensemble(table, cfg.atoms.n_atoms, cfg.protocol.mc.master_seed,
                                               static_cast<std::uint64_t>(k), cfg.derived, cfg.constants);
        const CouplingTables t = build_coupling_tables(e, cfg);
        for (int i = 0; i < t.size(); ++i) {
            const auto& s = e.states[static_cast<std::size_t>(i)];
            modes.add({std::to_string(k), std::to_string(i), std::to_string(s.nx), std::to_string(s.ny),
                       std::to_string(s.nz), format_number(s.energy), format_number(t.rabi_hz[i])});
            for (int j = i + 1; j < t.size(); ++j)
                pairs.add({std::to_string(k), std::to_string(i), std::to_string(j), format_number(t.g_s(i, j)),
                           format_number(t.g_p(i, j)), format_number(t.j(i, j)), format_number(t.c(i, j)),
                           format_number(t.x(i, j))});
        }
    }
    modes.write(dir / "modes.csv");
    pairs.write(dir / "couplings.csv");
    manifest.output("modes.csv");
    manifest.output("couplings.csv");
    manifest.write(dir);
    std::cout << "wrote " << samples << " ensemble(s) to " << dir.string() << "\n";
    return kOk;
}

int cmd_protocol(const CommonOptions& opt, std::optional<Protocol> kind, int scan_points) {
    Config cfg = load(opt);
    if (kind) cfg.protocol.protocol = *kind;
    if (scan_points > 0) {
        cfg.protocol.pulse_times_s.clear();
        cfg.protocol.pulse_areas_pi = areas_for_excitation_scan(scan_points);
    }
    validate(cfg);
    const auto dir = out_dir(opt);
    Manifest manifest(opt, cfg);

    const ProtocolRun run = run_with_progress(cfg, to_string(cfg.protocol.protocol));
    for (const auto& p : write_run(run, cfg, dir, opt.svg)) manifest.output(p);
    manifest.note("n_samples", std::to_string(run.n_samples));
    manifest.note("converged", run.converged ? "1" : "0");
    manifest.write(dir);

    for (const auto& r : run.shifts)
        std::printf("pe_op %.4f  shift %+.6f Hz  +- %.6f  (%zu samples)\n", r.pe_op, r.shift_hz, r.stderr_hz,
                    r.n_samples);
    if (!run.converged) {
        std::cerr << "warning: target standard error not reached within mc.max_samples\n";
        return kNotConverged;
    }
    return kOk;
}

int cmd_fit(const CommonOptions& opt, const std::string& data_path, int n_exp, int n_sim, int samples,
            const FitOptions& fo) {
    Config cfg = load(opt);
    if (n_sim > 0) cfg.atoms.n_atoms = n_sim;
    cfg.protocol.protocol = Protocol::Ramsey;
    if (cfg.protocol.spin_truncation < 0) cfg.protocol.spin_truncation = 1;
    validate(cfg);
    const ShiftDataset data = load_shift_dataset(data_path, n_exp, cfg.atoms.n_atoms);
    const auto dir = out_dir(opt);
    Manifest manifest(opt, cfg);

    SimulatedShiftModel model(cfg, samples);
    const FitResult fit = fit_scattering_lengths(data, model, fo);

    CsvWriter summary({"b_ee_bohr", "b_eg_bohr", "rss", "iterations", "converged", "degenerate", "evaluations"});
    summary.add({format_number(fit.b_ee), format_number(fit.b_eg), format_number(fit.rss),
                 std::to_string(fit.iterations), fit.converged ? "1" : "0", fit.degenerate ? "1" : "0",
                 std::to_string(model.evaluations())});
    summary.write(dir / "fit.csv");
    CsvWriter points({"pe", "shift_hz", "model_hz", "residual_hz"});
    for (std::size_t k = 0; k < data.rows.size(); ++k)
        points.add({format_number(data.rows[k].pe), format_number(data.rows[k].shift_hz),
                    format_number(fit.model_hz[k]), format_number(fit.residuals[k])});
    points.write(dir / "fit_points.csv");
    manifest.output("fit.csv");
    manifest.output("fit_points.csv");
    if (opt.svg) {
        PlotSeries measured{"data", {}, {}, {}}, model_line{"model", {}, {}, {}};
        for (std::size_t k = 0; k < data.rows.size(); ++k) {
            measured.x.push_back(data.rows[k].pe);
            measured.y.push_back(data.rows[k].shift_hz);
            if (!std::isnan(data.rows[k].sigma_hz)) measured.err.push_back(data.rows[k].sigma_hz);
            model_line.x.push_back(data.rows[k].pe);
            model_line.y.push_back(fit.model_hz[k]);
        }
        write_text_file(dir / "fit.svg",
                        line_plot_svg({"Scattering-length fit", "excitation fraction", "shift (Hz)"}, {measured, model_line}));
        manifest.output("fit.svg");
    }
    manifest.write(dir);

    std::printf("b_ee = %.4f a_B\nb_eg = %.4f a_B\nweighted RSS = %.6g\niterations = %d (%zu model evaluations)\n",
                fit.b_ee, fit.b_eg, fit.rss, fit.iterations, model.evaluations());
    if (fit.degenerate) std::printf("objective is flat around the optimum: parameters are not identified\n");
    if (!fit.converged) {
        std::cerr << "warning: simplex did not converge within the iteration budget\n";
        return kNotConverged;
    }
    return kOk;
}

} // namespace mbsed::cli

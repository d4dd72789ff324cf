#include "cli.hpp"

#include "mbsed/calibration.hpp"
#include "mbsed/csv.hpp"
#include "mbsed/sampler.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace mbsed;
using namespace mbsed::cli;

namespace {

void add_common(CLI::App* app, CommonOptions& opt, bool need_config) {
    auto* c = app->add_option("--config", opt.config, "configuration file");
    if (need_config) c->required()->check(CLI::ExistingFile);
    app->add_option("--out", opt.out, "output directory");
    app->add_option("--seed", opt.seed, "master seed (overrides mc.seed and MBSED_SEED)");
    app->add_option("--threads", opt.threads, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    app->add_flag("--svg", opt.svg, "also write SVG plots");
}

std::string joined(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-band sampling exact diagonalisation of collisional clock shifts"};
    app.require_subcommand(1);
    app.set_version_flag("--version", MBSED_VERSION);

    CommonOptions opt;
    opt.command_line = joined(argc, argv);

    auto* stats = app.add_subcommand("sample-stats", "Rabi-frequency inhomogeneity over a temperature grid");
    add_common(stats, opt, true);
    std::vector<double> tz{1, 2, 3, 4, 5}, tr{1, 2, 3, 4, 5};
    int ensembles = 200;
    stats->add_option("--tz", tz, "longitudinal temperatures (uK)")->delimiter(',');
    stats->add_option("--tr", tr, "transverse temperatures (uK)")->delimiter(',');
    stats->add_option("--ensembles", ensembles, "ensembles per grid point")->check(CLI::PositiveNumber);

    auto* dump = app.add_subcommand("couplings-dump", "Sampled modes and coupling tables");
    add_common(dump, opt, true);
    int dump_samples = 1;
    dump->add_option("--samples", dump_samples, "number of ensembles")->check(CLI::PositiveNumber);

    int scan = 0;
    auto* ramsey = app.add_subcommand("ramsey", "Ramsey spectroscopy (full spin model)");
    add_common(ramsey, opt, true);
    ramsey->add_option("--t1-scan", scan, "scan the first pulse over N excitation fractions")
        ->check(CLI::PositiveNumber);

    auto* rabi = app.add_subcommand("rabi", "Rabi spectroscopy (full spin model)");
    add_common(rabi, opt, true);
    rabi->add_option("--t-scan,--t1-scan", scan, "scan the pulse over N excitation fractions")
        ->check(CLI::PositiveNumber);

    bool collective_rabi = false;
    auto* collective = app.add_subcommand("collective", "Collective (Dicke-space) spectroscopy");
    add_common(collective, opt, true);
    collective->add_option("--t1-scan", scan, "scan the (first) pulse over N excitation fractions")
        ->check(CLI::PositiveNumber);
    collective->add_flag("--rabi", collective_rabi, "Rabi instead of Ramsey");

    auto* analytic = app.add_subcommand("analytic", "Closed-form collective Ramsey shift");
    add_common(analytic, opt, true);
    analytic->add_option("--t1-scan", scan, "scan the first pulse over N excitation fractions")
        ->check(CLI::PositiveNumber);

    auto* fit = app.add_subcommand("fit", "Fit b_ee and b_eg to measured shifts");
    add_common(fit, opt, true);
    std::string data;
    int n_exp = 20, n_sim = 0, fit_samples = 64;
    FitOptions fo;
    fit->add_option("--data", data, "CSV with pe,shift_hz[,sigma_hz]")->required()->check(CLI::ExistingFile);
    fit->add_option("--n-exp", n_exp, "atoms per site in the experiment");
    fit->add_option("--n-sim", n_sim, "simulated atoms (default: atoms.n)");
    fit->add_option("--samples", fit_samples, "frozen ensembles (common random numbers)")->check(CLI::PositiveNumber);
    fit->add_option("--b-ee0", fo.b_ee0, "initial b_ee (a_B)");
    fit->add_option("--b-eg0", fo.b_eg0, "initial b_eg (a_B)");
    fit->add_option("--b-ee-min", fo.b_ee_min);
    fit->add_option("--b-ee-max", fo.b_ee_max);
    fit->add_option("--b-eg-min", fo.b_eg_min);
    fit->add_option("--b-eg-max", fo.b_eg_max);
    fit->add_option("--max-iter", fo.max_iterations)->check(CLI::PositiveNumber);

    auto* reproduce = app.add_subcommand("reproduce", "Bundled figure recipes at reduced sample counts");
    add_common(reproduce, opt, false);
    std::string figure;
    int rep_samples = 0;
    reproduce->add_option("figure", figure, "figure id")->required()->check(CLI::IsMember(reproducible_figures()));
    reproduce->add_option("--samples", rep_samples, "samples per point (default: recipe value)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        if (e.get_exit_code() != 0) std::cerr << app.help();
        return kValidation;
    }

    try {
        if (opt.threads > 0) set_threads(opt.threads);
        if (*stats) return cmd_sample_stats(opt, tz, tr, ensembles);
        if (*dump) return cmd_couplings_dump(opt, dump_samples);
        if (*ramsey) return cmd_protocol(opt, Protocol::Ramsey, scan);
        if (*rabi) return cmd_protocol(opt, Protocol::Rabi, scan);
        if (*collective)
            return cmd_protocol(opt, collective_rabi ? Protocol::CollectiveRabi : Protocol::CollectiveRamsey, scan);
        if (*analytic) return cmd_protocol(opt, Protocol::AnalyticRamsey, scan);
        if (*fit) return cmd_fit(opt, data, n_exp, n_sim, fit_samples, fo);
        if (*reproduce) return cmd_reproduce(opt, figure, rep_samples);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const CalibrationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const ShiftError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const SamplerError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}

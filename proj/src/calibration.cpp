#include "mbsed/calibration.hpp"

#include "mbsed/csv.hpp"
#include "mbsed/sampler.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mbsed {

void ShiftDataset::validate() const {
    if (rows.size() < 4) throw CalibrationError("dataset needs at least 4 rows");
    for (const auto& r : rows) {
        if (!(r.pe > 0.0 && r.pe < 1.0)) throw CalibrationError("excitation fractions must lie in (0,1)");
        if (!std::isfinite(r.shift_hz)) throw CalibrationError("shift values must be finite");
        if (!std::isnan(r.sigma_hz) && !(r.sigma_hz > 0.0)) throw CalibrationError("uncertainties must be > 0");
    }
    if (n_sim < 2 || n_sim > kMaxAtoms) throw CalibrationError("N_sim out of range");
    if (n_exp < n_sim) throw CalibrationError("N_exp must be >= N_sim");
}

ShiftDataset load_shift_dataset(const std::filesystem::path& path, int n_exp, int n_sim) {
    const CsvTable table = read_csv(path);
    const int pe = table.column("pe");
    const int shift = table.column("shift_hz");
    const int sigma = table.find_column("sigma_hz");
    ShiftDataset d;
    d.n_exp = n_exp;
    d.n_sim = n_sim;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        ShiftRow row;
        row.pe = table.number(r, pe);
        row.shift_hz = table.number(r, shift);
        if (sigma >= 0) row.sigma_hz = table.number(r, sigma);
        d.rows.push_back(row);
    }
    d.validate();
    return d;
}

double rescale_shift(double shift_hz, int n_sim, int n_exp) {
    if (n_sim < 2 || n_exp < 2) throw CalibrationError("rescale_shift needs N >= 2");
    return shift_hz * double(n_exp - 1) / double(n_sim - 1);
}

SimulatedShiftModel::SimulatedShiftModel(const Config& cfg, int n_samples, Execution exec)
    : cfg_(cfg), exec_(exec) {
    if (n_samples < 1) throw CalibrationError("shift model needs samples");
    cfg_.protocol.protocol = Protocol::Ramsey;
    cfg_.protocol.pulse_times_s.clear();
    const ProbabilityTable table = partition_table(cfg_);
    geometry_.resize(static_cast<std::size_t>(n_samples));
    for_each_index(exec_, n_samples, [&](std::ptrdiff_t i) {
        const SampleEnsemble e = draw_ensemble(table, cfg_.atoms.n_atoms, cfg_.protocol.mc.master_seed,
                                               static_cast<std::uint64_t>(i), cfg_.derived, cfg_.constants);
        geometry_[static_cast<std::size_t>(i)] = build_geometry(e, cfg_);
    });
    sectors_ = sectors_for(cfg_);
}

double SimulatedShiftModel::mean_excitation(double area) const {
    double total = 0.0;
    for (const auto& g : geometry_) {
        const double mean = g.rabi_hz.mean();
        double s = 0.0;
        for (Eigen::Index i = 0; i < g.rabi_hz.size(); ++i) {
            const double v = std::sin(0.5 * std::numbers::pi * area * g.rabi_hz[i] / mean);
            s += v * v;
        }
        total += s / double(g.rabi_hz.size());
    }
    return total / double(geometry_.size());
}

double SimulatedShiftModel::area_for_excitation(double pe) const {
    double lo = 0.0, hi = 1.0;
    if (!(pe > 0.0) || pe > mean_excitation(hi))
        throw CalibrationError("excitation fraction " + std::to_string(pe) + " not reachable with a pulse <= pi");
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean_excitation(mid) < pe ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> SimulatedShiftModel::shifts(double b_ee, double b_eg, const std::vector<double>& pe) {
    ++evaluations_;
    Config cfg = cfg_;
    cfg.atoms.b_ee = b_ee;
    cfg.atoms.b_eg = b_eg;
    cfg.protocol.pulse_areas_pi.clear();
    for (double p : pe) cfg.protocol.pulse_areas_pi.push_back(area_for_excitation(p));

    const std::size_t n = geometry_.size();
    std::vector<SampleOutcome> outcomes(n);
    for_each_index(exec_, static_cast<std::ptrdiff_t>(n), [&](std::ptrdiff_t i) {
        const auto idx = static_cast<std::size_t>(i);
        const CouplingTables t = apply_scattering(geometry_[idx], cfg.atoms, cfg.constants);
        outcomes[idx] = simulate_tables(cfg, t, sectors_.get());
    });

    const auto grid = cfg.protocol.grid.values();
    std::vector<double> out;
    for (std::size_t k = 0; k < pe.size(); ++k) {
        PointSamples ps;
        for (auto& o : outcomes) ps.pe.push_back(o.pe[k]);
        out.push_back(parabolic_peak(grid, average_spectrum(ps, grid, n).pe_mean).location);
    }
    return out;
}

double fit_objective(const ShiftDataset& data, ShiftModel& model, double b_ee, double b_eg,
                     std::vector<double>* residuals, std::vector<double>* model_hz) {
    std::vector<double> pe;
    for (const auto& r : data.rows) pe.push_back(r.pe);
    const std::vector<double> sim = model.shifts(b_ee, b_eg, pe);
    if (sim.size() != pe.size()) throw CalibrationError("shift model returned the wrong number of points");
    double rss = 0.0;
    if (residuals) residuals->clear();
    if (model_hz) model_hz->clear();
    for (std::size_t k = 0; k < pe.size(); ++k) {
        const double m = rescale_shift(sim[k], data.n_sim, data.n_exp);
        const double res = m - data.rows[k].shift_hz;
        const double sigma = data.rows[k].sigma_hz;
        const double w = std::isnan(sigma) ? 1.0 : 1.0 / (sigma * sigma);
        rss += w * res * res;
        if (residuals) residuals->push_back(res);
        if (model_hz) model_hz->push_back(m);
    }
    return rss;
}

namespace {

struct FitContext {
    const ShiftDataset* data;
    ShiftModel* model;
    const FitOptions* opt;
    double best = HUGE_VAL;
    double best_ee = 0.0, best_eg = 0.0;
};

// Box constraints by clamping plus a quadratic wall, so the simplex is pushed
// back inside without seeing a discontinuity in the model.
double penalised(const gsl_vector* v, void* params) {
    auto* ctx = static_cast<FitContext*>(params);
    const FitOptions& o = *ctx->opt;
    const double ee = gsl_vector_get(v, 0), eg = gsl_vector_get(v, 1);
    const double cee = std::clamp(ee, o.b_ee_min, o.b_ee_max);
    const double ceg = std::clamp(eg, o.b_eg_min, o.b_eg_max);
    double f;
    try {
        f = fit_objective(*ctx->data, *ctx->model, cee, ceg);
    } catch (const ShiftError&) {
        return 1e30; // fringe left the detuning window
    }
    const double wall = (ee - cee) * (ee - cee) + (eg - ceg) * (eg - ceg);
    if (wall == 0.0 && f < ctx->best) {
        ctx->best = f;
        ctx->best_ee = cee;
        ctx->best_eg = ceg;
    }
    return f + wall * (1.0 + std::abs(f)) * 1e3;
}

struct SimplexRun {
    int iterations = 0;
    bool converged = false;
};

SimplexRun run_simplex(FitContext& ctx, double ee, double eg, double step, int max_iter) {
    gsl_multimin_function fn{&penalised, 2, &ctx};
    gsl_vector* x = gsl_vector_alloc(2);
    gsl_vector* ss = gsl_vector_alloc(2);
    gsl_vector_set(x, 0, ee);
    gsl_vector_set(x, 1, eg);
    gsl_vector_set_all(ss, step);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
    gsl_multimin_fminimizer_set(s, &fn, x, ss);

    SimplexRun run;
    int status = GSL_CONTINUE;
    while (status == GSL_CONTINUE && run.iterations < max_iter) {
        ++run.iterations;
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), ctx.opt->size_tolerance);
    }
    run.converged = status == GSL_SUCCESS;
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(ss);
    gsl_vector_free(x);
    return run;
}

} // namespace

FitResult fit_scattering_lengths(const ShiftDataset& data, ShiftModel& model, const FitOptions& options) {
    data.validate();
    if (options.b_ee_min >= options.b_ee_max || options.b_eg_min >= options.b_eg_max)
        throw CalibrationError("empty fit bounds");
    gsl_set_error_handler_off();

    FitContext ctx{&data, &model, &options};
    FitResult result;
    double ee = std::clamp(options.b_ee0, options.b_ee_min, options.b_ee_max);
    double eg = std::clamp(options.b_eg0, options.b_eg_min, options.b_eg_max);
    double step = options.initial_step;
    SimplexRun run = run_simplex(ctx, ee, eg, step, options.max_iterations);
    result.iterations = run.iterations;
    result.converged = run.converged;

    // Restart from the best point with a fresh, smaller simplex while that helps.
    for (int r = 0; r < options.restarts && result.iterations < options.max_iterations; ++r) {
        const double before = ctx.best;
        step *= 0.5;
        run = run_simplex(ctx, ctx.best_ee, ctx.best_eg, step, options.max_iterations - result.iterations);
        result.iterations += run.iterations;
        result.converged = run.converged;
        if (!(ctx.best < before * (1.0 - 1e-9))) break;
    }

    result.b_ee = ctx.best_ee;
    result.b_eg = ctx.best_eg;
    result.rss = fit_objective(data, model, result.b_ee, result.b_eg, &result.residuals, &result.model_hz);

    // Flat objective: probing one step in every direction changes nothing.
    double spread = 0.0;
    for (const auto& [dee, deg] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
        const double pe = std::clamp(result.b_ee + dee * options.initial_step, options.b_ee_min, options.b_ee_max);
        const double pg = std::clamp(result.b_eg + deg * options.initial_step, options.b_eg_min, options.b_eg_max);
        try {
            spread = std::max(spread, std::abs(fit_objective(data, model, pe, pg) - result.rss));
        } catch (const ShiftError&) {
            spread = HUGE_VAL;
        }
    }
    result.degenerate = spread <= 1e-14 * std::max(1.0, result.rss);
    return result;
}

} // namespace mbsed

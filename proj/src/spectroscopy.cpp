#include "mbsed/spectroscopy.hpp"

#include "mbsed/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mbsed {

namespace {

constexpr double kPi = std::numbers::pi;

double mean_first_pulse_excitation(const Eigen::VectorXd& rabi_hz, double t1) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < rabi_hz.size(); ++i) {
        const double s = std::sin(kPi * rabi_hz[i] * t1);
        sum += s * s;
    }
    return sum / double(rabi_hz.size());
}

bool is_collective(Protocol p) { return p == Protocol::CollectiveRamsey || p == Protocol::CollectiveRabi; }
bool is_ramsey(Protocol p) { return p == Protocol::Ramsey || p == Protocol::CollectiveRamsey; }

} // namespace

std::vector<OperatingPoint> operating_points(const ProtocolConfig& p) {
    std::vector<OperatingPoint> out;
    if (!p.pulse_times_s.empty()) {
        for (double t : p.pulse_times_s) out.push_back({0.0, t, true});
    } else {
        for (double a : p.pulse_areas_pi) out.push_back({a, 0.0, false});
    }
    return out;
}

std::shared_ptr<const SpinSectorBasis> sectors_for(const Config& cfg) {
    const int m = cfg.protocol.spin_truncation;
    if (m < 0 || is_collective(cfg.protocol.protocol)) return nullptr;
    return std::make_shared<const SpinSectorBasis>(spin_sector_basis(cfg.atoms.n_atoms, m));
}

SampleOutcome simulate_tables(const Config& cfg, const CouplingTables& tables, const SpinSectorBasis* sectors) {
    const ProtocolConfig& p = cfg.protocol;
    const auto points = operating_points(p);
    const auto grid = p.grid.values();
    const int n = tables.size();
    const double rabi = tables.mean_rabi_hz();

    SampleOutcome out;
    out.pe.assign(points.size(), std::vector<double>(grid.size(), 0.0));
    out.pe_op.resize(points.size());
    out.pulse_time_s.resize(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
        out.pulse_time_s[k] = points[k].duration(rabi);
        out.pe_op[k] = mean_first_pulse_excitation(tables.rabi_hz, out.pulse_time_s[k]);
    }
    const double t2 = p.second_area_pi / (2.0 * rabi);

    switch (p.protocol) {
    case Protocol::Ramsey: {
        const DarkEvolver dark(tables, sectors);
        for (std::size_t k = 0; k < points.size(); ++k)
            for (std::size_t d = 0; d < grid.size(); ++d)
                out.pe[k][d] = ramsey_excitation(tables, dark, grid[d], out.pulse_time_s[k], p.dark_time_s, t2);
        break;
    }
    case Protocol::CollectiveRamsey: {
        const double x = tables.mean_x(), c = tables.mean_c();
        for (std::size_t k = 0; k < points.size(); ++k) {
            out.pe_op[k] = std::pow(std::sin(kPi * rabi * out.pulse_time_s[k]), 2);
            for (std::size_t d = 0; d < grid.size(); ++d)
                out.pe[k][d] = collective_ramsey_excitation(rabi, x, c, n, grid[d], out.pulse_time_s[k],
                                                            p.dark_time_s, t2);
        }
        break;
    }
    case Protocol::Rabi: {
        // The driven Hamiltonian does not depend on the pulse length, so one
        // diagonalisation per detuning serves every operating point.
        Matrix basis;
        std::vector<int> ups;
        if (sectors) {
            basis = sectors->dense();
            ups = sectors->column_up_counts();
        }
        for (std::size_t d = 0; d < grid.size(); ++d) {
            const HamiltonianMatrix h = build_full_hamiltonian(tables, grid[d], true);
            if (!sectors) {
                const EigenSystem es = diagonalize(h.h);
                const CVector psi0 = ground_state(n);
                for (std::size_t k = 0; k < points.size(); ++k)
                    out.pe[k][d] = excitation_fraction(evolve(es, psi0, out.pulse_time_s[k]), n);
            } else {
                const EigenSystem es = diagonalize(basis.transpose() * h.h * basis);
                const CVector c0 = basis.row(0).transpose().cast<std::complex<double>>();
                for (std::size_t k = 0; k < points.size(); ++k) {
                    const CVector c = evolve(es, c0, out.pulse_time_s[k]);
                    double up = 0.0, norm = 0.0;
                    for (Eigen::Index j = 0; j < c.size(); ++j) {
                        norm += std::norm(c[j]);
                        up += std::norm(c[j]) * ups[static_cast<std::size_t>(j)];
                    }
                    out.pe[k][d] = up / (n * norm);
                }
            }
        }
        break;
    }
    case Protocol::CollectiveRabi: {
        const double x = tables.mean_x(), c = tables.mean_c();
        for (std::size_t d = 0; d < grid.size(); ++d) {
            const EigenSystem es =
                diagonalize(build_collective_hamiltonian(rabi, x, c, n, grid[d], true).h);
            for (std::size_t k = 0; k < points.size(); ++k)
                out.pe[k][d] = dicke_excitation_fraction(evolve(es, dicke_ground_state(n), out.pulse_time_s[k]), n);
        }
        break;
    }
    case Protocol::AnalyticRamsey:
        throw ShiftError("analytic protocol has no spectra");
    }
    return out;
}

ProtocolRun run_protocol(const Config& cfg, Execution exec, const ProgressFn& progress) {
    if (cfg.protocol.protocol == Protocol::AnalyticRamsey) return run_analytic(cfg, exec);

    const MonteCarloConfig& mc = cfg.protocol.mc;
    const auto grid = cfg.protocol.grid.values();
    const auto points = operating_points(cfg.protocol);
    const ProbabilityTable table = partition_table(cfg);
    const auto sectors = sectors_for(cfg);

    std::vector<PointSamples> store(points.size());
    std::size_t n = 0;
    ProtocolRun run;
    run.protocol = cfg.protocol.protocol;
    run.points = points;

    for (;;) {
        const std::size_t target = n == 0
            ? static_cast<std::size_t>(mc.min_samples)
            : std::min<std::size_t>(n + static_cast<std::size_t>(mc.batch), static_cast<std::size_t>(mc.max_samples));
        std::vector<SampleOutcome> batch(target - n);
        for_each_index(exec, static_cast<std::ptrdiff_t>(batch.size()), [&](std::ptrdiff_t i) {
            const std::uint64_t index = n + static_cast<std::uint64_t>(i);
            const SampleEnsemble e = draw_ensemble(table, cfg.atoms.n_atoms, mc.master_seed, index, cfg.derived,
                                                   cfg.constants);
            batch[static_cast<std::size_t>(i)] = simulate_tables(cfg, build_coupling_tables(e, cfg), sectors.get());
        });
        for (auto& s : batch) {
            for (std::size_t k = 0; k < points.size(); ++k) {
                store[k].pe.push_back(std::move(s.pe[k]));
                store[k].pe_op.push_back(s.pe_op[k]);
                store[k].pulse_time_s.push_back(s.pulse_time_s[k]);
            }
        }
        n = target;
        if (progress) progress(n, static_cast<std::size_t>(mc.max_samples));

        ConvergenceDecision d = assess_convergence(store, grid, n, mc, cfg.protocol.protocol);
        if (d.stop) {
            run.spectra = std::move(d.spectra);
            run.shifts = std::move(d.shifts);
            run.converged = d.converged;
            run.n_samples = n;
            break;
        }
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
        auto& r = run.shifts[k];
        r.tau_s = is_ramsey(run.protocol) ? cfg.protocol.dark_time_s : 0.0;
        r.area_pi = points[k].area_pi;
        // Rabi: the operating point is the excitation at the spectral peak.
        if (!is_ramsey(run.protocol)) r.pe_op = parabolic_peak(run.spectra[k].detuning_hz, run.spectra[k].pe_mean).value;
    }
    return run;
}

ProtocolRun run_ramsey(const Config& cfg, Execution exec) {
    if (cfg.protocol.protocol != Protocol::Ramsey) throw ConfigError("run_ramsey needs protocol = ramsey");
    return run_protocol(cfg, exec);
}

ProtocolRun run_rabi(const Config& cfg, Execution exec) {
    if (cfg.protocol.protocol != Protocol::Rabi) throw ConfigError("run_rabi needs protocol = rabi");
    return run_protocol(cfg, exec);
}

ProtocolRun run_collective(const Config& cfg, Execution exec) {
    if (!is_collective(cfg.protocol.protocol))
        throw ConfigError("run_collective needs protocol = collective-ramsey or collective-rabi");
    return run_protocol(cfg, exec);
}

double analytic_ramsey_shift(double rabi, double x, double c, int n, double t1, double tau) {
    const double ct = std::cos(2.0 * kPi * rabi * t1);
    double l;
    if (tau == 0.0) {
        l = x * ct;
    } else {
        // Phase of cos(X tau) + i cos(theta) sin(X tau), unwrapped along X tau so
        // the branch follows the small-tau limit X cos(theta).
        // Each half turn of X tau adds +-pi, with the sign of cos(theta).
        const double xt = x * tau;
        const double turns = std::round(xt / kPi);
        const double rest = xt - turns * kPi;
        const double sign = ct > 0.0 ? 1.0 : (ct < 0.0 ? -1.0 : 0.0);
        l = (std::atan2(ct * std::sin(rest), std::cos(rest)) + turns * kPi * sign) / tau;
    }
    return (n - 1) * (l - c) / (2.0 * kPi);
}

double collective_zero_shift_fraction(double mean_x, double mean_c) {
    const double ratio = mean_c / mean_x;
    if (!(std::abs(ratio) <= 1.0)) throw ShiftError("no zero crossing: |C/X| > 1");
    return 0.5 * (1.0 - ratio);
}

ProtocolRun run_analytic(const Config& cfg, Execution exec) {
    const MonteCarloConfig& mc = cfg.protocol.mc;
    const auto points = operating_points(cfg.protocol);
    const ProbabilityTable table = partition_table(cfg);
    const auto n = static_cast<std::size_t>(mc.max_samples);
    const int atoms = cfg.atoms.n_atoms;

    std::vector<std::vector<double>> shift(points.size(), std::vector<double>(n));
    std::vector<std::vector<double>> pe(points.size(), std::vector<double>(n));
    std::vector<std::vector<double>> times(points.size(), std::vector<double>(n));
    for_each_index(exec, static_cast<std::ptrdiff_t>(n), [&](std::ptrdiff_t i) {
        const auto idx = static_cast<std::size_t>(i);
        const SampleEnsemble e = draw_ensemble(table, atoms, mc.master_seed, idx, cfg.derived, cfg.constants);
        const CouplingTables t = build_coupling_tables(e, cfg);
        const double rabi = t.mean_rabi_hz();
        for (std::size_t k = 0; k < points.size(); ++k) {
            const double t1 = points[k].duration(rabi);
            times[k][idx] = t1;
            pe[k][idx] = std::pow(std::sin(kPi * rabi * t1), 2);
            shift[k][idx] = analytic_ramsey_shift(rabi, t.mean_x(), t.mean_c(), atoms, t1, cfg.protocol.dark_time_s);
        }
    });

    ProtocolRun run;
    run.protocol = Protocol::AnalyticRamsey;
    run.points = points;
    run.n_samples = n;
    run.converged = true;
    for (std::size_t k = 0; k < points.size(); ++k) {
        ShiftResult r;
        r.protocol = Protocol::AnalyticRamsey;
        r.n_samples = n;
        r.shift_hz = compensated_sum(shift[k]) / double(n);
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = (shift[k][i] - r.shift_hz) * (shift[k][i] - r.shift_hz);
        r.stderr_hz = n > 1 ? std::sqrt(compensated_sum(sq) / double(n - 1) / double(n)) : 0.0;
        r.pe_op = compensated_sum(pe[k]) / double(n);
        r.pulse_time_s = compensated_sum(times[k]) / double(n);
        r.tau_s = cfg.protocol.dark_time_s;
        r.area_pi = points[k].area_pi;
        run.shifts.push_back(r);
    }
    return run;
}

} // namespace mbsed

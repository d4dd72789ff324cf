#include "mbsed/sampler.hpp"

#include "mbsed/couplings.hpp"
#include "mbsed/rng.hpp"

#include <algorithm>
#include <cmath>

namespace mbsed {

MotionalState make_state(int nx, int ny, int nz, const TrapDerived& trap, const PhysicalConstants& c) {
    MotionalState s;
    s.nx = nx;
    s.ny = ny;
    s.nz = nz;
    s.energy = c.hbar * trap.omega_z * (nz + 0.5) + c.hbar * trap.omega_r * (nx + ny + 1.0);
    return s;
}

std::size_t ProbabilityTable::lookup(double u) const {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

long long ProbabilityTable::distinct_states() const {
    long long n = 0;
    for (int r : nr) n += r + 1;
    return n;
}

double ProbabilityTable::probability(int n_z, int n_r) const {
    for (std::size_t i = 0; i < prob.size(); ++i) {
        if (nz[i] == n_z && nr[i] == n_r) return prob[i];
    }
    return 0.0;
}

std::vector<double> ProbabilityTable::nz_marginal() const {
    const int max_nz = nz.empty() ? 0 : *std::max_element(nz.begin(), nz.end());
    std::vector<double> m(max_nz + 1, 0.0);
    for (std::size_t i = 0; i < prob.size(); ++i) m[nz[i]] += prob[i];
    return m;
}

ProbabilityTable partition_table(const TrapDerived& trap, const PhysicalConstants& c,
                                 double t_z_kelvin, double t_r_kelvin) {
    const double ez = c.hbar * trap.omega_z;
    const double er = c.hbar * trap.omega_r;
    ProbabilityTable t;
    std::vector<double> log_w;
    // Strictly bound: a level within rounding of the depth counts as unbound.
    const double bound = trap.depth * (1.0 - 1e-12);
    for (int n_z = 0; ez * (n_z + 0.5) + er < bound; ++n_z) {
        for (int n_r = 0; ez * (n_z + 0.5) + er * (n_r + 1.0) < bound; ++n_r) {
            t.nz.push_back(n_z);
            t.nr.push_back(n_r);
            log_w.push_back(std::log(n_r + 1.0) - ez * (n_z + 0.5) / (c.k_B * t_z_kelvin) -
                            er * (n_r + 1.0) / (c.k_B * t_r_kelvin));
        }
    }
    if (log_w.empty()) throw SamplerError("empty partition table: trap too shallow");

    const double top = *std::max_element(log_w.begin(), log_w.end());
    t.prob.resize(log_w.size());
    double total = 0.0;
    for (std::size_t i = 0; i < log_w.size(); ++i) {
        t.prob[i] = std::exp(log_w[i] - top);
        total += t.prob[i];
    }
    t.cdf.resize(t.prob.size());
    double run = 0.0;
    for (std::size_t i = 0; i < t.prob.size(); ++i) {
        t.prob[i] /= total;
        run += t.prob[i];
        t.cdf[i] = run;
    }
    t.cdf.back() = 1.0;
    return t;
}

ProbabilityTable partition_table(const Config& cfg) {
    return partition_table(cfg.derived, cfg.constants, cfg.atoms.t_z(), cfg.atoms.t_r());
}

SampleEnsemble draw_ensemble(const ProbabilityTable& table, int n_atoms, std::uint64_t master_seed,
                             std::uint64_t sample_index, const TrapDerived& trap,
                             const PhysicalConstants& c) {
    if (n_atoms < 1) throw SamplerError("ensemble needs at least one atom");
    if (table.distinct_states() < n_atoms)
        throw SamplerError("cannot place " + std::to_string(n_atoms) + " distinct atoms in " +
                           std::to_string(table.distinct_states()) + " admissible states");

    constexpr int kMaxAttempts = 1000;
    SampleEnsemble e;
    e.sample_index = sample_index;
    e.rng_seed = splitmix64(master_seed ^ splitmix64(sample_index));
    StreamRng rng(master_seed, sample_index);
    e.states.resize(n_atoms);

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        for (auto& s : e.states) {
            const std::size_t k = table.lookup(rng.uniform());
            const int n_r = table.nr[k];
            const int nx = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_r) + 1));
            s = make_state(nx, n_r - nx, table.nz[k], trap, c);
        }
        bool distinct = true;
        for (int i = 0; i < n_atoms && distinct; ++i) {
            for (int j = i + 1; j < n_atoms; ++j) {
                if (e.states[i].same_mode(e.states[j])) {
                    distinct = false;
                    break;
                }
            }
        }
        if (distinct) return e;
        ++e.rejections;
    }
    throw SamplerError("Pauli rejection rate above 50% over " + std::to_string(kMaxAttempts) +
                       " attempts; configuration is pathologically degenerate");
}

std::vector<RabiSpreadPoint> rabi_inhomogeneity_map(const Config& cfg,
                                                    const std::vector<double>& t_z_uk,
                                                    const std::vector<double>& t_r_uk,
                                                    int ensembles, Execution exec) {
    const std::ptrdiff_t nz = static_cast<std::ptrdiff_t>(t_z_uk.size());
    const std::ptrdiff_t nr = static_cast<std::ptrdiff_t>(t_r_uk.size());
    std::vector<RabiSpreadPoint> out(static_cast<std::size_t>(nz * nr));

    for_each_index(exec, nz * nr, [&](std::ptrdiff_t idx) {
        const double tz = t_z_uk[idx / nr];
        const double tr = t_r_uk[idx % nr];
        const ProbabilityTable table = partition_table(cfg.derived, cfg.constants, tz * 1e-6, tr * 1e-6);
        // Welford accumulation in draw order keeps the result schedule-independent.
        double mean = 0.0, m2 = 0.0;
        long long count = 0;
        for (int k = 0; k < ensembles; ++k) {
            const SampleEnsemble e = draw_ensemble(table, cfg.atoms.n_atoms, cfg.protocol.mc.master_seed,
                                                   static_cast<std::uint64_t>(k), cfg.derived, cfg.constants);
            for (const auto& s : e.states) {
                const double w = rabi_frequency(s, cfg.protocol.bare_rabi_hz, cfg.derived,
                                                cfg.trap.misalignment);
                ++count;
                const double d = w - mean;
                mean += d / count;
                m2 += d * (w - mean);
            }
        }
        RabiSpreadPoint p;
        p.t_z_uk = tz;
        p.t_r_uk = tr;
        p.mean_rabi_hz = mean;
        p.std_rabi_hz = count > 1 ? std::sqrt(m2 / (count - 1)) : 0.0;
        out[static_cast<std::size_t>(idx)] = p;
    });
    return out;
}

} // namespace mbsed

#pragma once

#include "mbsed/config.hpp"
#include "mbsed/parallel.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mbsed {

class SamplerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MotionalState {
    int nx = 0;
    int ny = 0;
    int nz = 0;
    double energy = 0.0; // J

    int nr() const { return nx + ny; }
    bool same_mode(const MotionalState& o) const { return nx == o.nx && ny == o.ny && nz == o.nz; }
};

MotionalState make_state(int nx, int ny, int nz, const TrapDerived& trap, const PhysicalConstants& c);

/// Normalised Boltzmann weights over (n_z, n_r), including the n_r + 1
/// transverse degeneracy, restricted to states below the trap depth.
struct ProbabilityTable {
    std::vector<int> nz;
    std::vector<int> nr;
    std::vector<double> prob;
    std::vector<double> cdf;

    std::size_t size() const { return prob.size(); }
    /// Entry index for a uniform variate in [0,1).
    std::size_t lookup(double u) const;
    /// Number of distinct (n_x, n_y, n_z) states covered by the table.
    long long distinct_states() const;
    double probability(int n_z, int n_r) const;
    std::vector<double> nz_marginal() const;
};

ProbabilityTable partition_table(const TrapDerived& trap, const PhysicalConstants& c,
                                 double t_z_kelvin, double t_r_kelvin);
ProbabilityTable partition_table(const Config& cfg);

struct SampleEnsemble {
    std::vector<MotionalState> states;
    std::uint64_t sample_index = 0;
    std::uint64_t rng_seed = 0;
    int rejections = 0; // Pauli-rejected redraws before acceptance
};

/// Draws N pairwise-distinct motional states.  The whole ensemble is redrawn
/// whenever two atoms share a mode.
SampleEnsemble draw_ensemble(const ProbabilityTable& table, int n_atoms, std::uint64_t master_seed,
                             std::uint64_t sample_index, const TrapDerived& trap,
                             const PhysicalConstants& c);

struct RabiSpreadPoint {
    double t_z_uk = 0.0;
    double t_r_uk = 0.0;
    double mean_rabi_hz = 0.0;
    double std_rabi_hz = 0.0;
    double ratio() const { return std_rabi_hz / mean_rabi_hz; }
};

/// Delta Omega / Omega_bar over a temperature grid.  Each grid point pools the
/// Rabi frequencies of `ensembles` thermal ensembles of cfg.atoms.n_atoms atoms.
std::vector<RabiSpreadPoint> rabi_inhomogeneity_map(const Config& cfg,
                                                    const std::vector<double>& t_z_uk,
                                                    const std::vector<double>& t_r_uk,
                                                    int ensembles,
                                                    Execution exec = Execution::Parallel);

} // namespace mbsed

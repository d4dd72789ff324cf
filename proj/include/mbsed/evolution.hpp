#pragma once

#include "mbsed/sectors.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mbsed {

using CVector = Eigen::VectorXcd;

struct EigenSystem {
    Eigen::VectorXd values;
    Matrix vectors; // columns orthonormal
};

/// Dense symmetric eigendecomposition; throws on solver failure or a
/// non-symmetric input.
EigenSystem diagonalize(const Matrix& h);

/// psi(t) = V exp(-i Lambda t) V^T psi0.
CVector evolve(const EigenSystem& es, const CVector& psi0, double t);

/// |down ... down> in the 2^N product basis.
CVector ground_state(int n_atoms);

/// P_e = <sum S^z>/N + 1/2 for a product-basis state.  Normalises by |psi|^2,
/// which matters after a truncated step.
double excitation_fraction(const CVector& psi, int n_atoms);

/// Independent single-atom pulses under H_i = -2 pi delta S^z_i - 2 pi Omega_i S^x_i,
/// applied as exact 2x2 rotations.  Interactions are neglected during the pulse.
void apply_pulse(CVector& psi, const Eigen::VectorXd& rabi_hz, double detuning_hz, double duration_s);

/// Free evolution under the interaction Hamiltonian.  Each magnetisation
/// block is diagonalised once; a detuning only adds -2 pi delta M to the
/// block energies, so a whole detuning sweep reuses the same eigenvectors.
/// With a sector basis the evolution is confined to the kept sectors and
/// the out-of-sector component is dropped.
class DarkEvolver {
public:
    explicit DarkEvolver(const CouplingTables& tables, const SpinSectorBasis* sectors = nullptr);

    void evolve(CVector& psi, double tau_s, double detuning_hz) const;
    int n_atoms() const { return n_; }
    bool truncated() const { return truncated_; }

private:
    struct Block {
        double mz = 0.0;
        std::vector<std::uint32_t> states;
        Matrix w; // states x kept: embedded eigenvectors
        Eigen::VectorXd energies;
    };
    int n_ = 0;
    bool truncated_ = false;
    std::vector<Block> blocks_;
};

/// Applies the dark evolution to one state per detuning value.
std::vector<CVector> dark_time_sweep(const DarkEvolver& evolver, std::vector<CVector> states, double tau_s,
                                     const std::vector<double>& detunings_hz);

/// Ramsey sequence: pulse t1, dark tau, pulse t2; returns P_e.
double ramsey_excitation(const CouplingTables& tables, const DarkEvolver& dark, double detuning_hz,
                         double t1_s, double tau_s, double t2_s);

/// Rabi spectroscopy: one pulse of duration t with interactions on; the
/// driven Hamiltonian is re-diagonalised for every detuning.
double rabi_excitation(const CouplingTables& tables, double detuning_hz, double t_s,
                       const SpinSectorBasis* sectors = nullptr);

/// Collective (Dicke-ladder) counterparts with homogeneous mean couplings.
CVector dicke_ground_state(int n_atoms);
double dicke_excitation_fraction(const CVector& psi, int n_atoms);
double collective_ramsey_excitation(double mean_rabi_hz, double mean_x, double mean_c, int n_atoms,
                                    double detuning_hz, double t1_s, double tau_s, double t2_s);
double collective_rabi_excitation(double mean_rabi_hz, double mean_x, double mean_c, int n_atoms,
                                  double detuning_hz, double t_s);

/// Embeds a Dicke-ladder state into the 2^N product basis.
CVector embed_dicke(const CVector& dicke, int n_atoms);

} // namespace mbsed

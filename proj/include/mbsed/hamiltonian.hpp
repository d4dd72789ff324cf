#pragma once

#include "mbsed/couplings.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mbsed {

using Matrix = Eigen::MatrixXd;

class HamiltonianError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Product basis convention: bit i of a basis index set <=> atom i excited
// (spin up).  |down...down> is index 0.

inline int popcount(std::uint32_t x) { return __builtin_popcount(x); }

enum class BasisKind { FullProduct, MzBlock, SpinSector, Dicke };

struct HamiltonianMatrix {
    Matrix h;  // H/hbar in rad/s, real symmetric
    BasisKind basis = BasisKind::FullProduct;
    int n_atoms = 0;
    double detuning_hz = 0.0;
    bool includes_detuning = true; // false: -2 pi delta M^z kept symbolic
    bool includes_drive = false;
};

/// H/hbar = -2 pi delta sum S^z - 2 pi sum Omega_i S^x_i - sum_{i!=j} C_ij (S^z_i + S^z_j)/2
///          - sum_{i!=j} X_ij S^z_i S^z_j - sum_{i!=j} J_ij S_i.S_j
/// with sums over ordered pairs.
HamiltonianMatrix build_full_hamiltonian(const CouplingTables& tables, double detuning_hz,
                                         bool include_drive);

/// Diagonal element of the interaction + detuning part for a product state.
double diagonal_energy(const CouplingTables& tables, const Eigen::VectorXd& longitudinal_field,
                       double detuning_hz, std::uint32_t state);

/// h_i = sum_{j != i} C_ij: the C term as per-atom longitudinal fields.
Eigen::VectorXd c_fields(const CouplingTables& tables);

struct MzBlock {
    int up_count = 0;        // number of excited atoms
    double mz = 0.0;         // up_count - N/2
    std::vector<std::uint32_t> states; // product-basis indices, ascending
    Matrix h;
};

/// Splits a drive-free full-basis Hamiltonian into its N+1 magnetisation blocks.
/// Throws if the drive is present or an off-block element exceeds 1e-14.
std::vector<MzBlock> mz_blocks(const HamiltonianMatrix& h);

/// Product states with a given number of excitations, ascending.
std::vector<std::uint32_t> states_with_up_count(int n_atoms, int up_count);

/// Builds one magnetisation block of the drive-free Hamiltonian directly,
/// without forming the 2^N matrix.
MzBlock build_mz_block(const CouplingTables& tables, double detuning_hz, int up_count);

/// S^2 restricted to a magnetisation block (dense).
Matrix total_spin_squared_block(int n_atoms, const std::vector<std::uint32_t>& states);

/// Per-atom spin operators in the product basis.
struct SpinOperatorSet {
    int n_atoms = 0;
    std::vector<Eigen::SparseMatrix<double>> sx;
    std::vector<Eigen::SparseMatrix<std::complex<double>>> sy;
    std::vector<Eigen::SparseMatrix<double>> sz;

    Eigen::SparseMatrix<double> total_sx() const;
    Eigen::SparseMatrix<double> total_sz() const;
    /// S^2 from the site operators, sum_ij S_i . S_j.
    Eigen::SparseMatrix<std::complex<double>> total_spin_squared() const;
    /// sum_{i != j} S_i . S_j.
    Eigen::SparseMatrix<std::complex<double>> pair_heisenberg() const;
    std::size_t dimension() const { return std::size_t{1} << n_atoms; }
};

SpinOperatorSet spin_operators(int n_atoms);

/// S^2 assembled directly in the product basis.
Matrix total_spin_squared(int n_atoms);

/// Collective model in the Dicke ladder |S=N/2, M>, index = M + N/2:
/// H/hbar = -2 pi delta S^z - 2 pi Omega_bar S^x - X_bar (S^z)^2 - (N-1) C_bar S^z.
HamiltonianMatrix build_collective_hamiltonian(double mean_rabi_hz, double mean_x, double mean_c,
                                               int n_atoms, double detuning_hz, bool include_drive);
HamiltonianMatrix build_collective_hamiltonian(const CouplingTables& tables, double detuning_hz,
                                               bool include_drive);

/// Largest |H - H^T| relative to the largest |H|.
double asymmetry(const Matrix& h);

} // namespace mbsed

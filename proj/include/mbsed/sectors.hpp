#pragma once

#include "mbsed/hamiltonian.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace mbsed {

/// Columns of one magnetisation block that span the kept total-spin sectors.
struct SectorBlock {
    int up_count = 0;
    std::vector<std::uint32_t> states; // product states of the block, ascending
    Matrix vectors;                    // states.size() x kept, orthonormal columns
    std::vector<double> total_spin;    // S label per column
};

/// Orthonormal basis for S in {N/2, N/2-1, ..., N/2-m}: the truncation keeps
/// the m+1 highest total-spin sectors.  m = N/2 (rounded down) is the full space.
struct SpinSectorBasis {
    int n_atoms = 0;
    int truncation = 0;
    std::vector<SectorBlock> blocks; // one per magnetisation, up_count = 0..N

    std::size_t dimension() const;
    /// Dense 2^N x dimension() matrix with the block columns embedded.
    Matrix dense() const;
    /// Up-count of each column of dense(), in column order.
    std::vector<int> column_up_counts() const;
    /// Largest m for N atoms (all sectors kept).
    static int full_truncation(int n_atoms) { return n_atoms / 2; }
};

/// Builds (or fetches from cache) the basis.  S^2 is diagonalised inside
/// every magnetisation block; eigenvalues are grouped into S(S+1) sectors
/// with tolerance 1e-8.  The decomposition depends only on N; it is memoised
/// in memory, and on disk under cache_dir when given (or $MBSED_CACHE_DIR).
SpinSectorBasis spin_sector_basis(int n_atoms, int truncation,
                                  const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

/// Number of product states in sectors S >= N/2 - m (closed form, for checks).
std::size_t sector_dimension(int n_atoms, int truncation);

/// B^T H B for a full-product-basis Hamiltonian.
HamiltonianMatrix project(const HamiltonianMatrix& h, const SpinSectorBasis& basis);

/// B_k^T H_k B_k for one drive-free magnetisation block.
Matrix project_block(const MzBlock& block, const SectorBlock& sector);

} // namespace mbsed

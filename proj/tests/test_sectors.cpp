#include "mbsed/evolution.hpp"
#include "mbsed/sectors.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace mbsed;

TEST_CASE("sector dimensions") {
    CHECK(sector_dimension(12, 1) == 134);
    CHECK(sector_dimension(2, 0) == 3);
    for (int n = 2; n <= 8; ++n) CHECK(sector_dimension(n, n / 2) == (std::size_t{1} << n));

    const SpinSectorBasis b = spin_sector_basis(12, 1);
    CHECK(b.dimension() == 134);
    const SpinSectorBasis t = spin_sector_basis(2, 0);
    CHECK(t.dimension() == 3);
}

TEST_CASE("sector basis is orthonormal and labelled by S") {
    for (int n : {3, 4, 6}) {
        for (int m = 0; m <= n / 2; ++m) {
            const SpinSectorBasis b = spin_sector_basis(n, m);
            const Matrix dense = b.dense();
            REQUIRE(std::size_t(dense.cols()) == sector_dimension(n, m));
            CHECK((dense.transpose() * dense - Matrix::Identity(dense.cols(), dense.cols())).cwiseAbs().maxCoeff() <
                  1e-12);
            const Matrix s2 = total_spin_squared(n);
            Eigen::Index col = 0;
            for (const auto& blk : b.blocks)
                for (double s : blk.total_spin) {
                    CHECK(s >= n / 2.0 - m - 1e-12);
                    const Eigen::VectorXd v = dense.col(col++);
                    CHECK((s2 * v - s * (s + 1) * v).norm() < 1e-10);
                }
        }
    }
}

TEST_CASE("projection with the full basis is a similarity transform") {
    std::mt19937_64 rng(4);
    const CouplingTables t = oracle::random_tables(5, rng);
    const HamiltonianMatrix h = build_full_hamiltonian(t, 0.3, true);
    const HamiltonianMatrix p = project(h, spin_sector_basis(5, 2));
    CHECK(p.basis == BasisKind::SpinSector);
    const auto a = diagonalize(h.h).values, b = diagonalize(p.h).values;
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("uniform couplings: the Dicke sector alone is exact") {
    const int n = 6;
    const CouplingTables t = uniform_tables(n, 0.4, -0.3, 0.9, 2.0);
    const SpinSectorBasis dicke = spin_sector_basis(n, 0);
    const DarkEvolver full(t), top(t, &dicke);
    CVector psi = ground_state(n);
    apply_pulse(psi, t.rabi_hz, 0.0, 0.1);
    CVector a = psi, b = psi;
    full.evolve(a, 0.7, 0.2);
    top.evolve(b, 0.7, 0.2);
    CHECK(top.truncated());
    CHECK((a - b).norm() < 1e-12);
}

TEST_CASE("disk cache round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "mbsed_sector_cache_test";
    std::filesystem::remove_all(dir);
    const SpinSectorBasis a = spin_sector_basis(9, 1, dir);
    CHECK(std::filesystem::exists(dir / "spin_sectors_N9.bin"));
    const SpinSectorBasis b = spin_sector_basis(9, 1, dir);
    CHECK((a.dense() - b.dense()).cwiseAbs().maxCoeff() == 0.0);
    std::filesystem::remove_all(dir);
}

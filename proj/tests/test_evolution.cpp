#include "mbsed/evolution.hpp"
#include "mbsed/hamiltonian.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <numbers>
#include <random>

using namespace mbsed;

namespace {

/// exp(-i H t) psi from a complex Hermitian eigensolver on the Kronecker-built H.
CVector reference_evolve(const oracle::CMatrix& h, const CVector& psi, double t) {
    Eigen::SelfAdjointEigenSolver<oracle::CMatrix> es(h);
    const Eigen::VectorXcd phase = (-std::complex<double>(0, 1) * t * es.eigenvalues().cast<std::complex<double>>())
                                       .array()
                                       .exp();
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint() * psi;
}

double sz_expectation(const CVector& psi, int n) {
    double m = 0.0;
    for (Eigen::Index s = 0; s < psi.size(); ++s) m += std::norm(psi[s]) * (popcount(std::uint32_t(s)) - 0.5 * n);
    return m / psi.squaredNorm();
}

} // namespace

TEST_CASE("single-atom pulse matches the Rabi formula") {
    const Eigen::VectorXd rabi = Eigen::VectorXd::Constant(1, 3.0);
    for (double delta : {0.0, 1.1, -2.5}) {
        for (double t : {0.01, 0.1, 0.37}) {
            CVector psi = ground_state(1);
            apply_pulse(psi, rabi, delta, t);
            const double w2 = 9.0 + delta * delta;
            const double s = std::sin(std::numbers::pi * std::sqrt(w2) * t);
            CHECK(excitation_fraction(psi, 1) == doctest::Approx(9.0 / w2 * s * s).epsilon(1e-13));
            CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("pulse equals exact evolution under the drive-only Hamiltonian") {
    std::mt19937_64 rng(5);
    oracle::CMatrix h;
    CouplingTables t = oracle::random_tables(4, rng, 0.0);
    CVector psi = ground_state(4);
    apply_pulse(psi, t.rabi_hz, 0.0, 0.03); // entangle nothing, just a product state
    CVector a = psi;
    apply_pulse(a, t.rabi_hz, 0.8, 0.05);
    const CVector b = reference_evolve(oracle::kron_hamiltonian(t, 0.8, true), psi, 0.05);
    CHECK((a - b).norm() < 1e-12);
}

TEST_CASE("dark evolution against a complex Hermitian reference") {
    std::mt19937_64 rng(6);
    for (int n = 2; n <= 6; ++n) {
        const CouplingTables t = oracle::random_tables(n, rng);
        CVector psi = ground_state(n);
        apply_pulse(psi, t.rabi_hz, 0.0, 0.07);
        const DarkEvolver dark(t);
        for (double delta : {0.0, 0.4}) {
            CVector a = psi;
            dark.evolve(a, 1.3, delta);
            const CVector b = reference_evolve(oracle::kron_hamiltonian(t, delta, false), psi, 1.3);
            CHECK((a - b).norm() < 1e-10);
            CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(std::abs(sz_expectation(a, n) - sz_expectation(psi, n)) < 1e-10);
        }
    }
}

TEST_CASE("detuning sweep reuses eigenvectors") {
    std::mt19937_64 rng(7);
    const CouplingTables t = oracle::random_tables(5, rng);
    CVector psi = ground_state(5);
    apply_pulse(psi, t.rabi_hz, 0.0, 0.05);
    const DarkEvolver dark(t);
    const std::vector<double> grid{-0.9, -0.3, 0.0, 0.25, 0.8};
    const auto swept = dark_time_sweep(dark, std::vector<CVector>(grid.size(), psi), 0.6, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        // Re-diagonalise from scratch with the detuning included.
        const EigenSystem es = diagonalize(build_full_hamiltonian(t, grid[k], false).h);
        CHECK((swept[k] - evolve(es, psi, 0.6)).norm() < 1e-10);
    }
}

TEST_CASE("energy is conserved in the dark") {
    std::mt19937_64 rng(8);
    const CouplingTables t = oracle::random_tables(5, rng);
    const Matrix h = build_full_hamiltonian(t, 0.2, false).h;
    CVector psi = ground_state(5);
    apply_pulse(psi, t.rabi_hz, 0.0, 0.04);
    const double e0 = (psi.adjoint() * h * psi).real()(0);
    const DarkEvolver dark(t);
    dark.evolve(psi, 2.0, 0.2);
    const double e1 = (psi.adjoint() * h * psi).real()(0);
    CHECK(std::abs(e1 - e0) <= 1e-10 * std::abs(e0));
}

TEST_CASE("no interactions: ideal Ramsey fringe") {
    const int n = 3;
    const CouplingTables t = uniform_tables(n, 0, 0, 0, 500.0);
    const DarkEvolver dark(t);
    const double t2 = 1.0 / (4 * 500.0), tau = 0.1;
    for (double delta : {-3.0, -1.0, 0.0, 0.7, 2.4}) {
        const double pe = ramsey_excitation(t, dark, delta, t2, tau, t2);
        // Short pulses: P_e ~ (1 + cos(2 pi delta (tau + 4 t2 / pi))) / 2
        const double phase = 2 * std::numbers::pi * delta * (tau + 4 * t2 / std::numbers::pi);
        CHECK(std::abs(pe - 0.5 * (1 + std::cos(phase))) < 1e-4);
    }
}

TEST_CASE("homogeneous tables: full model equals the Dicke ladder") {
    const int n = 5;
    const double x = 0.8, c = -0.25, j = 0.3, rabi = 20.0;
    const CouplingTables t = uniform_tables(n, j, c, x, rabi);
    const DarkEvolver dark(t);
    for (double delta : {-0.4, 0.0, 0.3}) {
        const double full = ramsey_excitation(t, dark, delta, 0.006, 0.5, 1.0 / (4 * rabi));
        const double dicke = collective_ramsey_excitation(rabi, x, c, n, delta, 0.006, 0.5, 1.0 / (4 * rabi));
        CHECK(full == doctest::Approx(dicke).epsilon(1e-10));

        const double rf = rabi_excitation(t, delta, 0.02);
        const double rd = collective_rabi_excitation(rabi, x, c, n, delta, 0.02);
        CHECK(rf == doctest::Approx(rd).epsilon(1e-10));
    }
    // Dicke states embed with the right weights.
    CVector d = dicke_ground_state(n);
    d.setZero();
    d[2] = 1.0;
    const CVector e = embed_dicke(d, n);
    CHECK(e.norm() == doctest::Approx(1.0));
    CHECK(excitation_fraction(e, n) == doctest::Approx(0.4));
    CHECK(dicke_excitation_fraction(d, n) == doctest::Approx(0.4));
}

TEST_CASE("diagonalize rejects non-symmetric input") {
    Matrix m = Matrix::Identity(3, 3);
    m(0, 1) = 1.0;
    CHECK_THROWS(diagonalize(m));
}

#include "mbsed/evolution.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <numbers>

namespace mbsed {

namespace {

using Cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

EigenSystem diagonalize(const Matrix& h) {
    if (h.rows() != h.cols()) throw HamiltonianError("diagonalize: matrix is not square");
    if (asymmetry(h) > 1e-12) throw HamiltonianError("diagonalize: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw HamiltonianError("diagonalize: eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

CVector evolve(const EigenSystem& es, const CVector& psi0, double t) {
    CVector c = es.vectors.transpose().cast<Cplx>() * psi0;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -es.values[k] * t);
    return es.vectors.cast<Cplx>() * c;
}

CVector ground_state(int n) {
    CVector psi = CVector::Zero(Eigen::Index(1) << n);
    psi[0] = 1.0;
    return psi;
}

double excitation_fraction(const CVector& psi, int n) {
    double up = 0.0, norm = 0.0;
    for (Eigen::Index s = 0; s < psi.size(); ++s) {
        const double p = std::norm(psi[s]);
        norm += p;
        up += p * popcount(static_cast<std::uint32_t>(s));
    }
    if (norm <= 0.0) throw HamiltonianError("excitation_fraction: zero state");
    return up / (n * norm);
}

void apply_pulse(CVector& psi, const Eigen::VectorXd& rabi_hz, double detuning_hz, double duration_s) {
    const int n = static_cast<int>(rabi_hz.size());
    if (psi.size() != (Eigen::Index(1) << n)) throw HamiltonianError("apply_pulse: dimension mismatch");
    for (int i = 0; i < n; ++i) {
        // exp(i pi t (delta sigma_z + Omega sigma_x)) in the (down, up) basis.
        const double gen = std::hypot(detuning_hz, rabi_hz[i]);
        const double a = std::numbers::pi * duration_s * gen;
        const double c = std::cos(a);
        const double s = std::sin(a);
        const double nz = gen > 0.0 ? detuning_hz / gen : 0.0;
        const double nx = gen > 0.0 ? rabi_hz[i] / gen : 0.0;
        const Cplx u_dd(c, -s * nz), u_uu(c, s * nz), u_off(0.0, s * nx);
        const std::uint32_t bit = 1u << i;
        for (Eigen::Index idx = 0; idx < psi.size(); ++idx) {
            const auto lo = static_cast<std::uint32_t>(idx);
            if (lo & bit) continue;
            const auto hi = static_cast<Eigen::Index>(lo | bit);
            const Cplx d = psi[idx], u = psi[hi];
            psi[idx] = u_dd * d + u_off * u;
            psi[hi] = u_off * d + u_uu * u;
        }
    }
}

DarkEvolver::DarkEvolver(const CouplingTables& tables, const SpinSectorBasis* sectors)
    : n_(tables.size()), truncated_(sectors != nullptr) {
    if (sectors && sectors->n_atoms != n_) throw HamiltonianError("DarkEvolver: sector basis size mismatch");
    for (int k = 0; k <= n_; ++k) {
        const MzBlock blk = build_mz_block(tables, 0.0, k);
        Block b;
        b.mz = blk.mz;
        b.states = blk.states;
        if (sectors) {
            const SectorBlock& sec = sectors->blocks[static_cast<std::size_t>(k)];
            if (sec.vectors.cols() == 0) continue;
            const EigenSystem es = diagonalize(project_block(blk, sec));
            b.w = sec.vectors * es.vectors;
            b.energies = es.values;
        } else {
            const EigenSystem es = diagonalize(blk.h);
            b.w = es.vectors;
            b.energies = es.values;
        }
        blocks_.push_back(std::move(b));
    }
}

void DarkEvolver::evolve(CVector& psi, double tau, double detuning_hz) const {
    if (psi.size() != (Eigen::Index(1) << n_)) throw HamiltonianError("DarkEvolver: dimension mismatch");
    CVector out = truncated_ ? CVector::Zero(psi.size()) : CVector(psi.size());
    for (const auto& b : blocks_) {
        const auto m = static_cast<Eigen::Index>(b.states.size());
        CVector local(m);
        for (Eigen::Index r = 0; r < m; ++r) local[r] = psi[b.states[r]];
        CVector c = b.w.transpose().cast<Cplx>() * local;
        for (Eigen::Index k = 0; k < c.size(); ++k)
            c[k] *= std::polar(1.0, -(b.energies[k] - kTwoPi * detuning_hz * b.mz) * tau);
        local = b.w.cast<Cplx>() * c;
        for (Eigen::Index r = 0; r < m; ++r) out[b.states[r]] = local[r];
    }
    psi = std::move(out);
}

std::vector<CVector> dark_time_sweep(const DarkEvolver& evolver, std::vector<CVector> states, double tau,
                                     const std::vector<double>& detunings_hz) {
    if (states.size() != detunings_hz.size()) throw HamiltonianError("dark_time_sweep: size mismatch");
    for (std::size_t k = 0; k < states.size(); ++k) evolver.evolve(states[k], tau, detunings_hz[k]);
    return states;
}

double ramsey_excitation(const CouplingTables& tables, const DarkEvolver& dark, double detuning_hz,
                         double t1, double tau, double t2) {
    const int n = tables.size();
    CVector psi = ground_state(n);
    apply_pulse(psi, tables.rabi_hz, detuning_hz, t1);
    dark.evolve(psi, tau, detuning_hz);
    apply_pulse(psi, tables.rabi_hz, detuning_hz, t2);
    return excitation_fraction(psi, n);
}

double rabi_excitation(const CouplingTables& tables, double detuning_hz, double t,
                       const SpinSectorBasis* sectors) {
    const int n = tables.size();
    const HamiltonianMatrix h = build_full_hamiltonian(tables, detuning_hz, true);
    if (!sectors) {
        const EigenSystem es = diagonalize(h.h);
        return excitation_fraction(evolve(es, ground_state(n), t), n);
    }
    const Matrix b = sectors->dense();
    const EigenSystem es = diagonalize(b.transpose() * h.h * b);
    const CVector c0 = b.row(0).transpose().cast<Cplx>();
    const CVector c = evolve(es, c0, t);
    const std::vector<int> ups = sectors->column_up_counts();
    double up = 0.0, norm = 0.0;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        const double p = std::norm(c[k]);
        norm += p;
        up += p * ups[static_cast<std::size_t>(k)];
    }
    return up / (n * norm);
}

CVector dicke_ground_state(int n) {
    CVector psi = CVector::Zero(n + 1);
    psi[0] = 1.0;
    return psi;
}

double dicke_excitation_fraction(const CVector& psi, int n) {
    double up = 0.0, norm = 0.0;
    for (Eigen::Index k = 0; k < psi.size(); ++k) {
        norm += std::norm(psi[k]);
        up += std::norm(psi[k]) * k;
    }
    return up / (n * norm);
}

double collective_ramsey_excitation(double rabi, double x, double c, int n, double detuning_hz, double t1,
                                    double tau, double t2) {
    const EigenSystem pulse = diagonalize(build_collective_hamiltonian(rabi, 0.0, 0.0, n, detuning_hz, true).h);
    const Matrix dark = build_collective_hamiltonian(rabi, x, c, n, detuning_hz, false).h;
    CVector psi = evolve(pulse, dicke_ground_state(n), t1);
    for (Eigen::Index k = 0; k < psi.size(); ++k) psi[k] *= std::polar(1.0, -dark(k, k) * tau);
    psi = evolve(pulse, psi, t2);
    return dicke_excitation_fraction(psi, n);
}

double collective_rabi_excitation(double rabi, double x, double c, int n, double detuning_hz, double t) {
    const EigenSystem es = diagonalize(build_collective_hamiltonian(rabi, x, c, n, detuning_hz, true).h);
    return dicke_excitation_fraction(evolve(es, dicke_ground_state(n), t), n);
}

CVector embed_dicke(const CVector& dicke, int n) {
    CVector psi = CVector::Zero(Eigen::Index(1) << n);
    for (int k = 0; k <= n; ++k) {
        const auto states = states_with_up_count(n, k);
        const double norm = 1.0 / std::sqrt(static_cast<double>(states.size()));
        for (auto s : states) psi[s] = dicke[k] * norm;
    }
    return psi;
}

} // namespace mbsed

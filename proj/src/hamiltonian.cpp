#include "mbsed/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mbsed {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_size(int n) {
    if (n < 1) throw HamiltonianError("need at least one atom");
    if (n > kMaxAtoms)
        throw HamiltonianError("N = " + std::to_string(n) + " exceeds the dense limit of " +
                               std::to_string(kMaxAtoms));
}

double spin_z(std::uint32_t state, int i) { return ((state >> i) & 1u) ? 0.5 : -0.5; }

} // namespace

Eigen::VectorXd c_fields(const CouplingTables& tables) {
    const int n = tables.size();
    Eigen::VectorXd h(n);
    for (int i = 0; i < n; ++i) h[i] = tables.c.row(i).sum() - tables.c(i, i);
    return h;
}

double diagonal_energy(const CouplingTables& tables, const Eigen::VectorXd& field, double detuning_hz,
                       std::uint32_t state) {
    const int n = tables.size();
    double e = 0.0;
    double mz = 0.0;
    for (int i = 0; i < n; ++i) {
        const double si = spin_z(state, i);
        mz += si;
        e -= field[i] * si;
        for (int j = i + 1; j < n; ++j) {
            // Ordered-pair sums count every unordered pair twice.
            e -= 2.0 * (tables.x(i, j) + tables.j(i, j)) * si * spin_z(state, j);
        }
    }
    e -= kTwoPi * detuning_hz * mz;
    return e;
}

HamiltonianMatrix build_full_hamiltonian(const CouplingTables& tables, double detuning_hz,
                                         bool include_drive) {
    const int n = tables.size();
    check_size(n);
    const std::uint32_t dim = 1u << n;
    const Eigen::VectorXd field = c_fields(tables);

    HamiltonianMatrix out;
    out.n_atoms = n;
    out.detuning_hz = detuning_hz;
    out.includes_drive = include_drive;
    out.h = Matrix::Zero(dim, dim);

    for (std::uint32_t s = 0; s < dim; ++s) {
        out.h(s, s) = diagonal_energy(tables, field, detuning_hz, s);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                // Flip-flop part of -2 J_ij S_i.S_j connects anti-aligned pairs with -J_ij.
                if (((s >> i) & 1u) != ((s >> j) & 1u)) {
                    const std::uint32_t t = s ^ ((1u << i) | (1u << j));
                    out.h(t, s) -= tables.j(i, j);
                }
            }
            if (include_drive) {
                const std::uint32_t t = s ^ (1u << i);
                out.h(t, s) -= std::numbers::pi * tables.rabi_hz[i];
            }
        }
    }
    return out;
}

std::vector<std::uint32_t> states_with_up_count(int n_atoms, int up_count) {
    std::vector<std::uint32_t> out;
    const std::uint32_t dim = 1u << n_atoms;
    for (std::uint32_t s = 0; s < dim; ++s) {
        if (popcount(s) == up_count) out.push_back(s);
    }
    return out;
}

std::vector<MzBlock> mz_blocks(const HamiltonianMatrix& h) {
    if (h.includes_drive) throw HamiltonianError("mz_blocks: drive term mixes magnetisation blocks");
    if (h.basis != BasisKind::FullProduct) throw HamiltonianError("mz_blocks needs the product basis");
    const int n = h.n_atoms;
    const std::uint32_t dim = 1u << n;

    for (std::uint32_t a = 0; a < dim; ++a) {
        for (std::uint32_t b = 0; b < dim; ++b) {
            if (popcount(a) != popcount(b) && std::abs(h.h(a, b)) >= 1e-14)
                throw HamiltonianError("mz_blocks: off-block element exceeds 1e-14");
        }
    }

    std::vector<MzBlock> blocks;
    for (int k = 0; k <= n; ++k) {
        MzBlock blk;
        blk.up_count = k;
        blk.mz = k - 0.5 * n;
        blk.states = states_with_up_count(n, k);
        const auto m = static_cast<Eigen::Index>(blk.states.size());
        blk.h.resize(m, m);
        for (Eigen::Index r = 0; r < m; ++r)
            for (Eigen::Index c = 0; c < m; ++c) blk.h(r, c) = h.h(blk.states[r], blk.states[c]);
        blocks.push_back(std::move(blk));
    }
    return blocks;
}

namespace {

// Position of each product state inside its block, via binary search on the
// ascending state list.
Eigen::Index position(const std::vector<std::uint32_t>& states, std::uint32_t s) {
    const auto it = std::lower_bound(states.begin(), states.end(), s);
    return static_cast<Eigen::Index>(it - states.begin());
}

} // namespace

MzBlock build_mz_block(const CouplingTables& tables, double detuning_hz, int up_count) {
    const int n = tables.size();
    check_size(n);
    const Eigen::VectorXd field = c_fields(tables);
    MzBlock blk;
    blk.up_count = up_count;
    blk.mz = up_count - 0.5 * n;
    blk.states = states_with_up_count(n, up_count);
    const auto m = static_cast<Eigen::Index>(blk.states.size());
    blk.h = Matrix::Zero(m, m);
    for (Eigen::Index c = 0; c < m; ++c) {
        const std::uint32_t s = blk.states[c];
        blk.h(c, c) = diagonal_energy(tables, field, detuning_hz, s);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (((s >> i) & 1u) != ((s >> j) & 1u)) {
                    const std::uint32_t t = s ^ ((1u << i) | (1u << j));
                    blk.h(position(blk.states, t), c) -= tables.j(i, j);
                }
            }
        }
    }
    return blk;
}

Matrix total_spin_squared_block(int n_atoms, const std::vector<std::uint32_t>& states) {
    const auto m = static_cast<Eigen::Index>(states.size());
    Matrix s2 = Matrix::Zero(m, m);
    for (Eigen::Index c = 0; c < m; ++c) {
        const std::uint32_t s = states[c];
        const double mz = popcount(s) - 0.5 * n_atoms;
        // S^2 = (S^z)^2 + N/2 on the diagonal; each anti-aligned pair adds a unit flip-flop.
        s2(c, c) = mz * mz + 0.5 * n_atoms;
        for (int i = 0; i < n_atoms; ++i) {
            for (int j = i + 1; j < n_atoms; ++j) {
                if (((s >> i) & 1u) != ((s >> j) & 1u)) {
                    const std::uint32_t t = s ^ ((1u << i) | (1u << j));
                    s2(position(states, t), c) += 1.0;
                }
            }
        }
    }
    return s2;
}

Matrix total_spin_squared(int n_atoms) {
    check_size(n_atoms);
    const std::uint32_t dim = 1u << n_atoms;
    std::vector<std::uint32_t> all(dim);
    for (std::uint32_t s = 0; s < dim; ++s) all[s] = s;
    return total_spin_squared_block(n_atoms, all);
}

SpinOperatorSet spin_operators(int n_atoms) {
    check_size(n_atoms);
    using Cplx = std::complex<double>;
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_atoms);
    SpinOperatorSet ops;
    ops.n_atoms = n_atoms;
    for (int i = 0; i < n_atoms; ++i) {
        std::vector<Eigen::Triplet<double>> tx, tz;
        std::vector<Eigen::Triplet<Cplx>> ty;
        for (Eigen::Index s = 0; s < dim; ++s) {
            const auto us = static_cast<std::uint32_t>(s);
            const Eigen::Index t = static_cast<Eigen::Index>(us ^ (1u << i));
            const bool up = (us >> i) & 1u;
            tz.emplace_back(s, s, up ? 0.5 : -0.5);
            tx.emplace_back(t, s, 0.5);
            // S^y|down> = (i/2)|up>,  S^y|up> = (-i/2)|down>
            ty.emplace_back(t, s, up ? Cplx(0.0, -0.5) : Cplx(0.0, 0.5));
        }
        Eigen::SparseMatrix<double> x(dim, dim), z(dim, dim);
        Eigen::SparseMatrix<Cplx> y(dim, dim);
        x.setFromTriplets(tx.begin(), tx.end());
        y.setFromTriplets(ty.begin(), ty.end());
        z.setFromTriplets(tz.begin(), tz.end());
        ops.sx.push_back(std::move(x));
        ops.sy.push_back(std::move(y));
        ops.sz.push_back(std::move(z));
    }
    return ops;
}

Eigen::SparseMatrix<double> SpinOperatorSet::total_sx() const {
    Eigen::SparseMatrix<double> out(sx.front().rows(), sx.front().cols());
    for (const auto& m : sx) out += m;
    return out;
}

Eigen::SparseMatrix<double> SpinOperatorSet::total_sz() const {
    Eigen::SparseMatrix<double> out(sz.front().rows(), sz.front().cols());
    for (const auto& m : sz) out += m;
    return out;
}

namespace {

Eigen::SparseMatrix<std::complex<double>> dot(const SpinOperatorSet& ops, int i, int j) {
    using Cplx = std::complex<double>;
    Eigen::SparseMatrix<Cplx> xx = (ops.sx[i] * ops.sx[j]).cast<Cplx>();
    Eigen::SparseMatrix<Cplx> zz = (ops.sz[i] * ops.sz[j]).cast<Cplx>();
    Eigen::SparseMatrix<Cplx> yy = ops.sy[i] * ops.sy[j];
    return xx + yy + zz;
}

} // namespace

Eigen::SparseMatrix<std::complex<double>> SpinOperatorSet::pair_heisenberg() const {
    Eigen::SparseMatrix<std::complex<double>> out(sx.front().rows(), sx.front().cols());
    for (int i = 0; i < n_atoms; ++i)
        for (int j = 0; j < n_atoms; ++j)
            if (i != j) out += dot(*this, i, j);
    return out;
}

Eigen::SparseMatrix<std::complex<double>> SpinOperatorSet::total_spin_squared() const {
    Eigen::SparseMatrix<std::complex<double>> out(sx.front().rows(), sx.front().cols());
    for (int i = 0; i < n_atoms; ++i)
        for (int j = 0; j < n_atoms; ++j) out += dot(*this, i, j);
    return out;
}

HamiltonianMatrix build_collective_hamiltonian(double mean_rabi_hz, double mean_x, double mean_c,
                                               int n_atoms, double detuning_hz, bool include_drive) {
    if (n_atoms < 2) throw HamiltonianError("collective Hamiltonian needs N >= 2");
    const int dim = n_atoms + 1;
    const double s = 0.5 * n_atoms;
    HamiltonianMatrix out;
    out.basis = BasisKind::Dicke;
    out.n_atoms = n_atoms;
    out.detuning_hz = detuning_hz;
    out.includes_drive = include_drive;
    out.h = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        const double m = k - s;
        out.h(k, k) = -kTwoPi * detuning_hz * m - mean_x * m * m - (n_atoms - 1) * mean_c * m;
        if (include_drive && k + 1 < dim) {
            // <M+1| S^x |M> = sqrt(S(S+1) - M(M+1)) / 2
            const double el = -kTwoPi * mean_rabi_hz * 0.5 * std::sqrt(s * (s + 1.0) - m * (m + 1.0));
            out.h(k + 1, k) = el;
            out.h(k, k + 1) = el;
        }
    }
    return out;
}

HamiltonianMatrix build_collective_hamiltonian(const CouplingTables& tables, double detuning_hz,
                                               bool include_drive) {
    return build_collective_hamiltonian(tables.mean_rabi_hz(), tables.mean_x(), tables.mean_c(),
                                        tables.size(), detuning_hz, include_drive);
}

double asymmetry(const Matrix& h) {
    const double scale = h.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (h - h.transpose()).cwiseAbs().maxCoeff() / scale;
}

} // namespace mbsed

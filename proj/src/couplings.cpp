#include "mbsed/couplings.hpp"

#include "mbsed/overlap.hpp"

#include <cmath>
#include <numbers>

namespace mbsed {

PairCoupling pair_couplings(const MotionalState& a, const MotionalState& b, const TrapDerived& trap,
                            const PhysicalConstants& c) {
    const PairOverlap ox = pair_overlap(a.nx, b.nx);
    const PairOverlap oy = pair_overlap(a.ny, b.ny);
    const PairOverlap oz = pair_overlap(a.nz, b.nz);

    const double s = ox.s * oy.s * oz.s;
    const double p_r = ox.p * oy.s * oz.s + ox.s * oy.p * oz.s;
    const double p_z = ox.s * oy.s * oz.p;

    const double rr2 = trap.r_r * trap.r_r;
    const double rz = trap.r_z;
    const double hm = c.hbar / c.atom_mass;

    PairCoupling out;
    out.g_s = 4.0 * std::numbers::pi * hm * rr2 * rz * s;
    out.g_p = 6.0 * std::numbers::pi * hm * (rr2 * rr2 * rz * p_r + rr2 * rz * rz * rz * p_z);
    return out;
}

double CouplingTables::mean_x() const {
    const int n = size();
    return (x.sum() - x.diagonal().sum()) / (double(n) * (n - 1));
}

double CouplingTables::mean_c() const {
    const int n = size();
    return (c.sum() - c.diagonal().sum()) / (double(n) * (n - 1));
}

GeometryTables build_geometry(const SampleEnsemble& ensemble, const Config& cfg) {
    const int n = static_cast<int>(ensemble.states.size());
    GeometryTables g;
    g.g_s = Eigen::MatrixXd::Zero(n, n);
    g.g_p = Eigen::MatrixXd::Zero(n, n);
    g.rabi_hz.resize(n);
    for (int i = 0; i < n; ++i) {
        g.rabi_hz[i] = rabi_frequency(ensemble.states[i], cfg.protocol.bare_rabi_hz, cfg.derived,
                                      cfg.trap.misalignment);
        for (int j = i + 1; j < n; ++j) {
            const PairCoupling pc =
                pair_couplings(ensemble.states[i], ensemble.states[j], cfg.derived, cfg.constants);
            g.g_s(i, j) = g.g_s(j, i) = pc.g_s;
            g.g_p(i, j) = g.g_p(j, i) = pc.g_p;
        }
    }
    return g;
}

CouplingTables apply_scattering(const GeometryTables& geom, const AtomConfig& atoms,
                                const PhysicalConstants& c) {
    const double a = atoms.a_eg_minus * c.bohr_radius;
    auto cube = [&](double b) {
        const double l = b * c.bohr_radius;
        return l * l * l;
    };
    const double bgg = cube(atoms.b_gg);
    const double bee = cube(atoms.b_ee);
    const double beg = cube(atoms.b_eg);

    CouplingTables t;
    t.g_s = geom.g_s;
    t.g_p = geom.g_p;
    t.rabi_hz = geom.rabi_hz;
    t.j = a * geom.g_s + beg * geom.g_p;
    t.c = (bee - bgg) * geom.g_p;
    t.x = (bee - 2.0 * beg + bgg) * geom.g_p;
    return t;
}

CouplingTables build_coupling_tables(const SampleEnsemble& ensemble, const Config& cfg) {
    return apply_scattering(build_geometry(ensemble, cfg), cfg.atoms, cfg.constants);
}

CouplingTables uniform_tables(int n, double j, double c, double x, double rabi_hz) {
    CouplingTables t;
    auto fill = [n](double v) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, v);
        m.diagonal().setZero();
        return m;
    };
    t.j = fill(j);
    t.c = fill(c);
    t.x = fill(x);
    t.g_s = fill(0.0);
    t.g_p = fill(0.0);
    t.rabi_hz = Eigen::VectorXd::Constant(n, rabi_hz);
    return t;
}

double laguerre(int n, double x) {
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = 1.0 - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

LambDicke lamb_dicke(const TrapDerived& trap, double misalignment) {
    // sqrt(hbar / (2 m omega)) = 1 / (sqrt(2) R)
    LambDicke eta;
    eta.eta_z = trap.k * std::cos(misalignment) / (std::numbers::sqrt2 * trap.r_z);
    eta.eta_x = trap.k * std::sin(misalignment) / (std::numbers::sqrt2 * trap.r_r);
    eta.eta_y = 0.0;
    return eta;
}

double rabi_frequency(const MotionalState& s, double bare_rabi_hz, const TrapDerived& trap,
                      double misalignment) {
    const LambDicke eta = lamb_dicke(trap, misalignment);
    auto factor = [](double e, int n) {
        const double e2 = e * e;
        return std::exp(-0.5 * e2) * laguerre(n, e2);
    };
    return bare_rabi_hz * factor(eta.eta_x, s.nx) * factor(eta.eta_y, s.ny) * factor(eta.eta_z, s.nz);
}

} // namespace mbsed

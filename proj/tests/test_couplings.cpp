#include "mbsed/couplings.hpp"
#include "mbsed/overlap.hpp"
#include "mbsed/sampler.hpp"

#include <doctest.h>

#include <numbers>

using namespace mbsed;

namespace {

Config nstc() {
    Config cfg;
    cfg.trap = {66000, 250, 5, 0.010};
    cfg.atoms = {5, 3, 3, 68, 73.8, 150.19, 192.34};
    validate(cfg);
    return cfg;
}

} // namespace

TEST_CASE("pair couplings from the overlap products") {
    const Config cfg = nstc();
    const auto& d = cfg.derived;
    const auto& c = cfg.constants;
    const MotionalState a = make_state(2, 1, 0, d, c);
    const MotionalState b = make_state(0, 3, 1, d, c);
    const PairCoupling pc = pair_couplings(a, b, d, c);

    auto s = [](int i, int j) { return s_overlap(i, j, j, i); };
    auto p = [](int i, int j) { return p_overlap(i, j, j, i); };
    const double S = s(2, 0) * s(1, 3) * s(0, 1);
    const double PR = p(2, 0) * s(1, 3) * s(0, 1) + s(2, 0) * p(1, 3) * s(0, 1);
    const double PZ = s(2, 0) * s(1, 3) * p(0, 1);
    const double rr = d.r_r, rz = d.r_z;
    const double pref = std::numbers::pi * c.hbar / c.atom_mass;
    CHECK(pc.g_s == doctest::Approx(4.0 * pref * rr * rr * rz * S).epsilon(1e-13));
    CHECK(pc.g_p ==
          doctest::Approx(6.0 * pref * (rr * rr * rr * rr * rz * PR + rr * rr * rz * rz * rz * PZ)).epsilon(1e-13));

    const PairCoupling swapped = pair_couplings(b, a, d, c);
    CHECK(swapped.g_s == pc.g_s);
    CHECK(swapped.g_p == pc.g_p);
}

TEST_CASE("sampled tables: symmetry, signs and scattering weights") {
    const Config cfg = nstc();
    const ProbabilityTable table = partition_table(cfg);
    for (std::uint64_t k = 0; k < 10; ++k) {
        const SampleEnsemble e = draw_ensemble(table, 5, 3, k, cfg.derived, cfg.constants);
        const GeometryTables g = build_geometry(e, cfg);
        const CouplingTables t = apply_scattering(g, cfg.atoms, cfg.constants);
        CHECK(t.j.isApprox(t.j.transpose(), 0.0));
        CHECK(t.j.diagonal().isZero(0.0));
        CHECK(g.g_p.maxCoeff() <= 0.0);
        CHECK(g.g_s.minCoeff() >= 0.0);

        const double a0 = cfg.constants.bohr_radius;
        const double bee = std::pow(150.19 * a0, 3), beg = std::pow(192.34 * a0, 3), bgg = std::pow(73.8 * a0, 3);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                if (i == j) continue;
                CHECK(t.j(i, j) == doctest::Approx(68 * a0 * g.g_s(i, j) + beg * g.g_p(i, j)));
                CHECK(t.c(i, j) == doctest::Approx((bee - bgg) * g.g_p(i, j)));
                CHECK(t.x(i, j) == doctest::Approx((bee - 2 * beg + bgg) * g.g_p(i, j)));
                // the ratio C/X is fixed by the scattering volumes alone
                CHECK(t.c(i, j) / t.x(i, j) == doctest::Approx((bee - bgg) / (bee - 2 * beg + bgg)));
            }
        // L_n(eta^2) changes sign for very hot transverse modes, so only |Omega| is bounded
        CHECK(t.rabi_hz.cwiseAbs().maxCoeff() <= 500.0);
        CHECK(t.rabi_hz.mean() > 0.0);
    }
}

TEST_CASE("interaction scale is a fraction of a hertz") {
    // The collective averages at 3 uK sit in the 0.1 - 1 rad/s range.
    const Config cfg = nstc();
    const ProbabilityTable table = partition_table(cfg);
    double x = 0.0;
    for (std::uint64_t k = 0; k < 50; ++k)
        x += build_coupling_tables(draw_ensemble(table, 5, 1, k, cfg.derived, cfg.constants), cfg).mean_x() / 50.0;
    CHECK(x > 0.1);
    CHECK(x < 1.0);
}

TEST_CASE("uniform tables") {
    const CouplingTables t = uniform_tables(4, 0.1, -0.2, 0.3, 7.0);
    CHECK(t.mean_x() == doctest::Approx(0.3));
    CHECK(t.mean_c() == doctest::Approx(-0.2));
    CHECK(t.mean_rabi_hz() == 7.0);
    CHECK(t.j(1, 1) == 0.0);
}

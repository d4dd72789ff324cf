#include "mbsed/couplings.hpp"
#include "mbsed/rng.hpp"
#include "mbsed/sampler.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <set>
#include <tuple>

using namespace mbsed;

namespace {

Config nstc(double t_uk = 3.0) {
    Config cfg;
    cfg.trap = {66000, 250, 5, 0.010};
    cfg.atoms = {5, t_uk, t_uk, 68, 73.8, 150.19, 192.34};
    validate(cfg);
    return cfg;
}

} // namespace

TEST_CASE("stream rng is reproducible and stream-separated") {
    StreamRng a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        CHECK(x != c.next());
    }
    StreamRng u(1, 1);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
        CHECK(u.below(3) < 3u);
    }
}

TEST_CASE("partition table matches the Boltzmann weights") {
    const Config cfg = nstc(3.0);
    const ProbabilityTable t = partition_table(cfg);
    const auto ref = oracle::boltzmann(cfg, 3.0, 3.0);
    REQUIRE(t.size() == ref.size());
    double total = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto it = ref.find({t.nz[i], t.nr[i]});
        REQUIRE(it != ref.end());
        CHECK(t.prob[i] == doctest::Approx(it->second).epsilon(1e-12));
        total += t.prob[i];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t.cdf.back() == 1.0);
    // every state lies below the trap depth: n_z <= 4 with U = 5 hbar w_z
    for (int z : t.nz) CHECK(z <= 4);
}

TEST_CASE("ensembles are deterministic, distinct and index-addressed") {
    const Config cfg = nstc(5.0);
    const ProbabilityTable t = partition_table(cfg);
    for (std::uint64_t k = 0; k < 50; ++k) {
        const SampleEnsemble a = draw_ensemble(t, 8, 99, k, cfg.derived, cfg.constants);
        const SampleEnsemble b = draw_ensemble(t, 8, 99, k, cfg.derived, cfg.constants);
        std::set<std::tuple<int, int, int>> seen;
        for (std::size_t i = 0; i < a.states.size(); ++i) {
            CHECK(a.states[i].same_mode(b.states[i]));
            seen.insert({a.states[i].nx, a.states[i].ny, a.states[i].nz});
        }
        CHECK(seen.size() == 8);
    }
    const SampleEnsemble x = draw_ensemble(t, 8, 99, 3, cfg.derived, cfg.constants);
    const SampleEnsemble y = draw_ensemble(t, 8, 100, 3, cfg.derived, cfg.constants);
    bool differ = false;
    for (std::size_t i = 0; i < 8; ++i) differ |= !x.states[i].same_mode(y.states[i]);
    CHECK(differ);
}

TEST_CASE("Pauli rejection redraws crowded ensembles") {
    // A trap with only a handful of admissible states forces frequent clashes.
    Config cfg = nstc(3.0);
    cfg.trap = {66000, 30000, 1.6, 0.0};
    validate(cfg);
    const ProbabilityTable t = partition_table(cfg);
    CHECK(t.distinct_states() == 3);
    int rejected = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const SampleEnsemble e = draw_ensemble(t, 3, 5, k, cfg.derived, cfg.constants);
        rejected += e.rejections;
        CHECK(!e.states[0].same_mode(e.states[1]));
        CHECK(!e.states[1].same_mode(e.states[2]));
        CHECK(!e.states[0].same_mode(e.states[2]));
    }
    CHECK(rejected > 0);
    CHECK_THROWS_AS(draw_ensemble(t, 4, 5, 0, cfg.derived, cfg.constants), SamplerError);
}

TEST_CASE("transverse quanta split uniformly between x and y") {
    const Config cfg = nstc(5.0);
    const ProbabilityTable t = partition_table(cfg);
    // Conditional on n_r = nx + ny, nx is uniform on 0..n_r.
    long long low = 0, high = 0;
    for (std::uint64_t k = 0; k < 4000; ++k) {
        for (const auto& s : draw_ensemble(t, 2, 11, k, cfg.derived, cfg.constants).states) {
            if (s.nr() < 2) continue;
            (2 * s.nx < s.nr() ? low : high) += 2 * s.nx == s.nr() ? 0 : 1;
        }
    }
    CHECK(std::abs(double(low - high)) < 4.0 * std::sqrt(double(low + high)));
}

TEST_CASE("Rabi frequency of the motional ground state") {
    const Config cfg = nstc();
    const LambDicke eta = lamb_dicke(cfg.derived, cfg.trap.misalignment);
    const MotionalState g = make_state(0, 0, 0, cfg.derived, cfg.constants);
    CHECK(rabi_frequency(g, 500.0, cfg.derived, cfg.trap.misalignment) ==
          doctest::Approx(500.0 * std::exp(-0.5 * (eta.eta_x * eta.eta_x + eta.eta_z * eta.eta_z))));
    // Laguerre polynomials: L_2(x) = (x^2 - 4x + 2)/2
    CHECK(laguerre(2, 0.3) == doctest::Approx((0.09 - 1.2 + 2) / 2));
    CHECK(laguerre(0, 7.0) == 1.0);
}

TEST_CASE("Rabi inhomogeneity grows with temperature") {
    Config cfg = nstc();
    const auto map = rabi_inhomogeneity_map(cfg, {1.0, 5.0}, {1.0, 5.0}, 40);
    REQUIRE(map.size() == 4);
    CHECK(map[0].ratio() < map[3].ratio());
    CHECK(map[0].ratio() < map[1].ratio()); // T_r
    CHECK(map[0].ratio() < map[2].ratio()); // T_z
    const auto serial = rabi_inhomogeneity_map(cfg, {1.0, 5.0}, {1.0, 5.0}, 40, Execution::Serial);
    for (std::size_t i = 0; i < 4; ++i) CHECK(serial[i].std_rabi_hz == map[i].std_rabi_hz);
}

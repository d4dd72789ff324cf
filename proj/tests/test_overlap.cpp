#include "mbsed/overlap.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mbsed;

TEST_CASE("spot values") {
    CHECK(std::abs(s_overlap(0, 0, 0, 0) - 1.0 / std::sqrt(2.0 * std::numbers::pi)) < 1e-15);
    CHECK(p_overlap(0, 0, 0, 0) == 0.0);
    CHECK(s_overlap(1, 0, 0, 0) == 0.0);
    CHECK(s_overlap(3, 2, 1, 1) == 0.0);
    CHECK(s_overlap(1, 0, 0, 0) == 0.0);
    // int phi_0^2 phi_1^2 = 1/(2 sqrt(2 pi))
    CHECK(s_overlap(1, 1, 0, 0) == doctest::Approx(0.5 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("permutation symmetry of s") {
    const double v = s_overlap(5, 3, 2, 4);
    CHECK(s_overlap(3, 5, 4, 2) == v);
    CHECK(s_overlap(2, 4, 5, 3) == v);
    CHECK(s_overlap(4, 2, 3, 5) == v);
}

TEST_CASE("recursion against Gauss-Hermite quadrature") {
    const oracle::HermiteRule rule(60);
    const oracle::HermiteTable tab(rule, 10);
    for (int a = 0; a <= 10; ++a)
        for (int b = 0; b <= 10; ++b)
            for (int c = 0; c <= 10; c += 3)
                for (int d = 0; d <= 10; d += 2) {
                    const double sq = oracle::s_quad(rule, tab, a, b, c, d);
                    const double pq = oracle::p_quad(rule, tab, a, b, c, d);
                    CHECK(std::abs(s_overlap(a, b, c, d) - sq) <= std::max(1e-11 * std::abs(sq), 1e-14));
                    CHECK(std::abs(p_overlap(a, b, c, d) - pq) <= std::max(1e-11 * std::abs(pq), 1e-14));
                }
}

TEST_CASE("energy-conserving slice: p is minus a squared Wronskian") {
    for (int a = 0; a < 12; ++a)
        for (int b = 0; b < 12; ++b) CHECK(p_overlap(a, b, b, a) <= 0.0);
    CHECK(p_overlap(3, 3, 3, 3) == 0.0);
}

TEST_CASE("pair_overlap: both routes agree below the recursion cap") {
    for (int a : {0, 1, 7, 20, 41, 64})
        for (int b : {0, 2, 13, 33, 64}) {
            const PairOverlap r{s_overlap(a, b, b, a), p_overlap(a, b, b, a)};
            const PairOverlap l = laguerre_pair_overlap(a, b);
            CHECK(l.s == doctest::Approx(r.s).epsilon(1e-11));
            CHECK(std::abs(l.p - r.p) <= 1e-11 * std::max(1.0, std::abs(r.p)));
            const PairOverlap c = pair_overlap(a, b);
            CHECK(c.s == doctest::Approx(r.s).epsilon(1e-11));
        }
}

TEST_CASE("pair_overlap for large indices against direct quadrature") {
    // Trapezoid rule on a fine grid; the integrand is smooth and decays fast.
    for (auto [a, b] : {std::pair{0, 1320}, {300, 900}, {1320, 1320}, {70, 1000}}) {
        const double L = std::sqrt(2.0 * std::max(a, b) + 1.0) + 8.0;
        const int m = 40000;
        const double h = 2.0 * L / m;
        double s = 0.0, p = 0.0;
        for (int k = 0; k <= m; ++k) {
            const double x = -L + h * k;
            const auto ta = oracle::hermite_triplet(a, x), tb = oracle::hermite_triplet(b, x);
            const double fa = ta.at, fb = tb.at;
            const double w = ta.derivative(a) * fb - fa * tb.derivative(b);
            const double wt = (k == 0 || k == m) ? 0.5 : 1.0;
            s += wt * fa * fa * fb * fb;
            p -= wt * w * w;
        }
        s *= h;
        p *= h;
        const PairOverlap o = pair_overlap(a, b);
        CHECK(o.s == doctest::Approx(s).epsilon(1e-8));
        CHECK(o.p == doctest::Approx(p).epsilon(1e-8));
    }
}

TEST_CASE("gauss_laguerre integrates polynomials exactly") {
    const GaussLaguerreRule r = gauss_laguerre(20, -0.5);
    // int u^{k-1/2} e^{-u} = Gamma(k + 1/2)
    for (int k = 0; k < 30; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += std::exp(r.log_weights[i]) * std::pow(r.nodes[i], k);
        CHECK(sum == doctest::Approx(std::tgamma(k + 0.5)).epsilon(1e-12));
    }
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(s_overlap(-1, 0, 0, 0), OverlapError);
    CHECK_THROWS_AS(s_overlap(kOverlapIndexCap + 1, 0, 0, 0), OverlapError);
}

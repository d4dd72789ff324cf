#include "mbsed/overlap.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace mbsed {

namespace {

std::uint64_t pack(int a, int b, int c, int d) {
    return (std::uint64_t(a) << 48) | (std::uint64_t(b) << 32) | (std::uint64_t(c) << 16) |
           std::uint64_t(d);
}

void check_indices(int n1, int n2, int n3, int n4) {
    for (int n : {n1, n2, n3, n4}) {
        if (n < 0) throw OverlapError("overlap index must be non-negative");
        if (n > kOverlapIndexCap)
            throw OverlapError("overlap index " + std::to_string(n) + " exceeds cap " +
                               std::to_string(kOverlapIndexCap));
    }
}

} // namespace

OverlapCache& overlap_cache() {
    static OverlapCache cache;
    return cache;
}

std::size_t OverlapCache::size() const {
    std::shared_lock lock(mutex_);
    return memo_.size();
}

double OverlapCache::s(int n1, int n2, int n3, int n4) {
    check_indices(n1, n2, n3, n4);
    std::array<int, 4> k{n1, n2, n3, n4};
    std::sort(k.begin(), k.end(), std::greater<>());
    return s_sorted(k[0], k[1], k[2], k[3]);
}

// a >= b >= c >= d.  The largest index is lowered:
//   s(a,b,c,d) = [sqrt(b) s(a-1,b-1,c,d) + sqrt(c) s(a-1,b,c-1,d) + sqrt(d) s(a-1,b,c,d-1)] / (2 sqrt(a))
//              - sqrt((a-1)/a) s(a-2,b,c,d) / 2
double OverlapCache::s_sorted(int a, int b, int c, int d) {
    if (((a + b + c + d) & 1) != 0) return 0.0;
    if (a == 0) return 1.0 / std::sqrt(2.0 * std::numbers::pi);

    const std::uint64_t key = pack(a, b, c, d);
    {
        std::shared_lock lock(mutex_);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }

    auto lowered = [this](int w, int x, int y, int z) {
        std::array<int, 4> k{w, x, y, z};
        std::sort(k.begin(), k.end(), std::greater<>());
        return s_sorted(k[0], k[1], k[2], k[3]);
    };

    const double inv = 0.5 / std::sqrt(double(a));
    double value = 0.0;
    if (b > 0) value += std::sqrt(double(b)) * inv * lowered(a - 1, b - 1, c, d);
    if (c > 0) value += std::sqrt(double(c)) * inv * lowered(a - 1, b, c - 1, d);
    if (d > 0) value += std::sqrt(double(d)) * inv * lowered(a - 1, b, c, d - 1);
    if (a >= 2) value -= 0.5 * std::sqrt(double(a - 1) / a) * lowered(a - 2, b, c, d);

    std::unique_lock lock(mutex_);
    memo_.emplace(key, value);
    return value;
}

double OverlapCache::p(int n1, int n2, int n3, int n4) {
    check_indices(n1, n2, n3, n4);
    double value = 0.0;
    if (n1 > 0 && n3 > 0) value += 2.0 * std::sqrt(double(n1) * n3) * s(n1 - 1, n2, n3 - 1, n4);
    if (n2 > 0 && n3 > 0) value -= 2.0 * std::sqrt(double(n2) * n3) * s(n1, n2 - 1, n3 - 1, n4);
    if (n1 > 0 && n4 > 0) value -= 2.0 * std::sqrt(double(n1) * n4) * s(n1 - 1, n2, n3, n4 - 1);
    if (n2 > 0 && n4 > 0) value += 2.0 * std::sqrt(double(n2) * n4) * s(n1, n2 - 1, n3, n4 - 1);
    return value;
}

double s_overlap(int n1, int n2, int n3, int n4) { return overlap_cache().s(n1, n2, n3, n4); }
double p_overlap(int n1, int n2, int n3, int n4) { return overlap_cache().p(n1, n2, n3, n4); }

namespace {

// Generalised Laguerre recurrence with a running logarithmic scale:
// L = mantissa * exp(log_scale).
struct ScaledLaguerre {
    double prev = 0.0;  // L_{n-1} mantissa
    double cur = 1.0;   // L_n mantissa
    double log_scale = 0.0;
    int n = 0;

    void step(double alpha, double x) {
        const double next = ((2.0 * n + 1.0 + alpha - x) * cur - (n + alpha) * prev) / (n + 1.0);
        prev = cur;
        cur = next;
        ++n;
        const double m = std::max(std::abs(cur), std::abs(prev));
        if (m > 1e150) {
            prev *= 1e-150;
            cur *= 1e-150;
            log_scale += 150.0 * std::numbers::ln10;
        }
    }
};

} // namespace

GaussLaguerreRule gauss_laguerre(int n, double alpha) {
    if (n < 1) throw OverlapError("Gauss-Laguerre rule needs at least one node");
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    for (int i = 0; i < n; ++i) diag[i] = 2.0 * i + alpha + 1.0;
    for (int i = 1; i < n; ++i) sub[i - 1] = std::sqrt(i * (i + alpha));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw OverlapError("Gauss-Laguerre node computation failed");

    GaussLaguerreRule rule;
    rule.alpha = alpha;
    rule.nodes.resize(n);
    rule.log_weights.resize(n);
    const double log_norm = std::lgamma(n + alpha + 1.0) - std::lgamma(n + 1.0);

    for (int k = 0; k < n; ++k) {
        double x = solver.eigenvalues()[k];
        double lm = 0.0; // L_n at x (mantissa)
        double lm1 = 0.0;
        double scale = 0.0;
        // Newton polish on L_n; x L_n' = n L_n - (n + alpha) L_{n-1}.
        for (int iter = 0; iter < 4; ++iter) {
            ScaledLaguerre rec;
            rec.prev = 0.0;
            rec.cur = 1.0;
            for (int j = 0; j < n; ++j) rec.step(alpha, x);
            lm = rec.cur;
            lm1 = rec.prev;
            scale = rec.log_scale;
            const double deriv = (n * lm - (n + alpha) * lm1) / x;
            const double dx = lm / deriv;
            x -= dx;
            if (std::abs(dx) <= 1e-16 * std::abs(x)) break;
        }
        ScaledLaguerre rec;
        for (int j = 0; j < n; ++j) rec.step(alpha, x);
        lm = rec.cur;
        lm1 = rec.prev;
        scale = rec.log_scale;
        const double deriv = (n * lm - (n + alpha) * lm1) / x;
        rule.nodes[k] = x;
        // w = Gamma(n + alpha + 1) / (n! x [L_n'(x)]^2)
        rule.log_weights[k] = log_norm - std::log(x) - 2.0 * (std::log(std::abs(deriv)) + scale);
    }
    return rule;
}

namespace {

const GaussLaguerreRule& half_integer_rule(int min_nodes) {
    static std::mutex mutex;
    static std::map<int, GaussLaguerreRule> rules;
    const int n = ((min_nodes + 7) / 8) * 8;
    std::lock_guard lock(mutex);
    auto it = rules.find(n);
    if (it == rules.end()) it = rules.emplace(n, gauss_laguerre(n, -0.5)).first;
    return it->second;
}

struct Captured {
    double value = 0.0;
    double log_scale = 0.0;
};

} // namespace

PairOverlap laguerre_pair_overlap(int a, int b) {
    if (a < 0 || b < 0) throw OverlapError("overlap index must be non-negative");
    if (a < b) std::swap(a, b);
    // Highest polynomial degree is a + b (the s term); the rule is exact up to 2n - 1.
    const auto& rule = half_integer_rule((a + b) / 2 + 1);
    const double prefactor = 1.0 / (std::numbers::pi * std::numbers::sqrt2);

    double d_ab = 0.0;  // int phi_a^2 phi_b^2
    double d_a1b = 0.0; // int phi_{a-1}^2 phi_b^2
    double d_ab1 = 0.0; // int phi_a^2 phi_{b-1}^2
    double x_ab = 0.0;  // int phi_{a-1} phi_a phi_{b-1} phi_b

    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double u = rule.nodes[k];
        ScaledLaguerre rec;
        Captured la{}, la1{}, lb{}, lb1{};
        for (;;) {
            if (rec.n == b) {
                lb = {rec.cur, rec.log_scale};
                lb1 = {rec.prev, rec.log_scale};
            }
            if (rec.n == a) {
                la = {rec.cur, rec.log_scale};
                la1 = {rec.prev, rec.log_scale};
                break;
            }
            rec.step(0.0, u);
        }
        const double lw = rule.log_weights[k];
        auto term = [&](const Captured& p, const Captured& q) {
            if (p.value == 0.0 || q.value == 0.0) return 0.0;
            return p.value * q.value * std::exp(lw + p.log_scale + q.log_scale);
        };
        d_ab += term(la, lb);
        if (a > 0) d_a1b += term(la1, lb);
        if (b > 0) d_ab1 += term(la, lb1);
        if (a > 0 && b > 0) {
            // x L^{(1)}_{n-1}(x) = n (L_{n-1}(x) - L_n(x)); the 1/u factor leaves a polynomial.
            const double da = la1.value - la.value;
            const double db = lb1.value - lb.value;
            x_ab += da * db / u * std::exp(lw + la.log_scale + lb.log_scale);
        }
    }
    d_ab *= prefactor;
    d_a1b *= prefactor;
    d_ab1 *= prefactor;
    x_ab *= prefactor * std::sqrt(double(a) * b);

    PairOverlap out;
    out.s = d_ab;
    // p(a,b,b,a) = 4 sqrt(ab) X(a,b) - 2a D(a-1,b) - 2b D(a,b-1)
    out.p = 4.0 * std::sqrt(double(a) * b) * x_ab - 2.0 * a * d_a1b - 2.0 * b * d_ab1;
    return out;
}

PairOverlap pair_overlap(int a, int b) {
    if (a < b) std::swap(a, b);
    if (a <= kOverlapIndexCap) return {s_overlap(a, b, b, a), p_overlap(a, b, b, a)};

    static std::shared_mutex mutex;
    static std::unordered_map<std::uint64_t, PairOverlap> memo;
    const std::uint64_t key = (std::uint64_t(a) << 32) | std::uint64_t(b);
    {
        std::shared_lock lock(mutex);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
    }
    const PairOverlap value = laguerre_pair_overlap(a, b);
    std::unique_lock lock(mutex);
    memo.emplace(key, value);
    return value;
}

} // namespace mbsed

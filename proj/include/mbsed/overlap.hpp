#pragma once

#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace mbsed {

/// Largest 1D index accepted by the four-index recursion.
inline constexpr int kOverlapIndexCap = 64;

class OverlapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Memoised four-index overlaps of harmonic-oscillator functions,
///
///   s(n1,n2,n3,n4) = int phi_n1 phi_n2 phi_n3 phi_n4 dxi
///
/// evaluated with the Hermite raising recursion from s(0,0,0,0) = 1/sqrt(2 pi).
/// Keys are canonicalised (sorted), so permuted tuples share one entry.
/// Thread-safe: concurrent lookups, serialised inserts.
class OverlapCache {
public:
    double s(int n1, int n2, int n3, int n4);
    /// p assembled from four s values.
    double p(int n1, int n2, int n3, int n4);

    std::size_t size() const;

private:
    double s_sorted(int a, int b, int c, int d);

    mutable std::shared_mutex mutex_;
    std::unordered_map<std::uint64_t, double> memo_;
};

OverlapCache& overlap_cache();

double s_overlap(int n1, int n2, int n3, int n4);
double p_overlap(int n1, int n2, int n3, int n4);

/// The energy-conserving slice used by the spin model: s(a,b,b,a) and p(a,b,b,a).
struct PairOverlap {
    double s = 0.0;
    double p = 0.0;
};

/// Diagonal-slice overlaps for any index size.  Small indices go through the
/// recursion; larger ones through an exact Gauss-Laguerre evaluation of the
/// Fourier representation (see laguerre_pair_overlap).  Results are memoised.
PairOverlap pair_overlap(int a, int b);

/// s(a,b,b,a) and p(a,b,b,a) via
///   int phi_a^2 phi_b^2 = 1/(pi sqrt 2) int_0^inf u^{-1/2} e^{-u} L_a(u) L_b(u) du,
/// integrated exactly by a generalised Gauss-Laguerre rule with log-scaled
/// Laguerre recurrences (no overflow for indices in the thousands).
PairOverlap laguerre_pair_overlap(int a, int b);

/// Gauss rule for the weight u^alpha e^{-u} on [0, inf).  Weights are stored
/// as logarithms because they underflow for large rules.
struct GaussLaguerreRule {
    double alpha = 0.0;
    std::vector<double> nodes;
    std::vector<double> log_weights;
};

GaussLaguerreRule gauss_laguerre(int n, double alpha);

} // namespace mbsed

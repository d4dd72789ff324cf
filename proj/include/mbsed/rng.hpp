#pragma once

#include <cstdint>
#include <random>

namespace mbsed {

/// Per-stream generator.  Streams are keyed by (master_seed, stream index) so
/// any sample can be regenerated independently of scheduling.
class StreamRng {
public:
    StreamRng(std::uint64_t master_seed, std::uint64_t stream);

    std::uint64_t next() { return engine_(); }
    /// Uniform double in [0, 1) built from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    double normal();

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace mbsed

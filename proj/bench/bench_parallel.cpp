// Serial reference vs OpenMP sample-parallel map on the same workloads.
// Results must agree bit for bit; only the wall time may differ.

#include "mbsed/csv.hpp"
#include "mbsed/sampler.hpp"
#include "mbsed/spectroscopy.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

using namespace mbsed;

namespace {

const char* kConfig = R"(
trap.nu_z_hz = 66000
trap.nu_r_hz = 250
trap.depth_hbar_omega_z = 5
trap.misalignment_rad = 0.010
atoms.n = 5
atoms.t_z_uk = 3
atoms.t_r_uk = 3
atoms.a_eg_minus_bohr = 68
atoms.b_gg_bohr = 73.8
atoms.b_ee_bohr = 150.19
atoms.b_eg_bohr = 192.34
protocol.kind = ramsey
protocol.pulse_areas_pi = 0.3, 0.5, 0.7
protocol.detuning_min_hz = -0.5
protocol.detuning_max_hz = 0.5
protocol.detuning_points = 41
mc.max_samples = 64
mc.min_samples = 64
mc.seed = 7
)";

template <class Fn>
double seconds(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string csv(const ProtocolRun& run, const Config& cfg) {
    std::string s = shift_csv(run.shifts, {cfg.atoms.n_atoms, cfg.atoms.t_z_uk, cfg.atoms.t_r_uk}).str();
    for (const auto& sp : run.spectra) s += spectrum_csv(sp).str();
    return s;
}

bool bench_protocol(const char* name, Config cfg) {
    validate(cfg);
    ProtocolRun serial, parallel;
    // Warm the overlap memo so neither side pays for it.
    run_protocol(cfg, Execution::Parallel);
    const double ts = seconds([&] { serial = run_protocol(cfg, Execution::Serial); });
    const double tp = seconds([&] { parallel = run_protocol(cfg, Execution::Parallel); });
    const bool same = csv(serial, cfg) == csv(parallel, cfg);
    std::printf("%-18s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   identical %s\n", name, ts, tp, ts / tp,
                same ? "yes" : "NO");
    return same;
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) set_threads(std::atoi(argv[1]));
    std::printf("threads: %d\n", max_threads());
    const Config base = parse_config(kConfig);
    bool ok = true;

    ok &= bench_protocol("ramsey N=5", base);
    Config rabi = base;
    rabi.protocol.protocol = Protocol::Rabi;
    rabi.protocol.bare_rabi_hz = 5.0;
    rabi.protocol.grid = {-2.5, 2.5, 41};
    ok &= bench_protocol("rabi N=5", rabi);
    Config big = base;
    big.atoms.n_atoms = 8;
    big.protocol.pulse_areas_pi = {0.5};
    ok &= bench_protocol("ramsey N=8", big);

    Config spread = base;
    validate(spread);
    std::vector<RabiSpreadPoint> a, b;
    const std::vector<double> t{1, 2, 3, 4, 5};
    const double ts = seconds([&] { a = rabi_inhomogeneity_map(spread, t, t, 50, Execution::Serial); });
    const double tp = seconds([&] { b = rabi_inhomogeneity_map(spread, t, t, 50, Execution::Parallel); });
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i)
        same = a[i].mean_rabi_hz == b[i].mean_rabi_hz && a[i].std_rabi_hz == b[i].std_rabi_hz;
    std::printf("%-18s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   identical %s\n", "rabi spread 5x5", ts, tp,
                ts / tp, same ? "yes" : "NO");
    ok &= same;
    return ok ? 0 : 1;
}

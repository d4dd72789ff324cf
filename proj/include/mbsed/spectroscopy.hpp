#pragma once

#include "mbsed/couplings.hpp"
#include "mbsed/evolution.hpp"
#include "mbsed/parallel.hpp"
#include "mbsed/shift.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace mbsed {

/// One operating point of a scan: either an explicit duration or an area
/// (units of pi) converted with the per-sample mean Rabi frequency.
struct OperatingPoint {
    double area_pi = 0.0;
    double time_s = 0.0;
    bool explicit_time = false;

    /// Duration for a given mean Rabi frequency: rotation 2 pi Omega t = area * pi.
    double duration(double mean_rabi_hz) const {
        return explicit_time ? time_s : area_pi / (2.0 * mean_rabi_hz);
    }
};

std::vector<OperatingPoint> operating_points(const ProtocolConfig& p);

/// Excitation spectra of one ensemble at every operating point.
struct SampleOutcome {
    std::vector<std::vector<double>> pe; // [point][detuning]
    std::vector<double> pe_op;           // [point] Ramsey: after first pulse at delta = 0
    std::vector<double> pulse_time_s;    // [point]
};

/// Runs the configured protocol for one set of coupling tables.
/// `sectors` (may be null) restricts the spin dynamics.
SampleOutcome simulate_tables(const Config& cfg, const CouplingTables& tables, const SpinSectorBasis* sectors);

struct ProtocolRun {
    Protocol protocol = Protocol::Ramsey;
    std::vector<OperatingPoint> points;
    std::vector<Spectrum> spectra;   // one per operating point
    std::vector<ShiftResult> shifts; // one per operating point
    std::size_t n_samples = 0;
    bool converged = false;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t max)>;

/// Monte-Carlo driver: samples are simulated in batches (in parallel when
/// requested), stored by index and reduced in index order, so the output
/// does not depend on the thread count.
ProtocolRun run_protocol(const Config& cfg, Execution exec = Execution::Parallel,
                         const ProgressFn& progress = {});

ProtocolRun run_ramsey(const Config& cfg, Execution exec = Execution::Parallel);
ProtocolRun run_rabi(const Config& cfg, Execution exec = Execution::Parallel);
ProtocolRun run_collective(const Config& cfg, Execution exec = Execution::Parallel);

/// Sector basis for the configured truncation, or null for the full space.
std::shared_ptr<const SpinSectorBasis> sectors_for(const Config& cfg);

/// Collective Ramsey shift (Hz): 2 pi dnu = (N-1)(l - C_bar) with
/// tan(l tau) = cos(theta1) tan(X_bar tau), theta1 = 2 pi Omega_bar t1,
/// taking l on the branch continuous with l = X_bar cos(theta1) at small tau.
double analytic_ramsey_shift(double mean_rabi_hz, double mean_x, double mean_c, int n_atoms, double t1_s,
                             double tau_s);

/// Zero-shift excitation fraction of the collective model, from cos(theta1) = C_bar / X_bar.
double collective_zero_shift_fraction(double mean_x, double mean_c);

/// Thermal average of the analytic shift: per-sample Omega_bar, X_bar, C_bar.
ProtocolRun run_analytic(const Config& cfg, Execution exec = Execution::Parallel);

} // namespace mbsed

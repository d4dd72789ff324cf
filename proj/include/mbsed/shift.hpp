#pragma once

#include "mbsed/config.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mbsed {

class ShiftError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Spectrum {
    std::vector<double> detuning_hz;
    std::vector<double> pe_mean;
    std::vector<double> pe_stderr;
    std::size_t n_samples = 0;
};

struct ShiftResult {
    Protocol protocol = Protocol::Ramsey;
    double shift_hz = 0.0;   // detuning of the fringe maximum
    double stderr_hz = 0.0;
    double pe_op = 0.0;      // excitation fraction at the operating point
    std::size_t n_samples = 0;
    bool converged = true;
    double pulse_time_s = 0.0; // Ramsey t1 or Rabi t (sample mean when area-defined)
    double tau_s = 0.0;
    double area_pi = 0.0;
};

struct PeakFit {
    double location = 0.0;
    double value = 0.0;
    std::size_t grid_index = 0; // coarse argmax
};

/// Coarse argmax followed by a parabola through the three points around it.
/// Throws ShiftError("... widen detuning window") when the maximum sits on
/// the grid boundary.
PeakFit parabolic_peak(const std::vector<double>& x, const std::vector<double>& y);

/// Peak of an averaged spectrum.  The error is propagated by refitting with
/// each point moved by +-1 sigma and adding the responses in quadrature.
ShiftResult extract_shift(const Spectrum& spectrum);

/// Compensated (Neumaier) sum, order as given.
double compensated_sum(const std::vector<double>& values);

/// Per-sample output for one operating point.
struct PointSamples {
    std::vector<std::vector<double>> pe; // [sample][detuning]
    std::vector<double> pe_op;           // [sample], excitation at the operating point (Ramsey)
    std::vector<double> pulse_time_s;    // [sample]
};

/// Mean spectrum over the first n samples, reduced in index order.
Spectrum average_spectrum(const PointSamples& samples, const std::vector<double>& detunings, std::size_t n);

struct BootstrapResult {
    double stderr_hz = 0.0; // +inf when fewer than two resamples succeeded
    int failed = 0; // resamples whose peak left the window
};

/// Nonparametric bootstrap of the peak location: resample the sample set
/// with replacement, re-average, re-extract.  Resample r uses its own
/// deterministic stream, so the estimate depends only on (seed, n).
BootstrapResult bootstrap_shift(const PointSamples& samples, const std::vector<double>& detunings,
                                std::size_t n, int resamples, std::uint64_t seed);

struct ConvergenceDecision {
    bool stop = false;
    bool converged = false;
    std::vector<Spectrum> spectra;
    std::vector<ShiftResult> shifts;
};

/// Examines the first n samples of every operating point.  Stops once
/// n >= min_samples and every bootstrap error is below target, or when
/// n reaches max_samples (flagged as not converged).
ConvergenceDecision assess_convergence(const std::vector<PointSamples>& points,
                                       const std::vector<double>& detunings, std::size_t n,
                                       const MonteCarloConfig& mc, Protocol protocol);

} // namespace mbsed

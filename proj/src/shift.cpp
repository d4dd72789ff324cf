#include "mbsed/shift.hpp"

#include "mbsed/rng.hpp"

#include <algorithm>
#include <cmath>

namespace mbsed {

double compensated_sum(const std::vector<double>& values) {
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

PeakFit parabolic_peak(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3) throw ShiftError("peak fit needs at least three points");
    const auto it = std::max_element(y.begin(), y.end());
    const std::size_t k = static_cast<std::size_t>(it - y.begin());
    if (k == 0 || k + 1 == y.size())
        throw ShiftError("spectrum maximum on the grid boundary; widen detuning window");

    const double x0 = x[k - 1], x1 = x[k], x2 = x[k + 1];
    const double y0 = y[k - 1], y1 = y[k], y2 = y[k + 1];
    // Vertex of the interpolating parabola in divided-difference form.
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    PeakFit fit;
    fit.grid_index = k;
    if (a >= 0.0) {
        // Flat top: keep the grid point.
        fit.location = x1;
        fit.value = y1;
        return fit;
    }
    const double b = d01 - a * (x0 + x1);
    fit.location = -b / (2.0 * a);
    // Newton form evaluated at the vertex.
    fit.value = y0 + d01 * (fit.location - x0) + a * (fit.location - x0) * (fit.location - x1);
    return fit;
}

ShiftResult extract_shift(const Spectrum& spectrum) {
    const PeakFit fit = parabolic_peak(spectrum.detuning_hz, spectrum.pe_mean);
    ShiftResult r;
    r.shift_hz = fit.location;
    r.pe_op = fit.value;
    r.n_samples = spectrum.n_samples;

    double var = 0.0;
    if (spectrum.pe_stderr.size() == spectrum.pe_mean.size()) {
        const std::size_t k = fit.grid_index;
        for (std::size_t i = k - 1; i <= k + 1; ++i) {
            const double sigma = spectrum.pe_stderr[i];
            if (sigma <= 0.0) continue;
            std::vector<double> up = spectrum.pe_mean, down = spectrum.pe_mean;
            up[i] += sigma;
            down[i] -= sigma;
            try {
                const double dx = 0.5 * (parabolic_peak(spectrum.detuning_hz, up).location -
                                         parabolic_peak(spectrum.detuning_hz, down).location);
                var += dx * dx;
            } catch (const ShiftError&) {
                // A perturbation that moves the maximum to the boundary gives no
                // usable response; the bootstrap handles such spectra.
            }
        }
    }
    r.stderr_hz = std::sqrt(var);
    return r;
}

Spectrum average_spectrum(const PointSamples& samples, const std::vector<double>& detunings, std::size_t n) {
    if (n == 0 || n > samples.pe.size()) throw ShiftError("average_spectrum: bad sample count");
    const std::size_t g = detunings.size();
    Spectrum s;
    s.detuning_hz = detunings;
    s.n_samples = n;
    s.pe_mean.resize(g);
    s.pe_stderr.resize(g);
    std::vector<double> column(n);
    for (std::size_t d = 0; d < g; ++d) {
        for (std::size_t i = 0; i < n; ++i) column[i] = samples.pe[i][d];
        const double mean = compensated_sum(column) / double(n);
        for (std::size_t i = 0; i < n; ++i) column[i] = (samples.pe[i][d] - mean) * (samples.pe[i][d] - mean);
        s.pe_mean[d] = mean;
        s.pe_stderr[d] = n > 1 ? std::sqrt(compensated_sum(column) / double(n - 1) / double(n)) : 0.0;
    }
    return s;
}

BootstrapResult bootstrap_shift(const PointSamples& samples, const std::vector<double>& detunings,
                                std::size_t n, int resamples, std::uint64_t seed) {
    // No usable spread means no error estimate, never "converged".
    BootstrapResult out;
    out.stderr_hz = HUGE_VAL;
    if (resamples < 2 || n < 2) return out;
    const std::size_t g = detunings.size();
    std::vector<double> peaks;
    peaks.reserve(static_cast<std::size_t>(resamples));
    std::vector<double> mean(g);
    std::vector<std::size_t> pick(n);
    for (int r = 0; r < resamples; ++r) {
        StreamRng rng(seed ^ 0xb5ad4eceda1ce2a9ull, static_cast<std::uint64_t>(r));
        for (auto& p : pick) p = static_cast<std::size_t>(rng.below(n));
        std::sort(pick.begin(), pick.end());
        for (std::size_t d = 0; d < g; ++d) {
            double sum = 0.0, comp = 0.0;
            for (std::size_t i : pick) {
                const double v = samples.pe[i][d];
                const double t = sum + v;
                comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
                sum = t;
            }
            mean[d] = (sum + comp) / double(n);
        }
        try {
            peaks.push_back(parabolic_peak(detunings, mean).location);
        } catch (const ShiftError&) {
            ++out.failed;
        }
    }
    if (peaks.size() < 2) return out;
    const double m = compensated_sum(peaks) / double(peaks.size());
    std::vector<double> sq(peaks.size());
    for (std::size_t i = 0; i < peaks.size(); ++i) sq[i] = (peaks[i] - m) * (peaks[i] - m);
    out.stderr_hz = std::sqrt(compensated_sum(sq) / double(peaks.size() - 1));
    return out;
}

ConvergenceDecision assess_convergence(const std::vector<PointSamples>& points,
                                       const std::vector<double>& detunings, std::size_t n,
                                       const MonteCarloConfig& mc, Protocol protocol) {
    ConvergenceDecision d;
    bool all_below = true;
    for (std::size_t p = 0; p < points.size(); ++p) {
        const PointSamples& ps = points[p];
        Spectrum spec = average_spectrum(ps, detunings, n);
        ShiftResult r = extract_shift(spec);
        r.protocol = protocol;
        const BootstrapResult bs = bootstrap_shift(ps, detunings, n, mc.bootstrap_resamples,
                                                   mc.master_seed + 0x1000003ull * p);
        r.stderr_hz = bs.stderr_hz;
        if (!ps.pe_op.empty()) {
            std::vector<double> head(ps.pe_op.begin(), ps.pe_op.begin() + static_cast<std::ptrdiff_t>(n));
            r.pe_op = compensated_sum(head) / double(n);
        }
        if (!ps.pulse_time_s.empty()) {
            std::vector<double> head(ps.pulse_time_s.begin(),
                                     ps.pulse_time_s.begin() + static_cast<std::ptrdiff_t>(n));
            r.pulse_time_s = compensated_sum(head) / double(n);
        }
        if (!(r.stderr_hz < mc.target_stderr_hz)) all_below = false;
        d.spectra.push_back(std::move(spec));
        d.shifts.push_back(r);
    }
    const bool enough = n >= static_cast<std::size_t>(mc.min_samples);
    d.converged = enough && all_below;
    d.stop = d.converged || n >= static_cast<std::size_t>(mc.max_samples);
    for (auto& r : d.shifts) r.converged = d.converged;
    return d;
}

} // namespace mbsed

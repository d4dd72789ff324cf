#pragma once

#include "mbsed/spectroscopy.hpp"

#include <filesystem>
#include <limits>
#include <memory>
#include <vector>

namespace mbsed {

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ShiftRow {
    double pe = 0.0;
    double shift_hz = 0.0;
    double sigma_hz = std::numeric_limits<double>::quiet_NaN(); // NaN: unweighted
};

struct ShiftDataset {
    std::vector<ShiftRow> rows;
    int n_exp = 20;
    int n_sim = 12;

    void validate() const;
};

/// CSV with header `pe,shift_hz[,sigma_hz]`.
ShiftDataset load_shift_dataset(const std::filesystem::path& path, int n_exp, int n_sim);

/// Shift at N_exp from one at N_sim, using the (N-1) scaling.
double rescale_shift(double shift_hz, int n_sim, int n_exp);

/// Simulated shift (Hz, at N_sim) at the requested operating excitation fractions.
class ShiftModel {
public:
    virtual ~ShiftModel() = default;
    virtual std::vector<double> shifts(double b_ee, double b_eg, const std::vector<double>& pe) = 0;
};

/// Ramsey simulation on a frozen set of ensembles (common random numbers):
/// the geometry of every sample is computed once and only re-weighted by the
/// scattering parameters, so equal parameters give bitwise-equal shifts.
class SimulatedShiftModel : public ShiftModel {
public:
    SimulatedShiftModel(const Config& cfg, int n_samples, Execution exec = Execution::Parallel);

    std::vector<double> shifts(double b_ee, double b_eg, const std::vector<double>& pe) override;

    /// First-pulse area (units of pi) whose sample-averaged excitation equals pe.
    double area_for_excitation(double pe) const;
    std::size_t evaluations() const { return evaluations_; }
    const Config& config() const { return cfg_; }

private:
    double mean_excitation(double area) const;

    Config cfg_;
    Execution exec_;
    std::vector<GeometryTables> geometry_;
    std::shared_ptr<const SpinSectorBasis> sectors_;
    std::size_t evaluations_ = 0;
};

struct FitOptions {
    double b_ee0 = 150.0;
    double b_eg0 = 190.0;
    double b_ee_min = 0.0, b_ee_max = 400.0;
    double b_eg_min = 0.0, b_eg_max = 400.0;
    double initial_step = 10.0;   // a_B
    double size_tolerance = 1e-3; // simplex size at convergence, a_B
    int max_iterations = 300;
    int restarts = 2;
};

struct FitResult {
    double b_ee = 0.0;
    double b_eg = 0.0;
    double rss = 0.0; // weighted
    int iterations = 0;
    bool converged = false;
    bool degenerate = false; // objective flat around the optimum
    std::vector<double> residuals; // model(N_exp) - data, unweighted
    std::vector<double> model_hz;  // model rescaled to N_exp
};

/// Weighted residual sum of squares: weights 1/sigma^2 when given, else 1.
double fit_objective(const ShiftDataset& data, ShiftModel& model, double b_ee, double b_eg,
                     std::vector<double>* residuals = nullptr, std::vector<double>* model_hz = nullptr);

/// Derivative-free simplex minimisation inside the box bounds, restarted from
/// the best point while it keeps improving.
FitResult fit_scattering_lengths(const ShiftDataset& data, ShiftModel& model, const FitOptions& options = {});

} // namespace mbsed

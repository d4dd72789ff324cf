#include "mbsed/calibration.hpp"
#include "mbsed/csv.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace mbsed;

namespace {

/// Cheap stand-in with the same structure as the collective shift:
/// shift = a (1 - 2 pe) - b, where a, b are smooth in (b_ee, b_eg).
class ToyModel : public ShiftModel {
public:
    std::vector<double> shifts(double ee, double eg, const std::vector<double>& pe) override {
        ++calls;
        std::vector<double> out;
        for (double p : pe) out.push_back(1e-3 * (ee - 0.5 * eg) * (1 - 2 * p) - 2e-4 * (ee + eg));
        return out;
    }
    int calls = 0;
};

class FlatModel : public ShiftModel {
public:
    std::vector<double> shifts(double, double, const std::vector<double>& pe) override {
        return std::vector<double>(pe.size(), 0.1);
    }
};

ShiftDataset toy_data(double ee, double eg) {
    ToyModel m;
    ShiftDataset d;
    d.n_exp = 20;
    d.n_sim = 12;
    const std::vector<double> pe{0.1, 0.3, 0.5, 0.7, 0.9};
    const auto s = m.shifts(ee, eg, pe);
    for (std::size_t k = 0; k < pe.size(); ++k) d.rows.push_back({pe[k], rescale_shift(s[k], 12, 20)});
    return d;
}

const char* kCfg = R"(
trap.nu_z_hz = 66000
trap.nu_r_hz = 250
trap.depth_hbar_omega_z = 5
trap.misalignment_rad = 0.010
atoms.n = 3
atoms.t_z_uk = 3
atoms.t_r_uk = 3
atoms.a_eg_minus_bohr = 68
atoms.b_gg_bohr = 73.8
atoms.b_ee_bohr = 150.19
atoms.b_eg_bohr = 192.34
protocol.detuning_min_hz = -0.5
protocol.detuning_max_hz = 0.5
protocol.detuning_points = 21
)";

} // namespace

TEST_CASE("rescaling by N - 1") {
    CHECK(rescale_shift(1.1, 12, 20) == doctest::Approx(1.1 * 19 / 11));
    CHECK(rescale_shift(0.3, 5, 5) == 0.3);
    CHECK_THROWS_AS(rescale_shift(1.0, 1, 20), CalibrationError);
}

TEST_CASE("dataset validation and loading") {
    ShiftDataset d = toy_data(150, 190);
    CHECK_NOTHROW(d.validate());
    d.rows.pop_back();
    d.rows.pop_back();
    CHECK_THROWS_AS(d.validate(), CalibrationError);
    d = toy_data(150, 190);
    d.rows[0].pe = 1.2;
    CHECK_THROWS_AS(d.validate(), CalibrationError);
    d = toy_data(150, 190);
    d.n_exp = 5;
    CHECK_THROWS_AS(d.validate(), CalibrationError);

    const auto path = std::filesystem::temp_directory_path() / "mbsed_fit_data.csv";
    {
        std::ofstream os(path);
        os << "# measured\npe,shift_hz,sigma_hz\n0.1,0.2,0.01\n0.3,0.1,0.01\n\n0.5,0.0,0.02\n0.7,-0.1,0.01\n";
    }
    const ShiftDataset loaded = load_shift_dataset(path, 20, 12);
    REQUIRE(loaded.rows.size() == 4);
    CHECK(loaded.rows[2].sigma_hz == 0.02);
    std::filesystem::remove(path);
}

TEST_CASE("objective weights and residual sign") {
    ToyModel m;
    ShiftDataset d = toy_data(150, 190);
    CHECK(fit_objective(d, m, 150, 190) == doctest::Approx(0.0).epsilon(1e-20));
    std::vector<double> res, model;
    d.rows[1].shift_hz -= 0.01;
    const double rss = fit_objective(d, m, 150, 190, &res, &model);
    CHECK(rss == doctest::Approx(1e-4));
    CHECK(res[1] == doctest::Approx(0.01));
    for (auto& r : d.rows) r.sigma_hz = 0.01;
    CHECK(fit_objective(d, m, 150, 190) == doctest::Approx(1.0));
}

TEST_CASE("simplex fit recovers known parameters of a smooth model") {
    ToyModel m;
    const ShiftDataset d = toy_data(170, 210);
    const FitResult r = fit_scattering_lengths(d, m);
    CHECK(r.b_ee == doctest::Approx(170).epsilon(1e-3));
    CHECK(r.b_eg == doctest::Approx(210).epsilon(1e-3));
    CHECK(!r.degenerate);
    CHECK(r.rss < 1e-12);
}

TEST_CASE("bounds are respected and a flat objective is flagged") {
    ToyModel m;
    const ShiftDataset d = toy_data(170, 210);
    FitOptions o;
    o.b_ee_max = 160;
    const FitResult r = fit_scattering_lengths(d, m, o);
    CHECK(r.b_ee <= 160.0);

    FlatModel flat;
    const FitResult f = fit_scattering_lengths(d, flat);
    CHECK(f.degenerate);
    CHECK_THROWS_AS(fit_scattering_lengths(d, m, FitOptions{.b_ee_min = 10, .b_ee_max = 5}), CalibrationError);
}

TEST_CASE("simulated model: common random numbers give repeatable shifts") {
    Config cfg = parse_config(kCfg);
    SimulatedShiftModel a(cfg, 8), b(cfg, 8, Execution::Serial);
    const std::vector<double> pe{0.2, 0.6};
    const auto x = a.shifts(150.19, 192.34, pe);
    const auto y = a.shifts(150.19, 192.34, pe);
    const auto z = b.shifts(150.19, 192.34, pe);
    CHECK(x == y);
    CHECK(x == z);
    CHECK(a.evaluations() == 2);
    CHECK(x[0] > x[1]); // shift falls with excitation
    const auto w = a.shifts(140.0, 192.34, pe);
    CHECK(w != x);

    // Area inversion reproduces the requested mean excitation.
    const double area = a.area_for_excitation(0.3);
    CHECK(area > 0.0);
    CHECK(area < 1.0);
    CHECK_THROWS_AS(a.area_for_excitation(0.999999), CalibrationError);
}

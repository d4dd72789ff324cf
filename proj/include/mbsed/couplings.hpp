#pragma once

#include "mbsed/config.hpp"
#include "mbsed/sampler.hpp"

#include <Eigen/Dense>

namespace mbsed {

/// Interaction strengths of one pair of modes.  g_s multiplies a length (m),
/// g_p a volume (m^3); both yield angular frequencies (rad/s).
struct PairCoupling {
    double g_s = 0.0;
    double g_p = 0.0;
};

PairCoupling pair_couplings(const MotionalState& a, const MotionalState& b, const TrapDerived& trap,
                            const PhysicalConstants& c);

/// Scattering-independent part of the model for one ensemble.  Computing it
/// once and re-weighting by scattering parameters keeps fits on a fixed
/// sample set cheap.
struct GeometryTables {
    Eigen::MatrixXd g_s; // rad/s per m, zero diagonal
    Eigen::MatrixXd g_p; // rad/s per m^3, zero diagonal
    Eigen::VectorXd rabi_hz;

    int size() const { return static_cast<int>(rabi_hz.size()); }
};

struct CouplingTables {
    Eigen::MatrixXd j; // rad/s
    Eigen::MatrixXd c; // rad/s
    Eigen::MatrixXd x; // rad/s
    Eigen::MatrixXd g_s;
    Eigen::MatrixXd g_p;
    Eigen::VectorXd rabi_hz;

    int size() const { return static_cast<int>(rabi_hz.size()); }
    double mean_rabi_hz() const { return rabi_hz.mean(); }
    /// Off-diagonal averages sum_{i!=j} M_ij / (N (N-1)).
    double mean_x() const;
    double mean_c() const;
};

GeometryTables build_geometry(const SampleEnsemble& ensemble, const Config& cfg);

/// J = a G_S + b_eg^3 G_P,  C = (b_ee^3 - b_gg^3) G_P,  X = (b_ee^3 - 2 b_eg^3 + b_gg^3) G_P.
CouplingTables apply_scattering(const GeometryTables& geom, const AtomConfig& atoms,
                                const PhysicalConstants& c);

CouplingTables build_coupling_tables(const SampleEnsemble& ensemble, const Config& cfg);

/// Homogeneous tables (every pair identical), handy for collective checks.
CouplingTables uniform_tables(int n, double j, double c, double x, double rabi_hz);

/// Laguerre polynomial L_n(x).
double laguerre(int n, double x);

struct LambDicke {
    double eta_x = 0.0;
    double eta_y = 0.0;
    double eta_z = 0.0;
};

LambDicke lamb_dicke(const TrapDerived& trap, double misalignment);

/// Carrier Rabi frequency of a mode (Hz):
///   Omega_0 prod_mu exp(-eta_mu^2/2) L_{n_mu}(eta_mu^2),
/// with the misalignment tilting the probe along x.
double rabi_frequency(const MotionalState& s, double bare_rabi_hz, const TrapDerived& trap,
                      double misalignment);

} // namespace mbsed

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gkdv/modal.hpp"
#include "gkdv/spectrum.hpp"

namespace gkdv {

/// Linear feedback f = F_row . c, g = G_row . c acting at x0, with c the
/// forward modal coefficients of the current state.
struct FeedbackGains {
  Eigen::RowVectorXcd F_row;
  Eigen::RowVectorXcd G_row;
  double omega_target = 0.0;
  double horizon_Th = 0.0;
  double x0 = 0.0;
};

/// Gains K = -B^H Lambda_w^{-1} from the exponentially weighted Gramian
/// Lambda_w = int_0^Th e^{-2 w t} e^{-At} B B^H e^{-A^H t} dt, built in
/// energy-normalized modal coordinates. Throws GramianSingular.
FeedbackGains feedback_gains(const Spectrum& s, double x0, double omega_target, double Th);

FeedbackGains zero_gains(const Spectrum& s, double x0);

/// Closed-loop generator acting on forward modal coefficients.
Eigen::MatrixXcd closed_loop_generator(const Spectrum& s, const FeedbackGains& gains);

/// max Re(lambda) over the spectrum of a square matrix.
double spectral_abscissa(const Eigen::MatrixXcd& m);

struct DecayReport {
  std::vector<double> times;
  std::vector<double> energies;
  /// Decay rate of the H-norm, -1/2 times the least-squares slope of log E over the tail half.
  double fitted_rate = 0.0;
  /// max_t sqrt(E(t)/E(0)) e^{0.9 w t}, with w the gains' target rate.
  double fitted_M = 0.0;
};

inline constexpr int kSimulationSteps = 400;

DecayReport closed_loop_simulate(const Spectrum& s, const FeedbackGains& gains, const ModalState& state0,
                                 double T_sim);

}  // namespace gkdv

#include "gkdv/stabilization.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "gkdv/errors.hpp"
#include "gkdv/signal.hpp"

namespace gkdv {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::complex<double> kI{0.0, 1.0};

Eigen::MatrixXcd input_matrix(const Spectrum& s, double x0) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXcd P(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int ch = 0; ch < 2; ++ch) P(i, ch) = input_coefficient(s, static_cast<std::size_t>(i), ch, x0);
  }
  return P;
}

Eigen::VectorXd energy_sqrt_weights(const Spectrum& s) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) w(static_cast<Eigen::Index>(i)) = std::sqrt(kTwoPi * s.norm2(i));
  return w;
}

// Average a gain row with its mirror so real fields give real feedback values.
Eigen::RowVectorXcd conjugate_symmetrize(const Spectrum& s, const Eigen::RowVectorXcd& row) {
  Eigen::RowVectorXcd out = row;
  for (int k = -s.N(); k <= s.N(); ++k) {
    for (Branch b : {Branch::plus, Branch::minus}) {
      const auto i = static_cast<Eigen::Index>(s.index(k, b));
      const auto j = static_cast<Eigen::Index>(s.index(-k, b));
      out(i) = 0.5 * (row(i) + std::conj(row(j)));
    }
  }
  return out;
}
}  // namespace

FeedbackGains feedback_gains(const Spectrum& s, double x0, double omega_target, double Th) {
  if (!(omega_target > 0.0)) throw std::invalid_argument("omega_target must be positive");
  const double T0 = critical_time(s.params());
  if (!(Th > T0)) {
    std::ostringstream msg;
    msg << "Gramian horizon Th=" << Th << " must exceed the critical time T0=" << T0;
    throw std::invalid_argument(msg.str());
  }
  if (!resonance_check(s.params(), s.N(), 1e-9).pairs.empty()) {
    throw std::invalid_argument("frequency coincidence at this truncation; feedback Gramian is singular");
  }

  const Eigen::VectorXd dsq = energy_sqrt_weights(s);
  const Eigen::MatrixXcd B = dsq.asDiagonal() * input_matrix(s, x0);
  const Eigen::MatrixXcd BB = B * B.adjoint();
  const auto n = BB.rows();
  Eigen::MatrixXcd gram(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double dw = s.omega(static_cast<std::size_t>(m)) - s.omega(static_cast<std::size_t>(k));
      gram(m, k) = BB(m, k) * exp_moment(0, -2.0 * omega_target - kI * dw, Th);
    }
  }
  gram = 0.5 * (gram + gram.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(n - 1);
  if (!(lmin > 1e-14 * lmax)) {
    std::ostringstream msg;
    msg << "weighted Gramian is numerically singular (min eigenvalue " << lmin << ", max " << lmax << ")";
    throw GramianSingular(msg.str(), lmin);
  }

  const Eigen::MatrixXcd K = -B.adjoint() * gram.ldlt().solve(Eigen::MatrixXcd::Identity(n, n));
  FeedbackGains gains;
  gains.F_row = conjugate_symmetrize(s, K.row(0) * dsq.asDiagonal());
  gains.G_row = conjugate_symmetrize(s, K.row(1) * dsq.asDiagonal());
  gains.omega_target = omega_target;
  gains.horizon_Th = Th;
  gains.x0 = x0;
  return gains;
}

FeedbackGains zero_gains(const Spectrum& s, double x0) {
  const auto n = static_cast<Eigen::Index>(s.size());
  return {Eigen::RowVectorXcd::Zero(n), Eigen::RowVectorXcd::Zero(n), 0.0, 0.0, x0};
}

Eigen::MatrixXcd closed_loop_generator(const Spectrum& s, const FeedbackGains& gains) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) A(i, i) = kI * s.omega(static_cast<std::size_t>(i));
  const Eigen::MatrixXcd P = input_matrix(s, gains.x0);
  A += P.col(0) * gains.F_row + P.col(1) * gains.G_row;
  return A;
}

double spectral_abscissa(const Eigen::MatrixXcd& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  return es.eigenvalues().real().maxCoeff();
}

DecayReport closed_loop_simulate(const Spectrum& s, const FeedbackGains& gains, const ModalState& state0,
                                 double T_sim) {
  if (!(T_sim > 0.0)) throw std::invalid_argument("T_sim must be positive");
  const double h = T_sim / kSimulationSteps;
  const Eigen::MatrixXcd step = (h * closed_loop_generator(s, gains)).exp();

  DecayReport rep;
  Eigen::VectorXcd c = state0.coeffs();
  const int N = s.N();
  for (int j = 0; j <= kSimulationSteps; ++j) {
    rep.times.push_back(j * h);
    rep.energies.push_back(energy(s, ModalState(N, c)));
    c = step * c;
  }

  // Least-squares slope of log E over the tail half.
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int count = 0;
  for (int j = kSimulationSteps / 2; j <= kSimulationSteps; ++j) {
    const double t = rep.times[static_cast<std::size_t>(j)];
    const double y = std::log(rep.energies[static_cast<std::size_t>(j)]);
    st += t; sy += y; stt += t * t; sty += t * y;
    ++count;
  }
  const double slope = (count * sty - st * sy) / (count * stt - st * st);
  rep.fitted_rate = -0.5 * slope;

  const double e0 = rep.energies.front();
  for (std::size_t j = 0; j < rep.times.size(); ++j) {
    rep.fitted_M = std::max(rep.fitted_M, std::sqrt(rep.energies[j] / e0) *
                                              std::exp(0.9 * gains.omega_target * rep.times[j]));
  }
  return rep;
}

}  // namespace gkdv

#include "gkdv/hum.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMeanTol = 1e-10;
}  // namespace

const char* to_string(ControlMode m) noexcept {
  switch (m) {
    case ControlMode::both: return "both";
    case ControlMode::f_only: return "f_only";
    case ControlMode::g_only: return "g_only";
  }
  return "?";
}

HumSystem assemble_lambda(const Spectrum& s, double x0, double T, ControlMode mode) {
  if (!(T > 0.0)) throw std::invalid_argument("assemble_lambda requires T > 0");
  std::vector<ExponentialSignal> basis;
  std::vector<Eigen::Vector2cd> weights;
  for (std::size_t i = 0; i < s.size(); ++i) {
    basis.push_back(ExponentialSignal::exponential(s.omega(i)));
    Eigen::Vector2cd w = std::polar(1.0, s.label(i).k * x0) * s.adjoint_z(i);
    if (mode == ControlMode::f_only) w(1) = 0.0;
    if (mode == ControlMode::g_only) w(0) = 0.0;
    weights.push_back(w);
  }
  GramMatrix g = exp_gram(basis, weights, ObservationWindow(0.0, T));
  g.entries.transposeInPlace();

  HumSystem sys{std::move(g), mode, x0, T, std::nullopt};
  if (mode != ControlMode::both) {
    Eigen::VectorXcd kv = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.size()));
    const auto ip = static_cast<Eigen::Index>(s.index(0, Branch::plus));
    const auto im = static_cast<Eigen::Index>(s.index(0, Branch::minus));
    // Adjoint k=0 vectors are (2ac, +-(ac/d) sqrt(4acd)): equal first, opposite second components.
    kv(ip) = 1.0;
    kv(im) = mode == ControlMode::f_only ? -1.0 : 1.0;
    sys.kernel_direction = kv / std::sqrt(2.0);
  }
  return sys;
}

ControlPlan solve_control(const Spectrum& s, double x0, double T, const ModalState& initial,
                          const ModalState& target, ControlMode mode) {
  const double T0 = critical_time(s.params());
  if (s.params().resonant() && !(T > T0)) {
    std::ostringstream msg;
    msg << "control horizon T=" << T << " does not exceed the critical time T0=" << T0;
    throw std::invalid_argument(msg.str());
  }
  const ModalState defect = initial - evolve(s, target, -T);

  if (mode != ControlMode::both) {
    const double eref = std::max({energy(s, initial), energy(s, target), 1e-300});
    const std::complex<double> mean = mode == ControlMode::g_only ? u_mean(s, defect) : v_mean(s, defect);
    const double rel = std::abs(mean) / std::sqrt(kTwoPi * eref);
    if (rel > kMeanTol) {
      std::ostringstream msg;
      msg << (mode == ControlMode::g_only ? "u" : "v") << "-means of initial and target differ (relative "
          << rel << "); a " << to_string(mode) << " control cannot change them";
      throw ConstraintViolation(msg.str());
    }
  }

  const HumSystem sys = assemble_lambda(s, x0, T, mode);
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::VectorXcd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rhs(i) = kTwoPi * defect.coeffs()(i) * s.norm2(static_cast<std::size_t>(i));
  }

  Eigen::MatrixXcd A = 0.5 * (sys.lambda.entries + sys.lambda.entries.adjoint());
  if (sys.kernel_direction) {
    // Lambda kills the kernel direction exactly; lifting it by sigma k k^H keeps the
    // solution orthogonal to it once the rhs is projected.
    const Eigen::VectorXcd& kv = *sys.kernel_direction;
    const double sigma = A.diagonal().real().mean();
    A += sigma * kv * kv.adjoint();
    rhs -= kv * kv.dot(rhs);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(n - 1);
  const double cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxCondition)) {
    std::ostringstream msg;
    msg << "HUM operator condition number " << cond << " exceeds " << kMaxCondition
        << " (coercivity estimate " << lmin << "); try a larger T or smaller N";
    throw IllConditioned(msg.str(), cond, lmin);
  }

  Eigen::LDLT<Eigen::MatrixXcd> ldlt(A);
  Eigen::VectorXcd d = ldlt.solve(rhs);
  for (int step = 0; step < 2; ++step) d += ldlt.solve(rhs - A * d);

  ControlPlan plan;
  plan.x0 = x0;
  plan.T = T;
  plan.mode = mode;
  plan.adjoint_seed = AdjointState(s.N(), d);
  plan.coercivity = lmin;
  plan.condition = cond;
  const TracePair tr = adjoint_trace(s, plan.adjoint_seed, x0);
  if (mode != ControlMode::g_only) plan.f = -1.0 * tr.u;
  if (mode != ControlMode::f_only) plan.g = -1.0 * tr.v;
  return plan;
}

double verify_roundtrip(const Spectrum& s, const ControlPlan& plan, const ModalState& initial,
                        const ModalState& target) {
  const ModalState final_state = forced_evolve(s, initial, plan.f, plan.g, plan.x0, plan.T);
  const double err = std::sqrt(energy(s, final_state - target));
  const double scale = std::max({std::sqrt(energy(s, target)), std::sqrt(energy(s, initial)), 1.0});
  return err / scale;
}

double l2_norm(const Spectrum& s, const ModalState& state) {
  double acc = 0.0;
  for (int k = -s.N(); k <= s.N(); ++k) acc += fourier_coefficients(s, state, k).squaredNorm();
  return std::sqrt(kTwoPi * acc);
}

double l2_norm(const Spectrum& s, const AdjointState& state) {
  double acc = 0.0;
  for (int k = -s.N(); k <= s.N(); ++k) {
    const std::size_t ip = s.index(k, Branch::plus);
    const std::size_t im = s.index(k, Branch::minus);
    const Eigen::Vector2cd hat = state.coeffs()(static_cast<Eigen::Index>(ip)) * s.adjoint_z(ip) +
                                 state.coeffs()(static_cast<Eigen::Index>(im)) * s.adjoint_z(im);
    acc += hat.squaredNorm();
  }
  return std::sqrt(kTwoPi * acc);
}

double duality_residual(const Spectrum& s, const std::optional<ExponentialSignal>& f,
                        const std::optional<ExponentialSignal>& g, double x0, const ModalState& initial,
                        const AdjointState& adjoint_seed, double T) {
  const ModalState uT = forced_evolve(s, initial, f, g, x0, T);
  const AdjointState phiT = adjoint_evolve(s, adjoint_seed, T);
  const TracePair obs = adjoint_trace(s, adjoint_seed, x0);

  const std::complex<double> lhs = pairing(s, uT, phiT);
  std::complex<double> rhs = pairing(s, initial, adjoint_seed);
  double scale = l2_norm(s, initial) * l2_norm(s, adjoint_seed);
  const double lo = std::min(0.0, T), hi = std::max(0.0, T);
  auto add_channel = [&](const std::optional<ExponentialSignal>& control, const ExponentialSignal& observed) {
    if (!control) return;
    rhs += inner(*control, observed, 0.0, T);
    scale += std::sqrt(std::abs(inner(*control, *control, lo, hi)) * std::abs(inner(observed, observed, lo, hi)));
  };
  add_channel(f, obs.u);
  add_channel(g, obs.v);
  return std::abs(lhs - rhs) / std::max(1.0, scale);
}

}  // namespace gkdv

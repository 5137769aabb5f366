#pragma once

#include <optional>

#include <Eigen/Dense>

#include "gkdv/modal.hpp"
#include "gkdv/observability.hpp"
#include "gkdv/signal.hpp"
#include "gkdv/spectrum.hpp"

namespace gkdv {

enum class ControlMode { both, f_only, g_only };

const char* to_string(ControlMode m) noexcept;

/// Condition number above which solve_control refuses to return a plan.
inline constexpr double kMaxCondition = 1e14;

/// HUM operator in adjoint modal coordinates:
/// d^H Lambda d = integral over [0,T] of the observed adjoint traces squared.
struct HumSystem {
  GramMatrix lambda;
  ControlMode mode = ControlMode::both;
  double x0 = 0.0;
  double T = 0.0;
  /// Unit adjoint direction whose observed trace vanishes identically
  /// (constant psi for f_only, constant phi for g_only).
  std::optional<Eigen::VectorXcd> kernel_direction;
};

struct ControlPlan {
  std::optional<ExponentialSignal> f;
  std::optional<ExponentialSignal> g;
  double x0 = 0.0;
  double T = 0.0;
  ControlMode mode = ControlMode::both;
  AdjointState adjoint_seed{0};
  double coercivity = 0.0;  // smallest eigenvalue of Lambda on the admissible subspace
  double condition = 0.0;
};

HumSystem assemble_lambda(const Spectrum& s, double x0, double T, ControlMode mode);

/// HUM controls steering `initial` to `target` at time T.
/// Throws ConstraintViolation (single-control mean condition) or IllConditioned.
ControlPlan solve_control(const Spectrum& s, double x0, double T, const ModalState& initial,
                          const ModalState& target, ControlMode mode);

/// |state(T) - target|_H / max(|target|_H, |initial|_H, 1) under the plan.
double verify_roundtrip(const Spectrum& s, const ControlPlan& plan, const ModalState& initial,
                        const ModalState& target);

/// Residual of the transposition identity
///   <U(T), Phi(T)> = <U0, Phi0> + int_0^T f conj(phi(t,x0)) + g conj(psi(t,x0)) dt,
/// divided by the Cauchy-Schwarz bound of the right-hand side. For T < 0 the
/// time integral is oriented (equal to minus the L^2(T,0) inner product).
double duality_residual(const Spectrum& s, const std::optional<ExponentialSignal>& f,
                        const std::optional<ExponentialSignal>& g, double x0, const ModalState& initial,
                        const AdjointState& adjoint_seed, double T);

/// L^2 norms (unweighted) of the physical fields of a forward or adjoint state.
double l2_norm(const Spectrum& s, const ModalState& state);
double l2_norm(const Spectrum& s, const AdjointState& state);

}  // namespace gkdv

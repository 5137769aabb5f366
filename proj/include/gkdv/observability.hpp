#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gkdv/signal.hpp"
#include "gkdv/spectrum.hpp"

namespace gkdv {

struct ObservationWindow {
  ObservationWindow(double t0, double t1);
  static ObservationWindow of_length(double length) { return {0.0, length}; }

  double t0;
  double t1;
  double length() const noexcept { return t1 - t0; }
};

struct ChainMember {
  ModeBranch label;
  double frequency = 0.0;
};

/// One class of the relation |x - y| < epsilon on the frequency family.
struct Chain {
  std::vector<ChainMember> members;  // 1 or 2; pairs are stored plus branch first
  double epsilon = 0.0;

  bool is_structural_zero_pair() const noexcept;
};

struct ChainSet {
  std::vector<Chain> chains;
  double epsilon = 0.0;  // after any halving
};

/// Transitive closure of the epsilon relation. Epsilon is halved until every
/// class has at most two members drawn from opposite branches.
ChainSet cluster_chains(std::span<const ChainMember> frequencies, double epsilon);

/// Newton divided-difference replacement of a chain's exponentials.
std::vector<ExponentialSignal> divided_diff_basis(const Chain& chain);

/// Hermitian matrix of closed-form integrals over a window.
struct GramMatrix {
  Eigen::MatrixXcd entries;
  ObservationWindow window{0.0, 1.0};

  double hermitian_defect() const;
  /// Ascending eigenvalues of the Hermitian part.
  Eigen::VectorXd eigenvalues() const;
};

/// Entry (m, n) = (W_m . conj(W_n)) * integral over the window of b_m conj(b_n).
/// Empty weights mean scalar weight 1.
GramMatrix exp_gram(std::span<const ExponentialSignal> basis, std::span<const Eigen::Vector2cd> weights,
                    const ObservationWindow& window);

enum class TraceMode { both, u_only, v_only };

const char* to_string(TraceMode m) noexcept;

struct ObservabilityReport {
  /// Smallest generalized eigenvalue of the trace form against energy off the
  /// structural kernel; 0 when further directions fall below the kernel cut.
  double alpha = 0.0;
  double beta = 0.0;
  /// Structural kernel (1 in single-trace modes) plus eigenvalues at or below
  /// 1e-12 * beta, counted in divided-difference coordinates for single traces.
  int kernel_dim = 0;
  /// Unit-energy modal coefficient vectors spanning the numerical kernel.
  std::vector<Eigen::VectorXcd> kernel;
  /// Extreme eigenvalues in divided-difference coordinates (single-trace modes).
  std::optional<double> dd_alpha;
  std::optional<double> dd_beta;
  double chain_epsilon = 0.0;
};

/// Smallest same-branch gap / 4, capped at 1.
double default_chain_epsilon(const Spectrum& s);

/// Two-sided constants alpha E <= integral over I of observed traces <= beta E.
ObservabilityReport observability_constants(const Spectrum& s, double x0, const ObservationWindow& window,
                                            TraceMode mode);

/// Trace-form matrix Q with c^H Q c = integral over I of |observed traces|^2.
Eigen::MatrixXcd trace_form(const Spectrum& s, double x0, const ObservationWindow& window, TraceMode mode);

struct InghamReport {
  double direct_const = 0.0;
  double inverse_const = 0.0;
};

/// Extreme eigenvalues of the scalar exponential Gram for an arbitrary family.
InghamReport ingham_report(std::span<const double> frequencies, const ObservationWindow& window);

}  // namespace gkdv

#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "gkdv/params.hpp"

namespace gkdv {

/// Sign in front of the square root in the closed-form eigenfrequency. The
/// label follows the formula for every k, so for k < 0 the `plus` root is
/// the smaller one.
enum class Branch { plus, minus };

const char* to_string(Branch b) noexcept;

struct ModeBranch {
  int k = 0;
  Branch branch = Branch::plus;

  auto operator<=>(const ModeBranch&) const = default;
};

struct EigenPair {
  double omega = 0.0;
  Eigen::Vector2cd z = Eigen::Vector2cd::Zero();
};

template <class T>
struct BranchPair {
  T plus;
  T minus;

  const T& operator[](Branch b) const { return b == Branch::plus ? plus : minus; }
};

/// Real 2x2 symbol S_k; the Fourier mode k of the system evolves as z' = i S_k z.
Eigen::Matrix2d symbol_matrix(const PhysicalParams& p, int k);

/// Roots of c w^2 + (rk - (c+1)k^3) w + (1-ad)k^6 - rk^4 = 0, labelled by
/// formula sign. Both are 0 at k = 0.
BranchPair<double> eigenfrequencies(const PhysicalParams& p, int k);

/// Eigenvectors in the k^-3 scaled normalization (2ac, 2c(w - k^3)/k^3); for
/// k = 0 the pair (2ac, +-sqrt(4acd)).
BranchPair<EigenPair> eigenvectors(const PhysicalParams& p, int k);

/// Limits of the eigenvectors as |k| -> infinity.
BranchPair<Eigen::Vector2cd> limit_eigenvectors(const PhysicalParams& p);

/// z1 conj(w1) + (ac/d) z2 conj(w2).
std::complex<double> weighted_inner(const PhysicalParams& p, const Eigen::Vector2cd& z,
                                    const Eigen::Vector2cd& w);

/// Signed residual of the characteristic quadratic at omega.
double characteristic_residual(const PhysicalParams& p, int k, double omega);

struct GapReport {
  int N = 0;
  std::vector<double> plus_gaps;   // w^+_{k+1} - w^+_k, k = -N .. N-1
  std::vector<double> minus_gaps;  // same for the minus branch
  double A_const = 0.0;
  double B_or_slope = 0.0;  // paper's B when ad != 1, limiting gap -r/(c(c+1)) otherwise
  double gamma_inf_estimate = 0.0;
  double D_plus_estimate = 0.0;
  double T0 = 0.0;
};

GapReport gap_report(const PhysicalParams& p, int N);

struct ResonancePair {
  ModeBranch first;
  ModeBranch second;
  double distance = 0.0;
};

struct ResonanceResult {
  std::vector<ResonancePair> pairs;
  bool k0_degenerate = false;
};

/// Every pair of distinct (k, branch) with |k|,|n| <= N whose frequencies lie
/// closer than tol. The structural pair (0,+),(0,-) is reported only through
/// k0_degenerate.
ResonanceResult resonance_check(const PhysicalParams& p, int N, double tol);

/// 2 pi c (c+1) / r in the resonant regime, 0 otherwise.
double critical_time(const PhysicalParams& p);

/// Eigen-data for all |k| <= N, both branches, laid out as index 2(k+N) + branch.
class Spectrum {
 public:
  Spectrum(const PhysicalParams& params, int N);

  const PhysicalParams& params() const noexcept { return params_; }
  int N() const noexcept { return N_; }
  std::size_t size() const noexcept { return omega_.size(); }

  std::size_t index(int k, Branch b) const;
  ModeBranch label(std::size_t i) const noexcept;

  double omega(std::size_t i) const { return omega_[i]; }
  const Eigen::Vector2cd& z(std::size_t i) const { return z_[i]; }
  /// Weighted squared norm of z(i).
  double norm2(std::size_t i) const { return norm2_[i]; }
  /// Eigenvector of S_k^T paired with z(i): diag(1, ac/d) z(i).
  Eigen::Vector2cd adjoint_z(std::size_t i) const;

  const std::vector<double>& omegas() const noexcept { return omega_; }

 private:
  PhysicalParams params_;
  int N_;
  std::vector<double> omega_;
  std::vector<Eigen::Vector2cd> z_;
  std::vector<double> norm2_;
};

}  // namespace gkdv

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gkdv/signal.hpp"
#include "gkdv/spectrum.hpp"

namespace gkdv {

struct ForwardBasis {};
struct AdjointBasis {};

/// Coefficients c_k^{+-} of a truncated state in an eigenbasis. The tag keeps
/// forward states (basis e^{ikx} Z_k) apart from adjoint states (basis
/// e^{ikx} diag(1, ac/d) Z_k).
template <class Basis>
class ModalVector {
 public:
  explicit ModalVector(int N) : N_(N), c_(Eigen::VectorXcd::Zero(2 * (2 * N + 1))) {}
  ModalVector(int N, Eigen::VectorXcd coeffs) : N_(N), c_(std::move(coeffs)) {
    if (c_.size() != 2 * (2 * N + 1)) throw std::invalid_argument("coefficient vector has wrong size");
  }

  int N() const noexcept { return N_; }
  Eigen::Index size() const noexcept { return c_.size(); }
  const Eigen::VectorXcd& coeffs() const noexcept { return c_; }
  Eigen::VectorXcd& coeffs() noexcept { return c_; }

  std::complex<double>& at(int k, Branch b) { return c_(offset(k, b)); }
  std::complex<double> at(int k, Branch b) const { return c_(offset(k, b)); }

  /// c_{-k} = conj(c_k) on both branches, i.e. u and v are real.
  bool is_real_field(double tol = 1e-12) const {
    const double scale = std::max(1.0, c_.cwiseAbs().maxCoeff());
    for (int k = 0; k <= N_; ++k) {
      for (Branch b : {Branch::plus, Branch::minus}) {
        if (std::abs(at(-k, b) - std::conj(at(k, b))) > tol * scale) return false;
      }
    }
    return true;
  }

  ModalVector& operator+=(const ModalVector& o) { c_ += o.c_; return *this; }
  ModalVector& operator-=(const ModalVector& o) { c_ -= o.c_; return *this; }
  friend ModalVector operator+(ModalVector a, const ModalVector& b) { return a += b; }
  friend ModalVector operator-(ModalVector a, const ModalVector& b) { return a -= b; }
  friend ModalVector operator*(std::complex<double> s, ModalVector a) { a.c_ *= s; return a; }

 private:
  Eigen::Index offset(int k, Branch b) const {
    if (k < -N_ || k > N_) throw std::out_of_range("mode index outside truncation");
    return 2 * (k + N_) + (b == Branch::minus ? 1 : 0);
  }

  int N_;
  Eigen::VectorXcd c_;
};

using ModalState = ModalVector<ForwardBasis>;
using AdjointState = ModalVector<AdjointBasis>;

/// Samples of (u, v) at x_j = 2 pi j / M.
struct GridFunction {
  std::vector<std::complex<double>> u;
  std::vector<std::complex<double>> v;

  std::size_t M() const noexcept { return u.size(); }
};

struct TracePair {
  ExponentialSignal u;
  ExponentialSignal v;
};

/// Fourier coefficients (u_k, v_k) of a state, with u(x) = sum_k u_k e^{ikx}.
Eigen::Vector2cd fourier_coefficients(const Spectrum& s, const ModalState& state, int k);

ModalState project(const Spectrum& s, const GridFunction& fields);
GridFunction reconstruct(const Spectrum& s, const ModalState& state, std::size_t M);

ModalState evolve(const Spectrum& s, const ModalState& state, double t);
AdjointState adjoint_evolve(const Spectrum& s, const AdjointState& state, double t);

/// Integral over the circle of |u|^2 + (ac/d)|v|^2.
double energy(const Spectrum& s, const ModalState& state);

/// Point values u(t, x0), v(t, x0) as exponential sums in t.
TracePair trace(const Spectrum& s, const ModalState& state, double x0);
TracePair adjoint_trace(const Spectrum& s, const AdjointState& state, double x0);

/// Integrals of u and v over the circle.
std::complex<double> u_mean(const Spectrum& s, const ModalState& state);
std::complex<double> v_mean(const Spectrum& s, const ModalState& state);

/// Unweighted L^2 pairing of a forward and an adjoint state:
/// integral of u conj(phi) + v conj(psi).
std::complex<double> pairing(const Spectrum& s, const ModalState& state, const AdjointState& adj);

/// State at time T of the system forced by f(t) delta_{x0} in the u equation
/// and g(t) delta_{x0} in the v equation (normalized so v_t has coefficient 1).
/// Duhamel integrals are evaluated in closed form; T may be negative.
ModalState forced_evolve(const Spectrum& s, const ModalState& state0,
                         const std::optional<ExponentialSignal>& f,
                         const std::optional<ExponentialSignal>& g, double x0, double T);

/// Derivative of the coefficient of mode i under unit forcing in the u (j=0)
/// or v (j=1) equation at x0.
std::complex<double> input_coefficient(const Spectrum& s, std::size_t i, int channel, double x0);

/// Random unit-energy state; coefficients uniform in the unit square before
/// normalization. With real_field the conjugate symmetry is imposed.
ModalState random_state(const Spectrum& s, std::uint64_t seed, bool real_field = true);
AdjointState random_adjoint_state(const Spectrum& s, std::uint64_t seed, bool real_field = true);

/// Uniform doubles in [0, 1) built from raw mt19937_64 output, so streams are
/// identical across standard libraries (std distributions are not).
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gkdv

#include "gkdv/modal.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::complex<double> kI{0.0, 1.0};

std::complex<double> phase(double angle) { return std::polar(1.0, angle); }

void check_alias(const Spectrum& s, std::size_t M) {
  if (M < static_cast<std::size_t>(2 * s.N() + 2)) {
    throw AliasError("grid of " + std::to_string(M) + " points cannot resolve truncation N=" +
                     std::to_string(s.N()) + " (need M >= 2N+2)");
  }
}

std::size_t wrap(int k, std::size_t M) {
  const long m = static_cast<long>(M);
  return static_cast<std::size_t>(((k % m) + m) % m);
}
}  // namespace

Eigen::Vector2cd fourier_coefficients(const Spectrum& s, const ModalState& state, int k) {
  const std::size_t ip = s.index(k, Branch::plus);
  const std::size_t im = s.index(k, Branch::minus);
  return state.coeffs()(static_cast<Eigen::Index>(ip)) * s.z(ip) +
         state.coeffs()(static_cast<Eigen::Index>(im)) * s.z(im);
}

ModalState project(const Spectrum& s, const GridFunction& fields) {
  const std::size_t M = fields.M();
  if (fields.v.size() != M) throw std::invalid_argument("u and v grids differ in size");
  check_alias(s, M);

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> uh, vh;
  fft.fwd(uh, fields.u);
  fft.fwd(vh, fields.v);

  ModalState out(s.N());
  const double inv_m = 1.0 / static_cast<double>(M);
  for (int k = -s.N(); k <= s.N(); ++k) {
    const Eigen::Vector2cd hat(uh[wrap(k, M)] * inv_m, vh[wrap(k, M)] * inv_m);
    for (Branch b : {Branch::plus, Branch::minus}) {
      const std::size_t i = s.index(k, b);
      out.at(k, b) = weighted_inner(s.params(), hat, s.z(i)) / s.norm2(i);
    }
  }
  return out;
}

GridFunction reconstruct(const Spectrum& s, const ModalState& state, std::size_t M) {
  check_alias(s, M);
  std::vector<std::complex<double>> uh(M, 0.0), vh(M, 0.0);
  for (int k = -s.N(); k <= s.N(); ++k) {
    const Eigen::Vector2cd hat = fourier_coefficients(s, state, k);
    uh[wrap(k, M)] += hat(0);
    vh[wrap(k, M)] += hat(1);
  }
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  GridFunction out;
  fft.inv(out.u, uh);
  fft.inv(out.v, vh);
  return out;
}

ModalState evolve(const Spectrum& s, const ModalState& state, double t) {
  ModalState out = state;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.coeffs()(static_cast<Eigen::Index>(i)) *= phase(s.omega(i) * t);
  }
  return out;
}

AdjointState adjoint_evolve(const Spectrum& s, const AdjointState& state, double t) {
  // S_k^T shares the eigenvalues of S_k; the adjoint basis diagonalizes it.
  AdjointState out = state;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.coeffs()(static_cast<Eigen::Index>(i)) *= phase(s.omega(i) * t);
  }
  return out;
}

double energy(const Spectrum& s, const ModalState& state) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    e += std::norm(state.coeffs()(static_cast<Eigen::Index>(i))) * s.norm2(i);
  }
  return kTwoPi * e;
}

namespace {
template <class State, class Vec>
TracePair trace_impl(const Spectrum& s, const State& state, double x0, Vec&& vector_of) {
  TracePair out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::complex<double> c = state.coeffs()(static_cast<Eigen::Index>(i));
    if (c == std::complex<double>(0.0)) continue;
    const Eigen::Vector2cd z = vector_of(i);
    const std::complex<double> amp = c * phase(s.label(i).k * x0);
    out.u.add({amp * z(0), s.omega(i), 0});
    out.v.add({amp * z(1), s.omega(i), 0});
  }
  out.u = out.u.merged();
  out.v = out.v.merged();
  return out;
}
}  // namespace

TracePair trace(const Spectrum& s, const ModalState& state, double x0) {
  return trace_impl(s, state, x0, [&](std::size_t i) { return s.z(i); });
}

TracePair adjoint_trace(const Spectrum& s, const AdjointState& state, double x0) {
  return trace_impl(s, state, x0, [&](std::size_t i) { return s.adjoint_z(i); });
}

std::complex<double> u_mean(const Spectrum& s, const ModalState& state) {
  return kTwoPi * fourier_coefficients(s, state, 0)(0);
}

std::complex<double> v_mean(const Spectrum& s, const ModalState& state) {
  return kTwoPi * fourier_coefficients(s, state, 0)(1);
}

std::complex<double> pairing(const Spectrum& s, const ModalState& state, const AdjointState& adj) {
  // Biorthogonality: Z_m . conj(W Z_n) = delta_mn |Z_m|_w^2.
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    acc += state.coeffs()(ii) * std::conj(adj.coeffs()(ii)) * s.norm2(i);
  }
  return kTwoPi * acc;
}

std::complex<double> input_coefficient(const Spectrum& s, std::size_t i, int channel, double x0) {
  const Eigen::Vector2cd& z = s.z(i);
  const std::complex<double> proj =
      channel == 0 ? std::conj(z(0)) : s.params().weight() * std::conj(z(1));
  return phase(-s.label(i).k * x0) * proj / (kTwoPi * s.norm2(i));
}

ModalState forced_evolve(const Spectrum& s, const ModalState& state0,
                         const std::optional<ExponentialSignal>& f,
                         const std::optional<ExponentialSignal>& g, double x0, double T) {
  ModalState out = evolve(s, state0, T);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double w = s.omega(i);
    std::complex<double> duhamel = 0.0;
    for (int channel = 0; channel < 2; ++channel) {
      const auto& sig = channel == 0 ? f : g;
      if (!sig) continue;
      const std::complex<double> b = input_coefficient(s, i, channel, x0);
      for (const auto& term : sig->terms()) {
        // int_0^T e^{iw(T-s)} s^deg e^{i mu s} ds = e^{iwT} int_0^T s^deg e^{i(mu-w)s} ds
        duhamel += b * term.amplitude * exp_moment(term.degree, kI * (term.frequency - w), T);
      }
    }
    out.coeffs()(static_cast<Eigen::Index>(i)) += phase(w * T) * duhamel;
  }
  return out;
}

namespace {
template <class State>
State random_impl(const Spectrum& s, std::uint64_t seed, bool real_field) {
  UniformSource rng(seed);
  State out(s.N());
  for (int k = -s.N(); k <= s.N(); ++k) {
    for (Branch b : {Branch::plus, Branch::minus}) {
      out.at(k, b) = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    }
  }
  if (real_field) {
    for (int k = 1; k <= s.N(); ++k) {
      for (Branch b : {Branch::plus, Branch::minus}) out.at(-k, b) = std::conj(out.at(k, b));
    }
    for (Branch b : {Branch::plus, Branch::minus}) out.at(0, b) = out.at(0, b).real();
  }
  return out;
}
}  // namespace

ModalState random_state(const Spectrum& s, std::uint64_t seed, bool real_field) {
  ModalState out = random_impl<ModalState>(s, seed, real_field);
  const double e = energy(s, out);
  return (1.0 / std::sqrt(e)) * out;
}

AdjointState random_adjoint_state(const Spectrum& s, std::uint64_t seed, bool real_field) {
  AdjointState out = random_impl<AdjointState>(s, seed, real_field);
  out.coeffs() /= out.coeffs().norm();
  return out;
}

}  // namespace gkdv

#include "gkdv/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gkdv {

const char* to_string(Branch b) noexcept { return b == Branch::plus ? "plus" : "minus"; }

Eigen::Matrix2d symbol_matrix(const PhysicalParams& p, int k) {
  const double k3 = std::pow(static_cast<double>(k), 3);
  const double kd = static_cast<double>(k);
  Eigen::Matrix2d s;
  s << k3, p.a() * k3, p.d() * k3 / p.c(), (k3 - p.r() * kd) / p.c();
  return s;
}

BranchPair<double> eigenfrequencies(const PhysicalParams& p, int k) {
  if (k == 0) return {0.0, 0.0};
  const double kd = static_cast<double>(k);
  const double k2 = kd * kd;
  const double k3 = k2 * kd;
  const double a = p.a(), c = p.c(), d = p.d(), r = p.r();

  // c w^2 + B w + C = 0, solved without cancellation via the root product.
  const double B = r * kd - (c + 1.0) * k3;
  const double C = ((1.0 - a * d) * k2 - r) * k2 * k2;
  const double inner = (c - 1.0) * k2 + r;
  const double disc = std::abs(kd) * std::sqrt(4.0 * a * c * d * k2 * k2 + inner * inner);
  const double q = -0.5 * (B + std::copysign(disc, B == 0.0 ? 1.0 : B));
  const double w1 = q / c;
  const double w2 = C / q;
  const double hi = std::max(w1, w2);
  const double lo = std::min(w1, w2);
  // +k*sqrt(...) has the sign of k, so the plus root is the larger one iff k > 0.
  return k > 0 ? BranchPair<double>{hi, lo} : BranchPair<double>{lo, hi};
}

BranchPair<EigenPair> eigenvectors(const PhysicalParams& p, int k) {
  const double a = p.a(), c = p.c(), d = p.d(), r = p.r();
  const double z1 = 2.0 * a * c;
  if (k == 0) {
    const double s = std::sqrt(4.0 * a * c * d);
    return {EigenPair{0.0, Eigen::Vector2cd(z1, s)}, EigenPair{0.0, Eigen::Vector2cd(z1, -s)}};
  }
  const auto w = eigenfrequencies(p, k);
  const double kd = static_cast<double>(k);
  const double s = r / (kd * kd);
  const double base = 1.0 - c - s;
  const double root = std::sqrt(4.0 * a * c * d + (c - 1.0 + s) * (c - 1.0 + s));
  // z2^+ z2^- = -4acd exactly; evaluate the non-cancelling one directly.
  double zp = 0.0, zm = 0.0;
  if (base >= 0.0) {
    zp = base + root;
    zm = -4.0 * a * c * d / zp;
  } else {
    zm = base - root;
    zp = -4.0 * a * c * d / zm;
  }
  return {EigenPair{w.plus, Eigen::Vector2cd(z1, zp)}, EigenPair{w.minus, Eigen::Vector2cd(z1, zm)}};
}

BranchPair<Eigen::Vector2cd> limit_eigenvectors(const PhysicalParams& p) {
  const double a = p.a(), c = p.c(), d = p.d();
  const double root = std::sqrt(4.0 * a * c * d + (c - 1.0) * (c - 1.0));
  return {Eigen::Vector2cd(2.0 * a * c, 1.0 - c + root), Eigen::Vector2cd(2.0 * a * c, 1.0 - c - root)};
}

std::complex<double> weighted_inner(const PhysicalParams& p, const Eigen::Vector2cd& z,
                                    const Eigen::Vector2cd& w) {
  return z(0) * std::conj(w(0)) + p.weight() * z(1) * std::conj(w(1));
}

double characteristic_residual(const PhysicalParams& p, int k, double omega) {
  const double kd = static_cast<double>(k);
  const double k3 = kd * kd * kd;
  return p.c() * omega * omega + (p.r() * kd - (p.c() + 1.0) * k3) * omega +
         (1.0 - p.a() * p.d()) * k3 * k3 - p.r() * k3 * kd;
}

double critical_time(const PhysicalParams& p) {
  if (!p.resonant()) return 0.0;
  return 2.0 * std::numbers::pi * p.c() * (p.c() + 1.0) / p.r();
}

namespace {

// Largest number of points of the sorted family inside any window of length ell.
std::size_t max_window_count(const std::vector<double>& sorted, double ell) {
  std::size_t best = 0;
  std::size_t hi = 0;
  for (std::size_t lo = 0; lo < sorted.size(); ++lo) {
    if (hi < lo) hi = lo;
    while (hi + 1 < sorted.size() && sorted[hi + 1] - sorted[lo] <= ell) ++hi;
    best = std::max(best, hi - lo + 1);
  }
  return best;
}

}  // namespace

GapReport gap_report(const PhysicalParams& p, int N) {
  if (N < 2) throw std::invalid_argument("gap_report requires N >= 2");
  GapReport rep;
  rep.N = N;
  const double a = p.a(), c = p.c(), d = p.d(), r = p.r();
  const double root = std::sqrt(4.0 * a * c * d + (c - 1.0) * (c - 1.0));
  rep.A_const = (c + 1.0 + root) / (2.0 * c);
  rep.B_or_slope = p.resonant() ? -r / (c * (c + 1.0)) : 4.0 * c * (1.0 - a * d) / (c + 1.0 + root);
  rep.T0 = critical_time(p);

  std::vector<BranchPair<double>> w;
  w.reserve(2 * N + 1);
  for (int k = -N; k <= N; ++k) w.push_back(eigenfrequencies(p, k));
  for (int k = -N; k < N; ++k) {
    const auto& lo = w[static_cast<std::size_t>(k + N)];
    const auto& hi = w[static_cast<std::size_t>(k + N + 1)];
    rep.plus_gaps.push_back(hi.plus - lo.plus);
    rep.minus_gaps.push_back(hi.minus - lo.minus);
  }

  // The truncated family is complete only inside [-R, R].
  const auto& top = w.back();
  const double R = std::min(std::abs(top.plus), std::abs(top.minus));
  std::vector<double> family;
  for (int k = -N; k <= N; ++k) {
    const auto& wk = w[static_cast<std::size_t>(k + N)];
    for (double v : {wk.plus, wk.minus}) {
      if (std::abs(v) <= R) family.push_back(v);
    }
  }
  std::sort(family.begin(), family.end());
  family.erase(std::unique(family.begin(), family.end()), family.end());

  std::vector<double> ladder;
  if (rep.T0 > 0.0) {
    ladder = {rep.T0 / 4.0, rep.T0 / 2.0, rep.T0, 2.0 * rep.T0, R};
  } else {
    for (double ell = 0.25; ell <= R; ell *= 2.0) ladder.push_back(ell);
    if (ladder.empty()) ladder.push_back(R);
  }
  double dplus = std::numeric_limits<double>::infinity();
  for (double ell : ladder) {
    if (ell <= 0.0 || ell > 2.0 * R) continue;
    dplus = std::min(dplus, static_cast<double>(max_window_count(family, ell)) / ell);
  }
  rep.D_plus_estimate = std::isfinite(dplus) ? dplus : 0.0;

  double gamma = 0.0;
  for (std::size_t M = 1; 2 * M <= family.size(); M *= 2) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + M < family.size(); ++j) {
      worst = std::min(worst, (family[j + M] - family[j]) / static_cast<double>(M));
    }
    gamma = std::max(gamma, worst);
  }
  rep.gamma_inf_estimate = gamma;
  return rep;
}

ResonanceResult resonance_check(const PhysicalParams& p, int N, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("resonance_check requires tol > 0");
  struct Entry {
    double omega;
    ModeBranch label;
  };
  std::vector<Entry> all;
  for (int k = -N; k <= N; ++k) {
    const auto w = eigenfrequencies(p, k);
    all.push_back({w.plus, {k, Branch::plus}});
    all.push_back({w.minus, {k, Branch::minus}});
  }
  std::sort(all.begin(), all.end(), [](const Entry& x, const Entry& y) { return x.omega < y.omega; });

  ResonanceResult out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size() && all[j].omega - all[i].omega < tol; ++j) {
      ModeBranch first = std::min(all[i].label, all[j].label);
      ModeBranch second = std::max(all[i].label, all[j].label);
      if (first == ModeBranch{0, Branch::plus} && second == ModeBranch{0, Branch::minus}) {
        out.k0_degenerate = true;
        continue;
      }
      out.pairs.push_back({first, second, all[j].omega - all[i].omega});
    }
  }
  return out;
}

Spectrum::Spectrum(const PhysicalParams& params, int N) : params_(params), N_(N) {
  if (N < 0) throw std::invalid_argument("truncation N must be non-negative");
  const std::size_t n = static_cast<std::size_t>(2 * (2 * N + 1));
  omega_.resize(n);
  z_.resize(n);
  norm2_.resize(n);
  for (int k = -N; k <= N; ++k) {
    const auto e = eigenvectors(params_, k);
    for (Branch b : {Branch::plus, Branch::minus}) {
      const std::size_t i = index(k, b);
      omega_[i] = e[b].omega;
      z_[i] = e[b].z;
      norm2_[i] = weighted_inner(params_, e[b].z, e[b].z).real();
    }
  }
}

std::size_t Spectrum::index(int k, Branch b) const {
  if (k < -N_ || k > N_) throw std::out_of_range("mode index outside truncation");
  return static_cast<std::size_t>(2 * (k + N_) + (b == Branch::minus ? 1 : 0));
}

ModeBranch Spectrum::label(std::size_t i) const noexcept {
  return {static_cast<int>(i / 2) - N_, (i % 2 == 0) ? Branch::plus : Branch::minus};
}

Eigen::Vector2cd Spectrum::adjoint_z(std::size_t i) const {
  return Eigen::Vector2cd(z_[i](0), params_.weight() * z_[i](1));
}

}  // namespace gkdv

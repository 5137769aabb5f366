#include "gkdv/observability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEpsilonFloor = 1e-14;
constexpr double kCoincident = 1e-12;
constexpr double kKernelRel = 1e-12;
}  // namespace

ObservationWindow::ObservationWindow(double t0_, double t1_) : t0(t0_), t1(t1_) {
  if (!(t1 > t0)) throw std::invalid_argument("observation window must have positive length");
}

bool Chain::is_structural_zero_pair() const noexcept {
  return members.size() == 2 && members[0].label.k == 0 && members[1].label.k == 0;
}

const char* to_string(TraceMode m) noexcept {
  switch (m) {
    case TraceMode::both: return "both";
    case TraceMode::u_only: return "u";
    case TraceMode::v_only: return "v";
  }
  return "?";
}

ChainSet cluster_chains(std::span<const ChainMember> frequencies, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("cluster_chains requires epsilon > 0");
  std::vector<ChainMember> sorted(frequencies.begin(), frequencies.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ChainMember& x, const ChainMember& y) { return x.frequency < y.frequency; });

  for (double eps = epsilon; eps >= kEpsilonFloor; eps *= 0.5) {
    ChainSet out;
    out.epsilon = eps;
    bool valid = true;
    for (std::size_t i = 0; i < sorted.size() && valid;) {
      std::size_t j = i + 1;
      while (j < sorted.size() && sorted[j].frequency - sorted[j - 1].frequency < eps) ++j;
      Chain chain;
      chain.epsilon = eps;
      chain.members.assign(sorted.begin() + static_cast<long>(i), sorted.begin() + static_cast<long>(j));
      if (chain.members.size() > 2) {
        valid = false;
      } else if (chain.members.size() == 2) {
        auto& m = chain.members;
        if (m[0].label.branch == m[1].label.branch) {
          valid = false;
        } else if (m[0].label.branch == Branch::minus) {
          std::swap(m[0], m[1]);
        }
      }
      out.chains.push_back(std::move(chain));
      i = j;
    }
    if (valid) return out;
  }
  throw EpsilonUnderflow("chain clustering did not resolve above epsilon=1e-14; run resonance_check");
}

std::vector<ExponentialSignal> divided_diff_basis(const Chain& chain) {
  const auto& m = chain.members;
  if (m.empty() || m.size() > 2) throw std::invalid_argument("chains have one or two members");
  std::vector<ExponentialSignal> out;
  const double w1 = m[0].frequency;
  out.push_back(ExponentialSignal::exponential(w1));
  if (m.size() == 2) {
    const double w2 = m[1].frequency;
    const double delta = w1 - w2;
    if (std::abs(delta) <= kCoincident) {
      out.push_back(ExponentialSignal({ExpTerm{1.0, w1, 1}}));
    } else {
      out.push_back(ExponentialSignal({ExpTerm{1.0 / delta, w1, 0}, ExpTerm{-1.0 / delta, w2, 0}}));
    }
  }
  return out;
}

double GramMatrix::hermitian_defect() const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd GramMatrix::eigenvalues() const {
  const Eigen::MatrixXcd h = 0.5 * (entries + entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

GramMatrix exp_gram(std::span<const ExponentialSignal> basis, std::span<const Eigen::Vector2cd> weights,
                    const ObservationWindow& window) {
  if (basis.empty()) throw std::invalid_argument("exp_gram requires a nonempty basis");
  if (!weights.empty() && weights.size() != basis.size()) {
    throw std::invalid_argument("exp_gram weights must match the basis size");
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  GramMatrix g{Eigen::MatrixXcd(n, n), window};
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = m; k < n; ++k) {
      std::complex<double> w = 1.0;
      if (!weights.empty()) {
        w = weights[static_cast<std::size_t>(m)].dot(weights[static_cast<std::size_t>(k)]);
        w = std::conj(w);  // Eigen's dot conjugates the left operand
      }
      const std::complex<double> val =
          w * inner(basis[static_cast<std::size_t>(m)], basis[static_cast<std::size_t>(k)], window.t0, window.t1);
      g.entries(m, k) = val;
      g.entries(k, m) = std::conj(val);
    }
  }
  return g;
}

double default_chain_epsilon(const Spectrum& s) {
  double gap = std::numeric_limits<double>::infinity();
  for (Branch b : {Branch::plus, Branch::minus}) {
    std::vector<double> w;
    for (int k = -s.N(); k <= s.N(); ++k) w.push_back(s.omega(s.index(k, b)));
    std::sort(w.begin(), w.end());
    for (std::size_t i = 1; i < w.size(); ++i) gap = std::min(gap, w[i] - w[i - 1]);
  }
  if (!std::isfinite(gap)) return 1.0;
  return std::min(1.0, gap / 4.0);
}

namespace {

Eigen::Vector2cd observed_weight(const Spectrum& s, std::size_t i, double x0, TraceMode mode) {
  Eigen::Vector2cd w = std::polar(1.0, s.label(i).k * x0) * s.z(i);
  if (mode == TraceMode::u_only) w(1) = 0.0;
  if (mode == TraceMode::v_only) w(0) = 0.0;
  return w;
}

}  // namespace

Eigen::MatrixXcd trace_form(const Spectrum& s, double x0, const ObservationWindow& window, TraceMode mode) {
  std::vector<ExponentialSignal> basis;
  std::vector<Eigen::Vector2cd> weights;
  for (std::size_t i = 0; i < s.size(); ++i) {
    basis.push_back(ExponentialSignal::exponential(s.omega(i)));
    weights.push_back(observed_weight(s, i, x0, mode));
  }
  // G(m,n) = int b_m conj(b_n); the form c^H Q c needs Q = G^T.
  return exp_gram(basis, weights, window).entries.transpose();
}

ObservabilityReport observability_constants(const Spectrum& s, double x0, const ObservationWindow& window,
                                            TraceMode mode) {
  const Eigen::MatrixXcd q = trace_form(s, x0, window, mode);
  const auto n = q.rows();
  Eigen::VectorXd dinv(n);
  for (Eigen::Index i = 0; i < n; ++i) dinv(i) = 1.0 / std::sqrt(kTwoPi * s.norm2(static_cast<std::size_t>(i)));
  Eigen::MatrixXcd scaled = dinv.asDiagonal() * q * dinv.asDiagonal();
  scaled = 0.5 * (scaled + scaled.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(scaled);
  const Eigen::VectorXd& lam = es.eigenvalues();

  ObservabilityReport rep;
  rep.beta = lam(n - 1);
  int structural = 0;
  int numerical = 0;
  if (mode == TraceMode::both) {
    const double cut = kKernelRel * rep.beta;
    while (numerical < n && lam(numerical) <= cut) ++numerical;
  } else {
    // One direction of the k=0 pair is invisible to a single trace. The rest
    // of the form is judged in divided-difference coordinates, where close
    // frequencies no longer masquerade as a kernel.
    structural = 1;
    const int j = mode == TraceMode::u_only ? 0 : 1;
    std::vector<ChainMember> members;
    for (std::size_t i = 0; i < s.size(); ++i) members.push_back({s.label(i), s.omega(i)});
    const ChainSet chains = cluster_chains(members, default_chain_epsilon(s));
    rep.chain_epsilon = chains.epsilon;

    std::vector<ExponentialSignal> basis;
    std::vector<Eigen::Vector2cd> weights;
    for (const Chain& chain : chains.chains) {
      if (chain.is_structural_zero_pair()) {
        // The k=0 pair enters only through a0+ + a0- (u) or a0+ - a0- (v).
        basis.push_back(ExponentialSignal::exponential(0.0));
        weights.push_back(Eigen::Vector2cd(s.z(s.index(0, Branch::plus))(j), 0.0));
        continue;
      }
      const auto dd = divided_diff_basis(chain);
      for (std::size_t m = 0; m < dd.size(); ++m) {
        const ModeBranch lab = chain.members[m].label;
        const std::size_t i = s.index(lab.k, lab.branch);
        basis.push_back(dd[m]);
        weights.push_back(Eigen::Vector2cd(std::polar(1.0, lab.k * x0) * s.z(i)(j), 0.0));
      }
    }
    const Eigen::VectorXd dd_lam = exp_gram(basis, weights, window).eigenvalues();
    rep.dd_alpha = dd_lam(0);
    rep.dd_beta = dd_lam(dd_lam.size() - 1);
    const double cut = kKernelRel * *rep.dd_beta;
    while (numerical < dd_lam.size() && dd_lam(numerical) <= cut) ++numerical;
  }

  rep.kernel_dim = std::min<int>(structural + numerical, static_cast<int>(n));
  for (int m = 0; m < rep.kernel_dim; ++m) rep.kernel.push_back(dinv.asDiagonal() * es.eigenvectors().col(m));
  // Below the kernel cut the eigenvalue is rounding noise, so alpha is reported as 0.
  rep.alpha = (numerical == 0 && structural < n) ? lam(structural) : 0.0;
  return rep;
}

InghamReport ingham_report(std::span<const double> frequencies, const ObservationWindow& window) {
  std::vector<double> sorted(frequencies.begin(), frequencies.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("ingham_report requires distinct frequencies");
  }
  std::vector<ExponentialSignal> basis;
  for (double w : frequencies) basis.push_back(ExponentialSignal::exponential(w));
  const Eigen::VectorXd lam = exp_gram(basis, {}, window).eigenvalues();
  return {lam(lam.size() - 1), lam(0)};
}

}  // namespace gkdv

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "gkdv/modal.hpp"
#include "gkdv/spectrum.hpp"
#include "oracles.hpp"

using namespace gkdv;

namespace {
const PhysicalParams kGeneric = PhysicalParams::generic();
const PhysicalParams kResonant = PhysicalParams::resonant_preset();
}  // namespace

TEST_CASE("params reject non-positive or non-finite coefficients") {
  CHECK_THROWS_AS(PhysicalParams(0.0, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(PhysicalParams(1, -1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(PhysicalParams(1, 1, 1, std::nan("")), std::invalid_argument);
  CHECK(kGeneric.weight() == 2.0);
  CHECK(kResonant.resonant());
  CHECK_FALSE(kGeneric.resonant());
  CHECK(PhysicalParams(0.5, 3, 2, 1).resonant());
}

TEST_CASE("symbol matrix entries") {
  CHECK(symbol_matrix(kResonant, 0).isZero(0.0));
  Eigen::Matrix2d m1;
  m1 << 1, 1, 1, 0;
  CHECK(symbol_matrix(kResonant, 1).isApprox(m1));
  Eigen::Matrix2d m2;
  m2 << 8, 16, 8, 6;
  CHECK(symbol_matrix(kGeneric, 2).isApprox(m2));
}

TEST_CASE("eigenfrequency examples") {
  const auto w0 = eigenfrequencies(kGeneric, 0);
  CHECK(w0.plus == 0.0);
  CHECK(w0.minus == 0.0);

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const auto w1 = eigenfrequencies(kResonant, 1);
  CHECK(w1.plus == doctest::Approx(phi).epsilon(1e-14));
  CHECK(w1.minus == doctest::Approx(1.0 - phi).epsilon(1e-14));
  const auto [lo, hi] = oracle::eig2(symbol_matrix(kResonant, 1));
  CHECK(std::abs(w1.minus - lo) < 1e-14);
  CHECK(std::abs(w1.plus - hi) < 1e-14);

  // k = -1: the value set is {-(1-phi), -phi}; labels follow the formula sign.
  const auto wm = eigenfrequencies(kResonant, -1);
  const std::set<double> got{wm.plus, wm.minus};
  CHECK(std::abs(*got.begin() + phi) < 1e-14);
  CHECK(std::abs(*got.rbegin() + 1.0 - phi) < 1e-14);
  CHECK(wm.plus == -w1.plus);
  CHECK(wm.minus == -w1.minus);
}

TEST_CASE("characteristic residual and eigen relation over |k| <= 64") {
  for (const auto& p : {kGeneric, kResonant}) {
    for (int k = -64; k <= 64; ++k) {
      const auto pairs = eigenvectors(p, k);
      for (Branch b : {Branch::plus, Branch::minus}) {
        const EigenPair& e = pairs[b];
        CHECK(std::abs(characteristic_residual(p, k, e.omega)) <= 1e-9 * std::max(1.0, e.omega * e.omega));
        const Eigen::Vector2cd r = symbol_matrix(p, k).cast<std::complex<double>>() * e.z - e.omega * e.z;
        CHECK(r.norm() <= 1e-10 * std::max(1.0, std::abs(e.omega)) * e.z.norm());
      }
      const double orth = std::abs(weighted_inner(p, pairs.plus.z, pairs.minus.z));
      const double scale = std::sqrt(std::abs(weighted_inner(p, pairs.plus.z, pairs.plus.z)) *
                                     std::abs(weighted_inner(p, pairs.minus.z, pairs.minus.z)));
      CHECK(orth <= 1e-12 * scale);
    }
  }
}

TEST_CASE("closed form agrees with a numeric eigensolve for random parameters") {
  UniformSource rng(20240601);
  for (int trial = 0; trial < 20; ++trial) {
    const PhysicalParams p(rng.uniform(0.1, 5), rng.uniform(0.1, 5), rng.uniform(0.1, 5), rng.uniform(0.1, 5));
    const int k = static_cast<int>(rng.uniform(-40, 40));
    const auto w = eigenfrequencies(p, k);
    const auto [lo, hi] = oracle::eig2(symbol_matrix(p, k));
    const double scale = std::max(1.0, std::abs(hi) + std::abs(lo));
    CHECK(std::abs(std::min(w.plus, w.minus) - lo) <= 1e-10 * scale);
    CHECK(std::abs(std::max(w.plus, w.minus) - hi) <= 1e-10 * scale);
  }
}

TEST_CASE("eigenvector examples and symmetries") {
  const auto z0 = eigenvectors(kResonant, 0);
  CHECK(z0.plus.z.isApprox(Eigen::Vector2cd(2.0, 2.0)));
  CHECK(z0.minus.z.isApprox(Eigen::Vector2cd(2.0, -2.0)));

  for (int k = 1; k <= 20; ++k) {
    const auto zp = eigenvectors(kGeneric, k), zm = eigenvectors(kGeneric, -k);
    CHECK((zp.plus.z - zm.plus.z).norm() == 0.0);
    CHECK(zm.plus.omega == -zp.plus.omega);
    CHECK(zm.minus.omega == -zp.minus.omega);
  }

  const auto lim = limit_eigenvectors(kResonant);
  CHECK(lim.plus.isApprox(Eigen::Vector2cd(2.0, 2.0)));
  CHECK(lim.minus.isApprox(Eigen::Vector2cd(2.0, -2.0)));
  const auto far = eigenvectors(kResonant, 10000);
  CHECK((far.plus.z - lim.plus).norm() < 1e-6);
  CHECK((far.minus.z - lim.minus).norm() < 1e-6);
}

TEST_CASE("weighted eigenvector norms stay in a fixed band") {
  for (const auto& p : {kGeneric, kResonant}) {
    double lo = 1e300, hi = 0;
    for (int k = -10000; k <= 10000; ++k) {
      const auto pairs = eigenvectors(p, k);
      for (Branch b : {Branch::plus, Branch::minus}) {
        const double n = std::abs(weighted_inner(p, pairs[b].z, pairs[b].z));
        lo = std::min(lo, n);
        hi = std::max(hi, n);
      }
    }
    CHECK(lo > 0.5);
    CHECK(hi < 50.0);
  }
}

TEST_CASE("gap statistics") {
  CHECK(gap_report(kResonant, 4).A_const == doctest::Approx(2.0));
  CHECK_THROWS_AS(gap_report(kGeneric, 1), std::invalid_argument);

  const GapReport g = gap_report(kGeneric, 101);
  const auto k100 = static_cast<std::size_t>(100 + g.N);
  CHECK(std::abs(g.plus_gaps[k100] / (3.0 * g.A_const * 100.0 * 100.0) - 1.0) <= 0.02);
  CHECK(std::abs(g.minus_gaps.back()) > 1e3);
  CHECK(g.T0 == 0.0);

  const GapReport r = gap_report(kResonant, 200);
  CHECK(std::abs(r.minus_gaps.back() + 0.5) <= 0.05);
  CHECK(r.B_or_slope == doctest::Approx(-0.5));
  CHECK(r.T0 == doctest::Approx(4.0 * std::numbers::pi));

  const GapReport d = gap_report(kResonant, 400);
  CHECK(std::abs(d.D_plus_estimate / 2.0 - 1.0) <= 0.1);
}

TEST_CASE("resonance check against exhaustive comparison") {
  auto family = [](const PhysicalParams& p, int N) {
    std::vector<std::pair<ModeBranch, double>> f;
    for (int k = -N; k <= N; ++k) {
      const auto w = eigenfrequencies(p, k);
      f.push_back({{k, Branch::plus}, w.plus});
      f.push_back({{k, Branch::minus}, w.minus});
    }
    return f;
  };
  const auto res = resonance_check(kResonant, 12, 1e-9);
  CHECK(res.pairs.empty());
  CHECK(res.k0_degenerate);
  const auto brute = oracle::close_pairs(family(kResonant, 12), 1e-9);
  REQUIRE(brute.size() == 1);
  CHECK(brute[0].first.k == 0);
  CHECK(brute[0].second.k == 0);

  UniformSource rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const PhysicalParams p(1, 1, 1, rng.uniform(0.1, 10));
    const auto r = resonance_check(p, 12, 1e-9);
    CHECK(r.pairs.size() + 1 == oracle::close_pairs(family(p, 12), 1e-9).size());
    for (const auto& pr : r.pairs) CHECK_FALSE((pr.first.k == 0 && pr.second.k == 0));
  }

  // A wide tolerance must reproduce exactly the brute-force pair set.
  const auto wide = resonance_check(kGeneric, 6, 3.0);
  CHECK(wide.pairs.size() + 1 == oracle::close_pairs(family(kGeneric, 6), 3.0).size());
}

TEST_CASE("critical time") {
  CHECK(critical_time(kGeneric) == 0.0);
  CHECK(critical_time(kResonant) == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(critical_time(PhysicalParams(0.5, 2, 2, std::numbers::pi)) == doctest::Approx(12.0).epsilon(1e-15));
}

TEST_CASE("spectrum layout") {
  const Spectrum s(kGeneric, 3);
  CHECK(s.size() == 14);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const ModeBranch lab = s.label(i);
    CHECK(s.index(lab.k, lab.branch) == i);
  }
  CHECK_THROWS(s.index(4, Branch::plus));
}

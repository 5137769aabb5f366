#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gkdv/errors.hpp"
#include "gkdv/hum.hpp"
#include "oracles.hpp"

using namespace gkdv;
using cplx = std::complex<double>;

namespace {
const PhysicalParams kGeneric = PhysicalParams::generic();
const PhysicalParams kResonant = PhysicalParams::resonant_preset();

// phi(t, x0), psi(t, x0) of an adjoint state, summed mode by mode.
Eigen::Vector2cd adjoint_point(const Spectrum& s, const Eigen::VectorXcd& d, double x0, double t) {
  Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
  for (std::size_t i = 0; i < s.size(); ++i) {
    acc += d(static_cast<Eigen::Index>(i)) * std::polar(1.0, s.label(i).k * x0 + s.omega(i) * t) * s.adjoint_z(i);
  }
  return acc;
}

double max_omega(const Spectrum& s) {
  double m = 0;
  for (double w : s.omegas()) m = std::max(m, std::abs(w));
  return m;
}

ModalState with_k0_of(ModalState st, const ModalState& src) {
  st.at(0, Branch::plus) = src.at(0, Branch::plus);
  st.at(0, Branch::minus) = src.at(0, Branch::minus);
  return st;
}

ExponentialSignal random_signal(UniformSource& rng) {
  ExponentialSignal sig;
  for (int j = 0; j < 3; ++j) sig.add({{rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.uniform(-20, 20), j == 1});
  return sig;
}
}  // namespace

TEST_CASE("Lambda quadratic form equals the integral of the observed adjoint traces") {
  const Spectrum s(kGeneric, 6);
  const double x0 = 0.3, T = 1.0;
  for (ControlMode mode : {ControlMode::both, ControlMode::f_only, ControlMode::g_only}) {
    const HumSystem sys = assemble_lambda(s, x0, T, mode);
    CHECK(sys.lambda.hermitian_defect() <= 1e-13 * sys.lambda.entries.cwiseAbs().maxCoeff());
    for (std::uint64_t seed : {1u, 2u}) {
      const Eigen::VectorXcd d = random_adjoint_state(s, seed, false).coeffs();
      const cplx form = d.dot(sys.lambda.entries * d);
      const cplx quad = oracle::integrate(
          [&](double t) {
            const Eigen::Vector2cd p = adjoint_point(s, d, x0, t);
            double acc = 0;
            if (mode != ControlMode::g_only) acc += std::norm(p(0));
            if (mode != ControlMode::f_only) acc += std::norm(p(1));
            return cplx(acc);
          },
          0.0, T, 2 * max_omega(s));
      CHECK(std::abs(form - quad) <= 1e-9 * std::abs(quad));
    }
    CHECK(sys.kernel_direction.has_value() == (mode != ControlMode::both));
    if (sys.kernel_direction) {
      const Eigen::VectorXcd& kv = *sys.kernel_direction;
      CHECK((sys.lambda.entries * kv).norm() <= 1e-12 * sys.lambda.entries.norm());
    }
  }
  CHECK_THROWS_AS(assemble_lambda(s, 0.0, 0.0, ControlMode::both), std::invalid_argument);
}

TEST_CASE("Lambda is positive definite for the generic preset at T=1") {
  const Spectrum s(kGeneric, 6);
  CHECK(assemble_lambda(s, 0.0, 1.0, ControlMode::both).lambda.eigenvalues()(0) > 0.0);
}

TEST_CASE("Lambda at N=0 is linear in T") {
  const Spectrum s(kResonant, 0);
  const Eigen::MatrixXcd l1 = assemble_lambda(s, 0.0, 1.0, ControlMode::both).lambda.entries;
  const Eigen::MatrixXcd l3 = assemble_lambda(s, 0.0, 3.0, ControlMode::both).lambda.entries;
  CHECK((l3 - 3.0 * l1).norm() <= 1e-14 * l3.norm());
}

TEST_CASE("a free target needs no control") {
  const Spectrum s(kGeneric, 6);
  const ModalState a = random_state(s, 3);
  const ModalState b = evolve(s, a, 1.0);
  const ControlPlan plan = solve_control(s, 0.0, 1.0, a, b, ControlMode::both);
  CHECK(plan.adjoint_seed.coeffs().norm() <= 1e-12);
  const ControlPlan zero{std::nullopt, std::nullopt, 0.0, 1.0, ControlMode::both, AdjointState(6), 0.0, 0.0};
  CHECK(verify_roundtrip(s, zero, a, b) <= 1e-12);
}

TEST_CASE("two-control steering round trip") {
  const Spectrum s(kGeneric, 6);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const ModalState a = random_state(s, seed);
    const ControlPlan plan = solve_control(s, 0.0, 1.0, a, ModalState(6), ControlMode::both);
    CHECK(verify_roundtrip(s, plan, a, ModalState(6)) <= 1e-8);
    REQUIRE(plan.f.has_value());
    REQUIRE(plan.g.has_value());
    // Controls are minus the adjoint traces at x0.
    for (double t : {0.0, 0.25, 0.8}) {
      const Eigen::Vector2cd p = adjoint_point(s, plan.adjoint_seed.coeffs(), 0.0, t);
      const double scale = std::max(1.0, p.norm());
      CHECK(std::abs((*plan.f)(t) + p(0)) <= 1e-10 * scale);
      CHECK(std::abs((*plan.g)(t) + p(1)) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("perturbed controls miss the target") {
  const Spectrum s(kGeneric, 6);
  const ModalState a = random_state(s, 2);
  ControlPlan plan = solve_control(s, 0.0, 1.0, a, ModalState(6), ControlMode::both);
  std::vector<ExpTerm> terms = plan.f->terms();
  std::size_t big = 0;
  for (std::size_t j = 1; j < terms.size(); ++j) {
    if (std::abs(terms[j].amplitude) > std::abs(terms[big].amplitude)) big = j;
  }
  terms[big].amplitude *= 1.01;
  plan.f = ExponentialSignal(terms);
  CHECK(verify_roundtrip(s, plan, a, ModalState(6)) > 1e-4);
}

TEST_CASE("plans are linear in the data") {
  const Spectrum s(kGeneric, 4);
  const ModalState a1 = random_state(s, 1), a2 = random_state(s, 2), b1 = random_state(s, 3),
                   b2 = random_state(s, 4);
  const double T = 2.0;
  const auto d = [&](const ModalState& a, const ModalState& b) {
    return solve_control(s, 0.0, T, a, b, ControlMode::both).adjoint_seed.coeffs();
  };
  const Eigen::VectorXcd whole = d(a1 + a2, b1 + b2);
  CHECK((whole - d(a1, b1) - d(a2, b2)).norm() <= 1e-10 * whole.norm());
}

TEST_CASE("HUM controls lie in the range of the observation adjoint") {
  // Fitting the control by the trace basis must leave no residual.
  const Spectrum s(kGeneric, 4);
  const double x0 = 0.5, T = 1.5;
  const ModalState a = random_state(s, 6);
  const ControlPlan plan = solve_control(s, x0, T, a, ModalState(4), ControlMode::both);
  const auto n = static_cast<Eigen::Index>(s.size());
  const int samples = 400;
  Eigen::MatrixXcd A(2 * samples, n);
  Eigen::VectorXcd y(2 * samples);
  for (int j = 0; j < samples; ++j) {
    const double t = T * (j + 0.5) / samples;
    for (Eigen::Index m = 0; m < n; ++m) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
      e(m) = 1.0;
      const Eigen::Vector2cd p = adjoint_point(s, e, x0, t);
      A(2 * j, m) = -p(0);
      A(2 * j + 1, m) = -p(1);
    }
    y(2 * j) = (*plan.f)(t);
    y(2 * j + 1) = (*plan.g)(t);
  }
  const Eigen::VectorXcd coef = A.colPivHouseholderQr().solve(y);
  CHECK((A * coef - y).norm() <= 1e-9 * y.norm());
}

TEST_CASE("single-control modes respect the conserved means") {
  const Spectrum s(kGeneric, 6);
  const ModalState a = random_state(s, 11);

  SUBCASE("violating data is rejected") {
    const ModalState b = random_state(s, 12);
    CHECK_THROWS_AS(solve_control(s, 0.0, 1.0, a, b, ControlMode::g_only), ConstraintViolation);
    CHECK_THROWS_AS(solve_control(s, 0.0, 1.0, a, b, ControlMode::f_only), ConstraintViolation);
  }
  SUBCASE("f-only steering keeps the v mean along the trajectory") {
    const ModalState b = with_k0_of(random_state(s, 12), a);
    const double T = 2.0;
    const ControlPlan plan = solve_control(s, 0.0, T, a, b, ControlMode::f_only);
    CHECK_FALSE(plan.g.has_value());
    CHECK(verify_roundtrip(s, plan, a, b) <= 1e-8);
    const cplx v0 = v_mean(s, a);
    for (double t : {0.3, 0.9, 1.4, T}) {
      CHECK(std::abs(v_mean(s, forced_evolve(s, a, plan.f, plan.g, 0.0, t)) - v0) <= 1e-10);
    }
  }
  SUBCASE("g-only steering keeps the u mean along the trajectory") {
    const ModalState b = with_k0_of(random_state(s, 13), a);
    const double T = 2.0;
    const ControlPlan plan = solve_control(s, 0.0, T, a, b, ControlMode::g_only);
    CHECK_FALSE(plan.f.has_value());
    CHECK(verify_roundtrip(s, plan, a, b) <= 1e-8);
    const cplx u0 = u_mean(s, a);
    for (double t : {0.3, 0.9, 1.4, T}) {
      CHECK(std::abs(u_mean(s, forced_evolve(s, a, plan.f, plan.g, 0.0, t)) - u0) <= 1e-10);
    }
  }
}

TEST_CASE("resonant steering needs T above the critical time") {
  const Spectrum s(kResonant, 6);
  const double T0 = critical_time(kResonant);
  const ModalState a = random_state(s, 1);
  CHECK_THROWS_AS(solve_control(s, 0.0, 0.9 * T0, a, ModalState(6), ControlMode::both), std::invalid_argument);
  const ControlPlan plan = solve_control(s, 0.0, 1.2 * T0, a, ModalState(6), ControlMode::both);
  CHECK(verify_roundtrip(s, plan, a, ModalState(6)) <= 1e-8);
}

TEST_CASE("Lambda conditioning collapses below the critical time") {
  const Spectrum s(kResonant, 16);
  const double T0 = critical_time(kResonant);
  const auto cond = [&](double T) {
    const Eigen::VectorXd ev = assemble_lambda(s, 0.0, T, ControlMode::both).lambda.eigenvalues();
    // A non-positive computed minimum means the form is singular to working precision.
    return ev(ev.size() - 1) / std::max(ev(0), 1e-300);
  };
  const double below = cond(0.8 * T0), above = cond(1.2 * T0);
  CHECK(below >= 1e3 * above);
}

TEST_CASE("ill-conditioned systems are refused") {
  const Spectrum s(kGeneric, 12);
  const ModalState a = random_state(s, 1);
  const ModalState b = with_k0_of(random_state(s, 2), a);
  CHECK_THROWS_AS(solve_control(s, 0.0, 0.3, a, b, ControlMode::g_only), IllConditioned);
}

TEST_CASE("transposition identity") {
  const Spectrum s(kGeneric, 6);
  UniformSource rng(404);
  SUBCASE("zero controls") {
    const ModalState u = random_state(s, 1, false);
    const AdjointState phi = random_adjoint_state(s, 2, false);
    CHECK(duality_residual(s, std::nullopt, std::nullopt, 0.0, u, phi, 1.0) <= 1e-12);
  }
  SUBCASE("random controls, forward and backward windows") {
    for (int draw = 0; draw < 5; ++draw) {
      const ExponentialSignal f = random_signal(rng), g = random_signal(rng);
      const ModalState u = random_state(s, 10 + draw, false);
      const AdjointState phi = random_adjoint_state(s, 20 + draw, false);
      const double x0 = rng.uniform(0, 6);
      CHECK(duality_residual(s, f, g, x0, u, phi, 1.0) <= 1e-9);
      CHECK(duality_residual(s, f, g, x0, u, phi, -1.0) <= 1e-9);
    }
  }
  SUBCASE("both sides by quadrature") {
    const Spectrum small(kResonant, 3);
    const ExponentialSignal f = random_signal(rng), g = random_signal(rng);
    const ModalState u = random_state(small, 5, false);
    const AdjointState phi = random_adjoint_state(small, 6, false);
    CHECK(oracle::duality_by_quadrature(small, f, g, 0.8, u, phi, 1.0) <= 1e-7);
    CHECK(oracle::duality_by_quadrature(small, f, g, 0.8, u, phi, -0.7) <= 1e-7);
  }
}

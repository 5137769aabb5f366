#include "gkdv/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gkdv {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};

double binomial(int n, int k) {
  double out = 1.0;
  for (int j = 1; j <= k; ++j) out = out * (n - k + j) / j;
  return out;
}
}  // namespace

ExponentialSignal::ExponentialSignal(std::vector<ExpTerm> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.degree < 0 || t.degree > 1) throw std::invalid_argument("term degree must be 0 or 1");
  }
}

ExponentialSignal ExponentialSignal::exponential(double frequency, std::complex<double> amplitude) {
  return ExponentialSignal({ExpTerm{amplitude, frequency, 0}});
}

void ExponentialSignal::add(const ExpTerm& term) {
  if (term.degree < 0 || term.degree > 1) throw std::invalid_argument("term degree must be 0 or 1");
  terms_.push_back(term);
}

std::complex<double> ExponentialSignal::operator()(double t) const {
  std::complex<double> s = 0.0;
  for (const auto& term : terms_) {
    const double poly = term.degree == 0 ? 1.0 : t;
    s += term.amplitude * poly * std::exp(kI * (term.frequency * t));
  }
  return s;
}

ExponentialSignal ExponentialSignal::merged() const {
  std::vector<ExpTerm> sorted = terms_;
  std::stable_sort(sorted.begin(), sorted.end(), [](const ExpTerm& x, const ExpTerm& y) {
    return x.frequency < y.frequency || (x.frequency == y.frequency && x.degree < y.degree);
  });
  std::vector<ExpTerm> out;
  for (const auto& t : sorted) {
    if (!out.empty() && out.back().frequency == t.frequency && out.back().degree == t.degree) {
      out.back().amplitude += t.amplitude;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const ExpTerm& t) { return t.amplitude == std::complex<double>(0.0); });
  return ExponentialSignal(std::move(out));
}

ExponentialSignal& ExponentialSignal::operator+=(const ExponentialSignal& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

ExponentialSignal& ExponentialSignal::operator*=(std::complex<double> s) {
  for (auto& t : terms_) t.amplitude *= s;
  return *this;
}

ExponentialSignal operator+(ExponentialSignal a, const ExponentialSignal& b) { return a += b; }

ExponentialSignal operator*(std::complex<double> s, ExponentialSignal a) { return a *= s; }

std::complex<double> exp_moment(int m, std::complex<double> rate, double length) {
  if (m < 0) throw std::invalid_argument("exp_moment requires m >= 0");
  const std::complex<double> x = rate * length;
  if (std::abs(x) <= 1.0) {
    // sum_n rate^n L^(n+m+1) / (n! (n+m+1)); converges to round-off in < 25 terms.
    const double lm1 = std::pow(length, m + 1);
    std::complex<double> power = 1.0;  // x^n / n!
    std::complex<double> sum = 0.0;
    for (int n = 0; n < 40; ++n) {
      const std::complex<double> term = power / static_cast<double>(n + m + 1);
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
      power *= x / static_cast<double>(n + 1);
    }
    return sum * lm1;
  }
  const std::complex<double> e = std::exp(x);
  std::complex<double> prev = (e - 1.0) / rate;
  for (int j = 1; j <= m; ++j) {
    prev = (std::pow(length, j) * e - static_cast<double>(j) * prev) / rate;
  }
  return prev;
}

std::complex<double> exp_window_integral(int m, std::complex<double> rate, double t0, double t1) {
  // Shift to the window start so that nearby-zero rates stay well conditioned.
  const double length = t1 - t0;
  std::complex<double> sum = 0.0;
  for (int j = 0; j <= m; ++j) {
    sum += binomial(m, j) * std::pow(t0, m - j) * exp_moment(j, rate, length);
  }
  return std::exp(rate * t0) * sum;
}

std::complex<double> inner(const ExponentialSignal& a, const ExponentialSignal& b, double t0,
                           double t1) {
  std::complex<double> s = 0.0;
  for (const auto& x : a.terms()) {
    for (const auto& y : b.terms()) {
      s += x.amplitude * std::conj(y.amplitude) *
           exp_window_integral(x.degree + y.degree, kI * (x.frequency - y.frequency), t0, t1);
    }
  }
  return s;
}

}  // namespace gkdv

#pragma once

#include <complex>
#include <vector>

namespace gkdv {

/// amplitude * t^degree * exp(i * frequency * t), degree in {0, 1}.
struct ExpTerm {
  std::complex<double> amplitude;
  double frequency = 0.0;
  int degree = 0;
};

/// Finite exponential sum. Traces, controls and basis functions all live here
/// so that every time integral in the pipeline has a closed form.
class ExponentialSignal {
 public:
  ExponentialSignal() = default;
  explicit ExponentialSignal(std::vector<ExpTerm> terms);

  static ExponentialSignal exponential(double frequency, std::complex<double> amplitude = 1.0);

  void add(const ExpTerm& term);
  const std::vector<ExpTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  std::complex<double> operator()(double t) const;

  /// Terms with identical (frequency, degree) combined; zero amplitudes dropped.
  ExponentialSignal merged() const;

  ExponentialSignal& operator+=(const ExponentialSignal& other);
  ExponentialSignal& operator*=(std::complex<double> s);

 private:
  std::vector<ExpTerm> terms_;
};

ExponentialSignal operator+(ExponentialSignal a, const ExponentialSignal& b);
ExponentialSignal operator*(std::complex<double> s, ExponentialSignal a);

/// Integral of s^m exp(rate * s) over s from 0 to length (length may be negative).
std::complex<double> exp_moment(int m, std::complex<double> rate, double length);

/// Integral of t^m exp(rate * t) over t from t0 to t1, oriented.
std::complex<double> exp_window_integral(int m, std::complex<double> rate, double t0, double t1);

/// Integral of a(t) * conj(b(t)) over [t0, t1], oriented.
std::complex<double> inner(const ExponentialSignal& a, const ExponentialSignal& b, double t0,
                           double t1);

}  // namespace gkdv

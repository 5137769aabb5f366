#include "gkdv/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gkdv {

PhysicalParams::PhysicalParams(double a, double c, double d, double r)
    : a_(a), c_(c), d_(d), r_(r) {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("parameter ") + name +
                                  " must be a positive finite number");
    }
  };
  check(a, "a");
  check(c, "c");
  check(d, "d");
  check(r, "r");
}

bool PhysicalParams::resonant() const noexcept {
  return std::abs(a_ * d_ - 1.0) <= kResonanceEps;
}

PhysicalParams PhysicalParams::generic() { return {2.0, 1.0, 1.0, 1.0}; }

PhysicalParams PhysicalParams::resonant_preset() { return {1.0, 1.0, 1.0, 1.0}; }

}  // namespace gkdv

#pragma once

#include <cmath>

#include "dsqueeze/errors.hpp"

namespace dsq {

/**
 * Solver units: hbar = 1, boson mass m = 1, lengths in the potential range b_pot and
 * energies in hbar^2 / (m b_pot^2). Frequencies are then energies as well.
 */
struct UnitSystem {
  static constexpr double hbar = 1.0;
  static constexpr double mass = 1.0;
};

/// Oscillator length b with b^2 = hbar / (m omega).
inline double oscillator_length(double omega, double mass = UnitSystem::mass) {
  if (!(omega > 0.0)) throw DomainError("oscillator_length: omega must be positive");
  return std::sqrt(UnitSystem::hbar / (mass * omega));
}

/// Inverse of oscillator_length.
inline double oscillator_frequency(double length, double mass = UnitSystem::mass) {
  if (!(length > 0.0)) throw DomainError("oscillator_frequency: length must be positive");
  return UnitSystem::hbar / (mass * length * length);
}

}  // namespace dsq

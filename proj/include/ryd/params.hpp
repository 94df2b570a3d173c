#pragma once

// Physical parameters of the two-atom Rydberg system, dimensionless in
// units of the optical Rabi frequency (omega_r = 1 by convention).

#include <array>
#include <cmath>
#include <stdexcept>

#include "ryd/matrix.hpp"

namespace ryd {

struct SystemParams {
  double omega_r = 1.0;   // optical Rabi frequency (the unit)
  double delta_r = 50.0;  // optical detuning
  double omega_m = 0.01;  // microwave Rabi frequency
  double delta_m = 0.005; // microwave detuning
  double u_rr = 100.0;    // Rydberg-Rydberg interaction
  double gamma = 0.002;   // Rydberg decay rate
  double lambda1 = 0.0;   // control coupling, atom 1
  double lambda2 = 0.0;   // control coupling, atom 2
  std::array<double, 4> eta{0.0, 0.0, 0.0, 0.0};  // noise amplitudes

  void validate() const {
    detail::require(omega_r >= 0 && omega_m >= 0 && gamma >= 0 &&
                        lambda1 >= 0 && lambda2 >= 0,
                    "SystemParams: rates must be non-negative");
    for (double e : eta)
      detail::require(e >= 0, "SystemParams: noise amplitudes must be non-negative");
  }

  // Antiblockade condition u_rr = 2*delta_r to relative 1e-12.
  bool antiblockade() const {
    return std::abs(u_rr - 2.0 * delta_r) <=
           1e-12 * std::max(std::abs(u_rr), std::abs(2.0 * delta_r));
  }

  // Effective two-photon Rabi frequency of the |11> <-> |rr> transition.
  double omega_e() const {
    detail::require(delta_r != 0.0, "omega_e: delta_r must be nonzero");
    return omega_r * omega_r / delta_r;
  }

  // Spectral constants of the effective Hamiltonian.
  double a() const {
    const double oe2 = omega_e() / 2;
    return std::sqrt(omega_m * omega_m + oe2 * oe2);
  }
  double b_sq() const {
    const double oe2 = omega_e() / 2;
    return std::sqrt(omega_m * omega_m * omega_m * omega_m + oe2 * oe2 * oe2 * oe2);
  }
  double c() const {
    const double oe = omega_e();
    return std::sqrt(omega_m * omega_m + oe * oe / 2);
  }
};

}  // namespace ryd

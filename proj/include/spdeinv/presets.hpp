#pragma once

#include <string>

#include "spdeinv/core.hpp"

namespace spdeinv {

/// q(t) = sin(pi t)
Potential example1_potential();
/// Continuous, with kinks at t = 1/5, 1/2, 4/5: 4 sqrt(t - 1/5) rising, 4 sqrt(4/5 - t) falling.
Potential example2_potential();
/// Piecewise constant 0, 1, 2, 0 with breakpoints 1/5, 1/2, 4/5 (right-closed pieces).
Potential example3_potential();
Potential constant_potential(double c);

/// Parses "example1", "example2", "example3", "constant(<c>)" or
/// "csv:<path>" (columns t,value; linear interpolation, constant beyond the ends).
Potential parse_potential(const std::string& spec);

/// u0(x) = exp(-16 x^2)
InitialCondition gaussian_initial();
/// sin(pi (x + a) / (2a)), the first Dirichlet mode on (-a, a).
InitialCondition sine_initial(double a);

/// Parses "gauss16", "sine1" or "csv:<path>" (columns x,value).
InitialCondition parse_initial(const std::string& spec, double a);

}  // namespace spdeinv

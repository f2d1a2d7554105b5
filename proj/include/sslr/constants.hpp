#pragma once

namespace sslr {

/// Physical constants (SI, CODATA 2018 exact values where defined).
namespace constants {

inline constexpr double c0 = 299792458.0;          ///< speed of light [m/s]
inline constexpr double eps0 = 8.8541878128e-12;   ///< vacuum permittivity [F/m]
inline constexpr double k_boltzmann = 1.380649e-23; ///< Boltzmann constant [J/K]
inline constexpr double q_electron = 1.602176634e-19; ///< elementary charge [C]
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double euler_e = 2.71828182845904523536;

} // namespace constants

} // namespace sslr

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "curator/config.hpp"
#include "curator/grid.hpp"

namespace curator {

// Deterministic stand-in datasets. Every generator fills the role variables
// it declares, including a stored cluster variable.

inline constexpr double kTaylorGreenViscosity = 0.01;

// Classical single-mode Taylor-Green vortex on [0, 2pi)^3, x = 2*pi*i/nx:
//   u  =  sin x cos y cos z F
//   v  = -cos x sin y cos z F
//   w  =  0
//   wz =  dv/dx - du/dy = 2 sin x sin y cos z F,   F = exp(-2 nu t).
// Snapshot s is evaluated at time t + s * dt. Inputs u, v, w; output and
// cluster variable wz.
GridDataset gen_taylor_green(const GridDims& dims, double t, double dt = 1.0);

struct WakeParams {
  std::size_t n_vortices = 8;
  double circulation = 1.0;  // sign flips mirror the street
  double core_radius = 0.25;
  double spacing = 1.0;      // streamwise distance between same-row vortices
  double half_width = 0.3;   // rows sit at y = +/- half_width
  double x0 = 1.0;           // first vortex, downstream of the body
  double advection = 0.5;    // street speed U
  double jitter = 0.0;       // seeded position noise, in units of core_radius
  double length_x = 8.0;     // domain [0, length_x) x [-length_y/2, length_y/2)
  double length_y = 4.0;
};

struct Vortex {
  double x = 0.0;
  double y = 0.0;
  double circulation = 0.0;
};

// Vortex positions of the street at time t: vortex m sits at
// x0 + m * spacing / 2 + U t, alternating rows and signs.
std::vector<Vortex> wake_vortices(const WakeParams& params, double t, std::uint64_t seed);

// Sum of Gaussian vortices, omega = G / (pi rc^2) exp(-r^2 / rc^2), with the
// matching induced velocity. 2D grid; inputs u, v; cluster variable wz.
GridDataset gen_cylinder_wake(const GridDims& dims, const WakeParams& params, double t,
                              std::uint64_t seed, double dt = 1.0);

// Grid coordinates used by gen_cylinder_wake.
double wake_x(const GridDims& dims, const WakeParams& params, std::size_t i);
double wake_y(const GridDims& dims, const WakeParams& params, std::size_t j);

// I.i.d. per-point draws stored as variable "q" (input and cluster variable).
//   lognormal: mu, sigma
//   gaussian:  mean, sigma
//   bimodal:   weight1, weight2 (sum 1), mean1, mean2, sigma
// Missing parameters take defaults; invalid ones throw std::invalid_argument.
GridDataset gen_scalar_field(const std::string& kind, const GridDims& dims,
                             const std::map<std::string, double>& params,
                             std::uint64_t seed);

struct GeneratorSpec {
  std::string kind;  // taylor_green | cylinder_wake | lognormal_field |
                     // bimodal_field | gaussian_field
  GridDims dims;
  std::uint64_t seed = 0;
  double time = 0.0;
  std::map<std::string, double> params;
};

std::vector<std::string> generator_kinds();

// Builds a spec from the shared grid and the `generate` section.
GeneratorSpec generator_spec(const RunConfig& config);

GridDataset generate(const GeneratorSpec& spec);

}  // namespace curator

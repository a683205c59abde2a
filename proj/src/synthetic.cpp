#include "curator/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "curator/error.hpp"
#include "curator/rng.hpp"
#include "curator/worker_pool.hpp"

namespace curator {

namespace {

constexpr std::uint64_t kSaltScalar = 0x7363616CULL;
constexpr std::uint64_t kSaltWake = 0x77616B65ULL;
constexpr std::size_t kChunk = 1u << 16;

double param(const std::map<std::string, double>& params, const std::string& key,
             double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

GridDataset gen_taylor_green(const GridDims& dims, double t, double dt) {
  dims.validate();
  if (dims.dims != 3) throw std::invalid_argument("taylor_green needs a 3D grid");
  GridDataset ds(dims, VariableRoles{{"u", "v", "w"}, {"wz"}, "wz"});
  const std::size_t n = dims.total_points();
  std::vector<double> u(n), v(n), w(n, 0.0), wz(n);
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> sx(dims.nx), cx(dims.nx), sy(dims.ny), cy(dims.ny), cz(dims.nz);
  for (std::size_t i = 0; i < dims.nx; ++i) {
    const double x = two_pi * static_cast<double>(i) / static_cast<double>(dims.nx);
    sx[i] = std::sin(x);
    cx[i] = std::cos(x);
  }
  for (std::size_t j = 0; j < dims.ny; ++j) {
    const double y = two_pi * static_cast<double>(j) / static_cast<double>(dims.ny);
    sy[j] = std::sin(y);
    cy[j] = std::cos(y);
  }
  for (std::size_t k = 0; k < dims.nz; ++k) {
    cz[k] = std::cos(two_pi * static_cast<double>(k) / static_cast<double>(dims.nz));
  }
  std::size_t p = 0;
  for (std::size_t s = 0; s < dims.nt; ++s) {
    const double time = t + static_cast<double>(s) * dt;
    const double f = std::exp(-2.0 * kTaylorGreenViscosity * time);
    for (std::size_t k = 0; k < dims.nz; ++k) {
      for (std::size_t j = 0; j < dims.ny; ++j) {
        for (std::size_t i = 0; i < dims.nx; ++i, ++p) {
          u[p] = sx[i] * cy[j] * cz[k] * f;
          v[p] = -cx[i] * sy[j] * cz[k] * f;
          wz[p] = 2.0 * sx[i] * sy[j] * cz[k] * f;
        }
      }
    }
  }
  ds.set_field("u", std::move(u));
  ds.set_field("v", std::move(v));
  ds.set_field("w", std::move(w));
  ds.set_field("wz", std::move(wz));
  return ds;
}

std::vector<Vortex> wake_vortices(const WakeParams& params, double t, std::uint64_t seed) {
  if (!(params.core_radius > 0.0)) throw std::invalid_argument("core_radius must be > 0");
  Rng rng(mix_seed({seed, kSaltWake}));
  std::vector<Vortex> out;
  out.reserve(params.n_vortices);
  for (std::size_t m = 0; m < params.n_vortices; ++m) {
    const bool upper = m % 2 == 0;
    Vortex v;
    v.x = params.x0 + static_cast<double>(m) * params.spacing / 2.0 + params.advection * t;
    v.y = upper ? params.half_width : -params.half_width;
    v.circulation = upper ? params.circulation : -params.circulation;
    if (params.jitter != 0.0) {
      v.x += params.jitter * params.core_radius * rng.normal();
      v.y += params.jitter * params.core_radius * rng.normal();
    }
    out.push_back(v);
  }
  return out;
}

double wake_x(const GridDims& dims, const WakeParams& params, std::size_t i) {
  return params.length_x * static_cast<double>(i) / static_cast<double>(dims.nx);
}

double wake_y(const GridDims& dims, const WakeParams& params, std::size_t j) {
  return -params.length_y / 2.0 +
         params.length_y * static_cast<double>(j) / static_cast<double>(dims.ny);
}

GridDataset gen_cylinder_wake(const GridDims& dims, const WakeParams& params, double t,
                              std::uint64_t seed, double dt) {
  dims.validate();
  if (dims.dims != 2 || dims.nz != 1) {
    throw std::invalid_argument("cylinder_wake needs a 2D grid");
  }
  GridDataset ds(dims, VariableRoles{{"u", "v"}, {}, "wz"});
  const std::size_t n = dims.total_points();
  std::vector<double> u(n, 0.0), v(n, 0.0), wz(n, 0.0);
  const double rc2 = params.core_radius * params.core_radius;
  const double pi = std::numbers::pi;
  const std::size_t plane = dims.points_per_step();
  for (std::size_t s = 0; s < dims.nt; ++s) {
    const auto street = wake_vortices(params, t + static_cast<double>(s) * dt, seed);
    for (const auto& vx : street) {
      for (std::size_t j = 0; j < dims.ny; ++j) {
        const double dy = wake_y(dims, params, j) - vx.y;
        for (std::size_t i = 0; i < dims.nx; ++i) {
          const double dx = wake_x(dims, params, i) - vx.x;
          const double r2 = dx * dx + dy * dy;
          const double g = std::exp(-r2 / rc2);
          const std::size_t p = s * plane + j * dims.nx + i;
          wz[p] += vx.circulation / (pi * rc2) * g;
          if (r2 > 0.0) {
            // Azimuthal speed G / (2 pi r) (1 - g), divided by r once more
            // to scale the (-dy, dx) direction vector.
            const double k = vx.circulation / (2.0 * pi * r2) * (1.0 - g);
            u[p] += -k * dy;
            v[p] += k * dx;
          }
        }
      }
    }
  }
  ds.set_field("u", std::move(u));
  ds.set_field("v", std::move(v));
  ds.set_field("wz", std::move(wz));
  return ds;
}

GridDataset gen_scalar_field(const std::string& kind, const GridDims& dims,
                             const std::map<std::string, double>& params,
                             std::uint64_t seed) {
  dims.validate();
  const double sigma = param(params, "sigma", kind == "bimodal" ? 0.5 : 1.0);
  if (!(sigma > 0.0)) throw std::invalid_argument(kind + ": sigma must be > 0");

  std::function<double(Rng&)> draw;
  if (kind == "lognormal") {
    const double mu = param(params, "mu", 0.0);
    draw = [mu, sigma](Rng& r) { return std::exp(mu + sigma * r.normal()); };
  } else if (kind == "gaussian") {
    const double mean = param(params, "mean", 0.0);
    draw = [mean, sigma](Rng& r) { return mean + sigma * r.normal(); };
  } else if (kind == "bimodal") {
    const double w1 = param(params, "weight1", 0.5);
    const double w2 = param(params, "weight2", 1.0 - w1);
    if (w1 < 0.0 || w2 < 0.0 || std::abs(w1 + w2 - 1.0) > 1e-9) {
      throw std::invalid_argument("bimodal: weights must be nonnegative and sum to 1");
    }
    const double m1 = param(params, "mean1", -1.0);
    const double m2 = param(params, "mean2", 1.0);
    draw = [=](Rng& r) {
      const double mean = r.uniform() < w1 ? m1 : m2;
      return mean + sigma * r.normal();
    };
  } else {
    throw std::invalid_argument("unknown scalar field kind '" + kind + "'");
  }

  GridDataset ds(dims, VariableRoles{{"q"}, {}, "q"});
  const std::size_t n = dims.total_points();
  std::vector<double> q(n);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, host_parallelism(), [&](std::size_t c) {
    Rng rng(mix_seed({seed, kSaltScalar, c}));
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t p = c * kChunk; p < end; ++p) q[p] = draw(rng);
  });
  ds.set_field("q", std::move(q));
  return ds;
}

std::vector<std::string> generator_kinds() {
  return {"taylor_green", "cylinder_wake", "lognormal_field", "bimodal_field",
          "gaussian_field"};
}

GeneratorSpec generator_spec(const RunConfig& config) {
  if (!config.generate) throw ConfigError("config has no 'generate' section");
  const auto& g = *config.generate;
  GeneratorSpec spec;
  spec.kind = g.kind;
  spec.dims = config.grid_dims();
  spec.dims.nt = g.nt;
  spec.seed = g.seed;
  spec.time = g.time;
  spec.params = g.params;
  return spec;
}

GridDataset generate(const GeneratorSpec& spec) {
  const double dt = param(spec.params, "dt", 1.0);
  if (spec.kind == "taylor_green") return gen_taylor_green(spec.dims, spec.time, dt);
  if (spec.kind == "cylinder_wake") {
    WakeParams w;
    const double nv = param(spec.params, "n_vortices", static_cast<double>(w.n_vortices));
    if (nv < 0.0 || nv != std::floor(nv)) {
      throw std::invalid_argument("n_vortices must be a nonnegative integer");
    }
    w.n_vortices = static_cast<std::size_t>(nv);
    w.circulation = param(spec.params, "circulation", w.circulation);
    w.core_radius = param(spec.params, "core_radius", w.core_radius);
    w.spacing = param(spec.params, "spacing", w.spacing);
    w.half_width = param(spec.params, "half_width", w.half_width);
    w.x0 = param(spec.params, "x0", w.x0);
    w.advection = param(spec.params, "advection", w.advection);
    w.jitter = param(spec.params, "jitter", w.jitter);
    w.length_x = param(spec.params, "length_x", w.length_x);
    w.length_y = param(spec.params, "length_y", w.length_y);
    return gen_cylinder_wake(spec.dims, w, spec.time, spec.seed, dt);
  }
  for (const char* kind : {"lognormal", "bimodal", "gaussian"}) {
    if (spec.kind == std::string(kind) + "_field") {
      GridDataset ds = gen_scalar_field(kind, spec.dims, spec.params, spec.seed);
      return ds;
    }
  }
  std::string known;
  for (const auto& k : generator_kinds()) known += (known.empty() ? "" : ", ") + k;
  throw ConfigError("unknown generator kind '" + spec.kind + "' (expected one of: " +
                    known + ")");
}

}  // namespace curator

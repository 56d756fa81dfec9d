#pragma once

// Buoyancy statics and the 1-D vertical dynamics of a cube released in a tank.
//
// Units are CGS throughout: cm, g, s, g/cm^3. The vertical axis points down:
// `submersion` is the depth of the cube's bottom face below the liquid surface
// and positive velocity means sinking.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "densegame/error.hpp"

namespace densegame {

/// Dots per face encoding density visually; monotone in density.
inline int default_dot_level(double density) { return static_cast<int>(std::lround(10.0 * density)); }

struct Cube {
  std::string id;
  double volume = 0.0;  // cm^3
  double mass = 0.0;    // g
  int dot_level = 0;

  friend bool operator==(const Cube&, const Cube&) = default;
};

/// Validating constructor. `dot_level` defaults to round(10 * density).
inline Cube make_cube(std::string id, double volume, double mass, std::optional<int> dot_level = std::nullopt) {
  if (!(std::isfinite(volume) && volume > 0.0)) throw Error("cube " + id + ": volume must be positive and finite");
  if (!(std::isfinite(mass) && mass > 0.0)) throw Error("cube " + id + ": mass must be positive and finite");
  const int dots = dot_level.value_or(default_dot_level(mass / volume));
  if (dots < 0) throw Error("cube " + id + ": dot_level must be non-negative");
  return Cube{std::move(id), volume, mass, dots};
}

struct Liquid {
  std::string id;
  std::string name;
  double density = 0.0;  // g/cm^3

  friend bool operator==(const Liquid&, const Liquid&) = default;
};

inline Liquid make_liquid(std::string id, std::string name, double density) {
  if (!(std::isfinite(density) && density > 0.0)) throw Error("liquid " + id + ": density must be positive and finite");
  return Liquid{std::move(id), std::move(name), density};
}

namespace liquids {
inline Liquid water() { return {"water", "Water", 1.000}; }
inline Liquid oil() { return {"oil", "Oil", 0.920}; }
// Mercury at 20 C.
inline Liquid quicksilver() { return {"quicksilver", "Quicksilver", 13.534}; }
}  // namespace liquids

enum class FlotationOutcome { Sinks, Suspends, Floats };

inline std::string_view to_string(FlotationOutcome o) {
  switch (o) {
    case FlotationOutcome::Sinks: return "Sinks";
    case FlotationOutcome::Suspends: return "Suspends";
    case FlotationOutcome::Floats: return "Floats";
  }
  throw Error("invalid FlotationOutcome");
}

inline FlotationOutcome parse_outcome(std::string_view s) {
  if (s == "Sinks") return FlotationOutcome::Sinks;
  if (s == "Suspends") return FlotationOutcome::Suspends;
  if (s == "Floats") return FlotationOutcome::Floats;
  throw Error("unknown flotation outcome '" + std::string(s) + "'");
}

/// Suspend band used when classifying game trials.
inline constexpr double kGameplaySuspendTolerance = 1e-3;

inline double density(const Cube& cube) { return cube.mass / cube.volume; }

inline double relative_density(const Cube& cube, const Liquid& liquid) { return density(cube) / liquid.density; }

inline FlotationOutcome classify_flotation(const Cube& cube, const Liquid& liquid, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.1)) throw Error("suspend tolerance must lie in (0, 0.1)");
  const double r = relative_density(cube, liquid);
  if (std::abs(r - 1.0) <= epsilon) return FlotationOutcome::Suspends;
  return r < 1.0 ? FlotationOutcome::Floats : FlotationOutcome::Sinks;
}

/// Resting submerged volume fraction; 1 for anything that does not float.
inline double equilibrium_submerged_fraction(const Cube& cube, const Liquid& liquid) {
  return std::min(relative_density(cube, liquid), 1.0);
}

inline double edge_length(const Cube& cube) { return std::cbrt(cube.volume); }

struct BodyState {
  double submersion = 0.0;  // cm, bottom face below surface
  double velocity = 0.0;    // cm/s, positive = down

  friend bool operator==(const BodyState&, const BodyState&) = default;
};

struct DynamicsParams {
  double gravity = 981.0;            // cm/s^2
  double drag_coefficient = 0.3;     // quadratic form drag
  double linear_damping = 0.1;       // dimensionless wave-radiation damping
  double time_step = 1.0 / 120.0;    // s
  double settle_tolerance = 1e-3;    // cm/s and cm/s^2
  double tank_depth = 40.0;          // cm, liquid surface to bottom

  void validate() const {
    if (!(gravity > 0.0 && std::isfinite(gravity))) throw Error("gravity must be positive");
    if (!(time_step > 0.0 && std::isfinite(time_step))) throw Error("time_step must be positive");
    if (!(drag_coefficient >= 0.0) || !(linear_damping >= 0.0)) throw Error("damping coefficients must be non-negative");
    if (!(settle_tolerance > 0.0)) throw Error("settle_tolerance must be positive");
    if (!(tank_depth > 0.0)) throw Error("tank_depth must be positive");
  }
};

/// Volume below the surface; linear in submersion between 0 and one edge.
inline double submerged_volume(const Cube& cube, double submersion) {
  const double edge = edge_length(cube);
  if (submersion <= 0.0) return 0.0;
  if (submersion >= edge) return cube.volume;
  return cube.volume * (submersion / edge);
}

/// Gravity plus buoyancy per unit mass, downward positive. Excludes drag.
inline double static_acceleration(double submersion, const Cube& cube, const Liquid& liquid, const DynamicsParams& p) {
  return p.gravity - liquid.density * submerged_volume(cube, submersion) * p.gravity / cube.mass;
}

/// Quadratic drag constant k in F = -k v|v| (g/cm).
inline double quadratic_drag_constant(const Cube& cube, const Liquid& liquid, const DynamicsParams& p) {
  const double edge = edge_length(cube);
  return 0.5 * liquid.density * p.drag_coefficient * edge * edge;
}

/// Linear damping constant c in F = -c v (g/s).
inline double linear_drag_constant(const Cube& cube, const Liquid& liquid, const DynamicsParams& p) {
  const double edge = edge_length(cube);
  return p.linear_damping * liquid.density * edge * edge * std::sqrt(p.gravity * edge);
}

/// Net acceleration including drag, downward positive. Drag acts only while
/// the cube touches the liquid.
inline double net_acceleration(const BodyState& s, const Cube& cube, const Liquid& liquid, const DynamicsParams& p) {
  double a = static_acceleration(s.submersion, cube, liquid, p);
  if (s.submersion > 0.0) {
    const double k = quadratic_drag_constant(cube, liquid, p);
    const double c = linear_drag_constant(cube, liquid, p);
    a -= (k * s.velocity * std::abs(s.velocity) + c * s.velocity) / cube.mass;
  }
  return a;
}

/// Kinetic energy plus gravitational and buoyancy potential (erg), zero at
/// the surface at rest.
inline double mechanical_energy(const BodyState& s, const Cube& cube, const Liquid& liquid, const DynamicsParams& p) {
  const double edge = edge_length(cube);
  const double area = cube.volume / edge;
  double wetted_integral = 0.0;  // integral of submerged volume over depth
  if (s.submersion > 0.0) {
    wetted_integral = s.submersion <= edge ? area * s.submersion * s.submersion / 2.0
                                           : area * edge * edge / 2.0 + cube.volume * (s.submersion - edge);
  }
  return 0.5 * cube.mass * s.velocity * s.velocity - cube.mass * p.gravity * s.submersion +
         liquid.density * p.gravity * wetted_integral;
}

/// One semi-implicit Euler step. Velocity is updated first with drag treated
/// implicitly (linearised in |v|), then position; the tank bottom is a hard
/// stop that zeroes downward velocity.
inline BodyState step_dynamics(const BodyState& state, const Cube& cube, const Liquid& liquid, const DynamicsParams& p) {
  if (!std::isfinite(state.submersion) || !std::isfinite(state.velocity))
    throw Error("non-finite body state: integrator diverged");
  const double dt = p.time_step;
  const double a = static_acceleration(state.submersion, cube, liquid, p);
  double damping = 0.0;
  if (state.submersion > 0.0) {
    damping = (linear_drag_constant(cube, liquid, p) +
               quadratic_drag_constant(cube, liquid, p) * std::abs(state.velocity)) / cube.mass;
  }
  BodyState next;
  next.velocity = (state.velocity + dt * a) / (1.0 + dt * damping);
  next.submersion = state.submersion + dt * next.velocity;
  if (next.submersion >= p.tank_depth) {
    next.submersion = p.tank_depth;
    if (next.velocity > 0.0) next.velocity = 0.0;
  }
  if (!std::isfinite(next.submersion) || !std::isfinite(next.velocity))
    throw Error("non-finite body state: integrator diverged");
  return next;
}

/// State read off a resting (or last) body position.
inline FlotationOutcome outcome_at_rest(const BodyState& s, const Cube& cube, const DynamicsParams& p) {
  if (s.submersion >= p.tank_depth) return FlotationOutcome::Sinks;
  const double edge = edge_length(cube);
  if (s.submersion >= edge * (1.0 - 1e-9)) return FlotationOutcome::Suspends;
  return FlotationOutcome::Floats;
}

/// Cube at rest with its centre at half the tank depth.
inline BodyState mid_depth_release(const Cube& cube, const DynamicsParams& p) {
  const double edge = edge_length(cube);
  if (edge >= p.tank_depth) throw Error("cube " + cube.id + " does not fit in the tank");
  return {p.tank_depth / 2.0 + edge / 2.0, 0.0};
}

struct TrajectorySample {
  double t = 0.0;  // s since release
  double submersion = 0.0;
  double velocity = 0.0;

  friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

struct ReleaseResult {
  std::vector<TrajectorySample> trajectory;
  FlotationOutcome outcome = FlotationOutcome::Suspends;
  bool surface_breach = false;  // bottom face rose above the surface after release
  bool settled = false;         // false: max_time reached while still moving
  BodyState final_state;
  double elapsed = 0.0;
};

inline bool is_settled(const BodyState& s, const Cube& cube, const Liquid& liquid, const DynamicsParams& p) {
  if (std::abs(s.velocity) >= p.settle_tolerance) return false;
  const double a = static_acceleration(s.submersion, cube, liquid, p);
  if (s.submersion >= p.tank_depth) return a >= 0.0;
  return std::abs(a) < p.settle_tolerance;
}

/// Integrates from `initial` until the body rests or `max_time` elapses.
/// Every `record_stride`-th step is kept in the trajectory; the first and the
/// final state are always kept.
inline ReleaseResult simulate_release(const Cube& cube, const Liquid& liquid, const BodyState& initial,
                                      const DynamicsParams& p, double max_time, std::size_t record_stride = 1) {
  p.validate();
  if (!(max_time >= 1.0)) throw Error("max_time must be at least 1 s");
  if (record_stride == 0) record_stride = 1;

  ReleaseResult out;
  BodyState s = initial;
  out.trajectory.push_back({0.0, s.submersion, s.velocity});
  const auto max_steps = static_cast<std::size_t>(std::ceil(max_time / p.time_step));
  std::size_t step = 0;
  bool last_recorded = true;
  while (!(out.settled = is_settled(s, cube, liquid, p)) && step < max_steps) {
    s = step_dynamics(s, cube, liquid, p);
    ++step;
    if (s.submersion < 0.0) out.surface_breach = true;
    last_recorded = step % record_stride == 0;
    if (last_recorded) out.trajectory.push_back({static_cast<double>(step) * p.time_step, s.submersion, s.velocity});
  }
  out.elapsed = static_cast<double>(step) * p.time_step;
  if (!last_recorded) out.trajectory.push_back({out.elapsed, s.submersion, s.velocity});
  out.final_state = s;
  out.outcome = outcome_at_rest(s, cube, p);
  return out;
}

}  // namespace densegame

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mrsim/vec2.hpp"

namespace mrsim {

// Dynamic potential fields over (position, velocity) pairs. The attractive
// potential grows with distance to the target and with relative velocity;
// the repulsive potential reacts only to obstacles the robot is closing on,
// discounting the distance by the braking margin rho_m = v_ro^2 / (2 a_max).
// Forces are the negative gradient with respect to both position and
// velocity, summed into one steering vector.

struct AttractiveParams {
    double alpha_p = 1.0;  // gain on the distance term
    double alpha_v = 0.5;  // gain on the relative-velocity term
    double m = 2.0;        // distance exponent
    double n = 2.0;        // velocity exponent
    void validate() const;
};

struct RepulsiveParams {
    double eta = 1.0;    // gain
    double rho0 = 2.0;   // influence range
    double a_max = 4.0;  // maximal deceleration used for the braking margin
    double f_max = 50.0; // force clamp; also the escape-push magnitude
    void validate() const;
};

enum class FieldBranch { Zero, Active, UndefinedCollision };

struct FieldSample {
    std::optional<double> potential;  // absent on the undefined-collision branch
    Vec2 force;
    FieldBranch branch = FieldBranch::Zero;
};

/// alpha_p * |p_tar - p|^m + alpha_v * |v_tar - v|^n. Nonnegative.
double attractive_potential(const KinematicState& robot, const KinematicState& target,
                            const AttractiveParams& params);

/// Analytic negative gradient of attractive_potential over p and v:
/// m*alpha_p*d^(m-1) toward the target plus n*alpha_v*r^(n-1) toward the
/// target velocity. Exponents below 2 are singular at coincidence
/// (std::domain_error).
Vec2 attractive_force(const KinematicState& robot, const KinematicState& target,
                      const AttractiveParams& params);

/// Relative velocity projected on the robot->obstacle direction; positive
/// means closing. Coincident positions are a domain error.
double relative_approach_speed(const KinematicState& robot, const KinematicState& obstacle);

/// Potential + branch only; the force member is left zero.
FieldSample repulsive_potential(const KinematicState& robot, const KinematicState& obstacle,
                                const RepulsiveParams& params);

/// Zero branch: no force. Active branch: analytic negative gradient, clamped
/// to f_max. Undefined-collision branch (braking margin already overlaps the
/// obstacle): maximal escape push of magnitude f_max directed away from the
/// obstacle.
FieldSample repulsive_force(const KinematicState& robot, const KinematicState& obstacle,
                            const RepulsiveParams& params);

/// attractive_force toward `target` plus the sum of repulsive_force over
/// `obstacles`.
Vec2 total_force(const KinematicState& robot, const KinematicState& target,
                 std::span<const KinematicState> obstacles, const AttractiveParams& attr,
                 const RepulsiveParams& rep);

struct Gradient {
    Vec2 p;
    Vec2 v;
};

/// Central finite differences of a scalar field over (p, v), step h per
/// component. Non-finite samples are a domain error.
Gradient fd_gradient(const std::function<double(Vec2, Vec2)>& field, const KinematicState& at,
                     double h);

struct FieldArrow {
    double x, y;    // sample position
    double fx, fy;  // total force with the robot placed there
};

struct GridBounds {
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
};

/// Samples total_force on an nx-by-ny grid of cell centers, with the probe
/// robot given velocity `robot_velocity` at every sample. Cells closer than
/// 1e-9 to an obstacle are skipped.
std::vector<FieldArrow> evaluate_force_grid(const KinematicState& target,
                                            std::span<const KinematicState> obstacles,
                                            const AttractiveParams& attr,
                                            const RepulsiveParams& rep, GridBounds bounds,
                                            int nx, int ny, Vec2 robot_velocity);

}  // namespace mrsim

#include "mrsim/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace mrsim {

void AttractiveParams::validate() const {
    if (!(alpha_p > 0.0)) throw std::domain_error("AttractiveParams: alpha_p must be > 0");
    if (!(alpha_v >= 0.0)) throw std::domain_error("AttractiveParams: alpha_v must be >= 0");
    if (!(m >= 1.0)) throw std::domain_error("AttractiveParams: m must be >= 1");
    if (!(n >= 1.0)) throw std::domain_error("AttractiveParams: n must be >= 1");
}

void RepulsiveParams::validate() const {
    if (!(eta > 0.0)) throw std::domain_error("RepulsiveParams: eta must be > 0");
    if (!(rho0 > 0.0)) throw std::domain_error("RepulsiveParams: rho0 must be > 0");
    if (!(a_max > 0.0)) throw std::domain_error("RepulsiveParams: a_max must be > 0");
    if (!(f_max > 0.0)) throw std::domain_error("RepulsiveParams: f_max must be > 0");
}

double attractive_potential(const KinematicState& robot, const KinematicState& target,
                            const AttractiveParams& params) {
    params.validate();
    const double d = (target.p - robot.p).norm();
    const double r = (target.v - robot.v).norm();
    return params.alpha_p * std::pow(d, params.m) + params.alpha_v * std::pow(r, params.n);
}

namespace {

// Negative gradient of gain*|delta|^k over the robot coordinate:
// gain*k*|delta|^(k-1) along unit(delta). Smooth (zero) at delta = 0 only
// when k >= 2.
Vec2 power_term_force(Vec2 delta, double gain, double k, const char* what) {
    const double d = delta.norm();
    if (d == 0.0) {
        if (k < 2.0)
            throw std::domain_error(std::string("attractive_force: gradient singular at "
                                                "coincident ") +
                                    what + " with exponent < 2");
        return {0.0, 0.0};
    }
    return delta * (gain * k * std::pow(d, k - 1.0) / d);
}

}  // namespace

Vec2 attractive_force(const KinematicState& robot, const KinematicState& target,
                      const AttractiveParams& params) {
    params.validate();
    Vec2 f = power_term_force(target.p - robot.p, params.alpha_p, params.m, "positions");
    if (params.alpha_v > 0.0)
        f += power_term_force(target.v - robot.v, params.alpha_v, params.n, "velocities");
    return f;
}

double relative_approach_speed(const KinematicState& robot, const KinematicState& obstacle) {
    const Vec2 offset = obstacle.p - robot.p;
    const double dist = offset.norm();
    if (dist == 0.0)
        throw std::domain_error("relative_approach_speed: coincident positions");
    return (robot.v - obstacle.v).dot(offset / dist);
}

namespace {

struct RepulsiveGeometry {
    Vec2 n_ro;       // unit robot -> obstacle
    double rho_s;    // center distance
    double v_ro;     // closing speed along n_ro
    double rho_m;    // braking margin
    double gap;      // rho_s - rho_m
    FieldBranch branch;
};

RepulsiveGeometry repulsive_geometry(const KinematicState& robot,
                                     const KinematicState& obstacle,
                                     const RepulsiveParams& params) {
    params.validate();
    RepulsiveGeometry g;
    const Vec2 offset = obstacle.p - robot.p;
    g.rho_s = offset.norm();
    if (g.rho_s == 0.0)
        throw std::domain_error("repulsive field: coincident robot and obstacle");
    g.n_ro = offset / g.rho_s;
    g.v_ro = (robot.v - obstacle.v).dot(g.n_ro);
    g.rho_m = g.v_ro * g.v_ro / (2.0 * params.a_max);
    g.gap = g.rho_s - g.rho_m;
    if (g.v_ro <= 0.0 || g.gap >= params.rho0)
        g.branch = FieldBranch::Zero;
    else if (g.gap > 0.0)
        g.branch = FieldBranch::Active;
    else
        g.branch = FieldBranch::UndefinedCollision;
    return g;
}

}  // namespace

FieldSample repulsive_potential(const KinematicState& robot, const KinematicState& obstacle,
                                const RepulsiveParams& params) {
    const auto g = repulsive_geometry(robot, obstacle, params);
    FieldSample sample;
    sample.branch = g.branch;
    switch (g.branch) {
        case FieldBranch::Zero: sample.potential = 0.0; break;
        case FieldBranch::Active:
            sample.potential = params.eta * (1.0 / g.gap - 1.0 / params.rho0);
            break;
        case FieldBranch::UndefinedCollision: sample.potential = std::nullopt; break;
    }
    return sample;
}

FieldSample repulsive_force(const KinematicState& robot, const KinematicState& obstacle,
                            const RepulsiveParams& params) {
    const auto g = repulsive_geometry(robot, obstacle, params);
    FieldSample sample = repulsive_potential(robot, obstacle, params);

    switch (g.branch) {
        case FieldBranch::Zero:
            sample.force = {0.0, 0.0};
            break;
        case FieldBranch::Active: {
            // U = eta*(1/gap - 1/rho0); force = eta/gap^2 * (grad_p gap + grad_v gap).
            //   grad_p gap = -n_ro + v_ro * u_perp / (a_max * rho_s)
            //   grad_v gap = -(v_ro / a_max) * n_ro
            // with u_perp the component of the relative velocity orthogonal
            // to n_ro (rotating the approach direction changes v_ro).
            const Vec2 u = robot.v - obstacle.v;
            const Vec2 u_perp = u - g.n_ro * g.v_ro;
            const double scale = params.eta / (g.gap * g.gap);
            Vec2 f = g.n_ro * (-scale * (1.0 + g.v_ro / params.a_max)) +
                     u_perp * (scale * g.v_ro / (params.a_max * g.rho_s));
            sample.force = clamp_norm(f, params.f_max);
            break;
        }
        case FieldBranch::UndefinedCollision:
            sample.force = g.n_ro * -params.f_max;
            break;
    }
    return sample;
}

Vec2 total_force(const KinematicState& robot, const KinematicState& target,
                 std::span<const KinematicState> obstacles, const AttractiveParams& attr,
                 const RepulsiveParams& rep) {
    Vec2 f = attractive_force(robot, target, attr);
    for (const auto& obstacle : obstacles) f += repulsive_force(robot, obstacle, rep).force;
    if (!f.finite()) throw std::domain_error("total_force: non-finite result");
    return f;
}

Gradient fd_gradient(const std::function<double(Vec2, Vec2)>& field, const KinematicState& at,
                     double h) {
    if (!(h > 0.0)) throw std::domain_error("fd_gradient: step must be positive");
    auto sample = [&](Vec2 p, Vec2 v) {
        const double value = field(p, v);
        if (!std::isfinite(value)) throw std::domain_error("fd_gradient: non-finite sample");
        return value;
    };
    const Vec2 p = at.p, v = at.v;
    const double inv = 1.0 / (2.0 * h);
    Gradient grad;
    grad.p.x = (sample({p.x + h, p.y}, v) - sample({p.x - h, p.y}, v)) * inv;
    grad.p.y = (sample({p.x, p.y + h}, v) - sample({p.x, p.y - h}, v)) * inv;
    grad.v.x = (sample(p, {v.x + h, v.y}) - sample(p, {v.x - h, v.y})) * inv;
    grad.v.y = (sample(p, {v.x, v.y + h}) - sample(p, {v.x, v.y - h})) * inv;
    return grad;
}

std::vector<FieldArrow> evaluate_force_grid(const KinematicState& target,
                                            std::span<const KinematicState> obstacles,
                                            const AttractiveParams& attr,
                                            const RepulsiveParams& rep, GridBounds bounds,
                                            int nx, int ny, Vec2 robot_velocity) {
    if (nx < 1 || ny < 1) throw std::domain_error("evaluate_force_grid: empty grid");
    std::vector<FieldArrow> arrows;
    arrows.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    const double dx = (bounds.x_max - bounds.x_min) / nx;
    const double dy = (bounds.y_max - bounds.y_min) / ny;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const Vec2 p{bounds.x_min + (ix + 0.5) * dx, bounds.y_min + (iy + 0.5) * dy};
            bool degenerate = false;
            for (const auto& o : obstacles)
                if ((o.p - p).norm() < 1e-9) degenerate = true;
            if (degenerate) continue;
            const Vec2 f = total_force({p, robot_velocity}, target, obstacles, attr, rep);
            arrows.push_back({p.x, p.y, f.x, f.y});
        }
    }
    return arrows;
}

}  // namespace mrsim

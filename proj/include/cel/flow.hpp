/// @file flow.hpp
/// @brief Particle trajectories with first and second variational equations,
/// inverse flows by backward integration, transport by composition.
#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cel/biot_savart.hpp"
#include "cel/fields.hpp"

namespace cel {

/// m[2*i + j] = d_j X_i.
using Mat2 = std::array<double, 4>;
/// h[4*k + 2*i + j] = d_i d_j X_k.
using Tensor222 = std::array<double, 8>;

struct VelocitySample {
    double u1 = 0.0, u2 = 0.0;
    Mat2 grad{};                  ///< grad[2*i + j] = d_j u_i
    std::array<double, 6> hess{};  ///< hess[3*i + s], s = 0:d11, 1:d12, 2:d22 of u_i
};

/// Velocity as a function of (t, x) on a closed time interval.
class VelocitySampler {
public:
    virtual ~VelocitySampler() = default;
    virtual double t_min() const = 0;
    virtual double t_max() const = 0;
    /// Times where the sampler is only piecewise smooth; steps never straddle them.
    virtual std::vector<double> breakpoints() const { return {}; }
    /// order 0: velocity; 1: plus gradient; 2: plus second derivatives.
    virtual VelocitySample evaluate(double t, Point x, int order) const = 0;
};

class AnalyticSampler : public VelocitySampler {
public:
    using Fn = std::function<VelocitySample(double, Point)>;
    AnalyticSampler(Fn f, double t_min, double t_max) : f_(std::move(f)), lo_(t_min), hi_(t_max) {}
    double t_min() const override { return lo_; }
    double t_max() const override { return hi_; }
    VelocitySample evaluate(double t, Point x, int) const override { return f_(t, x); }

private:
    Fn f_;
    double lo_, hi_;
};

/// Grid velocity snapshots, bicubic in space, linear in time between snapshots.
/// A single snapshot is held constant over [t_min, t_max].
class GridSampler : public VelocitySampler {
public:
    GridSampler(std::vector<double> times, const std::vector<VelocityField>& fields, bool with_hessian,
                double hold_until = 0.0);

    static GridSampler from_vorticity(const std::vector<double>& times, const std::vector<ScalarField>& omegas,
                                      bool with_hessian);
    static GridSampler frozen(const VelocityField& u, double t_min, double t_max, bool with_hessian);

    double t_min() const override { return lo_; }
    double t_max() const override { return hi_; }
    std::vector<double> breakpoints() const override { return times_; }
    VelocitySample evaluate(double t, Point x, int order) const override;
    const Grid2D& grid() const { return grid_; }

private:
    struct Snap {
        std::vector<std::vector<double>> comp;  // u1, u2, grad (4), hessian (6)
    };
    Grid2D grid_;
    std::vector<double> times_;
    std::vector<Snap> snaps_;
    bool hess_;
    double lo_, hi_;
};

struct FlowMap {
    Grid2D grid;
    double t0 = 0.0, t1 = 0.0;
    std::vector<Point> positions;  ///< lifted (not wrapped)
    std::vector<Mat2> grad;
    std::vector<Tensor222> grad2;  ///< empty unless requested
    std::vector<double> jac;
};

FlowMap advance_flow(const VelocitySampler& velocity_at, const Grid2D& grid, double t0, double t1, double dt,
                     bool with_second_gradient);

/// Flow maps from times.front() to each later entry of times, in one pass.
std::vector<FlowMap> advance_flow_sequence(const VelocitySampler& velocity_at, const Grid2D& grid,
                                           const std::vector<double>& times, double dt, bool with_second_gradient);

/// Positions only, from arbitrary starting points.
std::vector<Point> advance_points(const VelocitySampler& velocity_at, const std::vector<Point>& start, double t0,
                                  double t1, double dt);

FlowMap identity_flow(const Grid2D& grid, double t, bool with_second_gradient);

/// omega0 evaluated at the mapped points of an inverse flow (t -> 0).
ScalarField transport_by_characteristics(const ScalarField& omega0, const FlowMap& inverse_flow);

struct FlowGradientBounds {
    double sup_grad = 0.0;  ///< max operator norm of grad X
    double l2_grad2 = 0.0;  ///< L2 norm of the second-gradient tensor; NaN when not integrated
};
FlowGradientBounds flow_gradient_bounds(const FlowMap& flow);

/// max |jac - 1|.
double jacobian_defect(const FlowMap& flow);

void write_flow_csv(const std::string& path, const FlowMap& flow);

}  // namespace cel

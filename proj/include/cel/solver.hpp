/// @file solver.hpp
/// @brief Vorticity transport: dealiased pseudo-spectral RK4 and a
/// semi-Lagrangian scheme built on the flow module; mollification.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cel/fields.hpp"
#include "cel/flow.hpp"

namespace cel {

enum class Method { spectral, semi_lagrangian };

std::string method_name(Method m);
Method parse_method(const std::string& s);

/// Discrete radial bump exp(-1/(1-|x/eps|^2)), renormalized to unit grid sum.
class Mollifier {
public:
    Mollifier(const Grid2D& grid, double epsilon);

    double epsilon() const { return eps_; }
    double weight_sum() const;
    ScalarField apply(const ScalarField& f) const;

    struct Tap {
        int a, b;
        double w;
    };
    const std::vector<Tap>& taps() const { return taps_; }

private:
    Grid2D grid_;
    double eps_;
    std::vector<Tap> taps_;
};

ScalarField mollify(const ScalarField& f, double epsilon);

/// phi(t, x) = a(t) (1 + c1 x1 + c2 x2) b(|x - center| / radius), b a C-infinity bump with b(0) = 1.
struct TestFunction {
    std::string name;
    Point center;
    double radius = 1.0;
    double c1 = 0.0, c2 = 0.0;
    std::function<double(double)> a;
    std::function<double(double)> da;

    double value(double t, Point x) const;
    double time_derivative(double t, Point x) const;
    Point gradient(double t, Point x) const;
    /// Support must stay a cell away from the box edge.
    void require_inside(const Grid2D& grid) const;
};

/// Five fixed analytic test functions.
std::vector<TestFunction> weak_form_presets();

/// Per-step record of int phi omega and int (d_t phi + u . grad phi) omega.
struct WeakFormRecord {
    std::vector<std::string> names;
    std::vector<double> times;
    std::vector<std::vector<double>> pairing;    ///< [probe][step]
    std::vector<std::vector<double>> integrand;  ///< [probe][step]
};

struct SimulationSettings {
    double T = 1.0;
    double dt = 1e-3;
    Method method = Method::spectral;
};

struct Trajectory {
    SimulationSettings config;
    std::vector<double> times;
    std::vector<ScalarField> fields;
    std::vector<double> velocity_sup;
    std::vector<double> gradient_sup;
    double initial_mean = 0.0;
    WeakFormRecord weak;
};

/// 0 and T are always checkpoints.
Trajectory simulate(const ScalarField& omega0, double T, double dt, const std::vector<double>& checkpoints,
                    Method method, const std::vector<TestFunction>& probes = {});

/// n evenly spaced times on [0, T].
std::vector<double> even_checkpoints(double T, int count);

/// ||w_spectral(T) - w_semi_lagrangian(T)||_1 / ||w0||_1.
double cross_validate(const ScalarField& omega0, double T, double dt);

/// Largest dt with dt * ||u0||_inf / dx <= 0.5.
double cfl_limit(const ScalarField& omega0);

}  // namespace cel

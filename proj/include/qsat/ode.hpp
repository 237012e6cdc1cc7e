#ifndef QSAT_ODE_HPP
#define QSAT_ODE_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "qsat/cube.hpp"
#include "qsat/trajectory.hpp"

namespace qsat::ode {

struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Heuristic trajectory quadruple at scaled time t. Starts at
// (q, w, x, y) = (1/2, 1, 0, 0).
struct OdeState {
    double t = 0.0;
    double q = 0.5, w = 1.0, x = 0.0, y = 0.0;
};

struct OdeDeriv {
    double dq, dw, dx, dy;
};

// dq/dt = -y, dw/dt = -3yw/q, dx/dt = 3w/q - 2xy/q, dy/dt = 2x/q - y^2/q.
OdeDeriv rhs(const OdeState& s);

struct OdeTrajectory {
    std::vector<OdeState> states; // includes t = 0
    double step = 0.0;
    int order = 4;
};

// Classical RK4 with fixed step from the t = 0 initial state.
OdeTrajectory integrate(double t_max, double step);

// The closed-form solution of the system.
OdeState closed_form(double t);

// (log d)^(1/3) * d^(2/3) * 2^d, the conjectured order of the final edge
// count; the constant in front is left to experiments.
double conjecture_scale(int d);

// One empirical snapshot against the predicted trajectories, each side in
// its natural scaling.
struct OverlayRow {
    uint64_t i;
    double t;
    double open_scaled, q_pred; // O/(d 2^d) vs q(t)
    double w_scaled, w_pred;    // mean W / d vs w(t)
    double x_scaled, x_pred;    // mean X / d^(2/3) vs x(t)
    double y_scaled, y_pred;    // mean Y / d^(1/3) vs y(t)
    double y_zero_frac;
};

std::vector<OverlayRow> overlay(std::span<const TrajectoryRecord> records,
                                Dim d);

} // namespace qsat::ode

#endif

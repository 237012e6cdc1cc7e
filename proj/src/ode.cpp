#include "qsat/ode.hpp"

#include <cmath>

namespace qsat::ode {

OdeDeriv rhs(const OdeState& s) {
    if (!(s.q > 0.0))
        throw SingularityError("ode rhs: q <= 0 at t = " + std::to_string(s.t));
    double inv_q = 1.0 / s.q;
    return OdeDeriv{
        -s.y,
        -3.0 * s.y * s.w * inv_q,
        (3.0 * s.w - 2.0 * s.x * s.y) * inv_q,
        (2.0 * s.x - s.y * s.y) * inv_q,
    };
}

namespace {

OdeState advance(const OdeState& s, double dt, const OdeDeriv& k) {
    return OdeState{s.t + dt, s.q + dt * k.dq, s.w + dt * k.dw,
                    s.x + dt * k.dx, s.y + dt * k.dy};
}

} // namespace

OdeTrajectory integrate(double t_max, double step) {
    if (!(t_max > 0.0) || !(step > 0.0))
        throw std::invalid_argument("ode integrate: t_max and step must be > 0");

    OdeTrajectory traj;
    traj.step = step;
    OdeState s{};
    traj.states.push_back(s);
    uint64_t nsteps = uint64_t(std::ceil(t_max / step - 1e-9));
    for (uint64_t n = 0; n < nsteps; ++n) {
        double h = std::min(step, t_max - s.t);
        OdeDeriv k1 = rhs(s);
        OdeDeriv k2 = rhs(advance(s, 0.5 * h, k1));
        OdeDeriv k3 = rhs(advance(s, 0.5 * h, k2));
        OdeDeriv k4 = rhs(advance(s, h, k3));
        s = OdeState{
            s.t + h,
            s.q + h / 6.0 * (k1.dq + 2.0 * (k2.dq + k3.dq) + k4.dq),
            s.w + h / 6.0 * (k1.dw + 2.0 * (k2.dw + k3.dw) + k4.dw),
            s.x + h / 6.0 * (k1.dx + 2.0 * (k2.dx + k3.dx) + k4.dx),
            s.y + h / 6.0 * (k1.dy + 2.0 * (k2.dy + k3.dy) + k4.dy),
        };
        traj.states.push_back(s);
    }
    return traj;
}

OdeState closed_form(double t) {
    if (t < 0.0) throw std::invalid_argument("closed_form: t < 0");
    double t3 = t * t * t;
    return OdeState{
        t,
        0.5 * std::exp(-8.0 * t3),
        std::exp(-24.0 * t3),
        6.0 * t * std::exp(-16.0 * t3),
        12.0 * t * t * std::exp(-8.0 * t3),
    };
}

double conjecture_scale(int d) {
    if (d < 2) throw std::invalid_argument("conjecture_scale: d < 2");
    return std::cbrt(std::log(double(d))) *
           std::pow(double(d), 2.0 / 3.0) * std::ldexp(1.0, d);
}

std::vector<OverlayRow> overlay(std::span<const TrajectoryRecord> records,
                                Dim d) {
    double dv = double(d.value);
    double d23 = std::pow(dv, 2.0 / 3.0);
    double d13 = std::cbrt(dv);
    double full = dv * std::ldexp(1.0, d.value);

    std::vector<OverlayRow> rows;
    rows.reserve(records.size());
    for (const TrajectoryRecord& rec : records) {
        OdeState pred = closed_form(rec.t);
        rows.push_back(OverlayRow{
            rec.i, rec.t,
            double(rec.open_count) / full, pred.q,
            rec.w_mean / dv, pred.w,
            rec.x_mean / d23, pred.x,
            rec.y_mean / d13, pred.y,
            rec.y_zero_frac,
        });
    }
    return rows;
}

} // namespace qsat::ode

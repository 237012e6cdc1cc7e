#ifndef QSAT_QUADRATURE_HPP
#define QSAT_QUADRATURE_HPP

#include <cmath>
#include <stdexcept>

namespace qsat {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

template <class F>
double simpson_adapt(const F& f, double a, double b, double fa, double fm,
                     double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    if (depth <= 0)
        throw QuadratureError("adaptive quadrature: depth budget exhausted");
    return simpson_adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
// Throws QuadratureError when the recursion budget runs out.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double tol,
                          int max_depth = 60) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_adaptive: tol");
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_adapt(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Integer power by repeated squaring; pow() is slower and less predictable
// for the large integer exponents used here.
inline double ipow(double base, int exp) {
    double result = 1.0, acc = base;
    for (int e = exp; e > 0; e >>= 1) {
        if (e & 1) result *= acc;
        acc *= acc;
    }
    return result;
}

} // namespace qsat

#endif

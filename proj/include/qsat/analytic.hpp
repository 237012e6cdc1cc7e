#ifndef QSAT_ANALYTIC_HPP
#define QSAT_ANALYTIC_HPP

#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qsat/engine.hpp"

namespace qsat {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Edges that appear in the final graph regardless of how the rest of the
// scan goes: never the last edge of any square containing them.
inline EdgeSet good_edges(const ClockAssignment& clocks, Dim d) {
    return kernels::good_edges(std::span<const double>(clocks.values), d);
}

// P(a fixed edge is good), exactly: the integral of (1-x^3)^(d-1) over
// [0,1], evaluated by binomial expansion as
// sum_k (-1)^k C(d-1,k) / (3k+1).
BigRat good_probability_exact(int d);

// Same integral by adaptive quadrature, for cross-validation.
double good_probability_quadrature(int d, double tol);

// Exact expected number of good edges, d * 2^(d-1) * P(good), as a double.
double expected_good_count(int d);

// Integrand whose double integral over the unit square is P(good)^2.
double marginal_product_integrand(double x, double y, int d);

// Integrand whose double integral is P(two incident edges both good).
double joint_integrand(double x, double y, int d);

// P(two fixed incident edges are both good), by 2-D quadrature split along
// the diagonal where the integrand has a kink.
double joint_good_probability(int d, double tol);

struct CovarianceRow {
    int d;
    double p;          // P(good), by quadrature
    double r;          // joint probability
    double scaled_gap; // d^(2/3) * (r - p^2); negative (see below)
};

// The covariance r - p^2 is negative at every d (already at d=2, where
// r = 1/2 and p = 3/4 exactly): the shared square hurts more than the
// paired squares help. What vanishes at the d^(-2/3) scale is the
// magnitude, so the monotone flag tracks |scaled_gap|.
struct CovarianceTable {
    std::vector<CovarianceRow> rows;
    bool gap_magnitude_decreasing = false; // strictly, along the given list
};

CovarianceTable covariance_decay_table(std::span<const int> ds, double tol);

} // namespace qsat

#endif

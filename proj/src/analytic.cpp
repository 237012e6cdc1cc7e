#include "qsat/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qsat/quadrature.hpp"

namespace qsat {

BigRat good_probability_exact(int d) {
    if (d < 1) throw std::invalid_argument("good_probability_exact: d < 1");
    BigRat sum = 0;
    BigInt binom = 1; // C(d-1, k), updated multiplicatively
    for (int k = 0; k <= d - 1; ++k) {
        BigRat term(binom, 3 * k + 1);
        sum += (k & 1) ? -term : term;
        binom = binom * (d - 1 - k) / (k + 1);
    }
    return sum;
}

double good_probability_quadrature(int d, double tol) {
    if (d < 1) throw std::invalid_argument("good_probability_quadrature: d");
    return integrate_adaptive(
        [d](double x) { return ipow(1.0 - x * x * x, d - 1); }, 0.0, 1.0,
        tol);
}

double expected_good_count(int d) {
    double edges = double(d) * std::ldexp(1.0, d - 1);
    return edges * good_probability_exact(d).convert_to<double>();
}

double marginal_product_integrand(double x, double y, int d) {
    return ipow(1.0 - x * x * x, d - 1) * ipow(1.0 - y * y * y, d - 1);
}

double joint_integrand(double x, double y, int d) {
    double a = std::min(x, y), b = std::max(x, y);
    // 1 - a^3 - b^3 + a^3 b^2 in the factored form
    // (1-b) * ((1+b)(1-a^3) + b^2), which cannot cancel to a negative value.
    double base = (1.0 - b) * ((1.0 + b) * (1.0 - a * a * a) + b * b);
    return ipow(base, d - 2) * (1.0 - b * b);
}

double joint_good_probability(int d, double tol) {
    if (d < 2) throw std::invalid_argument("joint_good_probability: d < 2");
    // The integrand is symmetric and smooth on either side of x = y, so
    // integrate twice the lower triangle (x < y, where min = x, max = y).
    double inner_tol = tol / 50.0;
    auto outer = [&](double y) {
        if (y == 0.0) return 0.0;
        double stripe = integrate_adaptive(
            [&](double x) {
                double base =
                    (1.0 - y) * ((1.0 + y) * (1.0 - x * x * x) + y * y);
                return ipow(base, d - 2);
            },
            0.0, y, inner_tol);
        return stripe * (1.0 - y * y);
    };
    return 2.0 * integrate_adaptive(outer, 0.0, 1.0, tol / 4.0);
}

CovarianceTable covariance_decay_table(std::span<const int> ds, double tol) {
    CovarianceTable table;
    table.rows.reserve(ds.size());
    for (int d : ds) {
        if (d < 2)
            throw std::invalid_argument("covariance_decay_table: d < 2");
        CovarianceRow row;
        row.d = d;
        row.p = good_probability_quadrature(d, tol);
        row.r = joint_good_probability(d, tol);
        row.scaled_gap =
            std::pow(double(d), 2.0 / 3.0) * (row.r - row.p * row.p);
        table.rows.push_back(row);
    }
    table.gap_magnitude_decreasing = true;
    for (size_t i = 1; i < table.rows.size(); ++i)
        if (!(std::abs(table.rows[i].scaled_gap) <
              std::abs(table.rows[i - 1].scaled_gap)))
            table.gap_magnitude_decreasing = false;
    return table;
}

} // namespace qsat

#include "thermalab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace thermalab {

// Nodes via Newton iteration on P_n with the Chebyshev-angle initial guess,
// weights w = 2 / ((1-x^2) P_n'(x)^2); then mapped from [-1,1] to [0,1].
QuadratureRule gauss_legendre_unit(int n) {
    if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double pn = (n == 1) ? x : p1;
            double pn1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pn1) / (x * x - 1.0);
            double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = 0.5 * (1.0 - x); // descending x maps to ascending node
        rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

} // namespace thermalab

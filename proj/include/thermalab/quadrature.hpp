#pragma once

#include <vector>

namespace thermalab {

/// Gauss-Legendre rule on [0, 1]; weights sum to 1.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int size() const { return static_cast<int>(nodes.size()); }
};

QuadratureRule gauss_legendre_unit(int n);

} // namespace thermalab

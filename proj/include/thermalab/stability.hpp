#pragma once

#include <vector>

#include "thermalab/correlations.hpp"
#include "thermalab/densequantum.hpp"
#include "thermalab/hamiltonian.hpp"
#include "thermalab/quadrature.hpp"

namespace thermalab {

/// H(s) = H0 + s (H - H0) together with the (s, tau) quadrature grids.
struct InterpolationPath {
    InterpolationPath(LocalHamiltonian h0, LocalHamiltonian h, int s_nodes = 12,
                      int tau_nodes = 16);
    LocalHamiltonian h0;
    LocalHamiltonian h;
    QuadratureRule s_rule;
    QuadratureRule tau_rule;
};

struct PerturbationEstimate {
    double value = 0.0;
    double error_estimate = 0.0;
    int s_nodes = 0;
};

/// Right side of the perturbation identity
///   beta * int_0^1 dtau int_0^1 ds cov^tau_{g_s(beta)}(H - H0, A),
/// one Gibbs state per s node, reused across all tau nodes. The error
/// estimate compares against a grid with doubled s nodes; with adaptive set,
/// doubling continues until the estimate drops below tol (ConvergenceError
/// past max_s_nodes).
PerturbationEstimate perturbation_rhs(const InterpolationPath& path, const DenseOperator& a,
                                      double beta, bool adaptive = false, double tol = 1e-8,
                                      int max_s_nodes = 96);

/// Left side Tr[A g0(beta)] - Tr[A g(beta)], evaluated directly.
double perturbation_lhs(const LocalHamiltonian& h0, const LocalHamiltonian& h,
                        const DenseOperator& a, double beta);

/// Largest |beta| * ||H|| the perturbation quadrature accepts; the formula
/// has no ground-state (beta -> infinity) limit.
inline constexpr double kMaxBetaTimesNorm = 200.0;

// ---------------------------------------------------------------------------

struct ThermalLrParams {
    double alpha;
    double j;
    double beta;
    int l0 = 1;
};

/// Trace-norm stability bound (w |beta| J / (1 - e^{-1/xi})) e^{-dist(S,E)/xi}
/// with w = 4 min(|dS|, |dE|) |E| / ln 3. Empty E gives 0.
BoundValue thermal_lr_bound(const InteractionGraph& g, const Region& s, const Region& e,
                            const ThermalLrParams& p);

/// V = B u E u F with S inside B, B the open ball dist(.,S) < r and E the
/// sphere at radius r, so no edge joins B and F.
struct BufferPartition {
    Region s;
    Region b;
    Region e;
    Region f;
    int r = 0;
};
BufferPartition buffer_partition(const InteractionGraph& g, const Region& s, int r);

struct LocalityRow {
    int r = 0;
    int dist_s_e = 0;               // distance from S to supp(H - H0)
    double trace_distance = 0.0;    // || g_H^S - g_{H_B}^S ||_1
    double bound = 0.0;
    bool binding = true;
    bool trivial = false;           // H0 == H (perturbation empty)
};

/// Buffer-region sweep: for each r, truncate to H_B + H_F, measure the local
/// trace distance on S against the thermal Lieb-Robinson bound evaluated on
/// the actual perturbation support. alpha <= 0 uses 2De for the graph's
/// spatial dimension.
std::vector<LocalityRow> locality_of_temperature_experiment(const LocalHamiltonian& h,
                                                            const Region& s,
                                                            const std::vector<int>& r_values,
                                                            double beta, double alpha = 0.0,
                                                            int l0 = 1);

} // namespace thermalab

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thermalab/densequantum.hpp"
#include "thermalab/hamiltonian.hpp"

namespace thermalab {

/// Universal critical inverse temperature ln[(1+sqrt(1+4/alpha))/2]/(2J).
double beta_star(double alpha, double j);

/// Correlation length |ln[alpha e^{2|beta|J}(e^{2|beta|J}-1)]|^{-1}. Returns 0
/// at beta = 0 (limiting convention) and throws RegimeError for |beta| >=
/// beta_star, where the bound does not apply.
double xi_of_beta(double alpha, double j, double beta);

struct ClusteringBoundParams {
    double alpha;
    double j;
    double beta;
    int l0 = 1; // minimal distance below which the bound is not asserted
};

/// A bound value together with whether the theorem actually asserts it there.
struct BoundValue {
    double value = 0.0;
    bool binding = true;
    std::string note;
};

/// Covariance clustering bound 4a/(ln 3 (1-e^{-1/xi})) e^{-dist/xi} with
/// a = norm_a * norm_b * min_boundary. Rows below the minimal distance come
/// back flagged non-binding rather than erroring.
BoundValue clustering_bound(const ClusteringBoundParams& p, double norm_a, double norm_b,
                            int min_boundary, int dist);

/// Tr(rho^tau A rho^{1-tau} B) - Tr(rho A) Tr(rho B).
Complex generalized_covariance(const DensityMatrix& rho, const DenseOperator& a,
                               const DenseOperator& b, double tau);

struct QuadratureEstimate {
    double value = 0.0;
    double error_estimate = 0.0;
    int nodes = 0;
};

/// Gauss-Legendre average of the generalized covariance over tau in [0,1];
/// the error estimate comes from doubling the node count.
QuadratureEstimate duhamel_covariance(const DensityMatrix& rho, const DenseOperator& a,
                                      const DenseOperator& b, int n_nodes = 16);

/// Covariance evaluations against one state, with the observable transforms
/// into the state's eigenbasis cached. This is what the pair sweeps use; the
/// one-shot functions above go through it too.
class CovarianceEngine {
public:
    explicit CovarianceEngine(const DensityMatrix& rho);

    struct Transformed {
        bool real = false;
        Complex phase{1.0, 0.0}; // observable = phase * (real core) when real
        MatrixXd core_r;
        MatrixXcd core_c;
        Complex mean{0.0, 0.0}; // Tr(rho A)
    };

    /// Local operator embedded at `support` (use all sites for a global one).
    Transformed transform(const MatrixXcd& local_op, const Region& support) const;
    Complex covariance(const Transformed& a, const Transformed& b, double tau) const;

private:
    std::shared_ptr<const Eigensystem> basis_;
    VectorXd populations_;
    std::vector<int> dims_;
    VectorXd power(double tau) const;
};

// ---------------------------------------------------------------------------
// Decay classification

struct DecayFit {
    double xi_fit = 0.0;
    double z_fit = 0.0;
    double residual = 0.0;
    // (distance, |cov|) pairs that entered the fit
    std::vector<std::pair<double, double>> points;
};

/// Least squares of ln|cov| = c + z ln(N) - dist/xi on points above the 1e-14
/// floor; z fixed by the caller (default 0). Throws when fewer than 3 usable
/// points remain or the fitted xi is not positive.
DecayFit fit_decay(const std::vector<std::pair<double, double>>& points, int n_sites,
                   double fixed_z = 0.0);

/// Joint (c, z, xi) fit over points from several system sizes.
struct DecayPoint {
    double distance;
    double cov_abs;
    int n_sites;
};
DecayFit fit_decay_joint(const std::vector<DecayPoint>& points);

// ---------------------------------------------------------------------------
// Sweeps and experiments

struct CovarianceSweepRow {
    int site_a;
    int site_b;
    char axis_a;
    char axis_b;
    int dist;
    double tau;
    double cov_abs;
    double bound;
    bool binding;
};

/// Gibbs-state covariance of all single-site Pauli pairs over a tau grid,
/// with the clustering bound per row. alpha <= 0 picks the 2De default for
/// the graph's spatial dimension; j <= 0 picks the Hamiltonian's interaction
/// strength.
std::vector<CovarianceSweepRow> clustering_sweep(const LocalHamiltonian& h, double beta,
                                                 const std::vector<double>& taus,
                                                 double alpha = 0.0, double j = 0.0,
                                                 int l0 = 1);

struct ObservablePair {
    MatrixXcd op_a;
    Region support_a;
    MatrixXcd op_b;
    Region support_b;
};

struct GroundStateDecayReport {
    double gap = 0.0;
    std::vector<std::pair<double, double>> points; // (distance, |cov|)
    std::optional<DecayFit> fit;
};

/// Ground-state covariances cov_psi(A,B) over the given pairs plus a decay
/// fit. Throws when the two lowest eigenvalues are closer than 1e-10.
GroundStateDecayReport ground_state_covariance_experiment(
    const LocalHamiltonian& h, const std::vector<ObservablePair>& pairs);

} // namespace thermalab

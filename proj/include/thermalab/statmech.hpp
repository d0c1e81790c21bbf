#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thermalab/densequantum.hpp"
#include "thermalab/hamiltonian.hpp"
#include "thermalab/spectral.hpp"

namespace thermalab {

struct EnergyObservables {
    double u_total = 0.0;      // U(T) = Tr[H g(1/T)]
    double u_density = 0.0;    // U / N
    double c_fd = 0.0;         // dU/dT by centered finite difference
    double c_fluct = 0.0;      // variance / T^2
    double c_density = 0.0;    // c_fluct / N
    double variance = 0.0;     // <H^2> - <H>^2 in the Gibbs state
    double fd_step = 0.0;
    double rel_discrepancy = 0.0; // |c_fd - c_fluct| / max(|c_fluct|, eps)
};

/// Heat capacity by both routes (finite difference of U and the fluctuation
/// identity); the fluctuation value is the one propagated to densities.
/// Spectrum only, no eigenvectors. Throws for T <= 0.
EnergyObservables energy_observables(const LocalHamiltonian& h, double t,
                                     double fd_step_rel = 1e-4);
EnergyObservables energy_observables_from_spectrum(const VectorXd& energies, int n_sites,
                                                   double t, double fd_step_rel = 1e-4);

/// Weighted spectral measure: levels merged at a 1e-10 degeneracy tolerance,
/// weights nonnegative and normalized; right-continuous CDF.
class EnergyDistribution {
public:
    EnergyDistribution(const VectorXd& energies, const VectorXd& weights,
                       double merge_tol = 1e-10);

    const std::vector<double>& levels() const { return levels_; }
    const std::vector<double>& weights() const { return weights_; }
    /// F evaluated at each level (inclusive prefix sums).
    const std::vector<double>& cumulative() const { return cumulative_; }
    double mean() const { return mu_; }
    double variance() const { return sigma2_; }
    double cdf(double x) const;

private:
    std::vector<double> levels_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
    double mu_ = 0.0;
    double sigma2_ = 0.0;
};

/// Energy distribution of rho in the eigenbasis of H.
EnergyDistribution energy_cdf(const DensityMatrix& rho, const DenseOperator& h);

double gaussian_cdf(double x, double mu, double sigma2);

/// sup_x |F(x) - G(x)| with G the Gaussian CDF matching mean and variance;
/// evaluated at both one-sided limits of every jump. Throws on zero variance.
double berry_esseen_distance(const EnergyDistribution& dist);

struct MicrocanonicalWindow {
    double center = 0.0;
    double half_width = 0.0;
    std::vector<Index> member_indices; // eigenstate indices, ascending energy
};

/// Uniform mixture over the eigenstates with |E_k - E| <= Delta (degenerate
/// levels merged at 1e-10 before the membership test). Throws when the window
/// is empty, naming the nearest eigenvalue.
std::pair<DensityMatrix, MicrocanonicalWindow> microcanonical_state(const DenseOperator& h,
                                                                    double e, double delta);

// ---------------------------------------------------------------------------
// Experiments

/// True when every term matrix is diagonal in the computational basis.
bool all_terms_diagonal(const LocalHamiltonian& h, double tol = 1e-14);

/// Exact energy distribution for a diagonal Hamiltonian and a product state
/// with the given per-site diagonal weights (enumerates the 2^N basis).
EnergyDistribution diagonal_product_energy_distribution(
    const LocalHamiltonian& h, const std::vector<VectorXd>& site_weights);

struct GaussianityRow {
    int n_sites = 0;
    double sup_distance = 0.0;
    double mu = 0.0;
    double sigma2 = 0.0;
};

struct GaussianityFit {
    double c = 0.0; // sup distance ~ c * ln^p(N) / sqrt(N)
    double p = 0.0;
};
GaussianityFit fit_gaussianity_trend(const std::vector<GaussianityRow>& rows);

struct EoeReport {
    int n_sites = 0;
    double t = 0.0;
    double beta = 0.0;
    double delta = 0.0;        // energy spread density parameter
    int window_len = 0;        // l
    double energy_density = 0.0;
    double window_center = 0.0;
    double window_half_width = 0.0;
    Index window_members = 0;
    double avg_distance = 0.0;
    std::vector<double> per_translate;
    bool regime_ok = true;
    std::string regime_note;
    bool trivial_full_window = false;
};

/// Equivalence-of-ensembles run: microcanonical window centered at U(T) with
/// half width delta*sqrt(N) (delta <= 0 picks sqrt(c T^2)), trace distance to
/// the Gibbs state on every length-l window of the chain, averaged over
/// translates. c1 parametrizes the lower regime bound C1 ln(N)^{2D}/sqrt(N).
EoeReport eoe_experiment(const LocalHamiltonian& h, double t, double delta, int l,
                         double c1 = 0.5);

} // namespace thermalab

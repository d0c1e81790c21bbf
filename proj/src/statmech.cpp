#include "thermalab/statmech.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "thermalab/errors.hpp"

namespace thermalab {

namespace {
constexpr double kMergeTol = 1e-10;

double mean_energy(const VectorXd& energies, double beta) {
    VectorXd pops = gibbs_populations(energies, beta);
    return pops.dot(energies);
}
} // namespace

EnergyObservables energy_observables_from_spectrum(const VectorXd& energies, int n_sites,
                                                   double t, double fd_step_rel) {
    if (t <= 0.0) throw std::invalid_argument("temperature must be positive");
    EnergyObservables out;
    const double beta = 1.0 / t;
    VectorXd pops = gibbs_populations(energies, beta);
    out.u_total = pops.dot(energies);
    out.u_density = out.u_total / n_sites;
    VectorXd centered = energies.array() - out.u_total;
    out.variance = pops.dot(centered.cwiseProduct(centered));
    out.c_fluct = out.variance / (t * t);
    out.c_density = out.c_fluct / n_sites;

    out.fd_step = fd_step_rel * t;
    const double up = mean_energy(energies, 1.0 / (t + out.fd_step));
    const double dn = mean_energy(energies, 1.0 / (t - out.fd_step));
    out.c_fd = (up - dn) / (2.0 * out.fd_step);
    out.rel_discrepancy =
        std::abs(out.c_fd - out.c_fluct) / std::max(std::abs(out.c_fluct), 1e-300);
    return out;
}

EnergyObservables energy_observables(const LocalHamiltonian& h, double t, double fd_step_rel) {
    VectorXd energies = SpectralDecomposition::eigenvalues_only(h);
    return energy_observables_from_spectrum(energies, h.num_sites(), t, fd_step_rel);
}

// ---------------------------------------------------------------------------
// EnergyDistribution

EnergyDistribution::EnergyDistribution(const VectorXd& energies, const VectorXd& weights,
                                       double merge_tol) {
    if (energies.size() != weights.size())
        throw std::invalid_argument("energies and weights must have equal length");
    if (energies.size() == 0) throw std::invalid_argument("empty distribution");

    std::vector<Index> order(energies.size());
    std::iota(order.begin(), order.end(), Index(0));
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return energies[a] < energies[b]; });

    double wsum = 0.0;
    double last_raw = -std::numeric_limits<double>::infinity();
    for (Index idx : order) {
        const double e = energies[idx];
        double w = weights[idx];
        if (w < -1e-12) throw std::invalid_argument("negative weight in energy distribution");
        w = std::max(w, 0.0);
        wsum += w;
        // merged levels are represented by their lowest member so CDF queries
        // at exact eigenvalues stay right-continuous
        if (!levels_.empty() && e - last_raw <= merge_tol) {
            weights_.back() += w;
        } else {
            levels_.push_back(e);
            weights_.push_back(w);
        }
        last_raw = e;
    }
    if (std::abs(wsum - 1.0) > 1e-10)
        throw std::invalid_argument("energy distribution weights must sum to 1");
    for (double& w : weights_) w /= wsum;

    cumulative_.resize(weights_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        acc += weights_[k];
        cumulative_[k] = acc;
        mu_ += weights_[k] * levels_[k];
    }
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        const double c = levels_[k] - mu_;
        sigma2_ += weights_[k] * c * c;
    }
}

double EnergyDistribution::cdf(double x) const {
    auto it = std::upper_bound(levels_.begin(), levels_.end(), x);
    if (it == levels_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - levels_.begin()) - 1];
}

EnergyDistribution energy_cdf(const DensityMatrix& rho, const DenseOperator& h) {
    auto eig = h.eigensystem();
    const Index dim = eig->dim();
    if (rho.dim() != dim) throw std::invalid_argument("dimension mismatch");
    VectorXd weights(dim);
    if (eig->real_vectors()) {
        const MatrixXd& u = eig->vectors_real();
        // diag(U^T rho U) via one GEMM
        MatrixXcd ru = rho.matrix() * u.cast<Complex>();
        for (Index k = 0; k < dim; ++k)
            weights[k] = u.col(k).cast<Complex>().dot(ru.col(k)).real();
    } else {
        const MatrixXcd& u = eig->vectors_complex();
        MatrixXcd ru = rho.matrix() * u;
        for (Index k = 0; k < dim; ++k) weights[k] = u.col(k).dot(ru.col(k)).real();
    }
    return EnergyDistribution(eig->values(), weights, kMergeTol);
}

double gaussian_cdf(double x, double mu, double sigma2) {
    return 0.5 * std::erfc(-(x - mu) / std::sqrt(2.0 * sigma2));
}

double berry_esseen_distance(const EnergyDistribution& dist) {
    if (dist.variance() <= 0.0)
        throw std::domain_error("degenerate (zero-variance) energy distribution");
    const auto& levels = dist.levels();
    const auto& cum = dist.cumulative();
    double sup = 0.0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const double g = gaussian_cdf(levels[k], dist.mean(), dist.variance());
        const double before = (k == 0) ? 0.0 : cum[k - 1];
        sup = std::max({sup, std::abs(before - g), std::abs(cum[k] - g)});
    }
    return sup;
}

// ---------------------------------------------------------------------------
// Microcanonical states

namespace {

// Merged-level membership: indices of eigenvalues belonging to levels whose
// (merged) value lies within the window.
std::vector<Index> window_members(const VectorXd& energies, double e, double delta,
                                  double merge_tol) {
    std::vector<Index> members;
    Index k = 0;
    const Index n = energies.size();
    while (k < n) {
        Index j = k;
        double sum = 0.0;
        while (j < n && (j == k || energies[j] - energies[j - 1] <= merge_tol)) {
            sum += energies[j];
            ++j;
        }
        const double level = sum / static_cast<double>(j - k);
        if (std::abs(level - e) <= delta)
            for (Index i = k; i < j; ++i) members.push_back(i);
        k = j;
    }
    return members;
}

} // namespace

std::pair<DensityMatrix, MicrocanonicalWindow> microcanonical_state(const DenseOperator& h,
                                                                    double e, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("window half-width must be positive");
    auto eig = h.eigensystem();
    auto members = window_members(eig->values(), e, delta, kMergeTol);
    if (members.empty()) {
        double nearest = eig->values()[0];
        for (Index k = 0; k < eig->dim(); ++k)
            if (std::abs(eig->values()[k] - e) < std::abs(nearest - e))
                nearest = eig->values()[k];
        throw std::invalid_argument("empty microcanonical window around " + std::to_string(e) +
                                    " +- " + std::to_string(delta) + "; nearest eigenvalue is " +
                                    std::to_string(nearest));
    }
    VectorXd pops = VectorXd::Zero(eig->dim());
    const double p = 1.0 / static_cast<double>(members.size());
    for (Index k : members) pops[k] = p;

    MicrocanonicalWindow window{e, delta, std::move(members)};
    return {DensityMatrix(h.dims(), eig, std::move(pops)), window};
}

// ---------------------------------------------------------------------------
// Experiments

bool all_terms_diagonal(const LocalHamiltonian& h, double tol) {
    for (const auto& term : h.terms()) {
        MatrixXcd off = term.matrix;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

EnergyDistribution diagonal_product_energy_distribution(
    const LocalHamiltonian& h, const std::vector<VectorXd>& site_weights) {
    if (!all_terms_diagonal(h))
        throw std::invalid_argument("Hamiltonian is not diagonal in the computational basis");
    const int n = h.num_sites();
    const int d = h.local_dim();
    if (static_cast<int>(site_weights.size()) != n)
        throw std::invalid_argument("need one weight vector per site");
    Index dim = 1;
    for (int v = 0; v < n; ++v) dim *= d;

    const auto dims = h.dims();
    VectorXd energies = VectorXd::Zero(dim);
    for (const auto& term : h.terms()) {
        auto offsets = subspace_offsets(dims, term.support);
        Region comp = Region::range(0, n).minus(term.support);
        auto comp_off = subspace_offsets(dims, comp);
        for (Index i = 0; i < static_cast<Index>(offsets.size()); ++i) {
            const double e = term.matrix(i, i).real();
            if (e == 0.0) continue;
            for (Index c : comp_off) energies[offsets[i] + c] += e;
        }
    }

    VectorXd weights = VectorXd::Ones(dim);
    for (int v = 0; v < n; ++v) {
        auto offsets = subspace_offsets(dims, Region{v});
        Region comp = Region::range(0, n).minus(Region{v});
        auto comp_off = subspace_offsets(dims, comp);
        for (Index i = 0; i < d; ++i)
            for (Index c : comp_off) weights[offsets[i] + c] *= site_weights[v][i];
    }
    return EnergyDistribution(energies, weights, kMergeTol);
}

GaussianityFit fit_gaussianity_trend(const std::vector<GaussianityRow>& rows) {
    // ln d_N = ln c + p ln ln N - (1/2) ln N
    if (rows.size() < 2) throw std::invalid_argument("trend fit needs at least two sizes");
    MatrixXd design(rows.size(), 2);
    VectorXd rhs(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double n = rows[i].n_sites;
        design(static_cast<Index>(i), 0) = 1.0;
        design(static_cast<Index>(i), 1) = std::log(std::log(n));
        rhs[static_cast<Index>(i)] = std::log(rows[i].sup_distance) + 0.5 * std::log(n);
    }
    VectorXd sol = design.colPivHouseholderQr().solve(rhs);
    return {std::exp(sol[0]), sol[1]};
}

EoeReport eoe_experiment(const LocalHamiltonian& h, double t, double delta, int l, double c1) {
    if (t <= 0.0) throw std::invalid_argument("temperature must be positive");
    const int n = h.num_sites();
    if (l < 1 || l > n) throw std::invalid_argument("window length outside the chain");

    auto spectral = SpectralDecomposition::compute(h);
    const VectorXd& energies = spectral.energies();

    EoeReport report;
    report.n_sites = n;
    report.t = t;
    report.beta = std::isinf(t) ? 0.0 : 1.0 / t;
    report.window_len = l;

    // U and c T^2 = variance / N straight from the populations; this form
    // stays exact at beta = 0 where the finite-difference route degenerates.
    VectorXd pops_u = gibbs_populations(energies, report.beta);
    const double u_total = pops_u.dot(energies);
    VectorXd centered = energies.array() - u_total;
    const double variance = pops_u.dot(centered.cwiseProduct(centered));
    report.energy_density = u_total / n;

    const double c_t2 = std::max(variance / n, 0.0);
    if (delta <= 0.0) delta = std::sqrt(c_t2);
    report.delta = delta;
    report.window_center = u_total;
    report.window_half_width = delta * std::sqrt(static_cast<double>(n));

    // Thm regime: C1 ln(N)^{2D}/sqrt(N) <= delta/sqrt(c T^2) <= 1
    const int dims_power = std::max(1, h.graph().spatial_dim());
    const double ratio = (c_t2 > 0) ? delta / std::sqrt(c_t2) : 0.0;
    const double lower = c1 *
                         std::pow(std::log(static_cast<double>(n)), 2.0 * dims_power) /
                         std::sqrt(static_cast<double>(n));
    if (ratio < lower || ratio > 1.0 + 1e-12) {
        report.regime_ok = false;
        report.regime_note = "delta ratio " + std::to_string(ratio) +
                             " outside [" + std::to_string(lower) + ", 1]";
    }

    auto members =
        window_members(energies, report.window_center, report.window_half_width, kMergeTol);
    if (members.empty())
        throw std::invalid_argument("empty microcanonical window in EoE run");
    report.window_members = static_cast<Index>(members.size());
    report.trivial_full_window = (report.window_members == spectral.dim());

    VectorXd micro = VectorXd::Zero(spectral.dim());
    const double p = 1.0 / static_cast<double>(members.size());
    for (Index k : members) micro[k] = p;
    VectorXd gibbs = gibbs_populations(energies, report.beta);

    double total = 0.0;
    for (int start = 0; start + l <= n; ++start) {
        Region window = Region::range(start, start + l);
        auto reduced =
            spectral.weighted_reduced(std::vector<VectorXd>{micro, gibbs}, window);
        const double dist = trace_distance(reduced[0], reduced[1]);
        report.per_translate.push_back(dist);
        total += dist;
    }
    report.avg_distance = total / static_cast<double>(report.per_translate.size());
    return report;
}

} // namespace thermalab

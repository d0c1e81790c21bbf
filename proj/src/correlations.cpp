#include "thermalab/correlations.hpp"

#include <cmath>

#include "thermalab/errors.hpp"
#include "thermalab/pauli.hpp"
#include "thermalab/quadrature.hpp"
#include "thermalab/spectral.hpp"

namespace thermalab {

namespace {
constexpr double kCovFloor = 1e-14;
constexpr double kLn3 = 1.0986122886681098;
constexpr double kEigenvalueFloor = 1e-14;
} // namespace

double beta_star(double alpha, double j) {
    if (alpha <= 0 || j <= 0) throw std::invalid_argument("beta_star needs alpha > 0, J > 0");
    return std::log((1.0 + std::sqrt(1.0 + 4.0 / alpha)) / 2.0) / (2.0 * j);
}

double xi_of_beta(double alpha, double j, double beta) {
    if (alpha <= 0 || j <= 0) throw std::invalid_argument("xi needs alpha > 0, J > 0");
    const double b = std::abs(beta);
    if (b >= beta_star(alpha, j))
        throw RegimeError("|beta| >= beta_star: clustering bound inapplicable at this "
                          "temperature");
    if (b == 0.0) return 0.0; // |ln 0|^{-1} -> 0
    const double x = std::exp(2.0 * b * j);
    const double arg = alpha * x * (x - 1.0);
    return 1.0 / std::abs(std::log(arg));
}

BoundValue clustering_bound(const ClusteringBoundParams& p, double norm_a, double norm_b,
                            int min_boundary, int dist) {
    const double xi = xi_of_beta(p.alpha, p.j, p.beta);
    const double a = norm_a * norm_b * min_boundary;
    double value;
    if (xi == 0.0) {
        value = 0.0; // infinite temperature: e^{-dist/xi} -> 0 for dist > 0
        if (dist == 0) value = 4.0 * a / kLn3;
    } else {
        value = 4.0 * a / (kLn3 * (1.0 - std::exp(-1.0 / xi))) * std::exp(-dist / xi);
    }
    BoundValue out;
    out.value = value;
    out.binding = dist >= p.l0;
    if (!out.binding) out.note = "bound not asserted below minimal distance L0";
    return out;
}

// ---------------------------------------------------------------------------
// CovarianceEngine

CovarianceEngine::CovarianceEngine(const DensityMatrix& rho)
    : basis_(rho.basis_ptr()), populations_(rho.populations()), dims_(rho.dims()) {}

VectorXd CovarianceEngine::power(double tau) const {
    VectorXd out(populations_.size());
    for (Index k = 0; k < out.size(); ++k) {
        const double p = populations_[k];
        if (p <= kEigenvalueFloor)
            out[k] = (tau == 0.0) ? 1.0 : 0.0;
        else
            out[k] = std::pow(p, tau);
    }
    return out;
}

CovarianceEngine::Transformed CovarianceEngine::transform(const MatrixXcd& local_op,
                                                          const Region& support) const {
    Transformed t;
    const bool full = static_cast<int>(support.size()) == static_cast<int>(dims_.size());

    // Split off a scalar phase when the operator is real or purely imaginary
    // (covers all Pauli observables) so real eigenbases stay in real GEMMs.
    const double max_re = local_op.real().cwiseAbs().maxCoeff();
    const double max_im = local_op.imag().cwiseAbs().maxCoeff();
    MatrixXd core_local;
    bool phase_ok = false;
    if (max_im <= 1e-15) {
        core_local = local_op.real();
        t.phase = Complex(1, 0);
        phase_ok = true;
    } else if (max_re <= 1e-15) {
        core_local = local_op.imag();
        t.phase = Complex(0, 1);
        phase_ok = true;
    }

    if (basis_->real_vectors() && phase_ok) {
        const MatrixXd& u = basis_->vectors_real();
        MatrixXd w = full ? MatrixXd(core_local * u)
                          : apply_embedded_real(core_local, support, dims_, u);
        t.core_r.noalias() = u.transpose() * w;
        t.real = true;
        double m = 0;
        for (Index k = 0; k < populations_.size(); ++k) m += populations_[k] * t.core_r(k, k);
        t.mean = t.phase * m;
        return t;
    }

    MatrixXcd embedded_in_basis;
    if (basis_->real_vectors()) {
        const MatrixXd& u = basis_->vectors_real();
        MatrixXcd w = full ? MatrixXcd(local_op * u.cast<Complex>())
                           : apply_embedded(local_op, support, dims_, u.cast<Complex>());
        embedded_in_basis.resize(w.rows(), w.cols());
        embedded_in_basis.real() = u.transpose() * w.real();
        embedded_in_basis.imag() = u.transpose() * w.imag();
    } else {
        const MatrixXcd& u = basis_->vectors_complex();
        MatrixXcd w = full ? MatrixXcd(local_op * u) : apply_embedded(local_op, support, dims_, u);
        embedded_in_basis = u.adjoint() * w;
    }
    t.core_c = std::move(embedded_in_basis);
    t.real = false;
    t.phase = Complex(1, 0);
    Complex m(0, 0);
    for (Index k = 0; k < populations_.size(); ++k) m += populations_[k] * t.core_c(k, k);
    t.mean = m;
    return t;
}

Complex CovarianceEngine::covariance(const Transformed& a, const Transformed& b,
                                     double tau) const {
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("tau must lie in [0, 1]");
    const VectorXd x = power(tau);
    const VectorXd y = power(1.0 - tau);
    Complex first;
    if (a.real && b.real) {
        // sum_{jk} x_j A_{jk} y_k B_{kj}
        const double s = x.dot((a.core_r.cwiseProduct(b.core_r.transpose())) * y);
        first = a.phase * b.phase * s;
    } else {
        const MatrixXcd& ac = a.real ? MatrixXcd(a.phase * a.core_r.cast<Complex>()) : a.core_c;
        const MatrixXcd& bc = b.real ? MatrixXcd(b.phase * b.core_r.cast<Complex>()) : b.core_c;
        Complex s(0, 0);
        for (Index j = 0; j < x.size(); ++j)
            for (Index k = 0; k < y.size(); ++k) s += x[j] * y[k] * ac(j, k) * bc(k, j);
        first = s;
    }
    return first - a.mean * b.mean;
}

Complex generalized_covariance(const DensityMatrix& rho, const DenseOperator& a,
                               const DenseOperator& b, double tau) {
    if (a.dim() != rho.dim() || b.dim() != rho.dim())
        throw std::invalid_argument("operators must act on the state's full space");
    CovarianceEngine engine(rho);
    Region all = Region::range(0, rho.num_sites());
    auto ta = engine.transform(a.matrix(), all);
    auto tb = engine.transform(b.matrix(), all);
    return engine.covariance(ta, tb, tau);
}

QuadratureEstimate duhamel_covariance(const DensityMatrix& rho, const DenseOperator& a,
                                      const DenseOperator& b, int n_nodes) {
    if (n_nodes < 2) throw std::invalid_argument("duhamel average needs at least 2 nodes");
    CovarianceEngine engine(rho);
    Region all = Region::range(0, rho.num_sites());
    auto ta = engine.transform(a.matrix(), all);
    auto tb = engine.transform(b.matrix(), all);

    auto integrate = [&](int n) {
        auto rule = gauss_legendre_unit(n);
        double acc = 0;
        for (int i = 0; i < n; ++i)
            acc += rule.weights[i] * engine.covariance(ta, tb, rule.nodes[i]).real();
        return acc;
    };
    QuadratureEstimate est;
    const double coarse = integrate(n_nodes);
    const double fine = integrate(2 * n_nodes);
    est.value = fine;
    est.error_estimate = std::abs(fine - coarse);
    est.nodes = 2 * n_nodes;
    return est;
}

// ---------------------------------------------------------------------------
// Decay fits

namespace {

DecayFit least_squares_decay(const std::vector<DecayPoint>& usable, bool fit_z,
                             double fixed_z) {
    // ln|cov| = c + z ln(N) - dist/xi
    const int n = static_cast<int>(usable.size());
    const int cols = fit_z ? 3 : 2;
    MatrixXd design(n, cols);
    VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = -usable[i].distance;
        if (fit_z) design(i, 2) = std::log(static_cast<double>(usable[i].n_sites));
        rhs[i] = std::log(usable[i].cov_abs);
        if (!fit_z) rhs[i] -= fixed_z * std::log(static_cast<double>(usable[i].n_sites));
    }
    VectorXd sol = design.colPivHouseholderQr().solve(rhs);
    const double inv_xi = sol[1];
    if (inv_xi <= 0.0)
        throw std::domain_error("decay fit produced a non-positive correlation length");
    DecayFit fit;
    fit.xi_fit = 1.0 / inv_xi;
    fit.z_fit = fit_z ? sol[2] : fixed_z;
    fit.residual = std::sqrt((design * sol - rhs).squaredNorm() / n);
    for (const auto& p : usable) fit.points.emplace_back(p.distance, p.cov_abs);
    return fit;
}

std::vector<DecayPoint> filter_floor(const std::vector<DecayPoint>& points) {
    std::vector<DecayPoint> usable;
    for (const auto& p : points)
        if (p.cov_abs > kCovFloor) usable.push_back(p);
    if (usable.size() < 3)
        throw std::invalid_argument("decay fit needs at least 3 points above the 1e-14 floor");
    return usable;
}

} // namespace

DecayFit fit_decay(const std::vector<std::pair<double, double>>& points, int n_sites,
                   double fixed_z) {
    std::vector<DecayPoint> pts;
    for (const auto& [d, c] : points) pts.push_back({d, c, n_sites});
    return least_squares_decay(filter_floor(pts), false, fixed_z);
}

DecayFit fit_decay_joint(const std::vector<DecayPoint>& points) {
    return least_squares_decay(filter_floor(points), true, 0.0);
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<CovarianceSweepRow> clustering_sweep(const LocalHamiltonian& h, double beta,
                                                 const std::vector<double>& taus,
                                                 double alpha, double j, int l0) {
    const auto& graph = h.graph();
    if (alpha <= 0.0) {
        if (graph.spatial_dim() < 1)
            throw std::invalid_argument("no default growth constant for a custom graph; "
                                        "pass alpha explicitly");
        alpha = growth_constant_bound(graph.spatial_dim());
    }
    if (j <= 0.0) j = h.interaction_strength();

    auto dense = assemble_dense(h);
    DensityMatrix rho = gibbs_state(dense, beta);
    CovarianceEngine engine(rho);

    const int n = graph.num_vertices();
    const char axes[3] = {'x', 'y', 'z'};
    std::vector<CovarianceEngine::Transformed> transforms;
    transforms.reserve(3 * n);
    std::vector<int> min_boundary(n, 1);
    for (int v = 0; v < n; ++v) {
        Region site{v};
        min_boundary[v] = static_cast<int>(graph.boundary(site).size());
        for (char ax : axes) transforms.push_back(engine.transform(pauli(ax), site));
    }

    ClusteringBoundParams params{alpha, j, beta, l0};
    std::vector<CovarianceSweepRow> rows;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            const int dist = graph.distance(u, v);
            for (int ia = 0; ia < 3; ++ia) {
                for (int ib = 0; ib < 3; ++ib) {
                    const auto& ta = transforms[3 * u + ia];
                    const auto& tb = transforms[3 * v + ib];
                    BoundValue bound = clustering_bound(
                        params, 1.0, 1.0, std::min(min_boundary[u], min_boundary[v]), dist);
                    for (double tau : taus) {
                        CovarianceSweepRow row;
                        row.site_a = u;
                        row.site_b = v;
                        row.axis_a = axes[ia];
                        row.axis_b = axes[ib];
                        row.dist = dist;
                        row.tau = tau;
                        row.cov_abs = std::abs(engine.covariance(ta, tb, tau));
                        row.bound = bound.value;
                        row.binding = bound.binding;
                        rows.push_back(row);
                    }
                }
            }
        }
    }
    return rows;
}

GroundStateDecayReport ground_state_covariance_experiment(
    const LocalHamiltonian& h, const std::vector<ObservablePair>& pairs) {
    auto spectral = SpectralDecomposition::compute(h);
    const auto& e = spectral.energies();
    if (e.size() < 2 || e[1] - e[0] <= 1e-10)
        throw std::domain_error("degenerate ground state (gap <= 1e-10)");

    VectorXcd psi;
    spectral.eigenvector(0, psi);
    const auto dims = h.dims();

    GroundStateDecayReport report;
    report.gap = e[1] - e[0];
    const MatrixXcd psi_col = psi;
    for (const auto& pair : pairs) {
        MatrixXcd b_psi = apply_embedded(pair.op_b, pair.support_b, dims, psi_col);
        MatrixXcd ab_psi = apply_embedded(pair.op_a, pair.support_a, dims, b_psi);
        MatrixXcd a_psi = apply_embedded(pair.op_a, pair.support_a, dims, psi_col);
        const Complex mean_ab = psi.dot(ab_psi.col(0));
        const Complex mean_a = psi.dot(a_psi.col(0));
        const Complex mean_b = psi.dot(b_psi.col(0));
        const double cov = std::abs(mean_ab - mean_a * mean_b);
        const double dist = h.graph().distance(pair.support_a, pair.support_b);
        report.points.emplace_back(dist, cov);
    }
    try {
        report.fit = fit_decay(report.points, h.num_sites(), 0.0);
    } catch (const std::exception&) {
        report.fit.reset(); // all covariances at the floor (e.g. product states)
    }
    return report;
}

} // namespace thermalab

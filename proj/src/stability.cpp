#include "thermalab/stability.hpp"

#include <cmath>

#include "thermalab/errors.hpp"
#include "thermalab/spectral.hpp"

namespace thermalab {

namespace {
constexpr double kLn3 = 1.0986122886681098;
constexpr double kEigenvalueFloor = 1e-14;

double pow_conv(double p, double tau) {
    if (p <= kEigenvalueFloor) return (tau == 0.0) ? 1.0 : 0.0;
    return std::pow(p, tau);
}

// Inner tau integral of cov^tau_{g_s}(V, A) for one s node, everything in the
// eigenbasis of H(s).
double tau_average(const VectorXd& pops, const MatrixXcd& v_hat, const MatrixXcd& a_hat,
                   const QuadratureRule& tau_rule) {
    const Index n = pops.size();
    Complex mean_v(0, 0), mean_a(0, 0);
    for (Index k = 0; k < n; ++k) {
        mean_v += pops[k] * v_hat(k, k);
        mean_a += pops[k] * a_hat(k, k);
    }
    // M_{jk} = V_{jk} A_{kj}; cov(tau) = sum_{jk} p_j^tau p_k^{1-tau} M_{jk} - mean product
    MatrixXcd m = v_hat.cwiseProduct(a_hat.transpose());
    double acc = 0;
    VectorXd x(n), y(n);
    for (int q = 0; q < tau_rule.size(); ++q) {
        const double tau = tau_rule.nodes[q];
        for (Index k = 0; k < n; ++k) {
            x[k] = pow_conv(pops[k], tau);
            y[k] = pow_conv(pops[k], 1.0 - tau);
        }
        const Complex s = x.transpose().cast<Complex>() * (m * y.cast<Complex>());
        acc += tau_rule.weights[q] * (s - mean_v * mean_a).real();
    }
    return acc;
}

} // namespace

InterpolationPath::InterpolationPath(LocalHamiltonian h0_in, LocalHamiltonian h_in, int s_nodes,
                                     int tau_nodes)
    : h0(std::move(h0_in)), h(std::move(h_in)), s_rule(gauss_legendre_unit(s_nodes)),
      tau_rule(gauss_legendre_unit(tau_nodes)) {
    if (!h0.graph().same_structure(h.graph()) || h0.local_dim() != h.local_dim())
        throw std::invalid_argument("interpolation endpoints must share the graph");
}

PerturbationEstimate perturbation_rhs(const InterpolationPath& path, const DenseOperator& a,
                                      double beta, bool adaptive, double tol,
                                      int max_s_nodes) {
    if (beta == 0.0 || !std::isfinite(beta))
        throw std::invalid_argument("perturbation quadrature needs a finite nonzero beta");

    const DenseOperator h0 = assemble_dense(path.h0);
    const DenseOperator h = assemble_dense(path.h);
    const MatrixXcd v = h.matrix() - h0.matrix();
    const MatrixXcd& am = a.matrix();

    auto outer = [&](const QuadratureRule& s_rule) {
        double acc = 0;
        for (int i = 0; i < s_rule.size(); ++i) {
            const double s = s_rule.nodes[i];
            DenseOperator hs(h.dims(), h0.matrix() + s * v);
            auto eig = hs.eigensystem();
            const double norm = std::max(std::abs(eig->values()[0]),
                                         std::abs(eig->values()[eig->dim() - 1]));
            if (std::abs(beta) * norm > kMaxBetaTimesNorm)
                throw RegimeError("|beta| * ||H(s)|| exceeds the cap of " +
                                  std::to_string(kMaxBetaTimesNorm) +
                                  "; the identity has no beta -> infinity limit");
            VectorXd pops = gibbs_populations(eig->values(), beta);
            MatrixXcd v_hat = eig->to_eigenbasis(v);
            MatrixXcd a_hat = eig->to_eigenbasis(am);
            acc += s_rule.weights[i] * tau_average(pops, v_hat, a_hat, path.tau_rule);
        }
        return beta * acc;
    };

    int nodes = path.s_rule.size();
    double value = outer(path.s_rule);
    double refined = outer(gauss_legendre_unit(2 * nodes));
    PerturbationEstimate est{value, std::abs(refined - value), nodes};
    if (!adaptive) return est;

    nodes *= 2;
    value = refined;
    while (est.error_estimate > tol) {
        if (2 * nodes > max_s_nodes)
            throw ConvergenceError("perturbation quadrature did not reach tolerance " +
                                       std::to_string(tol) + " within " +
                                       std::to_string(max_s_nodes) + " s-nodes",
                                   value, est.error_estimate);
        refined = outer(gauss_legendre_unit(2 * nodes));
        est.error_estimate = std::abs(refined - value);
        nodes *= 2;
        value = refined;
    }
    est.value = value;
    est.s_nodes = nodes;
    return est;
}

double perturbation_lhs(const LocalHamiltonian& h0, const LocalHamiltonian& h,
                        const DenseOperator& a, double beta) {
    DensityMatrix g0 = gibbs_state(assemble_dense(h0), beta);
    DensityMatrix g = gibbs_state(assemble_dense(h), beta);
    const Complex t0 = (a.matrix() * g0.matrix()).trace();
    const Complex t1 = (a.matrix() * g.matrix()).trace();
    return (t0 - t1).real();
}

// ---------------------------------------------------------------------------

BoundValue thermal_lr_bound(const InteractionGraph& g, const Region& s, const Region& e,
                            const ThermalLrParams& p) {
    if (e.empty()) return {0.0, true, "empty perturbation region"};
    const double xi = xi_of_beta(p.alpha, p.j, p.beta);
    const int dist = g.distance(s, e);
    const double w =
        4.0 * std::min(g.boundary(s).size(), g.boundary(e).size()) * e.size() / kLn3;
    double value;
    if (xi == 0.0) {
        value = (dist == 0) ? w * std::abs(p.beta) * p.j : 0.0;
    } else {
        value = w * std::abs(p.beta) * p.j / (1.0 - std::exp(-1.0 / xi)) *
                std::exp(-static_cast<double>(dist) / xi);
    }
    BoundValue out;
    out.value = value;
    out.binding = dist >= p.l0;
    if (!out.binding) out.note = "bound not asserted below minimal distance L0";
    return out;
}

BufferPartition buffer_partition(const InteractionGraph& g, const Region& s, int r) {
    if (r < 1) throw std::invalid_argument("buffer radius must be positive");
    BufferPartition part;
    part.s = s;
    part.r = r;
    part.b = g.ball(s, r);
    part.e = g.sphere(s, r);
    part.f = g.all_sites().minus(part.b).minus(part.e);
    return part;
}

std::vector<LocalityRow> locality_of_temperature_experiment(const LocalHamiltonian& h,
                                                            const Region& s,
                                                            const std::vector<int>& r_values,
                                                            double beta, double alpha,
                                                            int l0) {
    const auto& graph = h.graph();
    if (alpha <= 0.0) {
        if (graph.spatial_dim() < 1)
            throw std::invalid_argument("no default growth constant for a custom graph; "
                                        "pass alpha explicitly");
        alpha = growth_constant_bound(graph.spatial_dim());
    }

    // Reduced global Gibbs state on S, once.
    auto spectral = SpectralDecomposition::compute(h);
    VectorXd pops = gibbs_populations(spectral.energies(), beta);
    MatrixXcd g_s = spectral.weighted_reduced(pops, s);

    std::vector<LocalityRow> rows;
    for (int r : r_values) {
        auto part = buffer_partition(graph, s, r);
        LocalityRow row;
        row.r = r;

        LocalHamiltonian hb = h.truncate_to_region(part.b);
        LocalHamiltonian hf = h.truncate_to_region(part.f);
        LocalHamiltonian h0 = hb.add(hf);
        Region e_actual = difference_support(h, h0);
        if (e_actual.empty()) {
            row.trivial = true;
            row.dist_s_e = kInfiniteDistance;
            row.trace_distance = 0.0;
            row.bound = 0.0;
            rows.push_back(row);
            continue;
        }

        // g_{H0}^S = g_{H_B}^S since H0 = H_B + H_F factorizes across the cut;
        // compute it on the compact B subsystem.
        auto [hb_compact, labels] = restrict_to_sites(h, part.b);
        std::vector<int> s_compact;
        for (int v : s)
            s_compact.push_back(static_cast<int>(
                std::lower_bound(labels.begin(), labels.end(), v) - labels.begin()));
        auto spectral_b = SpectralDecomposition::compute(hb_compact);
        VectorXd pops_b = gibbs_populations(spectral_b.energies(), beta);
        MatrixXcd g0_s = spectral_b.weighted_reduced(pops_b, Region(s_compact));

        row.trace_distance = trace_distance(g_s, g0_s);
        row.dist_s_e = graph.distance(s, e_actual);

        // J must bound H, H0 and the perturbation itself.
        std::vector<LocalTerm> diff_terms;
        for (const auto& term : h.terms())
            if (!term.support.subset_of(part.b) && !term.support.subset_of(part.f))
                diff_terms.push_back(term);
        LocalHamiltonian h_diff(h.graph_ptr(), std::move(diff_terms), h.local_dim());
        const double j = std::max({h.interaction_strength(), h0.interaction_strength(),
                                   h_diff.interaction_strength()});

        BoundValue bound = thermal_lr_bound(graph, s, e_actual, {alpha, j, beta, l0});
        row.bound = bound.value;
        row.binding = bound.binding;
        rows.push_back(row);
    }
    return rows;
}

} // namespace thermalab

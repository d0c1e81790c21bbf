#include <doctest.h>

#include <random>

#include "thermalab/correlations.hpp"
#include "thermalab/errors.hpp"
#include "thermalab/pauli.hpp"
#include "thermalab/quadrature.hpp"

using namespace thermalab;

namespace {

std::shared_ptr<const InteractionGraph> chain(int n) {
    return std::make_shared<InteractionGraph>(build_chain(n));
}

MatrixXcd random_density(std::mt19937& rng, Index dim) {
    std::normal_distribution<double> gauss;
    MatrixXcd g(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    MatrixXcd rho = g * g.adjoint();
    return rho / rho.trace();
}

MatrixXcd random_hermitian(std::mt19937& rng, Index dim) {
    std::normal_distribution<double> gauss;
    MatrixXcd g(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    return 0.5 * (g + g.adjoint());
}

// hand-rolled double loop through matrix products, the independent route:
// Tr(rho^tau A rho^{1-tau} B) - Tr(rho A) Tr(rho B)
Complex covariance_by_products(const DensityMatrix& rho, const MatrixXcd& a,
                               const MatrixXcd& b, double tau) {
    MatrixXcd rt = fractional_power(rho, tau).matrix();
    MatrixXcd rmt = fractional_power(rho, 1 - tau).matrix();
    const Complex first = (rt * a * rmt * b).trace();
    return first - (rho.matrix() * a).trace() * (rho.matrix() * b).trace();
}

} // namespace

TEST_CASE("gauss-legendre rule") {
    auto rule = gauss_legendre_unit(2);
    CHECK(rule.weights[0] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(rule.weights[1] == doctest::Approx(0.5).epsilon(1e-13));
    const double lo = std::min(rule.nodes[0], rule.nodes[1]);
    CHECK(lo == doctest::Approx(0.5 - 0.5 / std::sqrt(3.0)).epsilon(1e-13));

    // exactness on polynomials up to degree 2n-1
    for (int n : {3, 5, 8}) {
        auto r = gauss_legendre_unit(n);
        for (int p = 0; p < 2 * n; ++p) {
            double acc = 0;
            for (int i = 0; i < n; ++i) acc += r.weights[i] * std::pow(r.nodes[i], p);
            CHECK(acc == doctest::Approx(1.0 / (p + 1)).epsilon(1e-11));
        }
    }
}

TEST_CASE("beta_star and xi") {
    const double alpha = growth_constant_bound(1);
    const double bs = beta_star(alpha, 1.0);
    CHECK(bs == doctest::Approx(0.07366704051685592).epsilon(1e-10));
    CHECK(xi_of_beta(alpha, 1.0, bs / 2) == doctest::Approx(1.2432770692149872).epsilon(1e-10));
    CHECK(xi_of_beta(alpha, 1.0, 0.0) == 0.0);
    CHECK(xi_of_beta(alpha, 1.0, -bs / 2) ==
          doctest::Approx(xi_of_beta(alpha, 1.0, bs / 2)).epsilon(1e-13));
    CHECK_THROWS_AS(xi_of_beta(alpha, 1.0, bs), RegimeError);
    CHECK_THROWS_AS(xi_of_beta(alpha, 1.0, 2 * bs), RegimeError);
    CHECK_THROWS_AS(beta_star(-1.0, 1.0), std::invalid_argument);

    // xi grows monotonically toward beta_star
    double prev = 0;
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
        const double xi = xi_of_beta(alpha, 1.0, f * bs);
        CHECK(xi > prev);
        prev = xi;
    }
}

TEST_CASE("clustering bound plug-in value") {
    // e^{-1/xi} = 1/2 and e^{-dist/xi} = 1/4 -> 4/(ln3 * 1/2) * 1/4
    const double xi = 1.0 / std::log(2.0);
    // pick alpha, J, beta reproducing that xi through the engine: use the
    // formula directly instead by constructing params whose xi matches.
    // 2 e^{2 b J}(e^{2 b J} - 1) = e^{-1/xi} inverse is awkward; instead check
    // the arithmetic through a params set evaluated against the closed form.
    ClusteringBoundParams p{growth_constant_bound(1), 1.0, 0.5 * beta_star(growth_constant_bound(1), 1.0), 1};
    const double xi_p = xi_of_beta(p.alpha, p.j, p.beta);
    auto bound = clustering_bound(p, 1.0, 1.0, 1, 3);
    const double expect =
        4.0 / (std::log(3.0) * (1 - std::exp(-1.0 / xi_p))) * std::exp(-3.0 / xi_p);
    CHECK(bound.value == doctest::Approx(expect).epsilon(1e-13));
    CHECK(bound.binding);

    // frozen plug-in arithmetic for the quoted configuration
    const double plug = 4.0 / (std::log(3.0) * 0.5) * 0.25;
    CHECK(plug == doctest::Approx(1.8204784532536748).epsilon(1e-12));
    (void)xi;
}

TEST_CASE("clustering bound scales exactly with distance") {
    ClusteringBoundParams p{growth_constant_bound(1), 1.0,
                            0.4 * beta_star(growth_constant_bound(1), 1.0), 1};
    const double xi = xi_of_beta(p.alpha, p.j, p.beta);
    auto b1 = clustering_bound(p, 1, 1, 1, 4);
    auto b2 = clustering_bound(p, 1, 1, 1, 8);
    CHECK(b2.value / b1.value == doctest::Approx(std::exp(-4.0 / xi)).epsilon(1e-12));
}

TEST_CASE("bound below L0 is flagged non-binding") {
    ClusteringBoundParams p{growth_constant_bound(1), 1.0,
                            0.4 * beta_star(growth_constant_bound(1), 1.0), 3};
    auto soft = clustering_bound(p, 1, 1, 1, 2);
    CHECK(!soft.binding);
    CHECK(soft.value > 0);
    CHECK(!soft.note.empty());
}

TEST_CASE("generalized covariance") {
    std::mt19937 rng(23);

    SUBCASE("product state gives zero for every tau") {
        MatrixXcd ra = random_density(rng, 2), rb = random_density(rng, 2);
        DensityMatrix rho(DenseOperator({2, 2}, kron(ra, rb)));
        DenseOperator a = embed_operator(pauli_z(), Region{0}, {2, 2});
        DenseOperator b = embed_operator(pauli_x(), Region{1}, {2, 2});
        for (double tau : {0.0, 0.25, 0.5, 1.0})
            CHECK(std::abs(generalized_covariance(rho, a, b, tau)) <= 1e-12);
    }

    SUBCASE("commuting case is tau-independent and equals the standard covariance") {
        // rho diagonal, A and B diagonal -> [rho, A] = 0
        VectorXd pops(4);
        pops << 0.1, 0.2, 0.3, 0.4;
        MatrixXcd rho_m = pops.asDiagonal().toDenseMatrix().cast<Complex>();
        DensityMatrix rho(DenseOperator({2, 2}, rho_m));
        DenseOperator a = embed_operator(pauli_z(), Region{0}, {2, 2});
        DenseOperator b = embed_operator(pauli_z(), Region{1}, {2, 2});
        const Complex standard =
            (rho.matrix() * a.matrix() * b.matrix()).trace() -
            (rho.matrix() * a.matrix()).trace() * (rho.matrix() * b.matrix()).trace();
        for (double tau : {0.0, 0.3, 0.5, 0.8, 1.0}) {
            const Complex c = generalized_covariance(rho, a, b, tau);
            CHECK(std::abs(c - standard) <= 1e-12);
        }
    }

    SUBCASE("matches the independent product route on Heisenberg Gibbs") {
        auto h = build_model("heisenberg", chain(2), {{"J", 1.0}});
        auto rho = gibbs_state(assemble_dense(h), 0.5);
        DenseOperator a = embed_operator(pauli_z(), Region{0}, {2, 2});
        DenseOperator b = embed_operator(pauli_z(), Region{1}, {2, 2});
        const Complex via_engine = generalized_covariance(rho, a, b, 0.5);
        const Complex via_products = covariance_by_products(rho, a.matrix(), b.matrix(), 0.5);
        CHECK(std::abs(via_engine - via_products) <= 1e-10);
        CHECK(std::abs(via_engine.imag()) <= 1e-10);
    }

    SUBCASE("matches the product route on random instances across tau") {
        for (int trial = 0; trial < 5; ++trial) {
            DensityMatrix rho(DenseOperator({2, 2}, random_density(rng, 4)));
            MatrixXcd am = random_hermitian(rng, 4), bm = random_hermitian(rng, 4);
            DenseOperator a({2, 2}, am), b({2, 2}, bm);
            for (double tau : {0.0, 0.17, 0.5, 0.83, 1.0}) {
                const Complex lhs = generalized_covariance(rho, a, b, tau);
                const Complex rhs = covariance_by_products(rho, am, bm, tau);
                CHECK(std::abs(lhs - rhs) <= 1e-10);
            }
        }
    }

    SUBCASE("exchange symmetries") {
        DensityMatrix rho(DenseOperator({2, 2}, random_density(rng, 4)));
        DenseOperator a({2, 2}, random_hermitian(rng, 4));
        DenseOperator b({2, 2}, random_hermitian(rng, 4));
        for (double tau : {0.2, 0.4, 0.7}) {
            // cov^tau(A,B) = cov^{1-tau}(B,A) exactly (trace cyclicity)
            const Complex swap_both =
                generalized_covariance(rho, b, a, 1 - tau);
            // conj cov^tau(A,B) = cov^tau(B,A) for Hermitian A, B
            const Complex swap_order = generalized_covariance(rho, b, a, tau);
            const Complex base = generalized_covariance(rho, a, b, tau);
            CHECK(std::abs(base - swap_both) <= 1e-11);
            CHECK(std::abs(std::conj(base) - swap_order) <= 1e-11);
        }
        // at tau = 1/2 the two combine: the covariance is real
        const Complex mid = generalized_covariance(rho, a, b, 0.5);
        CHECK(std::abs(mid.imag()) <= 1e-10);
    }

    SUBCASE("invariant under A -> A + c 1") {
        DensityMatrix rho(DenseOperator({2, 2}, random_density(rng, 4)));
        MatrixXcd am = random_hermitian(rng, 4), bm = random_hermitian(rng, 4);
        MatrixXcd shifted = am + 2.7 * MatrixXcd::Identity(4, 4);
        for (double tau : {0.0, 0.5, 1.0}) {
            const Complex c1 = generalized_covariance(rho, DenseOperator({2, 2}, am),
                                                      DenseOperator({2, 2}, bm), tau);
            const Complex c2 = generalized_covariance(rho, DenseOperator({2, 2}, shifted),
                                                      DenseOperator({2, 2}, bm), tau);
            CHECK(std::abs(c1 - c2) <= 1e-10);
        }
    }
}

TEST_CASE("duhamel covariance") {
    std::mt19937 rng(31);

    SUBCASE("commuting case integrates to the standard covariance") {
        VectorXd pops(2);
        pops << 0.3, 0.7;
        DensityMatrix rho(DenseOperator({2}, pops.asDiagonal().toDenseMatrix().cast<Complex>()));
        DenseOperator a({2}, pauli_z());
        auto est = duhamel_covariance(rho, a, a, 8);
        const double standard = (rho.matrix() * a.matrix() * a.matrix()).trace().real() -
                                std::pow((rho.matrix() * a.matrix()).trace().real(), 2);
        CHECK(est.value == doctest::Approx(standard).epsilon(1e-12));
        CHECK(est.error_estimate <= 1e-13);
    }

    SUBCASE("node doubling agrees to 1e-10 on random instances") {
        DensityMatrix rho(DenseOperator({2, 2}, random_density(rng, 4)));
        DenseOperator a({2, 2}, random_hermitian(rng, 4));
        DenseOperator b({2, 2}, random_hermitian(rng, 4));
        auto est16 = duhamel_covariance(rho, a, b, 16);
        auto est32 = duhamel_covariance(rho, a, b, 32);
        CHECK(std::abs(est16.value - est32.value) <= 1e-10);
        CHECK(est16.error_estimate <= 1e-10);
    }

    SUBCASE("average lies between the tau-grid extremes") {
        DensityMatrix rho(DenseOperator({2, 2}, random_density(rng, 4)));
        DenseOperator a({2, 2}, random_hermitian(rng, 4));
        DenseOperator b({2, 2}, random_hermitian(rng, 4));
        auto est = duhamel_covariance(rho, a, b, 16);
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i <= 40; ++i) {
            const double c = generalized_covariance(rho, a, b, i / 40.0).real();
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        CHECK(est.value >= lo - 1e-12);
        CHECK(est.value <= hi + 1e-12);
    }
}

TEST_CASE("decay fits") {
    SUBCASE("exact exponential recovers xi") {
        std::vector<std::pair<double, double>> points;
        for (int r = 1; r <= 8; ++r) points.emplace_back(r, 3.0 * std::exp(-r / 2.0));
        auto fit = fit_decay(points, 8);
        CHECK(fit.xi_fit == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(fit.residual <= 1e-10);
    }

    SUBCASE("floor filtering and failure on too few points") {
        std::vector<std::pair<double, double>> points = {{1, 1e-20}, {2, 1e-19}, {3, 1e-18}};
        CHECK_THROWS_AS(fit_decay(points, 4), std::invalid_argument);
        points = {{1, 0.5}, {2, 0.25}};
        CHECK_THROWS_AS(fit_decay(points, 4), std::invalid_argument);
    }

    SUBCASE("joint fit recovers z across sizes") {
        std::vector<DecayPoint> points;
        for (int n : {8, 16, 32})
            for (int r = 1; r <= 6; ++r)
                points.push_back({static_cast<double>(r),
                                  0.7 * std::pow(n, 1.5) * std::exp(-r / 1.75), n});
        auto fit = fit_decay_joint(points);
        CHECK(fit.xi_fit == doctest::Approx(1.75).epsilon(1e-8));
        CHECK(fit.z_fit == doctest::Approx(1.5).epsilon(1e-8));
    }
}

TEST_CASE("clustering sweep obeys the bound on a small chain") {
    auto h = build_model("transverse_ising", chain(6), {{"J_zz", 1.0}, {"h_x", 0.5}});
    const double alpha = growth_constant_bound(1);
    const double j = h.interaction_strength();
    const double beta = 0.5 * beta_star(alpha, j);
    auto rows = clustering_sweep(h, beta, {0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(!rows.empty());
    for (const auto& r : rows) {
        CHECK(r.binding);
        CHECK(r.cov_abs <= r.bound);
    }
}

TEST_CASE("ground state covariance experiment") {
    SUBCASE("decoupled chain has zero covariances") {
        // transverse field only: unique product ground state
        auto h = build_model("transverse_ising", chain(4), {{"J_zz", 0.0}, {"h_x", 1.0}});
        std::vector<ObservablePair> pairs;
        for (int d = 1; d < 4; ++d)
            pairs.push_back({pauli_z(), Region{0}, pauli_z(), Region{d}});
        auto report = ground_state_covariance_experiment(h, pairs);
        for (const auto& [dist, cov] : report.points) CHECK(cov <= 1e-12);
        CHECK(!report.fit.has_value());
        CHECK(report.gap > 1e-10);
    }

    SUBCASE("paramagnetic chain decays exponentially") {
        auto h = build_model("transverse_ising", chain(8), {{"J_zz", 1.0}, {"h_x", 3.0}});
        std::vector<ObservablePair> pairs;
        for (int d = 1; d <= 6; ++d)
            for (int i = 0; i + d < 8; ++i)
                pairs.push_back({pauli_z(), Region{i}, pauli_z(), Region{i + d}});
        auto report = ground_state_covariance_experiment(h, pairs);
        REQUIRE(report.fit.has_value());
        CHECK(report.fit->xi_fit > 0);
        CHECK(report.fit->xi_fit < 2.0); // deep in the gapped phase
        CHECK(report.gap > 1.0);
    }

    SUBCASE("degenerate ground state errors out") {
        auto h = build_model("ising", chain(4), {{"J_zz", 1.0}});
        std::vector<ObservablePair> pairs = {{pauli_z(), Region{0}, pauli_z(), Region{3}}};
        CHECK_THROWS_AS(ground_state_covariance_experiment(h, pairs), std::domain_error);
    }
}

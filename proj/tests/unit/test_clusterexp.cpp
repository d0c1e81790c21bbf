#include <doctest.h>

#include <filesystem>
#include <random>

#include "thermalab/clusterexp.hpp"
#include "thermalab/correlations.hpp"
#include "thermalab/errors.hpp"
#include "thermalab/pauli.hpp"

using namespace thermalab;

namespace {

std::shared_ptr<const InteractionGraph> chain(int n) {
    return std::make_shared<InteractionGraph>(build_chain(n));
}

// Literal word enumeration over E^j with union-find component checks; the
// oracle for small orders.
MatrixXcd brute_force_truncation(const LocalHamiltonian& h, double beta, int L, int j_max,
                                 double* retained_count = nullptr) {
    auto edge_terms = folded_chain_edge_terms(h);
    const int n = h.num_sites();
    const int m = static_cast<int>(edge_terms.size());
    const auto dims = h.dims();
    Index dim = 1;
    for (int d : dims) dim *= d;

    std::vector<MatrixXcd> embedded;
    for (int e = 0; e < m; ++e)
        embedded.push_back(embed(edge_terms[e], Region{e, e + 1}, dims));

    MatrixXcd acc = MatrixXcd::Identity(dim, dim); // j = 0 word
    double count = 1;
    std::vector<int> word;
    double factorial = 1;
    std::function<void(int, double)> recurse = [&](int depth, double coeff) {
        if (depth > 0) {
            // component check over the word's edges
            std::vector<int> parent(n);
            std::iota(parent.begin(), parent.end(), 0);
            std::function<int(int)> find = [&](int x) {
                while (parent[x] != x) x = parent[x] = parent[parent[x]];
                return x;
            };
            std::vector<bool> used(n, false);
            for (int e : word) {
                used[e] = used[e + 1] = true;
                parent[find(e)] = find(e + 1);
            }
            std::vector<int> size(n, 0);
            for (int v = 0; v < n; ++v)
                if (used[v]) ++size[find(v)];
            bool ok = true;
            for (int v = 0; v < n; ++v)
                if (size[v] >= L) ok = false;
            if (ok) {
                // h(w) = h_{w_1} h_{w_2} ... h_{w_j}
                MatrixXcd prod = MatrixXcd::Identity(dim, dim);
                for (int e : word) prod = prod * embedded[e];
                acc += coeff * prod;
                count += 1;
            }
        }
        if (depth == j_max) return;
        for (int e = 0; e < m; ++e) {
            word.push_back(e);
            recurse(depth + 1, coeff * (-beta) / (depth + 1));
            word.pop_back();
        }
    };
    recurse(0, 1.0);
    (void)factorial;
    if (retained_count) *retained_count = count;
    return acc;
}

} // namespace

TEST_CASE("truncated series trivial cases") {
    auto h = build_model("ising", chain(4), {{"J_zz", 1.0}});

    SUBCASE("j_max = 0 gives the identity") {
        auto r = truncated_series_dense(h, 0.3, 5, 0);
        CHECK((r.op.matrix() - MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(r.stats.retained_words == doctest::Approx(1.0));
    }

    SUBCASE("beta = 0 gives the identity at any order") {
        auto r = truncated_series_dense(h, 0.0, 5, 8);
        CHECK((r.op.matrix() - MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() <= 1e-15);
    }

    SUBCASE("L = 2 drops every word touching an edge") {
        // every edge term covers two sites, so only the empty word survives
        auto r = truncated_series_dense(h, 0.3, 2, 6);
        CHECK((r.op.matrix() - MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(r.stats.retained_words == doctest::Approx(1.0));
        CHECK(r.stats.dropped_words > 0);
    }
}

TEST_CASE("truncated series converges to the exponential") {
    auto h = build_model("transverse_ising", chain(4), {{"J_zz", 1.0}, {"h_x", 0.4}});
    auto dense = assemble_dense(h);
    auto eig = dense.eigensystem();
    MatrixXcd exact = eig->from_diagonal((-0.2 * eig->values().array()).exp());
    auto r = truncated_series_dense(h, 0.2, 5, 20); // L = N + 1 keeps everything
    CHECK(trace_norm(r.op.matrix() - exact) <= 1e-8);
}

TEST_CASE("truncated series matches brute-force word enumeration") {
    auto h = build_model("transverse_ising", chain(4), {{"J_zz", 0.9}, {"h_x", 0.35}});
    for (int L : {2, 3, 4, 5}) {
        for (int j_max : {0, 1, 2, 3, 4}) {
            double brute_count = 0;
            MatrixXcd brute = brute_force_truncation(h, 0.45, L, j_max, &brute_count);
            auto fast = truncated_series_dense(h, 0.45, L, j_max);
            CHECK((fast.op.matrix() - brute).cwiseAbs().maxCoeff() <= 1e-11);
            CHECK(fast.stats.retained_words == doctest::Approx(brute_count).epsilon(1e-12));
        }
    }
}

TEST_CASE("retained words are monotone in L") {
    auto h = build_model("ising", chain(6), {{"J_zz", 1.0}});
    double prev = -1;
    for (int L = 2; L <= 7; ++L) {
        auto r = truncated_series_dense(h, 0.2, L, 6);
        CHECK(r.stats.retained_words >= prev);
        prev = r.stats.retained_words;
    }
}

TEST_CASE("truncation error decreases with L below 2 beta_star") {
    for (const char* model : {"ising", "transverse_ising"}) {
        std::map<std::string, double> couplings = {{"J_zz", 1.0}};
        if (std::string(model) == "transverse_ising") couplings["h_x"] = 0.5;
        auto h = build_model(model, chain(5), couplings);
        const double bstar = beta_star(growth_constant_bound(1), h.interaction_strength());
        const double beta = 1.5 * bstar; // inside the doubled-threshold regime
        auto dense = assemble_dense(h);
        auto eig = dense.eigensystem();
        MatrixXcd exact = eig->from_diagonal((-beta * eig->values().array()).exp());

        double prev = std::numeric_limits<double>::infinity();
        for (int L = 2; L <= 6; ++L) {
            auto r = truncated_series_dense(h, beta, L, 18);
            const double err = trace_norm(r.op.matrix() - exact);
            CHECK(err <= prev + 1e-12);
            prev = err;
        }
    }
}

TEST_CASE("mpo identity cases") {
    auto h = build_model("ising", chain(4), {{"J_zz", 1.0}});

    SUBCASE("L = 2 yields the identity MPO with unit bonds") {
        auto r = mpo_from_truncation(h, 0.3, 2, 6);
        for (Index b : r.mpo.bond_dims()) CHECK(b == 1);
        CHECK((r.mpo.contract_dense() - MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() <=
              1e-12);
    }

    SUBCASE("no terms yields the identity MPO") {
        LocalHamiltonian empty(chain(4), {}, 2);
        auto r = mpo_from_truncation(empty, 0.7, 4, 6);
        for (Index b : r.mpo.bond_dims()) CHECK(b == 1);
        CHECK((r.mpo.contract_dense() - MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() <=
              1e-12);
    }

    SUBCASE("beta = 0 yields the identity MPO") {
        auto r = mpo_from_truncation(h, 0.0, 4, 6);
        CHECK((r.mpo.contract_dense() - MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() <=
              1e-12);
    }
}

TEST_CASE("mpo rejects non-chain graphs") {
    auto grid = std::make_shared<InteractionGraph>(build_cubic(2, 2));
    auto h = build_model("ising", grid, {{"J_zz", 1.0}});
    CHECK_THROWS_AS(mpo_from_truncation(h, 0.2, 3, 6), std::invalid_argument);
}

TEST_CASE("mpo contraction equals the dense truncation") {
    SUBCASE("4-site transverse Ising across cutoffs") {
        auto h = build_model("transverse_ising", chain(4), {{"J_zz", 1.0}, {"h_x", 0.4}});
        for (int L : {2, 3, 4, 5}) {
            for (int j_max : {2, 6, 12}) {
                auto dense = truncated_series_dense(h, 0.25, L, j_max);
                auto mpo = mpo_from_truncation(h, 0.25, L, j_max);
                CHECK((mpo.mpo.contract_dense() - dense.op.matrix()).cwiseAbs().maxCoeff() <=
                      1e-10);
            }
        }
    }

    SUBCASE("6-site trace agreement") {
        auto h = build_model("ising", chain(6), {{"J_zz", 1.0}});
        auto dense = truncated_series_dense(h, 0.15, 3, 8);
        auto mpo = mpo_from_truncation(h, 0.15, 3, 8);
        CHECK(std::abs(mpo.mpo.trace() - dense.op.matrix().trace()) <= 1e-8);
    }
}

TEST_CASE("mpo add is contraction-linear") {
    auto h = build_model("transverse_ising", chain(4), {{"J_zz", 0.7}, {"h_x", 0.3}});
    auto m1 = mpo_from_truncation(h, 0.2, 3, 6).mpo;
    auto m2 = mpo_from_truncation(h, 0.4, 4, 6).mpo;
    auto sum = m1.add(m2);
    CHECK((sum.contract_dense() - (m1.contract_dense() + m2.contract_dense()))
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
}

TEST_CASE("mpo compression") {
    std::mt19937_64 rng(99);
    auto random_mpo = [&](int sites, Index bond) {
        std::normal_distribution<double> gauss;
        std::vector<Mpo::SiteTensor> ts;
        for (int v = 0; v < sites; ++v) {
            Index dl = (v == 0) ? 1 : bond;
            Index dr = (v == sites - 1) ? 1 : bond;
            Mpo::SiteTensor t(dl, 2, 2, dr);
            for (auto& x : t.data) x = Complex(gauss(rng), gauss(rng));
            ts.push_back(std::move(t));
        }
        return Mpo(std::move(ts));
    };

    SUBCASE("no-op compression is exact") {
        auto m = random_mpo(5, 8);
        auto r = mpo_compress(m, 64, 0.0);
        CHECK(r.truncation_error == 0.0);
        CHECK((r.mpo.contract_dense() - m.contract_dense()).cwiseAbs().maxCoeff() <= 1e-10);
    }

    SUBCASE("rank-1 product operator compresses to bond 1 exactly") {
        // build as an outer product of single-site operators via a bond-2
        // embedding padded with zeros
        auto m = Mpo::identity(4, 2);
        auto r = mpo_compress(m, 1, 0.0);
        CHECK(r.truncation_error <= 1e-14);
        CHECK((r.mpo.contract_dense() - MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() <=
              1e-12);
    }

    SUBCASE("reported error equals the dense Frobenius distance") {
        auto m = random_mpo(5, 8);
        auto r = mpo_compress(m, 4, 0.0);
        const double dense_err = (r.mpo.contract_dense() - m.contract_dense()).norm();
        CHECK(r.truncation_error == doctest::Approx(dense_err).epsilon(1e-9));
    }

    SUBCASE("max_bond below 1 is rejected") {
        auto m = random_mpo(3, 4);
        CHECK_THROWS_AS(mpo_compress(m, 0, 0.0), std::invalid_argument);
    }

    SUBCASE("frobenius norm transfer matches dense") {
        auto m = random_mpo(4, 5);
        CHECK(m.frobenius_norm() ==
              doctest::Approx(m.contract_dense().norm()).epsilon(1e-10));
    }
}

TEST_CASE("positivity by squaring") {
    auto h = build_model("transverse_ising", chain(4), {{"J_zz", 1.0}, {"h_x", 0.4}});

    SUBCASE("beta = 0 gives the identity") {
        auto r = positivity_by_squaring(h, 0.0, 4, 8, 64);
        CHECK((r.mpo.contract_dense() - MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() <=
              1e-12);
    }

    SUBCASE("contraction is positive semidefinite") {
        auto r = positivity_by_squaring(h, 0.1, 3, 10, 64);
        MatrixXcd m = r.mpo.contract_dense();
        auto eig = Eigensystem::compute(0.5 * (m + m.adjoint()));
        CHECK(eig.values()[0] >= -1e-12);
    }

    SUBCASE("normalized result approaches the Gibbs state as L grows") {
        const double beta = 0.1;
        auto gibbs = gibbs_state(assemble_dense(h), beta);
        double prev = std::numeric_limits<double>::infinity();
        for (int L : {2, 3, 4}) {
            auto r = positivity_by_squaring(h, beta, L, 14, 256);
            MatrixXcd m = r.mpo.contract_dense();
            m /= m.trace();
            const double dist = trace_distance(m, gibbs.matrix());
            CHECK(dist <= prev + 1e-12);
            prev = dist;
        }
        CHECK(prev <= 1e-3);
    }
}

TEST_CASE("mpo serialization round trip") {
    auto h = build_model("transverse_ising", chain(4), {{"J_zz", 1.0}, {"h_x", 0.4}});
    auto m = mpo_from_truncation(h, 0.2, 3, 8).mpo;
    const std::string path =
        (std::filesystem::temp_directory_path() / "thermalab_test_mpo.bin").string();
    save_mpo(m, path);
    auto loaded = load_mpo(path);
    CHECK(loaded.num_sites() == m.num_sites());
    CHECK(loaded.bond_dims() == m.bond_dims());
    CHECK((loaded.contract_dense() - m.contract_dense()).cwiseAbs().maxCoeff() <= 1e-14);
    std::filesystem::remove(path);

    CHECK_THROWS(load_mpo("/nonexistent/path/mpo.bin"));
}

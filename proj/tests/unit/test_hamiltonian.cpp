#include <doctest.h>

#include "thermalab/errors.hpp"
#include "thermalab/hamiltonian.hpp"
#include "thermalab/pauli.hpp"

using namespace thermalab;

namespace {
std::shared_ptr<const InteractionGraph> chain(int n) {
    return std::make_shared<InteractionGraph>(build_chain(n));
}
} // namespace

TEST_CASE("ising chain terms") {
    auto h = build_model("ising", chain(3), {{"J_zz", 1.0}});
    CHECK(h.terms().size() == 2);
    for (const auto& term : h.terms())
        CHECK(spectral_norm(term.matrix) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h.interaction_strength() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transverse ising with all couplings off is the zero operator") {
    auto h = build_model("transverse_ising", chain(2), {{"J_zz", 0.0}, {"h_x", 0.0}});
    auto dense = assemble_dense(h);
    CHECK(dense.matrix().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("heisenberg two-site spectrum") {
    // oracle: sigma.sigma has the singlet at -3 and the triplet at +1
    auto h = build_model("heisenberg", chain(2), {{"J", 1.0}});
    auto eig = assemble_dense(h).eigensystem();
    CHECK(eig->values()[0] == doctest::Approx(-3.0).epsilon(1e-12));
    for (int k = 1; k < 4; ++k) CHECK(eig->values()[k] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("model builder rejects bad input") {
    CHECK_THROWS_AS(build_model("bogus", chain(2), {}), std::invalid_argument);
    CHECK_THROWS_AS(build_model("ising", chain(2), {}), std::invalid_argument);
    CHECK_THROWS_AS(build_model("transverse_ising", chain(2), {{"J_zz", 1.0}}),
                    std::invalid_argument);
}

TEST_CASE("assemble embeds single terms") {
    auto g = chain(2);
    LocalHamiltonian h(g, {{Region{0}, pauli_z()}}, 2);
    auto dense = assemble_dense(h);
    MatrixXcd expect = kron(pauli_z(), MatrixXcd::Identity(2, 2));
    CHECK((dense.matrix() - expect).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("ising chain diagonal") {
    auto h = build_model("ising", chain(3), {{"J_zz", 1.0}});
    auto dense = assemble_dense(h);
    // enumerate sigma^z sigma^z eigenvalues per bit string
    const double expect[8] = {2, 0, -2, 0, 0, -2, 0, 2};
    for (int k = 0; k < 8; ++k) {
        CHECK(dense.matrix()(k, k).real() == doctest::Approx(expect[k]).epsilon(1e-12));
        for (int l = 0; l < 8; ++l)
            if (l != k) CHECK(std::abs(dense.matrix()(k, l)) <= 1e-15);
    }
}

TEST_CASE("assembly is linear in the term list") {
    auto g = chain(3);
    auto h1 = build_model("ising", g, {{"J_zz", 0.7}});
    std::vector<LocalTerm> fields;
    for (int v = 0; v < 3; ++v) fields.push_back({Region{v}, 0.3 * pauli_x()});
    LocalHamiltonian h2(g, fields, 2);
    auto sum = assemble_dense(h1.add(h2));
    MatrixXcd direct = assemble_dense(h1).matrix() + assemble_dense(h2).matrix();
    CHECK((sum.matrix() - direct).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("assembled operators are hermitian") {
    auto h = build_model("transverse_ising", chain(4), {{"J_zz", 0.9}, {"h_x", 0.4}});
    auto dense = assemble_dense(h);
    CHECK((dense.matrix() - dense.matrix().adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(dense.hermitian());
}

TEST_CASE("size budget error names the limit") {
    auto g = std::make_shared<InteractionGraph>(build_cubic(15, 1));
    auto h = build_model("ising", g, {{"J_zz", 1.0}});
    CHECK_THROWS_AS(assemble_dense(h), ResourceError);
    try {
        assemble_dense(h);
    } catch (const ResourceError& e) {
        CHECK(std::string(e.what()).find("16384") != std::string::npos);
    }
}

TEST_CASE("truncate_to_region") {
    auto h = build_model("ising", chain(5), {{"J_zz", 1.0}});
    auto hb = h.truncate_to_region(Region{0, 1, 2});
    CHECK(hb.terms().size() == 2); // bonds (0,1) and (1,2)
    CHECK(hb.graph().same_structure(h.graph()));

    CHECK(h.truncate_to_region(Region{}).terms().empty());
    CHECK(h.truncate_to_region(h.graph().all_sites()).terms().size() == h.terms().size());

    CHECK(hb.interaction_strength() <= h.interaction_strength() + 1e-12);
}

TEST_CASE("difference support") {
    auto h = build_model("ising", chain(5), {{"J_zz", 1.0}});
    CHECK(difference_support(h, h).empty());

    // change one bond coupling
    std::vector<LocalTerm> terms = h.terms();
    terms[2].matrix *= 1.5;
    LocalHamiltonian h2(h.graph_ptr(), terms, 2);
    CHECK(difference_support(h2, h) == Region{2, 3});

    // buffer construction: H0 = H_B + H_F around the center site
    Region s{2};
    Region b = h.graph().ball(s, 2); // sites 1..3
    Region f = h.graph().all_sites().minus(h.graph().ball(s, 3));
    auto h0 = h.truncate_to_region(b).add(h.truncate_to_region(f));
    // dropped terms: bonds (0,1) and (3,4) -> their site union
    CHECK(difference_support(h, h0) == Region{0, 1, 3, 4});
}

TEST_CASE("field folding splits interior on-site terms by degree") {
    // two-site chain: each site has degree 1, so fields fold whole
    auto h2 = build_model("transverse_ising", chain(2), {{"J_zz", 1.0}, {"h_x", 0.5}});
    MatrixXcd id = MatrixXcd::Identity(2, 2);
    MatrixXcd expect =
        kron(pauli_z(), pauli_z()) + 0.5 * kron(pauli_x(), id) + 0.5 * kron(id, pauli_x());
    CHECK(h2.interaction_strength() ==
          doctest::Approx(spectral_norm(expect)).epsilon(1e-12));

    // interior sites have degree 2: each incident edge receives half the field
    auto h3 = build_model("transverse_ising", chain(3), {{"J_zz", 1.0}, {"h_x", 0.5}});
    MatrixXcd edge01 =
        kron(pauli_z(), pauli_z()) + 0.5 * kron(pauli_x(), id) + 0.25 * kron(id, pauli_x());
    CHECK(h3.interaction_strength() ==
          doctest::Approx(spectral_norm(edge01)).epsilon(1e-12));
}

TEST_CASE("spectrum invariant under spatial reflection") {
    auto h = build_model("transverse_ising", chain(4), {{"J_zz", 0.8}, {"h_x", 0.35}});
    auto forward = assemble_dense(h).eigensystem()->values();

    auto g = chain(4);
    std::vector<LocalTerm> terms;
    for (const auto& term : h.terms()) {
        std::vector<int> mapped;
        for (int v : term.support) mapped.push_back(3 - v);
        terms.push_back({Region(mapped), term.matrix});
    }
    LocalHamiltonian reflected(g, terms, 2);
    auto backward = assemble_dense(reflected).eigensystem()->values();
    CHECK((forward - backward).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("restrict_to_sites relabels compactly") {
    auto h = build_model("ising", chain(5), {{"J_zz", 1.0}});
    auto [sub, labels] = restrict_to_sites(h, Region{2, 3, 4});
    CHECK(sub.num_sites() == 3);
    CHECK(labels == std::vector<int>{2, 3, 4});
    CHECK(sub.terms().size() == 2);
    auto eig_sub = assemble_dense(sub).eigensystem()->values();
    auto eig_ref = assemble_dense(build_model("ising", chain(3), {{"J_zz", 1.0}}))
                       .eigensystem()
                       ->values();
    CHECK((eig_sub - eig_ref).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("non-hermitian terms are rejected") {
    auto g = chain(2);
    MatrixXcd bad(2, 2);
    bad << 0, 1, 0, 0;
    CHECK_THROWS_AS(LocalHamiltonian(g, {{Region{0}, bad}}, 2), std::invalid_argument);
}

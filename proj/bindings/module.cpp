#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "thermalab/clusterexp.hpp"
#include "thermalab/correlations.hpp"
#include "thermalab/spectral.hpp"
#include "thermalab/stability.hpp"
#include "thermalab/statmech.hpp"

namespace py = pybind11;
using namespace thermalab;

namespace {

std::shared_ptr<InteractionGraph> make_cubic(int n, int dim, bool periodic) {
    return std::make_shared<InteractionGraph>(build_cubic(n, dim, periodic));
}

LocalHamiltonian make_model(const std::string& name,
                            const std::shared_ptr<InteractionGraph>& graph,
                            const std::map<std::string, double>& couplings) {
    return build_model(name, graph, couplings);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Thermal-state numerics on spin lattices: Gibbs states, covariance "
              "clustering, stability bounds, cluster-expansion MPOs, energy statistics "
              "and ensemble equivalence.";

    py::class_<Region>(m, "Region")
        .def(py::init<std::vector<int>>())
        .def_property_readonly("sites", &Region::sites)
        .def("__len__", &Region::size)
        .def("__repr__", [](const Region& r) {
            std::string s = "Region([";
            for (std::size_t i = 0; i < r.sites().size(); ++i)
                s += (i ? "," : "") + std::to_string(r.sites()[i]);
            return s + "])";
        });

    py::class_<InteractionGraph, std::shared_ptr<InteractionGraph>>(m, "InteractionGraph")
        .def_property_readonly("num_vertices", &InteractionGraph::num_vertices)
        .def_property_readonly("spatial_dim", &InteractionGraph::spatial_dim)
        .def_property_readonly("edges", [](const InteractionGraph& g) { return g.edges(); })
        .def("distance",
             [](const InteractionGraph& g, int u, int v) { return g.distance(u, v); })
        .def("region_distance",
             [](const InteractionGraph& g, const std::vector<int>& s,
                const std::vector<int>& e) { return g.distance(Region(s), Region(e)); })
        .def("boundary",
             [](const InteractionGraph& g, const std::vector<int>& s) {
                 return g.boundary(Region(s)).sites();
             })
        .def("to_json", [](const InteractionGraph& g) { return g.to_json().dump(); });

    m.def("build_cubic", &make_cubic, py::arg("n"), py::arg("D"), py::arg("periodic") = false);
    m.def("build_chain", [](int n, bool periodic) { return make_cubic(n, 1, periodic); },
          py::arg("n"), py::arg("periodic") = false);
    m.def("growth_constant_bound", &growth_constant_bound, py::arg("D"));

    py::class_<LocalHamiltonian>(m, "LocalHamiltonian")
        .def_property_readonly("num_sites", &LocalHamiltonian::num_sites)
        .def_property_readonly("local_dim", &LocalHamiltonian::local_dim)
        .def_property_readonly("num_terms",
                               [](const LocalHamiltonian& h) { return h.terms().size(); })
        .def("interaction_strength", &LocalHamiltonian::interaction_strength)
        .def("truncate_to_region", [](const LocalHamiltonian& h, const std::vector<int>& b) {
            return h.truncate_to_region(Region(b));
        });

    m.def("build_model", &make_model, py::arg("name"), py::arg("graph"), py::arg("couplings"));
    m.def("assemble_dense",
          [](const LocalHamiltonian& h) { return MatrixXcd(assemble_dense(h).matrix()); });
    m.def("difference_support",
          [](const LocalHamiltonian& h, const LocalHamiltonian& h0) {
              return difference_support(h, h0).sites();
          });

    m.def(
        "gibbs_state",
        [](const LocalHamiltonian& h, double beta) {
            auto rho = gibbs_state(assemble_dense(h), beta);
            return py::make_tuple(MatrixXcd(rho.matrix()), rho.log_partition().value());
        },
        py::arg("hamiltonian"), py::arg("beta"),
        "Dense Gibbs state and log partition function");

    m.def(
        "partial_trace",
        [](const MatrixXcd& rho, const std::vector<int>& dims, const std::vector<int>& keep) {
            DenseOperator op(dims, rho);
            return MatrixXcd(partial_trace(op, Region(keep)).matrix());
        },
        py::arg("matrix"), py::arg("dims"), py::arg("keep"));

    m.def("spectral_norm", [](const MatrixXcd& mat) { return spectral_norm(mat); });
    m.def("trace_norm", [](const MatrixXcd& mat) { return trace_norm(mat); });
    m.def("trace_distance",
          [](const MatrixXcd& a, const MatrixXcd& b) { return trace_distance(a, b); });
    m.def("von_neumann_entropy_bits", [](const MatrixXcd& rho, const std::vector<int>& dims) {
        return von_neumann_entropy_bits(DensityMatrix(DenseOperator(dims, rho)));
    });
    m.def("mutual_information_bits",
          [](const MatrixXcd& rho, const std::vector<int>& dims, const std::vector<int>& a) {
              return mutual_information_bits(DensityMatrix(DenseOperator(dims, rho)),
                                             Region(a));
          });

    m.def("beta_star", &beta_star, py::arg("alpha"), py::arg("J"));
    m.def("xi_of_beta", &xi_of_beta, py::arg("alpha"), py::arg("J"), py::arg("beta"));

    m.def(
        "generalized_covariance",
        [](const MatrixXcd& rho, const std::vector<int>& dims, const MatrixXcd& a,
           const MatrixXcd& b, double tau) {
            DensityMatrix state(DenseOperator(dims, rho));
            return generalized_covariance(state, DenseOperator(dims, a),
                                          DenseOperator(dims, b), tau);
        },
        py::arg("rho"), py::arg("dims"), py::arg("A"), py::arg("B"), py::arg("tau"));

    m.def(
        "duhamel_covariance",
        [](const MatrixXcd& rho, const std::vector<int>& dims, const MatrixXcd& a,
           const MatrixXcd& b, int nodes) {
            DensityMatrix state(DenseOperator(dims, rho));
            auto est = duhamel_covariance(state, DenseOperator(dims, a),
                                          DenseOperator(dims, b), nodes);
            return py::make_tuple(est.value, est.error_estimate);
        },
        py::arg("rho"), py::arg("dims"), py::arg("A"), py::arg("B"), py::arg("nodes") = 16);

    m.def(
        "perturbation_identity",
        [](const LocalHamiltonian& h0, const LocalHamiltonian& h, const MatrixXcd& a,
           double beta, int s_nodes, int tau_nodes) {
            InterpolationPath path(h0, h, s_nodes, tau_nodes);
            DenseOperator obs(h0.dims(), a);
            auto rhs = perturbation_rhs(path, obs, beta);
            const double lhs = perturbation_lhs(h0, h, obs, beta);
            return py::make_tuple(lhs, rhs.value, rhs.error_estimate);
        },
        py::arg("h0"), py::arg("h"), py::arg("A"), py::arg("beta"), py::arg("s_nodes") = 12,
        py::arg("tau_nodes") = 16, "Returns (lhs, rhs, quadrature error estimate)");

    m.def(
        "locality_of_temperature",
        [](const LocalHamiltonian& h, const std::vector<int>& s, const std::vector<int>& rs,
           double beta, double alpha, int l0) {
            auto rows = locality_of_temperature_experiment(h, Region(s), rs, beta, alpha, l0);
            py::list out;
            for (const auto& r : rows)
                out.append(py::make_tuple(r.r, r.dist_s_e, r.trace_distance, r.bound,
                                          r.binding, r.trivial));
            return out;
        },
        py::arg("hamiltonian"), py::arg("S"), py::arg("r_values"), py::arg("beta"),
        py::arg("alpha") = 0.0, py::arg("L0") = 1,
        "Rows of (r, dist, trace_distance, bound, binding, trivial)");

    py::class_<Mpo>(m, "Mpo")
        .def_property_readonly("num_sites", &Mpo::num_sites)
        .def_property_readonly("bond_dims", &Mpo::bond_dims)
        .def("contract_dense", &Mpo::contract_dense)
        .def("trace", &Mpo::trace)
        .def("frobenius_norm", &Mpo::frobenius_norm);

    m.def(
        "truncated_series_dense",
        [](const LocalHamiltonian& h, double beta, int L, int j_max) {
            auto r = truncated_series_dense(h, beta, L, j_max);
            return py::make_tuple(MatrixXcd(r.op.matrix()), r.stats.retained_words,
                                  r.stats.dropped_words);
        },
        py::arg("hamiltonian"), py::arg("beta"), py::arg("L"), py::arg("j_max"));

    m.def(
        "mpo_from_truncation",
        [](const LocalHamiltonian& h, double beta, int L, int j_max) {
            return mpo_from_truncation(h, beta, L, j_max).mpo;
        },
        py::arg("hamiltonian"), py::arg("beta"), py::arg("L"), py::arg("j_max"));

    m.def(
        "mpo_compress",
        [](const Mpo& mpo, long max_bond, double svd_floor) {
            auto r = mpo_compress(mpo, max_bond, svd_floor);
            return py::make_tuple(r.mpo, r.truncation_error);
        },
        py::arg("mpo"), py::arg("max_bond"), py::arg("svd_floor") = 0.0);

    m.def(
        "positivity_by_squaring",
        [](const LocalHamiltonian& h, double beta, int L, int j_max, long max_bond) {
            auto r = positivity_by_squaring(h, beta, L, j_max, max_bond);
            return py::make_tuple(r.mpo, r.truncation_error);
        },
        py::arg("hamiltonian"), py::arg("beta"), py::arg("L"), py::arg("j_max"),
        py::arg("max_bond"));

    m.def("save_mpo", &save_mpo, py::arg("mpo"), py::arg("path"));
    m.def("load_mpo", &load_mpo, py::arg("path"));

    m.def(
        "energy_observables",
        [](const LocalHamiltonian& h, double t) {
            auto o = energy_observables(h, t);
            py::dict d;
            d["U"] = o.u_total;
            d["u"] = o.u_density;
            d["C_fd"] = o.c_fd;
            d["C_fluct"] = o.c_fluct;
            d["c"] = o.c_density;
            d["variance"] = o.variance;
            d["rel_discrepancy"] = o.rel_discrepancy;
            return d;
        },
        py::arg("hamiltonian"), py::arg("T"));

    m.def(
        "microcanonical_state",
        [](const LocalHamiltonian& h, double e, double delta) {
            auto [rho, window] = microcanonical_state(assemble_dense(h), e, delta);
            return py::make_tuple(MatrixXcd(rho.matrix()),
                                  static_cast<long>(window.member_indices.size()));
        },
        py::arg("hamiltonian"), py::arg("E"), py::arg("Delta"));

    m.def(
        "berry_esseen_distance",
        [](const VectorXd& energies, const VectorXd& weights) {
            return berry_esseen_distance(EnergyDistribution(energies, weights));
        },
        py::arg("energies"), py::arg("weights"));
    m.def("gaussian_cdf", &gaussian_cdf, py::arg("x"), py::arg("mu"), py::arg("sigma2"));

    m.def(
        "eoe_experiment",
        [](const LocalHamiltonian& h, double t, double delta, int l, double c1) {
            auto r = eoe_experiment(h, t, delta, l, c1);
            py::dict d;
            d["avg_distance"] = r.avg_distance;
            d["per_translate"] = r.per_translate;
            d["window_members"] = static_cast<long>(r.window_members);
            d["regime_ok"] = r.regime_ok;
            d["delta"] = r.delta;
            return d;
        },
        py::arg("hamiltonian"), py::arg("T"), py::arg("delta") = 0.0, py::arg("l") = 2,
        py::arg("C1") = 0.5);

    m.def("spectrum", [](const LocalHamiltonian& h) {
        return VectorXd(SpectralDecomposition::eigenvalues_only(h));
    });
}

#include "thermalab/hamiltonian.hpp"

#include <cstdlib>
#include <stdexcept>

#include "thermalab/errors.hpp"
#include "thermalab/pauli.hpp"

namespace thermalab {

namespace {
constexpr double kHermTol = 1e-12;
constexpr double kTermDiffTol = 1e-12;

double require(const std::map<std::string, double>& params, const std::string& key,
               const std::string& model) {
    auto it = params.find(key);
    if (it == params.end())
        throw std::invalid_argument("model '" + model + "' needs coupling '" + key + "'");
    return it->second;
}
} // namespace

int max_dense_dim() {
    if (const char* env = std::getenv("THERMALAB_MAX_DENSE_DIM")) {
        long v = std::atol(env);
        if (v > 0) return static_cast<int>(v);
    }
    return 16384; // 14 qubits
}

LocalHamiltonian::LocalHamiltonian(std::shared_ptr<const InteractionGraph> graph,
                                   std::vector<LocalTerm> terms, int local_dim)
    : graph_(std::move(graph)), terms_(std::move(terms)), local_dim_(local_dim) {
    if (!graph_) throw std::invalid_argument("null interaction graph");
    if (local_dim_ < 2) throw std::invalid_argument("local dimension must be at least 2");
    for (const auto& term : terms_) {
        const auto& s = term.support.sites();
        if (s.empty() || s.size() > 2)
            throw std::invalid_argument("terms must be supported on one site or one edge");
        for (int v : s)
            if (v < 0 || v >= graph_->num_vertices())
                throw std::invalid_argument("term support outside the vertex set");
        if (s.size() == 2) {
            auto e = std::make_pair(s[0], s[1]);
            if (!std::binary_search(graph_->edges().begin(), graph_->edges().end(), e))
                throw std::invalid_argument("two-site term support is not a graph edge");
        }
        Index d = 1;
        for (std::size_t i = 0; i < s.size(); ++i) d *= local_dim_;
        if (term.matrix.rows() != d || term.matrix.cols() != d)
            throw std::invalid_argument("term matrix size does not match its support");
        if ((term.matrix - term.matrix.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
            throw std::invalid_argument("term matrix is not Hermitian within 1e-12");
    }
}

double LocalHamiltonian::interaction_strength() const {
    // Group per edge; fold each single-site term into its incident edges with
    // weight 1/deg(v), so that the folded edge terms sum back to H.
    std::map<std::pair<int, int>, MatrixXcd> per_edge;
    double isolated_max = 0.0;
    const Index d = local_dim_;
    const MatrixXcd id = MatrixXcd::Identity(d, d);

    auto edge_entry = [&](int u, int v) -> MatrixXcd& {
        auto key = std::make_pair(std::min(u, v), std::max(u, v));
        auto it = per_edge.find(key);
        if (it == per_edge.end())
            it = per_edge.emplace(key, MatrixXcd::Zero(d * d, d * d)).first;
        return it->second;
    };

    for (const auto& term : terms_) {
        const auto& s = term.support.sites();
        if (s.size() == 2) {
            edge_entry(s[0], s[1]) += term.matrix;
        } else {
            const int v = s[0];
            const int deg = graph_->degree(v);
            if (deg == 0) {
                isolated_max = std::max(isolated_max, spectral_norm(term.matrix));
                continue;
            }
            for (int w : graph_->neighbors(v)) {
                // Embed h_v / deg on the edge {v, w}; v may be the low or high label.
                MatrixXcd folded = (v < w) ? kron(term.matrix, id) : kron(id, term.matrix);
                edge_entry(v, w) += folded / static_cast<double>(deg);
            }
        }
    }

    double j = isolated_max;
    for (const auto& [edge, m] : per_edge) j = std::max(j, spectral_norm(m));
    return j;
}

LocalHamiltonian LocalHamiltonian::truncate_to_region(const Region& b) const {
    std::vector<LocalTerm> kept;
    for (const auto& term : terms_)
        if (term.support.subset_of(b)) kept.push_back(term);
    return LocalHamiltonian(graph_, std::move(kept), local_dim_);
}

LocalHamiltonian LocalHamiltonian::add(const LocalHamiltonian& other) const {
    if (!graph_->same_structure(other.graph()) || local_dim_ != other.local_dim_)
        throw std::invalid_argument("cannot add Hamiltonians on different graphs");
    std::vector<LocalTerm> terms = terms_;
    terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
    return LocalHamiltonian(graph_, std::move(terms), local_dim_);
}

LocalHamiltonian build_model(const std::string& name,
                             std::shared_ptr<const InteractionGraph> graph,
                             const std::map<std::string, double>& params) {
    std::vector<LocalTerm> terms;
    const auto& edges = graph->edges();

    if (name == "ising") {
        const double jzz = require(params, "J_zz", name);
        const MatrixXcd zz = jzz * kron(pauli_z(), pauli_z());
        for (const auto& [u, v] : edges) terms.push_back({Region{u, v}, zz});
    } else if (name == "transverse_ising") {
        const double jzz = require(params, "J_zz", name);
        const double hx = require(params, "h_x", name);
        const MatrixXcd zz = jzz * kron(pauli_z(), pauli_z());
        for (const auto& [u, v] : edges) terms.push_back({Region{u, v}, zz});
        const MatrixXcd x = hx * pauli_x();
        for (int v = 0; v < graph->num_vertices(); ++v) terms.push_back({Region{v}, x});
    } else if (name == "heisenberg") {
        const double j = require(params, "J", name);
        const MatrixXcd hh = j * (kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()) +
                                  kron(pauli_z(), pauli_z()));
        for (const auto& [u, v] : edges) terms.push_back({Region{u, v}, hh});
    } else if (name == "xx") {
        const double j = require(params, "J_xx", name);
        const MatrixXcd hh = j * (kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()));
        for (const auto& [u, v] : edges) terms.push_back({Region{u, v}, hh});
    } else {
        throw std::invalid_argument("unknown model '" + name +
                                    "' (known: ising, transverse_ising, heisenberg, xx)");
    }
    return LocalHamiltonian(std::move(graph), std::move(terms), 2);
}

DenseOperator assemble_dense(const LocalHamiltonian& h) {
    const auto dims = h.dims();
    double dim = 1;
    for (int d : dims) dim *= d;
    const int budget = max_dense_dim();
    if (dim > budget)
        throw ResourceError("dense assembly needs dimension " +
                            std::to_string(static_cast<long long>(dim)) +
                            ", exceeding the budget of " + std::to_string(budget) +
                            " (THERMALAB_MAX_DENSE_DIM)");
    const Index n = static_cast<Index>(dim);
    MatrixXcd m = MatrixXcd::Zero(n, n);
    for (const auto& term : h.terms()) m += embed(term.matrix, term.support, dims);
    return DenseOperator(dims, std::move(m));
}

Region difference_support(const LocalHamiltonian& h, const LocalHamiltonian& h0) {
    if (!h.graph().same_structure(h0.graph()) || h.local_dim() != h0.local_dim())
        throw std::invalid_argument("difference_support requires the same graph and local dim");

    // Net term per support; supports present in only one Hamiltonian count too.
    std::map<std::vector<int>, MatrixXcd> net;
    auto accumulate = [&](const LocalHamiltonian& ham, double sign) {
        for (const auto& term : ham.terms()) {
            auto key = term.support.sites();
            auto it = net.find(key);
            if (it == net.end())
                net.emplace(key, sign * term.matrix);
            else
                it->second += sign * term.matrix;
        }
    };
    accumulate(h, 1.0);
    accumulate(h0, -1.0);

    Region out;
    for (const auto& [support, m] : net)
        if (m.cwiseAbs().maxCoeff() > kTermDiffTol) out = out.unite(Region(support));
    return out;
}

std::pair<LocalHamiltonian, std::vector<int>> restrict_to_sites(const LocalHamiltonian& h,
                                                                const Region& b) {
    const auto& sites = b.sites();
    std::map<int, int> new_label;
    for (std::size_t i = 0; i < sites.size(); ++i) new_label[sites[i]] = static_cast<int>(i);

    std::vector<std::pair<int, int>> edges;
    for (const auto& [u, v] : h.graph().edges())
        if (b.contains(u) && b.contains(v)) edges.emplace_back(new_label[u], new_label[v]);
    auto graph = std::make_shared<InteractionGraph>(static_cast<int>(sites.size()),
                                                    std::move(edges), 0);

    std::vector<LocalTerm> terms;
    for (const auto& term : h.terms()) {
        if (!term.support.subset_of(b)) continue;
        std::vector<int> mapped;
        for (int v : term.support) mapped.push_back(new_label[v]);
        terms.push_back({Region(std::move(mapped)), term.matrix});
    }
    return {LocalHamiltonian(std::move(graph), std::move(terms), h.local_dim()), sites};
}

} // namespace thermalab

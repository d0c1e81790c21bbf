#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "thermalab/densequantum.hpp"
#include "thermalab/lattice.hpp"
#include "thermalab/region.hpp"

namespace thermalab {

/// One Hermitian term of a local Hamiltonian, supported on one site or one
/// edge of the interaction graph.
struct LocalTerm {
    Region support;
    MatrixXcd matrix;
};

/// H = sum of edge- and site-supported terms over an interaction graph.
class LocalHamiltonian {
public:
    LocalHamiltonian(std::shared_ptr<const InteractionGraph> graph,
                     std::vector<LocalTerm> terms, int local_dim = 2);

    const InteractionGraph& graph() const { return *graph_; }
    std::shared_ptr<const InteractionGraph> graph_ptr() const { return graph_; }
    const std::vector<LocalTerm>& terms() const { return terms_; }
    int local_dim() const { return local_dim_; }
    int num_sites() const { return graph_->num_vertices(); }
    std::vector<int> dims() const { return std::vector<int>(num_sites(), local_dim_); }

    /// Interaction strength J = max_e ||h_e|| after rewriting H as a sum of
    /// edge terms only: each single-site term h_v is split equally over the
    /// edges incident to v (1/deg(v) per edge; on a chain interior that is one
    /// half per side). Terms on isolated vertices cannot be folded and enter
    /// the maximum directly.
    double interaction_strength() const;

    /// Keeps exactly the terms with support inside B; same graph object.
    LocalHamiltonian truncate_to_region(const Region& b) const;

    /// Sum of two Hamiltonians on the same graph (term lists concatenated).
    LocalHamiltonian add(const LocalHamiltonian& other) const;

private:
    std::shared_ptr<const InteractionGraph> graph_;
    std::vector<LocalTerm> terms_;
    int local_dim_;
};

/// Nearest-neighbor model builders. Required couplings:
///   ising:            J_zz
///   transverse_ising: J_zz, h_x
///   heisenberg:       J
///   xx:               J_xx
LocalHamiltonian build_model(const std::string& name,
                             std::shared_ptr<const InteractionGraph> graph,
                             const std::map<std::string, double>& params);

/// Dense embedding of all terms with the global site ordering. Checks the
/// dense-dimension budget (THERMALAB_MAX_DENSE_DIM, default 16384).
DenseOperator assemble_dense(const LocalHamiltonian& h);

/// Union of supports of terms whose matrices differ beyond 1e-12, i.e. the
/// perturbation region of H relative to H0. Requires the same graph object
/// (or an identical structure) and local dimension.
Region difference_support(const LocalHamiltonian& h, const LocalHamiltonian& h0);

/// Restriction of H to the sites of B on a compact relabeled graph. Keeps the
/// terms supported inside B. Returns the restricted Hamiltonian plus the
/// original site label for each new site (ascending).
std::pair<LocalHamiltonian, std::vector<int>> restrict_to_sites(const LocalHamiltonian& h,
                                                                const Region& b);

int max_dense_dim();

} // namespace thermalab

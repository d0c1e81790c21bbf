#pragma once

#include <utility>
#include <vector>

#include "thermalab/hamiltonian.hpp"
#include "thermalab/mpo.hpp"

namespace thermalab {

struct TruncationStats {
    /// Word counts over j <= j_max (as doubles; they grow like |E|^j).
    double retained_words = 0.0;
    double dropped_words = 0.0;
    int valid_subsets = 0;
};

struct DenseTruncation {
    DenseOperator op;
    TruncationStats stats;
};

/// Truncation of the series e^{-beta H} = sum_j sum_{w in E^j} (-beta)^j/j! h(w):
/// keeps orders j <= j_max and the words whose support components all have
/// fewer than L sites (components with >= L sites are dropped). Single-site
/// terms are folded into their incident edge terms first, so the expansion is
/// over edge terms only. Evaluated by Moebius-weighted truncated exponentials
/// over the valid edge subsets rather than word enumeration.
DenseTruncation truncated_series_dense(const LocalHamiltonian& h, double beta, int L,
                                       int j_max);

struct MpoTruncation {
    Mpo mpo;
    TruncationStats stats;
    std::vector<Index> bond_dims_raw; // automaton bonds before rounding
    double rounding_error = 0.0;
};

/// Same truncated series on a chain, reorganized as a sum over families of
/// disjoint site-intervals of length < L with per-interval cluster operators,
/// assembled into one MPO. An order grade on the bonds enforces the shared
/// j <= j_max budget exactly. Cluster operators with Frobenius norm below
/// cluster_floor are dropped; the automaton MPO is then rounded at a 1e-13
/// relative floor (both recorded on the result).
MpoTruncation mpo_from_truncation(const LocalHamiltonian& h, double beta, int L, int j_max,
                                  double cluster_floor = 1e-15);

struct SquaredPositiveResult {
    Mpo mpo;
    double truncation_error = 0.0;
    Index bond_before_compress = 1;
};

/// MPO approximation of e^{-beta H} that is positive semidefinite by
/// construction: approximate e^{-beta H / 2}, then square as M^dagger M
/// (bond dimensions square) and compress to max_bond.
SquaredPositiveResult positivity_by_squaring(const LocalHamiltonian& h, double beta, int L,
                                             int j_max, Index max_bond);

/// Edge-term rewrite used by the expansion: h_e plus the incident single-site
/// terms folded at weight 1/deg. Keyed by the chain edge index for 1D use.
std::vector<MatrixXcd> folded_chain_edge_terms(const LocalHamiltonian& h);

} // namespace thermalab

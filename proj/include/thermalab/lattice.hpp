#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "thermalab/region.hpp"

namespace thermalab {

/// Returned by distance queries between disconnected regions.
inline constexpr int kInfiniteDistance = std::numeric_limits<int>::max();

/// Undirected interaction graph on integer sites 0..n-1. Immutable after
/// construction; all-pairs BFS distances are precomputed so concurrent reads
/// never touch a cache.
class InteractionGraph {
public:
    InteractionGraph(int num_vertices, std::vector<std::pair<int, int>> edges,
                     int spatial_dim = 0);

    int num_vertices() const { return num_vertices_; }
    int spatial_dim() const { return spatial_dim_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int v) const { return adjacency_.at(v); }
    int degree(int v) const { return static_cast<int>(adjacency_.at(v).size()); }

    /// Shortest-path length, kInfiniteDistance when u and v are disconnected.
    int distance(int u, int v) const;
    /// min over s in S, e in E of distance(s, e). Throws on empty regions.
    int distance(const Region& S, const Region& E) const;

    /// Sites of S adjacent to the complement V \ S.
    Region boundary(const Region& S) const;
    /// Open ball {v : dist(v, S) < r}. Contains S itself for r >= 1.
    Region ball(const Region& S, int r) const;
    /// Sphere {v : dist(v, S) == r}.
    Region sphere(const Region& S, int r) const;
    Region all_sites() const { return Region::range(0, num_vertices_); }

    bool same_structure(const InteractionGraph& other) const {
        return num_vertices_ == other.num_vertices_ && edges_ == other.edges_;
    }

    nlohmann::json to_json() const;
    static InteractionGraph from_json(const nlohmann::json& j);

private:
    int num_vertices_;
    int spatial_dim_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adjacency_;
    // dist_[u][v]; -1 encodes "unreachable".
    std::vector<std::vector<int>> dist_;
};

/// Cubic lattice on [n]^D, nearest-neighbor edges, open boundary by default.
/// Sites are labeled lexicographically by coordinate.
InteractionGraph build_cubic(int n, int D, bool periodic = false);
/// Chain on n sites (cubic with D = 1).
InteractionGraph build_chain(int n, bool periodic = false);

/// Upper bound 2*D*e on the lattice-animal growth constant in D dimensions.
double growth_constant_bound(int D);

/// Vertex-count budget for graph construction; overridable via the
/// THERMALAB_MAX_GRAPH_VERTICES environment variable.
int max_graph_vertices();

} // namespace thermalab

#include "thermalab/lattice.hpp"

#include <cstdlib>
#include <deque>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "thermalab/errors.hpp"

namespace thermalab {

int max_graph_vertices() {
    if (const char* env = std::getenv("THERMALAB_MAX_GRAPH_VERTICES")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 4096;
}

InteractionGraph::InteractionGraph(int num_vertices,
                                   std::vector<std::pair<int, int>> edges,
                                   int spatial_dim)
    : num_vertices_(num_vertices), spatial_dim_(spatial_dim) {
    if (num_vertices < 0) throw std::invalid_argument("negative vertex count");
    adjacency_.resize(num_vertices_);
    for (auto& [u, v] : edges) {
        if (u == v) throw std::invalid_argument("self-loop is not a two-element edge");
        if (u < 0 || v < 0 || u >= num_vertices_ || v >= num_vertices_)
            throw std::invalid_argument("edge endpoint outside vertex set");
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    for (const auto& [u, v] : edges_) {
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
    }
    for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());

    // All-pairs BFS; graphs here are desk scale, so quadratic storage is fine.
    dist_.assign(num_vertices_, std::vector<int>(num_vertices_, -1));
    std::deque<int> queue;
    for (int s = 0; s < num_vertices_; ++s) {
        auto& d = dist_[s];
        d[s] = 0;
        queue.clear();
        queue.push_back(s);
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int w : adjacency_[u]) {
                if (d[w] < 0) {
                    d[w] = d[u] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
}

int InteractionGraph::distance(int u, int v) const {
    int d = dist_.at(u).at(v);
    return d < 0 ? kInfiniteDistance : d;
}

int InteractionGraph::distance(const Region& S, const Region& E) const {
    if (S.empty() || E.empty())
        throw std::domain_error("graph distance of an empty region is undefined");
    int best = kInfiniteDistance;
    for (int s : S) {
        for (int e : E) {
            int d = distance(s, e);
            if (d < best) best = d;
        }
    }
    return best;
}

Region InteractionGraph::boundary(const Region& S) const {
    std::vector<int> out;
    for (int v : S) {
        for (int w : adjacency_.at(v)) {
            if (!S.contains(w)) {
                out.push_back(v);
                break;
            }
        }
    }
    return Region(std::move(out));
}

Region InteractionGraph::ball(const Region& S, int r) const {
    std::vector<int> out;
    for (int v = 0; v < num_vertices_; ++v) {
        int best = kInfiniteDistance;
        for (int s : S) best = std::min(best, distance(s, v));
        if (best < r) out.push_back(v);
    }
    return Region(std::move(out));
}

Region InteractionGraph::sphere(const Region& S, int r) const {
    std::vector<int> out;
    for (int v = 0; v < num_vertices_; ++v) {
        int best = kInfiniteDistance;
        for (int s : S) best = std::min(best, distance(s, v));
        if (best == r) out.push_back(v);
    }
    return Region(std::move(out));
}

nlohmann::json InteractionGraph::to_json() const {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (int v = 0; v < num_vertices_; ++v) j["vertices"].push_back(v);
    j["edges"] = nlohmann::json::array();
    for (const auto& [u, v] : edges_) j["edges"].push_back({u, v});
    j["spatial_dim"] = spatial_dim_;
    return j;
}

InteractionGraph InteractionGraph::from_json(const nlohmann::json& j) {
    std::vector<int> vertices = j.at("vertices").get<std::vector<int>>();
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (vertices[i] != static_cast<int>(i))
            throw std::invalid_argument("vertices must be 0..n-1 in order");
    }
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) {
        edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
    int dim = j.value("spatial_dim", 0);
    return InteractionGraph(static_cast<int>(vertices.size()), std::move(edges), dim);
}

InteractionGraph build_cubic(int n, int D, bool periodic) {
    if (n < 1 || D < 1) throw std::invalid_argument("cubic lattice needs n >= 1, D >= 1");
    double sites = 1;
    for (int k = 0; k < D; ++k) sites *= n;
    const int budget = max_graph_vertices();
    if (sites > budget)
        throw ResourceError("cubic lattice has " + std::to_string(static_cast<long long>(sites)) +
                            " sites, exceeding the vertex budget of " + std::to_string(budget) +
                            " (THERMALAB_MAX_GRAPH_VERTICES)");
    const int N = static_cast<int>(sites);

    // Lexicographic labeling: coordinate (x_0,...,x_{D-1}) -> sum x_k * n^{D-1-k}.
    std::vector<int> stride(D, 1);
    for (int k = D - 2; k >= 0; --k) stride[k] = stride[k + 1] * n;

    std::vector<std::pair<int, int>> edges;
    std::vector<int> coord(D, 0);
    for (int v = 0; v < N; ++v) {
        for (int k = 0; k < D; ++k) {
            if (coord[k] + 1 < n) {
                edges.emplace_back(v, v + stride[k]);
            } else if (periodic && n > 2) {
                edges.emplace_back(v, v - coord[k] * stride[k]);
            }
        }
        for (int k = D - 1; k >= 0; --k) {
            if (++coord[k] < n) break;
            coord[k] = 0;
        }
    }
    return InteractionGraph(N, std::move(edges), D);
}

InteractionGraph build_chain(int n, bool periodic) { return build_cubic(n, 1, periodic); }

double growth_constant_bound(int D) {
    if (D < 1) throw std::invalid_argument("spatial dimension must be positive");
    return 2.0 * D * std::numbers::e;
}

} // namespace thermalab

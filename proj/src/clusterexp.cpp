#include "thermalab/clusterexp.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "thermalab/errors.hpp"
#include "thermalab/pauli.hpp"

namespace thermalab {

namespace {

constexpr int kMaxEdgesForSubsets = 14;
constexpr int kMaxAutomatonStates = 20000;

// Effective edge terms: each single-site term split equally over its incident
// edges, so that the sum of edge terms reproduces H.
std::map<std::pair<int, int>, MatrixXcd> folded_edge_terms(const LocalHamiltonian& h) {
    const Index d = h.local_dim();
    const MatrixXcd id = MatrixXcd::Identity(d, d);
    std::map<std::pair<int, int>, MatrixXcd> per_edge;
    for (const auto& [u, v] : h.graph().edges())
        per_edge.emplace(std::make_pair(u, v), MatrixXcd::Zero(d * d, d * d));
    for (const auto& term : h.terms()) {
        const auto& s = term.support.sites();
        if (s.size() == 2) {
            per_edge.at({s[0], s[1]}) += term.matrix;
        } else {
            const int v = s[0];
            const int deg = h.graph().degree(v);
            if (deg == 0)
                throw std::invalid_argument(
                    "single-site term on an isolated vertex cannot be folded into edge terms");
            for (int w : h.graph().neighbors(v)) {
                MatrixXcd folded = (v < w) ? kron(term.matrix, id) : kron(id, term.matrix);
                per_edge.at({std::min(v, w), std::max(v, w)}) +=
                    folded / static_cast<double>(deg);
            }
        }
    }
    return per_edge;
}

// Sites covered by the edge subset `mask`, and whether all of its connected
// components have fewer than L sites.
bool subset_valid(std::uint32_t mask, const std::vector<std::pair<int, int>>& edges,
                  int n_sites, int L) {
    std::vector<int> parent(n_sites, -1);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] >= 0) {
            if (parent[parent[x]] >= 0) parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::vector<int> size(n_sites, 0);
    auto touch = [&](int v) {
        if (size[v] == 0) size[v] = 1;
    };
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (!(mask >> e & 1u)) continue;
        auto [u, v] = edges[e];
        touch(u);
        touch(v);
        int ru = find(u), rv = find(v);
        if (ru != rv) {
            int total = size[ru] + size[rv];
            parent[rv] = ru;
            size[ru] = total;
        }
    }
    for (int v = 0; v < n_sites; ++v)
        if (parent[v] < 0 && size[v] >= L) return false;
    return true;
}

Region subset_support(std::uint32_t mask, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> sites;
    for (std::size_t e = 0; e < edges.size(); ++e)
        if (mask >> e & 1u) {
            sites.push_back(edges[e].first);
            sites.push_back(edges[e].second);
        }
    return Region(std::move(sites));
}

// sum_{j=0..J} m^j
double power_sum(double m, int J) {
    double acc = 1.0, p = 1.0;
    for (int j = 1; j <= J; ++j) {
        p *= m;
        acc += p;
    }
    return acc;
}

// sum_{j=0..J} X^j / j! by Horner.
MatrixXcd truncated_exponential(const MatrixXcd& x, int J) {
    const Index n = x.rows();
    MatrixXcd acc = MatrixXcd::Identity(n, n);
    for (int k = J; k >= 1; --k)
        acc = MatrixXcd::Identity(n, n) + (x / static_cast<double>(k)) * acc;
    return acc;
}

struct SubsetTable {
    std::vector<std::uint32_t> valid;
    std::vector<double> mu; // over all masks; nonzero only on valid ones
    int n_edges = 0;
};

SubsetTable build_subset_table(const std::vector<std::pair<int, int>>& edges, int n_sites,
                               int L) {
    const int m = static_cast<int>(edges.size());
    if (m > kMaxEdgesForSubsets)
        throw ResourceError("cluster expansion subset enumeration supports at most " +
                            std::to_string(kMaxEdgesForSubsets) + " edges (graph has " +
                            std::to_string(m) + ")");
    SubsetTable table;
    table.n_edges = m;
    const std::uint32_t total = 1u << m;
    table.mu.assign(total, 0.0);
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        if (!subset_valid(mask, edges, n_sites, L)) continue;
        table.valid.push_back(mask);
        // mu[sub] accumulates (-1)^{|mask| - |sub|} over valid supersets
        const int pm = std::popcount(mask);
        std::uint32_t sub = mask;
        while (true) {
            const int sign = ((pm - std::popcount(sub)) & 1) ? -1 : 1;
            table.mu[sub] += sign;
            if (sub == 0) break;
            sub = (sub - 1) & mask;
        }
    }
    return table;
}

} // namespace

std::vector<MatrixXcd> folded_chain_edge_terms(const LocalHamiltonian& h) {
    auto per_edge = folded_edge_terms(h);
    std::vector<MatrixXcd> out;
    for (int v = 0; v + 1 < h.num_sites(); ++v) out.push_back(per_edge.at({v, v + 1}));
    return out;
}

DenseTruncation truncated_series_dense(const LocalHamiltonian& h, double beta, int L,
                                       int j_max) {
    if (L < 1) throw std::invalid_argument("cluster size cutoff L must be >= 1");
    if (j_max < 0) throw std::invalid_argument("j_max must be >= 0");
    const auto edges = h.graph().edges();
    const int n = h.num_sites();
    auto per_edge = folded_edge_terms(h);
    auto table = build_subset_table(edges, n, L);

    const auto dims = h.dims();
    Index dim = 1;
    for (int d : dims) dim *= d;
    if (dim > max_dense_dim())
        throw ResourceError("dense truncation dimension " + std::to_string(dim) +
                            " exceeds the budget of " + std::to_string(max_dense_dim()) +
                            " (THERMALAB_MAX_DENSE_DIM)");

    MatrixXcd acc = MatrixXcd::Zero(dim, dim);
    double retained = 0.0;
    for (std::uint32_t mask : table.valid) {
        const double mu = table.mu[mask];
        retained += mu * power_sum(std::popcount(mask), j_max);
        if (mu == 0.0) continue;
        if (mask == 0) {
            acc += mu * MatrixXcd::Identity(dim, dim);
            continue;
        }
        Region supp = subset_support(mask, edges);
        std::vector<int> sub_dims(supp.size(), h.local_dim());
        Index sub_dim = 1;
        for (int d : sub_dims) sub_dim *= d;

        MatrixXcd h_sub = MatrixXcd::Zero(sub_dim, sub_dim);
        const auto& sites = supp.sites();
        auto local_of = [&](int v) {
            return static_cast<int>(std::lower_bound(sites.begin(), sites.end(), v) -
                                    sites.begin());
        };
        for (std::size_t e = 0; e < edges.size(); ++e) {
            if (!(mask >> e & 1u)) continue;
            Region local_support{local_of(edges[e].first), local_of(edges[e].second)};
            h_sub += embed(per_edge.at(edges[e]), local_support, sub_dims);
        }
        MatrixXcd taylor = truncated_exponential(-beta * h_sub, j_max);
        acc += mu * embed(taylor, supp, dims);
    }

    DenseTruncation out{DenseOperator(dims, std::move(acc)), {}};
    out.stats.retained_words = retained;
    out.stats.dropped_words = power_sum(static_cast<double>(edges.size()), j_max) - retained;
    out.stats.valid_subsets = static_cast<int>(table.valid.size());
    return out;
}

// ---------------------------------------------------------------------------
// MPO construction on chains

namespace {

// Exact tensor-train factorization of an interval operator (d^len x d^len)
// into len cores; core k is ((r_{k-1} * d^2) x r_k).
std::vector<MatrixXcd> tensor_train_cores(const MatrixXcd& w, int len, int d) {
    const Index d2 = static_cast<Index>(d) * d;
    Index total = 1;
    for (int k = 0; k < len; ++k) total *= d2;

    // reorder (I, J) -> ((i_0 j_0), (i_1 j_1), ...)
    VectorXcd t(total);
    const Index dim = w.rows();
    for (Index big_i = 0; big_i < dim; ++big_i)
        for (Index big_j = 0; big_j < dim; ++big_j) {
            Index idx = 0;
            Index pi = big_i, pj = big_j;
            Index div = dim / d;
            for (int k = 0; k < len; ++k) {
                const Index ik = pi / div, jk = pj / div;
                pi %= div;
                pj %= div;
                div /= d;
                idx = idx * d2 + (ik * d + jk);
            }
            t[idx] = w(big_i, big_j);
        }

    std::vector<MatrixXcd> cores;
    Index rank = 1;
    Index rest = total; // rank * rest entries remain in `buf`, row-major
    std::vector<Complex> buf(t.data(), t.data() + total);
    for (int k = 0; k < len - 1; ++k) {
        rest /= d2;
        // matrix M: (rank*d2) x rest, entry M(a, b) = buf[a * rest + b]
        MatrixXcd m(rank * d2, rest);
        for (Index a = 0; a < m.rows(); ++a)
            for (Index b = 0; b < rest; ++b) m(a, b) = buf[static_cast<std::size_t>(a * rest + b)];
        Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double floor = (sv.size() > 0) ? 1e-14 * sv(0) : 0.0;
        Index keep = 0;
        for (Index i = 0; i < sv.size(); ++i)
            if (sv(i) > floor) ++keep;
        keep = std::max<Index>(keep, 1);
        cores.push_back(svd.matrixU().leftCols(keep)); // (rank*d2) x keep
        MatrixXcd carry = sv.head(keep).asDiagonal() *
                          svd.matrixV().leftCols(keep).adjoint(); // keep x rest
        buf.assign(static_cast<std::size_t>(keep * rest), Complex(0, 0));
        for (Index a = 0; a < keep; ++a)
            for (Index b = 0; b < rest; ++b) buf[static_cast<std::size_t>(a * rest + b)] = carry(a, b);
        rank = keep;
    }
    MatrixXcd last(rank * d2, 1);
    for (Index a = 0; a < last.rows(); ++a) last(a, 0) = buf[static_cast<std::size_t>(a)];
    cores.push_back(std::move(last));
    return cores;
}

struct IntervalOps {
    int a = 0;   // leftmost site
    int len = 0; // number of sites
    // per kept order j: TT cores
    std::map<int, std::vector<MatrixXcd>> by_order;
};

struct StateKey {
    int interval = -1; // index into interval list; -1 = idle
    int order = 0;
    int pos = 0; // bonds consumed inside the interval (1..len-1)
    int rho = 0; // TT bond index
    int grade = 0;
    auto operator<=>(const StateKey&) const = default;
};

} // namespace

MpoTruncation mpo_from_truncation(const LocalHamiltonian& h, double beta, int L, int j_max,
                                  double cluster_floor) {
    const int n = h.num_sites();
    const int d = h.local_dim();
    // chain check: edges exactly {(v, v+1)}
    {
        std::vector<std::pair<int, int>> expect;
        for (int v = 0; v + 1 < n; ++v) expect.emplace_back(v, v + 1);
        if (h.graph().edges() != expect)
            throw std::invalid_argument("MPO truncation supports chain graphs only");
    }
    if (L < 1) throw std::invalid_argument("cluster size cutoff L must be >= 1");
    if (j_max < 0) throw std::invalid_argument("j_max must be >= 0");

    auto edge_terms = folded_chain_edge_terms(h);

    // Dense cluster operators per interval and order: the order-j part of the
    // word sum whose support is exactly the interval.
    struct RawInterval {
        int a = 0;
        int len = 0;
        std::map<int, MatrixXcd> dense;
    };
    std::vector<RawInterval> raw_intervals;
    const int max_len = std::min(L - 1, n);
    for (int len = 2; len <= max_len; ++len) {
        for (int a = 0; a + len <= n; ++a) {
            RawInterval raw;
            raw.a = a;
            raw.len = len;
            const int n_edges = len - 1;
            std::vector<int> sub_dims(len, d);
            Index sub_dim = 1;
            for (int k = 0; k < len; ++k) sub_dim *= d;

            std::vector<MatrixXcd> acc(j_max + 1, MatrixXcd::Zero(sub_dim, sub_dim));
            for (std::uint32_t mask = 0; mask < (1u << n_edges); ++mask) {
                MatrixXcd ht = MatrixXcd::Zero(sub_dim, sub_dim);
                for (int e = 0; e < n_edges; ++e)
                    if (mask >> e & 1u)
                        ht += embed(edge_terms[a + e], Region{e, e + 1}, sub_dims);
                const int sign = ((n_edges - std::popcount(mask)) & 1) ? -1 : 1;
                MatrixXcd power = MatrixXcd::Identity(sub_dim, sub_dim);
                for (int j = 1; j <= j_max; ++j) {
                    power = ht * power;
                    if (j >= n_edges) acc[j] += static_cast<double>(sign) * power;
                }
            }
            double coeff = 1.0;
            for (int j = 1; j <= j_max; ++j) {
                coeff *= -beta / static_cast<double>(j);
                if (j < n_edges) continue;
                MatrixXcd w = coeff * acc[j];
                if (w.norm() <= cluster_floor) continue;
                raw.dense.emplace(j, std::move(w));
            }
            if (!raw.dense.empty()) raw_intervals.push_back(std::move(raw));
        }
    }

    // The shared order budget sum(j_m) <= j_max couples the intervals of a
    // family. Whether it ever binds is decided by two scalar walks over
    // Frobenius norms: if dropping the coupling changes the family sum by a
    // negligible amount, per-interval operators can be summed over orders and
    // the bond space needs no order grade.
    double t_within = 0.0, t_all = 0.0;
    {
        std::vector<double> plain(n + 1, 0.0);
        plain[0] = 1.0;
        std::vector<std::vector<double>> graded(
            n + 1, std::vector<double>(static_cast<std::size_t>(j_max) + 1, 0.0));
        graded[0][0] = 1.0;
        for (int v = 0; v < n; ++v) {
            plain[v + 1] += plain[v];
            for (int g = 0; g <= j_max; ++g) graded[v + 1][g] += graded[v][g];
            for (const auto& raw : raw_intervals) {
                if (raw.a + raw.len - 1 != v) continue;
                for (const auto& [j, w] : raw.dense) {
                    const double norm = w.norm();
                    plain[v + 1] += plain[raw.a] * norm;
                    for (int g = j; g <= j_max; ++g)
                        graded[v + 1][g] += graded[raw.a][g - j] * norm;
                }
            }
        }
        t_all = plain[n];
        for (double x : graded[n]) t_within += x;
    }
    const bool budget_binds = (t_all - t_within) > 1e-13 * std::max(1.0, t_within);

    std::vector<IntervalOps> intervals;
    for (const auto& raw : raw_intervals) {
        IntervalOps ops;
        ops.a = raw.a;
        ops.len = raw.len;
        if (budget_binds) {
            for (const auto& [j, w] : raw.dense)
                ops.by_order[j] = tensor_train_cores(w, raw.len, d);
        } else {
            MatrixXcd sum = raw.dense.begin()->second;
            for (auto it = std::next(raw.dense.begin()); it != raw.dense.end(); ++it)
                sum += it->second;
            // pseudo-order 0: the grade never moves and the budget test passes
            ops.by_order[0] = tensor_train_cores(sum, raw.len, d);
        }
        intervals.push_back(std::move(ops));
    }

    // Automaton assembly (order-graded only when the budget binds).
    std::map<StateKey, int> bond_states;
    bond_states[StateKey{}] = 0; // idle, grade 0
    std::vector<Mpo::SiteTensor> tensors;

    for (int v = 0; v < n; ++v) {
        std::map<StateKey, int> next_states;
        struct Entry {
            int in;
            StateKey out;
            MatrixXcd block;
        };
        std::vector<Entry> entries;
        auto out_id = [&](const StateKey& key) {
            auto it = next_states.find(key);
            if (it == next_states.end())
                it = next_states.emplace(key, static_cast<int>(next_states.size())).first;
            return it->second;
        };

        for (const auto& [key, in_id] : bond_states) {
            if (key.interval < 0) {
                // idle continues
                StateKey idle = key;
                entries.push_back({in_id, idle, MatrixXcd::Identity(d, d)});
                // start an interval at a = v
                for (std::size_t q = 0; q < intervals.size(); ++q) {
                    const auto& ops = intervals[q];
                    if (ops.a != v) continue;
                    for (const auto& [j, cores] : ops.by_order) {
                        if (key.grade + j > j_max) continue;
                        const MatrixXcd& c0 = cores[0]; // (d^2) x r1
                        for (Index rho = 0; rho < c0.cols(); ++rho) {
                            MatrixXcd block(d, d);
                            for (Index i = 0; i < d; ++i)
                                for (Index jj = 0; jj < d; ++jj)
                                    block(i, jj) = c0(i * d + jj, rho);
                            if (block.cwiseAbs().maxCoeff() == 0.0) continue;
                            StateKey out{static_cast<int>(q), j, 1, static_cast<int>(rho),
                                         key.grade + j};
                            entries.push_back({in_id, out, std::move(block)});
                        }
                    }
                }
            } else {
                const auto& ops = intervals[key.interval];
                const auto& cores = ops.by_order.at(key.order);
                const MatrixXcd& ck = cores[key.pos]; // (r_prev*d^2) x r_next
                const bool closing = (key.pos == ops.len - 1);
                for (Index rho2 = 0; rho2 < ck.cols(); ++rho2) {
                    MatrixXcd block(d, d);
                    for (Index i = 0; i < d; ++i)
                        for (Index jj = 0; jj < d; ++jj)
                            block(i, jj) = ck((key.rho * d + i) * d + jj, rho2);
                    if (block.cwiseAbs().maxCoeff() == 0.0) continue;
                    StateKey out;
                    if (closing) {
                        out = StateKey{};
                        out.grade = key.grade;
                    } else {
                        out = key;
                        out.pos = key.pos + 1;
                        out.rho = static_cast<int>(rho2);
                    }
                    entries.push_back({in_id, out, std::move(block)});
                }
            }
        }

        const bool last = (v == n - 1);
        if (!last)
            for (const auto& e : entries) out_id(e.out);
        if (static_cast<int>(next_states.size()) > kMaxAutomatonStates)
            throw ResourceError("MPO automaton exceeded " +
                                std::to_string(kMaxAutomatonStates) +
                                " bond states; reduce j_max or L");

        Index dr = last ? 1 : static_cast<Index>(next_states.size());
        Mpo::SiteTensor t(static_cast<Index>(bond_states.size()), d, d, dr);
        for (const auto& e : entries) {
            if (last && e.out.interval >= 0)
                throw std::logic_error("open interval at the right boundary");
            Index r = last ? 0 : next_states.at(e.out);
            for (Index i = 0; i < d; ++i)
                for (Index j = 0; j < d; ++j) t.at(e.in, i, j, r) += e.block(i, j);
        }
        tensors.push_back(std::move(t));
        if (!last) bond_states = std::move(next_states);
    }

    Mpo raw(std::move(tensors));
    MpoTruncation out{raw, {}, raw.bond_dims(), 0.0};

    auto rounded = mpo_round_relative(raw, 1e-13);
    out.mpo = std::move(rounded.mpo);
    out.rounding_error = rounded.truncation_error;

    // Word counts match the dense truncation by construction.
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
    auto table = build_subset_table(edges, n, L);
    double retained = 0.0;
    for (std::uint32_t mask : table.valid)
        retained += table.mu[mask] * power_sum(std::popcount(mask), j_max);
    out.stats.retained_words = retained;
    out.stats.dropped_words = power_sum(static_cast<double>(edges.size()), j_max) - retained;
    out.stats.valid_subsets = static_cast<int>(table.valid.size());
    return out;
}

SquaredPositiveResult positivity_by_squaring(const LocalHamiltonian& h, double beta, int L,
                                             int j_max, Index max_bond) {
    if (max_bond < 1) throw std::invalid_argument("max_bond must be at least 1");
    auto half = mpo_from_truncation(h, beta / 2.0, L, j_max);
    Mpo squared = mpo_multiply(mpo_adjoint(half.mpo), half.mpo);
    const Index raw_bond = squared.max_bond();

    auto rounded = mpo_round_relative(squared, 1e-14);
    double err2 = rounded.truncation_error * rounded.truncation_error;
    Mpo final_mpo = std::move(rounded.mpo);
    if (final_mpo.max_bond() > max_bond) {
        auto capped = mpo_compress(final_mpo, max_bond, 0.0);
        err2 += capped.truncation_error * capped.truncation_error;
        final_mpo = std::move(capped.mpo);
    }
    return {std::move(final_mpo), std::sqrt(err2), raw_bond};
}

} // namespace thermalab

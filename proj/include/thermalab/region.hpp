#pragma once

#include <algorithm>
#include <initializer_list>
#include <vector>

namespace thermalab {

/// A set of sites of an interaction graph, kept sorted and duplicate-free.
class Region {
public:
    Region() = default;
    Region(std::initializer_list<int> sites) : sites_(sites) { normalize(); }
    explicit Region(std::vector<int> sites) : sites_(std::move(sites)) { normalize(); }

    /// Sites [first, last) as a region.
    static Region range(int first, int last) {
        std::vector<int> s;
        for (int v = first; v < last; ++v) s.push_back(v);
        return Region(std::move(s));
    }

    const std::vector<int>& sites() const { return sites_; }
    std::size_t size() const { return sites_.size(); }
    bool empty() const { return sites_.empty(); }

    bool contains(int v) const {
        return std::binary_search(sites_.begin(), sites_.end(), v);
    }
    bool subset_of(const Region& other) const {
        return std::includes(other.sites_.begin(), other.sites_.end(),
                             sites_.begin(), sites_.end());
    }

    Region unite(const Region& other) const {
        std::vector<int> out;
        std::set_union(sites_.begin(), sites_.end(),
                       other.sites_.begin(), other.sites_.end(), std::back_inserter(out));
        return Region(std::move(out));
    }
    Region intersect(const Region& other) const {
        std::vector<int> out;
        std::set_intersection(sites_.begin(), sites_.end(),
                              other.sites_.begin(), other.sites_.end(),
                              std::back_inserter(out));
        return Region(std::move(out));
    }
    Region minus(const Region& other) const {
        std::vector<int> out;
        std::set_difference(sites_.begin(), sites_.end(),
                            other.sites_.begin(), other.sites_.end(),
                            std::back_inserter(out));
        return Region(std::move(out));
    }

    bool operator==(const Region& other) const = default;

    auto begin() const { return sites_.begin(); }
    auto end() const { return sites_.end(); }

private:
    void normalize() {
        std::sort(sites_.begin(), sites_.end());
        sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
    }
    std::vector<int> sites_;
};

} // namespace thermalab

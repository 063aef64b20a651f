#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace l2tor {

/// Permutation of {0..n-1} acting on the right: point x goes to p[x], and
/// (p * q) means "p then q".
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::size_t n) : img_(n) { std::iota(img_.begin(), img_.end(), std::uint16_t{0}); }
    explicit Permutation(std::vector<std::uint16_t> images) : img_(std::move(images)) {
        std::vector<bool> hit(img_.size(), false);
        for (auto v : img_) {
            if (v >= img_.size() || hit[v]) throw std::invalid_argument("not a permutation");
            hit[v] = true;
        }
    }

    [[nodiscard]] std::size_t degree() const noexcept { return img_.size(); }
    [[nodiscard]] std::uint16_t operator[](std::size_t x) const noexcept { return img_[x]; }
    [[nodiscard]] const std::vector<std::uint16_t>& images() const noexcept { return img_; }

    [[nodiscard]] bool is_identity() const noexcept {
        for (std::size_t i = 0; i < img_.size(); ++i)
            if (img_[i] != i) return false;
        return true;
    }

    [[nodiscard]] Permutation inverse() const {
        Permutation r;
        r.img_.resize(img_.size());
        for (std::size_t i = 0; i < img_.size(); ++i) r.img_[img_[i]] = static_cast<std::uint16_t>(i);
        return r;
    }

    friend Permutation operator*(const Permutation& p, const Permutation& q) {
        Permutation r;
        r.img_.resize(p.img_.size());
        for (std::size_t i = 0; i < p.img_.size(); ++i) r.img_[i] = q.img_[p.img_[i]];
        return r;
    }

    [[nodiscard]] Permutation pow(std::int64_t e) const {
        Permutation base = e < 0 ? inverse() : *this;
        Permutation out(img_.size());
        for (std::int64_t k = 0; k < (e < 0 ? -e : e); ++k) out = out * base;
        return out;
    }

    /// Cycle lengths sorted descending.
    [[nodiscard]] std::vector<std::size_t> cycle_type() const {
        std::vector<std::size_t> lens;
        std::vector<bool> seen(img_.size(), false);
        for (std::size_t i = 0; i < img_.size(); ++i) {
            if (seen[i]) continue;
            std::size_t len = 0;
            for (std::size_t j = i; !seen[j]; j = img_[j]) {
                seen[j] = true;
                ++len;
            }
            lens.push_back(len);
        }
        std::sort(lens.rbegin(), lens.rend());
        return lens;
    }

    /// Cycle notation with 1-based points, e.g. "(1,2,3)(4,5)"; "()" for the identity.
    [[nodiscard]] std::string cycles() const {
        std::string s;
        std::vector<bool> seen(img_.size(), false);
        for (std::size_t i = 0; i < img_.size(); ++i) {
            if (seen[i] || img_[i] == i) continue;
            s += '(';
            for (std::size_t j = i; !seen[j]; j = img_[j]) {
                seen[j] = true;
                if (j != i) s += ',';
                s += std::to_string(j + 1);
            }
            s += ')';
        }
        return s.empty() ? "()" : s;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;
    friend auto operator<=>(const Permutation&, const Permutation&) = default;

private:
    std::vector<std::uint16_t> img_;
};

struct PermutationHash {
    std::size_t operator()(const Permutation& p) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (auto v : p.images()) {
            h ^= v;
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

/// Order of the group generated by the given permutations (Schreier-Sims).
inline std::uint64_t permutation_group_order(const std::vector<Permutation>& gens) {
    if (gens.empty()) return 1;
    const std::size_t n = gens.front().degree();
    struct Level {
        std::uint16_t base;
        std::vector<Permutation> gens;
        std::vector<Permutation> trans;  // trans[x] maps base to x; empty when x is outside the orbit
        std::vector<std::uint16_t> orbit;
    };
    std::vector<Level> levels;
    const Permutation id(n);

    auto new_level = [&](const Permutation& g) {
        std::uint16_t b = 0;
        while (b < n && g[b] == b) ++b;
        Level lv{b, {}, std::vector<Permutation>(n), {b}};
        lv.trans[b] = id;
        levels.push_back(std::move(lv));
    };
    // Sift from level `from`; returns the failing level index (== levels.size() if it passed all).
    auto sift = [&](Permutation& h, std::size_t from) {
        for (std::size_t j = from; j < levels.size(); ++j) {
            const auto beta = h[levels[j].base];
            if (levels[j].trans[beta].degree() == 0) return j;
            h = h * levels[j].trans[beta].inverse();
        }
        return levels.size();
    };
    auto add = [&](std::size_t j, const Permutation& h) {
        if (j == levels.size()) new_level(h);
        levels[j].gens.push_back(h);
    };

    for (const auto& g : gens) {
        if (g.degree() != n) throw std::invalid_argument("generators of different degree");
        if (g.is_identity()) continue;
        Permutation h = g;
        const auto j = sift(h, 0);
        if (!h.is_identity()) add(j, h);
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = levels.size(); i-- > 0 && !changed;) {
            std::vector<Permutation> strong;
            for (std::size_t k = i; k < levels.size(); ++k)
                strong.insert(strong.end(), levels[k].gens.begin(), levels[k].gens.end());
            auto& lv = levels[i];
            for (std::size_t oi = 0; oi < lv.orbit.size(); ++oi) {
                const auto x = lv.orbit[oi];
                for (const auto& s : strong) {
                    const auto y = s[x];
                    if (lv.trans[y].degree() == 0) {
                        lv.trans[y] = lv.trans[x] * s;
                        lv.orbit.push_back(y);
                    }
                }
            }
            for (std::size_t oi = 0; oi < levels[i].orbit.size() && !changed; ++oi) {
                const auto x = levels[i].orbit[oi];
                for (const auto& s : strong) {
                    Permutation h = levels[i].trans[x] * s * levels[i].trans[s[x]].inverse();
                    const auto j = sift(h, i + 1);
                    if (!h.is_identity()) {
                        add(j, h);
                        changed = true;
                        break;
                    }
                }
            }
        }
    }
    std::uint64_t order = 1;
    for (const auto& lv : levels) order *= lv.orbit.size();
    return order;
}

/// All elements of the generated group in breadth-first order from the identity.
/// Throws std::length_error when the group exceeds max_order.
inline std::vector<Permutation> enumerate_group(const std::vector<Permutation>& gens, std::size_t degree,
                                                std::size_t max_order) {
    std::vector<Permutation> elems{Permutation(degree)};
    std::unordered_map<Permutation, std::size_t, PermutationHash> index{{elems.front(), 0}};
    for (std::size_t i = 0; i < elems.size(); ++i) {
        for (const auto& g : gens) {
            auto y = elems[i] * g;
            if (index.contains(y)) continue;
            if (elems.size() >= max_order)
                throw std::length_error("group order exceeds cap of " + std::to_string(max_order));
            index.emplace(y, elems.size());
            elems.push_back(std::move(y));
        }
    }
    return elems;
}

}  // namespace l2tor

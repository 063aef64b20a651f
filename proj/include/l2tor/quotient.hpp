#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <optional>
#include <cstdint>
#include <future>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "l2tor/permutation.hpp"
#include "l2tor/presentation.hpp"

namespace l2tor {

/// A homomorphism G -> Sym(d) given by generator images; `order` is the size of the image.
struct FiniteQuotient {
    std::size_t degree = 1;
    std::vector<Permutation> images;
    std::uint64_t order = 1;

    static FiniteQuotient make(std::vector<Permutation> imgs) {
        if (imgs.empty()) throw std::invalid_argument("quotient needs at least one generator image");
        FiniteQuotient q;
        q.degree = imgs.front().degree();
        for (const auto& p : imgs)
            if (p.degree() != q.degree) throw std::invalid_argument("generator images of different degree");
        q.images = std::move(imgs);
        q.order = permutation_group_order(q.images);
        return q;
    }

    static FiniteQuotient trivial(std::size_t generator_count) {
        return make(std::vector<Permutation>(generator_count, Permutation(1)));
    }

    [[nodiscard]] Permutation image(const Word& w) const {
        Permutation p(degree);
        for (const auto& l : w.letters()) {
            if (l.gen >= images.size()) throw std::out_of_range("word uses a generator the quotient does not map");
            p = p * images[l.gen].pow(l.exp);
        }
        return p;
    }

    [[nodiscard]] bool is_transitive() const {
        std::vector<bool> seen(degree, false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            const auto x = stack.back();
            stack.pop_back();
            for (const auto& g : images) {
                const auto y = g[x];
                if (!seen[y]) {
                    seen[y] = true;
                    ++count;
                    stack.push_back(y);
                }
            }
        }
        return count == degree;
    }

    /// True iff every relator maps to the identity.
    [[nodiscard]] bool is_valid_for(const GroupPresentation& p) const {
        if (images.size() != p.generator_count()) return false;
        for (const auto& r : p.relators())
            if (!image(r).is_identity()) return false;
        return true;
    }

    /// Generator images in cycle notation, separated by spaces.
    [[nodiscard]] std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < images.size(); ++i) s += (i ? " " : "") + images[i].cycles();
        return s;
    }

    friend bool operator==(const FiniteQuotient& a, const FiniteQuotient& b) {
        return a.degree == b.degree && a.images == b.images;
    }
};

namespace detail {

/// Conjugacy-canonical relabeling of a transitive tuple: minimum over base points
/// of the breadth-first relabeling.
inline std::vector<Permutation> canonical_tuple(const std::vector<Permutation>& tuple) {
    const std::size_t d = tuple.front().degree();
    std::vector<Permutation> best;
    for (std::size_t start = 0; start < d; ++start) {
        std::vector<int> label(d, -1);
        std::vector<std::size_t> order{start};
        label[start] = 0;
        for (std::size_t k = 0; k < order.size(); ++k)
            for (const auto& g : tuple) {
                const auto y = g[order[k]];
                if (label[y] < 0) {
                    label[y] = static_cast<int>(order.size());
                    order.push_back(y);
                }
            }
        if (order.size() != d) throw std::logic_error("canonical_tuple requires a transitive tuple");
        std::vector<Permutation> relabeled;
        relabeled.reserve(tuple.size());
        for (const auto& g : tuple) {
            std::vector<std::uint16_t> img(d);
            for (std::size_t x = 0; x < d; ++x) img[label[x]] = static_cast<std::uint16_t>(label[g[x]]);
            relabeled.emplace_back(std::move(img));
        }
        if (best.empty() || relabeled < best) best = std::move(relabeled);
    }
    return best;
}

inline void partitions(std::size_t n, std::size_t max_part, std::vector<std::size_t>& cur,
                       std::vector<std::vector<std::size_t>>& out) {
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (std::size_t p = std::min(n, max_part); p >= 1; --p) {
        cur.push_back(p);
        partitions(n - p, p, cur, out);
        cur.pop_back();
    }
}

/// Backtracking search for the other generator images once the first is fixed.
class TupleSearch {
public:
    TupleSearch(const GroupPresentation& p, std::size_t degree, const Permutation& first, std::uint64_t max_nodes)
        : d_(degree), ngen_(p.generator_count()), max_nodes_(max_nodes) {
        fwd_.assign(ngen_, std::vector<int>(d_, -1));
        bwd_.assign(ngen_, std::vector<int>(d_, -1));
        for (std::size_t x = 0; x < d_; ++x) {
            fwd_[0][x] = first[x];
            bwd_[0][first[x]] = static_cast<int>(x);
        }
        for (const auto& r : p.relators()) rels_.push_back(r.syllables());
    }

    void run(std::set<std::vector<Permutation>>& found) {
        if (!propagate()) return;
        recurse(found);
    }

    [[nodiscard]] bool truncated() const noexcept { return truncated_; }

private:
    struct Assignment {
        std::size_t gen;
        int from;
        int to;
    };

    int step(int x, const Letter& s) const { return s.exp > 0 ? fwd_[s.gen][x] : bwd_[s.gen][x]; }
    int step_back(int x, const Letter& s) const { return s.exp > 0 ? bwd_[s.gen][x] : fwd_[s.gen][x]; }

    bool assign(std::size_t g, int from, int to) {
        if (fwd_[g][from] >= 0 || bwd_[g][to] >= 0) return fwd_[g][from] == to && bwd_[g][to] == from;
        fwd_[g][from] = to;
        bwd_[g][to] = from;
        trail_.push_back({g, from, to});
        return true;
    }

    void undo_to(std::size_t mark) {
        while (trail_.size() > mark) {
            const auto a = trail_.back();
            trail_.pop_back();
            fwd_[a.gen][a.from] = -1;
            bwd_[a.gen][a.to] = -1;
        }
    }

    // Scans every relator from every point; fills single gaps; false on contradiction.
    bool propagate() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& rel : rels_) {
                const std::size_t len = rel.size();
                if (len == 0) continue;
                for (std::size_t x = 0; x < d_; ++x) {
                    int p = static_cast<int>(x);
                    std::size_t i = 0;
                    while (i < len) {
                        const int nx = step(p, rel[i]);
                        if (nx < 0) break;
                        p = nx;
                        ++i;
                    }
                    if (i == len) {
                        if (p != static_cast<int>(x)) return false;
                        continue;
                    }
                    int q = static_cast<int>(x);
                    std::size_t j = len;
                    while (j > i) {
                        const int nq = step_back(q, rel[j - 1]);
                        if (nq < 0) break;
                        q = nq;
                        --j;
                    }
                    if (j == i) {
                        if (p != q) return false;
                    } else if (j == i + 1) {
                        const auto& s = rel[i];
                        const bool ok = s.exp > 0 ? assign(s.gen, p, q) : assign(s.gen, q, p);
                        if (!ok) return false;
                        changed = true;
                    }
                }
            }
        }
        return true;
    }

    void recurse(std::set<std::vector<Permutation>>& found) {
        if (++nodes_ > max_nodes_) {
            truncated_ = true;
            return;
        }
        for (std::size_t g = 1; g < ngen_; ++g)
            for (std::size_t x = 0; x < d_; ++x) {
                if (fwd_[g][x] >= 0) continue;
                for (std::size_t y = 0; y < d_ && !truncated_; ++y) {
                    if (bwd_[g][y] >= 0) continue;
                    const auto mark = trail_.size();
                    if (assign(g, static_cast<int>(x), static_cast<int>(y)) && propagate()) recurse(found);
                    undo_to(mark);
                }
                return;
            }
        std::vector<Permutation> tuple;
        tuple.reserve(ngen_);
        for (std::size_t g = 0; g < ngen_; ++g) {
            std::vector<std::uint16_t> img(d_);
            for (std::size_t x = 0; x < d_; ++x) img[x] = static_cast<std::uint16_t>(fwd_[g][x]);
            tuple.emplace_back(std::move(img));
        }
        FiniteQuotient probe;
        probe.degree = d_;
        probe.images = tuple;
        if (probe.is_transitive()) found.insert(canonical_tuple(tuple));
    }

    std::size_t d_;
    std::size_t ngen_;
    std::uint64_t max_nodes_;
    std::uint64_t nodes_ = 0;
    bool truncated_ = false;
    std::vector<std::vector<int>> fwd_, bwd_;
    std::vector<std::vector<Letter>> rels_;
    std::vector<Assignment> trail_;
};

}  // namespace detail

struct QuotientSearchOptions {
    std::uint64_t max_nodes_per_branch = 2'000'000;  ///< backtracking node budget per first-generator cycle type
    std::size_t workers = 1;
};

struct QuotientSearchResult {
    std::vector<FiniteQuotient> quotients;
    bool truncated = false;  ///< some branch hit its node budget
};

/// Transitive permutation images of degree <= max_degree, one per conjugacy class,
/// sorted by image order descending (then degree, then images), at most `limit`.
inline QuotientSearchResult quotient_search_ex(const GroupPresentation& p, std::size_t max_degree, std::size_t limit,
                                               const QuotientSearchOptions& opts = {}) {
    if (max_degree < 1) throw std::invalid_argument("max_degree must be at least 1");
    if (max_degree > 64) throw std::invalid_argument("max_degree above 64 is not supported");
    if (p.generator_count() == 0) throw std::invalid_argument("presentation without generators");

    struct Job {
        std::size_t degree;
        std::vector<std::size_t> cycle_type;
    };
    std::vector<Job> jobs;
    for (std::size_t d = 1; d <= max_degree; ++d) {
        std::vector<std::vector<std::size_t>> parts;
        std::vector<std::size_t> cur;
        detail::partitions(d, d, cur, parts);
        for (auto& pt : parts) jobs.push_back({d, std::move(pt)});
    }

    auto run_job = [&p, &opts](const Job& job) {
        std::vector<std::uint16_t> img(job.degree);
        std::size_t pos = 0;
        for (auto len : job.cycle_type) {
            for (std::size_t k = 0; k < len; ++k)
                img[pos + k] = static_cast<std::uint16_t>(pos + (k + 1) % len);
            pos += len;
        }
        std::set<std::vector<Permutation>> found;
        detail::TupleSearch search(p, job.degree, Permutation(std::move(img)), opts.max_nodes_per_branch);
        search.run(found);
        return std::make_pair(std::move(found), search.truncated());
    };

    std::vector<std::pair<std::set<std::vector<Permutation>>, bool>> results(jobs.size());
    const std::size_t workers = std::max<std::size_t>(1, opts.workers);
    if (workers == 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = run_job(jobs[i]);
    } else {
        std::vector<std::future<void>> pool;
        std::atomic<std::size_t> next{0};
        for (std::size_t w = 0; w < workers; ++w)
            pool.push_back(std::async(std::launch::async, [&] {
                for (std::size_t i = next++; i < jobs.size(); i = next++) results[i] = run_job(jobs[i]);
            }));
        for (auto& f : pool) f.get();
    }

    std::set<std::vector<Permutation>> all;
    QuotientSearchResult out;
    for (auto& [found, trunc] : results) {
        all.insert(found.begin(), found.end());
        out.truncated = out.truncated || trunc;
    }
    for (const auto& tuple : all) out.quotients.push_back(FiniteQuotient::make(tuple));
    std::stable_sort(out.quotients.begin(), out.quotients.end(), [](const auto& a, const auto& b) {
        if (a.order != b.order) return a.order > b.order;
        if (a.degree != b.degree) return a.degree < b.degree;
        return a.images < b.images;
    });
    if (out.quotients.size() > limit) out.quotients.resize(limit);
    return out;
}

inline std::vector<FiniteQuotient> quotient_search(const GroupPresentation& p, std::size_t max_degree,
                                                   std::size_t limit, const QuotientSearchOptions& opts = {}) {
    return quotient_search_ex(p, max_degree, limit, opts).quotients;
}

/// Action of 2x2 matrices mod a prime p on the projective line P^1(F_p) (row vectors,
/// points 0..p-1 are [x:1], point p is [1:0]). Entries are {a, b, c, d}.
inline Permutation projective_permutation(const std::array<std::int64_t, 4>& m, std::int64_t p) {
    auto mod = [p](std::int64_t x) { return ((x % p) + p) % p; };
    auto inv = [&](std::int64_t x) {
        std::int64_t r = 1, b = mod(x), e = p - 2;
        while (e > 0) {
            if (e & 1) r = r * b % p;
            b = b * b % p;
            e >>= 1;
        }
        return r;
    };
    std::vector<std::uint16_t> img(static_cast<std::size_t>(p + 1));
    for (std::int64_t i = 0; i <= p; ++i) {
        const std::int64_t v0 = i < p ? i : 1, v1 = i < p ? 1 : 0;
        const std::int64_t x = mod(v0 * m[0] + v1 * m[2]), y = mod(v0 * m[1] + v1 * m[3]);
        img[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(y == 0 ? p : mod(x * inv(y)));
    }
    return Permutation(std::move(img));
}

/// Riley-type quotients of a two-generator group onto subgroups of PSL(2,p):
/// a -> [[1,1],[0,1]], b -> [[1,0],[-w,1]] for every w in F_p^* satisfying the relators.
/// Transitive solutions only.
inline std::vector<FiniteQuotient> riley_quotients(const GroupPresentation& pres, std::int64_t p) {
    if (pres.generator_count() != 2) throw std::invalid_argument("riley_quotients needs two generators");
    if (p < 3 || p > 1000) throw std::invalid_argument("prime out of supported range");
    for (std::int64_t k = 2; k * k <= p; ++k)
        if (p % k == 0) throw std::invalid_argument(std::to_string(p) + " is not prime");
    std::vector<FiniteQuotient> out;
    const auto a = projective_permutation({1, 1, 0, 1}, p);
    for (std::int64_t w = 1; w < p; ++w) {
        FiniteQuotient q;
        q.degree = static_cast<std::size_t>(p + 1);
        q.images = {a, projective_permutation({1, 0, p - w, 1}, p)};
        if (!q.is_valid_for(pres) || !q.is_transitive()) continue;
        q.order = permutation_group_order(q.images);
        out.push_back(std::move(q));
    }
    return out;
}

/// Largest finite image of degree <= max_degree in which no generator dies: Riley
/// quotients for two-generator presentations (prime p with p + 1 <= max_degree), else
/// the bounded search.
inline std::optional<FiniteQuotient> select_quotient(const GroupPresentation& pres, std::size_t max_degree,
                                                     const QuotientSearchOptions& opts = {}) {
    std::optional<FiniteQuotient> best;
    auto consider = [&](const FiniteQuotient& q) {
        for (const auto& g : q.images)
            if (g.is_identity() && q.degree > 1) return;
        if (!best || q.order > best->order || (q.order == best->order && q.degree < best->degree)) best = q;
    };
    if (pres.generator_count() == 2)
        for (std::int64_t p = 3; p + 1 <= static_cast<std::int64_t>(max_degree) && p <= 1000; ++p) {
            bool prime = true;
            for (std::int64_t k = 2; k * k <= p; ++k) prime = prime && p % k != 0;
            if (!prime) continue;
            for (const auto& q : riley_quotients(pres, p)) consider(q);
        }
    if (!best || best->order <= 6)
        for (const auto& q : quotient_search(pres, max_degree, std::numeric_limits<std::size_t>::max(), opts))
            consider(q);
    return best;
}

}  // namespace l2tor

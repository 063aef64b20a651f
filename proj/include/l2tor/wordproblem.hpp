#pragma once

#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "l2tor/presentation.hpp"
#include "l2tor/quotient.hpp"

namespace l2tor {

enum class Verdict { Identity, NotIdentity, Unknown };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Identity: return "identity";
        case Verdict::NotIdentity: return "not-identity";
        default: return "unknown";
    }
}

struct IdentityVerdict {
    Verdict value = Verdict::Unknown;
    std::optional<FiniteQuotient> witness;  ///< set for NotIdentity from a finite quotient
    std::string reason;
};

/// Exact in a free group: identity iff the reduced word is empty.
inline IdentityVerdict oracle_free(const GroupPresentation& p, const Word& w) {
    if (!p.is_free()) throw std::invalid_argument("oracle_free called on a presentation with relators");
    if (w.is_identity()) return {Verdict::Identity, {}, "reduces to the empty word"};
    return {Verdict::NotIdentity, {}, "nonempty reduced word"};
}

/// Exact in Z^rank: identity iff every exponent sum vanishes.
inline IdentityVerdict oracle_abelian(const Word& w, std::size_t rank) {
    const auto sums = w.exponent_sums(rank);
    for (auto s : sums)
        if (s != 0) return {Verdict::NotIdentity, {}, "nonzero exponent sum"};
    return {Verdict::Identity, {}, "all exponent sums vanish"};
}

namespace wp_detail {

// Words of length <= depth over the generators (and inverses).
inline std::vector<Word> short_words(std::size_t ngen, int depth) {
    std::vector<Word> out{Word{}};
    std::vector<Word> frontier{Word{}};
    for (int d = 0; d < depth; ++d) {
        std::vector<Word> next;
        for (const auto& w : frontier)
            for (std::uint32_t g = 0; g < ngen; ++g)
                for (int e : {1, -1}) {
                    Word x = w * Word::generator(g, e);
                    if (x.length() == d + 1) next.push_back(x);
                }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

inline std::vector<Word> cyclic_rotations(const Word& r) {
    const auto syl = r.syllables();
    std::vector<Word> out;
    for (std::size_t k = 0; k < syl.size(); ++k) {
        std::vector<Letter> rot(syl.begin() + static_cast<std::ptrdiff_t>(k), syl.end());
        rot.insert(rot.end(), syl.begin(), syl.begin() + static_cast<std::ptrdiff_t>(k));
        out.push_back(Word::reduce(rot));
    }
    if (out.empty()) out.push_back(Word{});
    return out;
}

}  // namespace wp_detail

/// Finite-quotient witnesses for non-identity, plus a bounded relator-consequence
/// search (products of at most two conjugates u r^{+-1} u^-1 with |u| <= depth,
/// conjugating relator rotations) for identity.
inline IdentityVerdict oracle_quotients(const GroupPresentation& p, const Word& w,
                                        const std::vector<FiniteQuotient>& quotients, int depth = 2) {
    if (w.is_identity()) return {Verdict::Identity, {}, "empty word"};
    for (const auto& q : quotients)
        if (!q.image(w).is_identity()) return {Verdict::NotIdentity, q, "nontrivial image in a finite quotient"};
    if (p.is_free()) return oracle_free(p, w);

    std::unordered_set<Word, WordHash> singles;
    const auto conj = wp_detail::short_words(p.generator_count(), depth);
    for (const auto& r : p.relators())
        for (const auto& rot : wp_detail::cyclic_rotations(r))
            for (const auto& x : {rot, rot.inverse()})
                for (const auto& u : conj) singles.insert(u * x * u.inverse());
    if (singles.contains(w)) return {Verdict::Identity, {}, "conjugate of a relator"};
    for (const auto& x : singles)
        if (singles.contains(x.inverse() * w)) return {Verdict::Identity, {}, "product of two relator conjugates"};
    return {Verdict::Unknown, {}, "no witness and no short consequence"};
}

enum class Certainty { Certain, Unknown };

struct InfiniteOrder {
    bool value = false;
    Certainty certainty = Certainty::Unknown;
    std::string reason;
};

/// Infinite order of a non-identity element: certain when phi(w) != 0, when w has
/// infinite abelian image, or in a declared torsion-free group with a NotIdentity verdict.
inline InfiniteOrder has_infinite_order(const GroupPresentation& p, const Word& w, const CohomologyClass& phi,
                                        bool torsion_free, const std::vector<FiniteQuotient>& quotients = {}) {
    if (w.is_identity()) throw std::invalid_argument("has_infinite_order: identity word");
    if (phi.size() == p.generator_count() && !phi(w).is_zero())
        return {true, Certainty::Certain, "phi(w) != 0"};
    if (has_infinite_abelian_image(p, w)) return {true, Certainty::Certain, "infinite image in H_1"};
    if (torsion_free) {
        const auto v = p.is_free() ? oracle_free(p, w) : oracle_quotients(p, w, quotients);
        if (v.value == Verdict::NotIdentity) return {true, Certainty::Certain, "non-identity in a torsion-free group"};
    }
    return {false, Certainty::Unknown, "no certificate"};
}

}  // namespace l2tor

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "l2tor/presentation.hpp"

namespace l2tor {

/// A JSJ piece as user-supplied metadata: hyperbolic volume (0 for Seifert pieces)
/// and whether the class restricts to zero on it.
struct JsjPiece {
    std::string name;
    double volume = 0.0;
    bool phi_restriction_zero = false;
};

/// A value together with where it comes from.
struct Sourced {
    double value = 0.0;
    std::string source;
};

struct CatalogMetadata {
    std::optional<int> genus;
    std::optional<bool> fibered;
    std::optional<Sourced> entropy;       ///< stretch factor of the monodromy (fibered only)
    std::optional<Sourced> volume;        ///< hyperbolic volume of the exterior
    std::string volume_key;               ///< row name in the vendored volume table
    std::optional<Sourced> thurston_norm; ///< x_N(phi) for the default class
    std::optional<Sourced> leading_coefficient;
    bool torsion_free = true;             ///< knot and link groups are torsion free
    bool graph_manifold = false;
    std::vector<JsjPiece> jsj;            ///< empty = not recorded
    std::uint32_t dropped_generator = 0;
    std::optional<std::size_t> dropped_relator;
    bool has_presentation = true;         ///< false for metadata-only records
    std::vector<std::string> notes;
};

struct CatalogEntry {
    GroupPresentation presentation;
    CohomologyClass phi;
    CatalogMetadata meta;
};

namespace catalog_detail {

inline constexpr double vol_4_1 = 2.029883212819307;
inline constexpr double vol_whitehead = 3.663862376708876;
inline constexpr double vol_borromean = 7.327724753417752;

inline CohomologyClass cls(std::initializer_list<std::int64_t> w) {
    CohomologyClass c;
    for (auto x : w) c.weights.emplace_back(x);
    return c;
}

inline GroupPresentation borromean_presentation() {
    const Word a = Word::generator(0), b = Word::generator(1), c = Word::generator(2);
    const Word r = Word::commutator(a, Word::commutator(c, b.inverse()));
    const Word s = Word::commutator(b, Word::commutator(a, c.inverse()));
    return GroupPresentation("borromean", {"a", "b", "c"}, {r, s});
}

// (1/m)-filling of the third component: c l^m = 1 with longitude l = [b, a^-1].
inline GroupPresentation whitehead_presentation(int m) {
    const Word a = Word::generator(0), b = Word::generator(1), c = Word::generator(2);
    const Word l = Word::commutator(b, a.inverse());
    auto p = dehn_fill(borromean_presentation(), c * l.pow(m), "fill(1/" + std::to_string(m) + ")");
    return GroupPresentation(m == 1 ? "whitehead" : "whitehead" + std::to_string(m), p.generators(), p.relators());
}

}  // namespace catalog_detail

inline std::vector<std::string> catalog_names() {
    return {"trefoil", "trefoil-torus", "figure8", "borromean", "whitehead", "whitehead2", "whitehead-double-4_1"};
}

inline CatalogEntry catalog_get(const std::string& name) {
    using namespace catalog_detail;
    CatalogEntry e;
    auto& m = e.meta;
    if (name == "trefoil") {
        e.presentation = GroupPresentation("trefoil", {"a", "b"}, {Word::from_syllables({1, 2, 1, -2, -1, -2})});
        e.phi = cls({1, 1});
        m.genus = 1;
        m.fibered = true;
        m.graph_manifold = true;
        m.thurston_norm = Sourced{1.0, "2g-1 for a fibered knot of genus 1; graph manifold: tau = max{1,t^x}"};
        m.leading_coefficient = Sourced{1.0, "graph manifold exterior: C = 1"};
        m.jsj = {{"seifert(2,3)", 0.0, false}};
        m.dropped_generator = 1;
        m.notes = {"Wirtinger form aba = bab; a,b meridians, phi = abelianization"};
    } else if (name == "trefoil-torus") {
        e.presentation = GroupPresentation("trefoil-torus", {"x", "y"}, {Word::from_syllables({1, 1, -2, -2, -2})});
        e.phi = cls({3, 2});
        m.genus = 1;
        m.fibered = true;
        m.graph_manifold = true;
        m.thurston_norm = Sourced{1.0, "same knot as 'trefoil'"};
        m.leading_coefficient = Sourced{1.0, "graph manifold exterior: C = 1"};
        m.jsj = {{"seifert(2,3)", 0.0, false}};
        m.dropped_generator = 1;
        m.notes = {"torus-knot form x^2 = y^3; phi(x)=3, phi(y)=2 is the abelianization",
                   "remaining Fox entry 1 + x is a two-term element, so tau is rules-exact"};
    } else if (name == "figure8") {
        // a^-1 b a b^-1 a b a^-1 b^-1 a b^-1 (2-bridge form)
        e.presentation = GroupPresentation("figure8", {"a", "b"},
                                           {Word::from_syllables({-1, 2, 1, -2, 1, 2, -1, -2, 1, -2})});
        e.phi = cls({1, 1});
        m.genus = 1;
        m.fibered = true;
        m.entropy = Sourced{(3.0 + std::sqrt(5.0)) / 2.0, "largest root of the Alexander polynomial t^2-3t+1"};
        m.volume = Sourced{vol_4_1, "census volume of 4_1 (data/volumes.csv)"};
        m.volume_key = "4_1";
        m.thurston_norm = Sourced{1.0, "2g-1 for a fibered knot of genus 1"};
        m.leading_coefficient = Sourced{1.0, "fibered hyperbolic: C = 1"};
        m.jsj = {{"4_1", vol_4_1, false}};
        m.dropped_generator = 1;
        m.notes = {"a,b meridians; phi = abelianization; orientation convention not fixed by the source"};
    } else if (name == "borromean") {
        e.presentation = borromean_presentation();
        e.phi = cls({0, -1, 0});
        m.graph_manifold = false;
        m.volume = Sourced{vol_borromean, "census volume (data/volumes.csv)"};
        m.volume_key = "borromean";
        m.thurston_norm = Sourced{1.0, "x(phi) = |alpha|+|beta|+|gamma|"};
        m.leading_coefficient = Sourced{1.0, "C = 1 for every phi != 0"};
        m.jsj = {{"borromean", vol_borromean, false}};
        m.dropped_generator = 1;
        m.notes = {"r = [a,[c,b^-1]], s = [b,[a,c^-1]]; a,b,c meridians",
                   "normalization phi(b) = -1 with alpha = phi(a), gamma = phi(c)"};
    } else if (name == "whitehead" || name == "whitehead2") {
        const int mm = name == "whitehead" ? 1 : 2;
        e.presentation = whitehead_presentation(mm);
        e.phi = cls({0, -1, 0});
        if (mm == 1) {
            m.volume = Sourced{vol_whitehead, "census volume (data/volumes.csv)"};
            m.volume_key = "whitehead";
            m.jsj = {{"whitehead", vol_whitehead, false}};
        }
        m.leading_coefficient = Sourced{1.0, "C = 1 for every phi != 0 (m-Whitehead links)"};
        m.dropped_generator = 1;
        // r is a consequence of s, [c,[b,a^-1]] and the filling relator; dropping it keeps the filling.
        m.dropped_relator = 0;
        m.notes = {"Borromean rings with c l^m = 1, l = [b,a^-1]; gamma = phi(c) = 0 is forced"};
    } else if (name == "whitehead-double-4_1") {
        m.has_presentation = false;
        m.volume_key = "4_1";
        m.leading_coefficient = Sourced{std::exp(vol_4_1 / (6.0 * M_PI)),
                                        "C = exp(vol(E_K)/6pi) for the untwisted Whitehead double of K"};
        m.jsj = {{"E(4_1)", vol_4_1, true}, {"whitehead", vol_whitehead, false}};
        m.notes = {"metadata only: JSJ pieces E(4_1) (class restricts to zero) and the Whitehead link exterior"};
        e.presentation = GroupPresentation("whitehead-double-4_1", {"a"}, {});
        e.phi = cls({1});
    } else {
        throw std::out_of_range("unknown catalog entry '" + name + "'");
    }
    return e;
}

}  // namespace l2tor

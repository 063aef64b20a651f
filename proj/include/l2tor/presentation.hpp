#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "l2tor/rational.hpp"
#include "l2tor/word.hpp"

namespace l2tor {

/// Error in the presentation text format; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Finitely presented group <generators | relators>.
class GroupPresentation {
public:
    GroupPresentation() = default;
    GroupPresentation(std::string name, std::vector<std::string> generators, std::vector<Word> relators)
        : name_(std::move(name)), generators_(std::move(generators)), relators_(std::move(relators)) {
        validate();
    }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<std::string>& generators() const noexcept { return generators_; }
    [[nodiscard]] const std::vector<Word>& relators() const noexcept { return relators_; }
    [[nodiscard]] std::size_t generator_count() const noexcept { return generators_.size(); }
    [[nodiscard]] std::size_t relator_count() const noexcept { return relators_.size(); }
    [[nodiscard]] bool is_free() const noexcept { return relators_.empty(); }

    [[nodiscard]] bool references_valid(const Word& w) const noexcept {
        for (const auto& l : w.letters())
            if (l.gen >= generators_.size()) return false;
        return true;
    }

    [[nodiscard]] std::string word_string(const Word& w) const { return w.to_string(generators_); }

    /// Index of a generator name; throws if absent.
    [[nodiscard]] std::uint32_t index_of(const std::string& g) const {
        for (std::size_t i = 0; i < generators_.size(); ++i)
            if (generators_[i] == g) return static_cast<std::uint32_t>(i);
        throw std::out_of_range("unknown generator '" + g + "'");
    }

    /// Parses a space-separated word: "a b A B", uppercase first letter is the inverse,
    /// optional "^k" suffix.
    [[nodiscard]] Word parse_word(const std::string& text) const {
        std::istringstream in(text);
        std::string tok;
        std::vector<Letter> raw;
        while (in >> tok) raw.push_back(parse_token(tok));
        return Word::reduce(raw);
    }

    /// Presentation with the given relator removed (used to drop a redundant Wirtinger relator).
    [[nodiscard]] GroupPresentation without_relator(std::size_t index) const {
        if (index >= relators_.size()) throw std::out_of_range("relator index out of range");
        auto rels = relators_;
        rels.erase(rels.begin() + static_cast<std::ptrdiff_t>(index));
        return GroupPresentation(name_ + "-r" + std::to_string(index), generators_, std::move(rels));
    }

    friend bool operator==(const GroupPresentation&, const GroupPresentation&) = default;

private:
    Letter parse_token(const std::string& tok) const {
        std::string body = tok;
        std::int32_t power = 1;
        if (const auto caret = tok.find('^'); caret != std::string::npos) {
            body = tok.substr(0, caret);
            try {
                std::size_t pos = 0;
                power = std::stoi(tok.substr(caret + 1), &pos);
                if (pos != tok.size() - caret - 1) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw std::invalid_argument("bad exponent in token '" + tok + "'");
            }
        }
        for (std::size_t i = 0; i < generators_.size(); ++i)
            if (generators_[i] == body) return {static_cast<std::uint32_t>(i), power};
        if (!body.empty() && std::isupper(static_cast<unsigned char>(body[0]))) {
            std::string lower = body;
            lower[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(lower[0])));
            for (std::size_t i = 0; i < generators_.size(); ++i)
                if (generators_[i] == lower) return {static_cast<std::uint32_t>(i), -power};
        }
        throw std::invalid_argument("unknown generator token '" + tok + "'");
    }

    void validate() const {
        std::set<std::string> seen;
        for (const auto& g : generators_) {
            if (g.empty()) throw std::invalid_argument("empty generator name");
            if (!std::islower(static_cast<unsigned char>(g[0])))
                throw std::invalid_argument("generator name '" + g + "' must start with a lowercase letter");
            for (char ch : g)
                if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_')
                    throw std::invalid_argument("generator name '" + g + "' has invalid characters");
            if (!seen.insert(g).second) throw std::invalid_argument("duplicate generator name '" + g + "'");
        }
        for (const auto& r : relators_)
            if (!references_valid(r)) throw std::invalid_argument("relator references an unknown generator");
    }

    std::string name_;
    std::vector<std::string> generators_;
    std::vector<Word> relators_;
};

/// A real cohomology class given by rational values on the generators.
struct CohomologyClass {
    std::vector<Rational> weights;

    [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }
    [[nodiscard]] bool is_zero() const noexcept {
        for (const auto& w : weights)
            if (!w.is_zero()) return false;
        return true;
    }

    /// phi(w) = sum of exponent * weight.
    [[nodiscard]] Rational operator()(const Word& w) const {
        Rational s;
        for (const auto& l : w.letters()) {
            if (l.gen >= weights.size()) throw std::out_of_range("class has no weight for generator");
            s += weights[l.gen] * Rational(l.exp);
        }
        return s;
    }

    [[nodiscard]] CohomologyClass scaled(const Rational& r) const {
        CohomologyClass c = *this;
        for (auto& w : c.weights) w *= r;
        return c;
    }

    /// Least common multiple of the weight denominators.
    [[nodiscard]] std::int64_t common_denominator() const {
        std::int64_t l = 1;
        for (const auto& w : weights) l = std::lcm(l, w.den());
        return l;
    }

    [[nodiscard]] std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < weights.size(); ++i) s += (i ? "," : "") + weights[i].str();
        return s;
    }

    static CohomologyClass parse(const std::string& text) {
        CohomologyClass c;
        std::string norm = text;
        for (auto& ch : norm)
            if (ch == ',') ch = ' ';
        std::istringstream in(norm);
        std::string tok;
        while (in >> tok) c.weights.push_back(Rational::parse(tok));
        return c;
    }

    friend bool operator==(const CohomologyClass&, const CohomologyClass&) = default;
};

/// True iff phi vanishes on every relator. Throws on a length mismatch.
inline bool validate_class(const GroupPresentation& p, const CohomologyClass& phi) {
    if (phi.size() != p.generator_count())
        throw std::invalid_argument("class has " + std::to_string(phi.size()) + " weights but the presentation has " +
                                    std::to_string(p.generator_count()) + " generators");
    for (const auto& r : p.relators())
        if (!phi(r).is_zero()) return false;
    return true;
}

/// Integral basis of Hom(G, Q): the rational kernel of the relator exponent-sum matrix,
/// each vector cleared of denominators. Reduced echelon form, so the result is canonical.
inline std::vector<CohomologyClass> cohomology_basis(const GroupPresentation& p) {
    const std::size_t n = p.generator_count();
    std::vector<std::vector<Rational>> rows;
    for (const auto& r : p.relators()) {
        std::vector<Rational> v(n, Rational(0));
        for (const auto& l : r.letters()) v[l.gen] += Rational(l.exp);
        rows.push_back(std::move(v));
    }
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < n && rank < rows.size(); ++c) {
        std::size_t piv = rank;
        while (piv < rows.size() && rows[piv][c].is_zero()) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        const Rational inv = Rational(1) / rows[rank][c];
        for (auto& x : rows[rank]) x *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != rank && !rows[i][c].is_zero()) {
                const Rational f = rows[i][c];
                for (std::size_t j = 0; j < n; ++j) rows[i][j] -= f * rows[rank][j];
            }
        pivots.push_back(c);
        ++rank;
    }
    std::vector<CohomologyClass> basis;
    for (std::size_t f = 0; f < n; ++f) {
        if (std::find(pivots.begin(), pivots.end(), f) != pivots.end()) continue;
        CohomologyClass c{std::vector<Rational>(n, Rational(0))};
        c.weights[f] = Rational(1);
        for (std::size_t i = 0; i < pivots.size(); ++i) c.weights[pivots[i]] = -rows[i][f];
        basis.push_back(c.scaled(Rational(c.common_denominator())));
    }
    return basis;
}

/// Appends the filling relator; generators and existing relators are untouched.
inline GroupPresentation dehn_fill(const GroupPresentation& p, const Word& slope_relator,
                                   const std::string& annotation = "filled") {
    if (!p.references_valid(slope_relator)) throw std::invalid_argument("slope relator references unknown generator");
    auto rels = p.relators();
    rels.push_back(slope_relator);
    return GroupPresentation(p.name() + "+" + annotation, p.generators(), std::move(rels));
}

/// True iff the exponent-sum vector of w is outside the rational span of the
/// relator exponent-sum vectors, i.e. w has infinite order in H_1(G; Q).
inline bool has_infinite_abelian_image(const GroupPresentation& p, const Word& w) {
    const std::size_t n = p.generator_count();
    std::vector<std::vector<Rational>> rows;
    for (const auto& r : p.relators()) {
        auto s = r.exponent_sums(n);
        rows.emplace_back(s.begin(), s.end());
    }
    // Echelon basis in insertion order: each row is zero at all earlier pivots.
    std::vector<std::vector<Rational>> basis;
    std::vector<std::size_t> pivots;
    auto reduce_against = [&](std::vector<Rational>& v) {
        for (std::size_t b = 0; b < basis.size(); ++b) {
            const auto piv = pivots[b];
            if (v[piv].is_zero()) continue;
            const Rational f = v[piv] / basis[b][piv];
            for (std::size_t k = 0; k < n; ++k) v[k] -= f * basis[b][k];
        }
    };
    for (auto& row : rows) {
        reduce_against(row);
        for (std::size_t k = 0; k < n; ++k) {
            if (!row[k].is_zero()) {
                basis.push_back(row);
                pivots.push_back(k);
                break;
            }
        }
    }
    auto target = w.exponent_sums(n);
    std::vector<Rational> v(target.begin(), target.end());
    reduce_against(v);
    for (const auto& x : v)
        if (!x.is_zero()) return true;
    return false;
}

/// Reads the text format:
///   gens: a b c
///   rel: a b A B
///   phi: 1 -1 0        (optional; rationals as p/q)
/// '#' starts a comment. An optional "name:" line sets the name.
struct PresentationFile {
    GroupPresentation presentation;
    std::optional<CohomologyClass> phi;
};

inline PresentationFile parse_presentation(std::istream& in, const std::string& default_name = "input") {
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::vector<std::string>> gens;
    std::vector<std::pair<std::size_t, std::string>> rel_lines;
    std::optional<std::pair<std::size_t, std::string>> phi_line;
    std::string name = default_name;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError(lineno, "expected 'key: value'");
        std::string key = line.substr(first, colon - first);
        while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
        const std::string value = line.substr(colon + 1);
        if (key == "gens") {
            if (gens) throw ParseError(lineno, "duplicate gens line");
            if (!rel_lines.empty() || phi_line) throw ParseError(lineno, "gens must precede rel/phi lines");
            std::istringstream vs(value);
            std::vector<std::string> g;
            std::string tok;
            while (vs >> tok) g.push_back(tok);
            if (g.empty()) throw ParseError(lineno, "no generators");
            gens = std::move(g);
        } else if (key == "rel") {
            if (!gens) throw ParseError(lineno, "rel before gens");
            rel_lines.emplace_back(lineno, value);
        } else if (key == "phi") {
            if (!gens) throw ParseError(lineno, "phi before gens");
            if (phi_line) throw ParseError(lineno, "duplicate phi line");
            phi_line = std::make_pair(lineno, value);
        } else if (key == "name") {
            std::istringstream vs(value);
            vs >> name;
        } else {
            throw ParseError(lineno, "unknown key '" + key + "'");
        }
    }
    if (!gens) throw ParseError(lineno == 0 ? 1 : lineno, "missing gens line");
    GroupPresentation skeleton;
    try {
        skeleton = GroupPresentation(name, *gens, {});
    } catch (const std::invalid_argument& e) {
        throw ParseError(1, e.what());
    }
    std::vector<Word> rels;
    for (const auto& [ln, text] : rel_lines) {
        try {
            rels.push_back(skeleton.parse_word(text));
        } catch (const std::invalid_argument& e) {
            throw ParseError(ln, e.what());
        }
    }
    PresentationFile out{GroupPresentation(name, *gens, std::move(rels)), std::nullopt};
    if (phi_line) {
        try {
            auto c = CohomologyClass::parse(phi_line->second);
            if (c.size() != out.presentation.generator_count())
                throw std::invalid_argument("phi has " + std::to_string(c.size()) + " entries, expected " +
                                            std::to_string(out.presentation.generator_count()));
            out.phi = std::move(c);
        } catch (const std::invalid_argument& e) {
            throw ParseError(phi_line->first, e.what());
        }
    }
    return out;
}

inline PresentationFile load_presentation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open presentation file '" + path + "'");
    auto stem = path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
    if (const auto dot = stem.find('.'); dot != std::string::npos) stem.erase(dot);
    return parse_presentation(in, stem);
}

/// Writes the text format; each letter is printed as a separate token.
inline std::string format_presentation(const GroupPresentation& p, const std::optional<CohomologyClass>& phi = {}) {
    std::ostringstream os;
    os << "name: " << p.name() << "\n";
    os << "gens:";
    for (const auto& g : p.generators()) os << ' ' << g;
    os << "\n";
    for (const auto& r : p.relators()) {
        os << "rel:";
        for (const auto& s : r.syllables()) {
            std::string tok = p.generators()[s.gen];
            if (s.exp < 0) tok[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(tok[0])));
            os << ' ' << tok;
        }
        os << "\n";
    }
    if (phi) {
        os << "phi:";
        for (const auto& w : phi->weights) os << ' ' << w.str();
        os << "\n";
    }
    return os.str();
}

}  // namespace l2tor

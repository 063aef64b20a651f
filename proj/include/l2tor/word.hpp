#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace l2tor {

/// One run g^e of a word. Exponent is never zero inside a Word.
struct Letter {
    std::uint32_t gen = 0;
    std::int32_t exp = 1;

    friend constexpr bool operator==(const Letter&, const Letter&) = default;
    friend constexpr auto operator<=>(const Letter&, const Letter&) = default;
};

/// Freely reduced word in a free group, stored run-length encoded.
/// Invariant: adjacent letters have distinct generators and nonzero exponents.
class Word {
public:
    Word() = default;

    static Word generator(std::uint32_t gen, std::int32_t exp = 1) {
        Word w;
        if (exp != 0) w.letters_.push_back({gen, exp});
        return w;
    }

    /// Free reduction of an arbitrary letter sequence (merges runs, drops zero exponents).
    static Word reduce(std::span<const Letter> raw) {
        Word w;
        for (const auto& l : raw) w.push_back(l);
        return w;
    }

    /// Word from signed syllables: +k is generator k-1, -k its inverse.
    static Word from_syllables(std::initializer_list<int> syllables) {
        Word w;
        for (int s : syllables) {
            if (s == 0) throw std::invalid_argument("syllable 0 is not a generator");
            w.push_back({static_cast<std::uint32_t>(std::abs(s) - 1), s > 0 ? 1 : -1});
        }
        return w;
    }

    [[nodiscard]] std::span<const Letter> letters() const noexcept { return letters_; }
    [[nodiscard]] bool is_identity() const noexcept { return letters_.empty(); }
    [[nodiscard]] std::size_t runs() const noexcept { return letters_.size(); }

    /// Total syllable length sum |e_i|.
    [[nodiscard]] std::int64_t length() const noexcept {
        std::int64_t n = 0;
        for (const auto& l : letters_) n += std::abs(l.exp);
        return n;
    }

    [[nodiscard]] std::int64_t exponent_sum(std::uint32_t gen) const noexcept {
        std::int64_t s = 0;
        for (const auto& l : letters_)
            if (l.gen == gen) s += l.exp;
        return s;
    }

    [[nodiscard]] std::vector<std::int64_t> exponent_sums(std::size_t generator_count) const {
        std::vector<std::int64_t> s(generator_count, 0);
        for (const auto& l : letters_) {
            if (l.gen >= generator_count) throw std::out_of_range("letter references unknown generator");
            s[l.gen] += l.exp;
        }
        return s;
    }

    [[nodiscard]] std::uint32_t max_generator() const noexcept {
        std::uint32_t m = 0;
        for (const auto& l : letters_) m = std::max(m, l.gen);
        return m;
    }

    /// Expanded syllable form: each entry is (gen, +1) or (gen, -1).
    [[nodiscard]] std::vector<Letter> syllables() const {
        std::vector<Letter> out;
        out.reserve(static_cast<std::size_t>(length()));
        for (const auto& l : letters_)
            for (std::int32_t k = 0; k < std::abs(l.exp); ++k) out.push_back({l.gen, l.exp > 0 ? 1 : -1});
        return out;
    }

    [[nodiscard]] Word inverse() const {
        Word w;
        w.letters_.reserve(letters_.size());
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back({it->gen, -it->exp});
        return w;
    }

    [[nodiscard]] Word pow(std::int64_t n) const {
        Word base = n < 0 ? inverse() : *this;
        Word out;
        for (std::int64_t k = 0; k < (n < 0 ? -n : n); ++k) out *= base;
        return out;
    }

    Word& operator*=(const Word& rhs) {
        for (const auto& l : rhs.letters_) push_back(l);
        return *this;
    }
    friend Word operator*(Word lhs, const Word& rhs) { return lhs *= rhs; }

    /// Commutator [x,y] = x y x^-1 y^-1.
    static Word commutator(const Word& x, const Word& y) { return x * y * x.inverse() * y.inverse(); }

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word& x, const Word& y) {
        return std::lexicographical_compare_three_way(x.letters_.begin(), x.letters_.end(), y.letters_.begin(),
                                                      y.letters_.end());
    }

    /// Text form "a^2.b^-1" over the given names ("1" for the identity).
    [[nodiscard]] std::string to_string(std::span<const std::string> names) const {
        if (letters_.empty()) return "1";
        std::string s;
        for (std::size_t i = 0; i < letters_.size(); ++i) {
            if (i) s += '.';
            s += generator_name(names, letters_[i].gen);
            if (letters_[i].exp != 1) s += "^" + std::to_string(letters_[i].exp);
        }
        return s;
    }

    static std::string generator_name(std::span<const std::string> names, std::uint32_t gen) {
        if (gen < names.size()) return names[gen];
        if (gen < 26 && names.empty()) return std::string(1, static_cast<char>('a' + gen));
        return "g" + std::to_string(gen);
    }

private:
    void push_back(Letter l) {
        if (l.exp == 0) return;
        if (!letters_.empty() && letters_.back().gen == l.gen) {
            letters_.back().exp += l.exp;
            if (letters_.back().exp == 0) letters_.pop_back();
            return;
        }
        letters_.push_back(l);
    }

    std::vector<Letter> letters_;
};

/// Same as Word::reduce; named for the operation it performs.
inline Word free_reduce(std::span<const Letter> raw) { return Word::reduce(raw); }

struct WordHash {
    std::size_t operator()(const Word& w) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (const auto& l : w.letters()) {
            h ^= l.gen;
            h *= 1099511628211ULL;
            h ^= static_cast<std::uint32_t>(l.exp);
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace l2tor

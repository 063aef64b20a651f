#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "l2tor/presentation.hpp"
#include "l2tor/wordproblem.hpp"

namespace l2tor {

using Complex = std::complex<double>;

/// Default cap on the support of a product (terms).
inline constexpr std::size_t default_support_cap = 1'000'000;

class SupportCapExceeded : public std::length_error {
public:
    explicit SupportCapExceeded(std::size_t cap)
        : std::length_error("group-ring support exceeds cap of " + std::to_string(cap) + " terms") {}
};

namespace gr_detail {

inline bool is_zero(const Rational& x) { return x.is_zero(); }
inline bool is_zero(const Complex& x) { return x == Complex{}; }
inline Rational conj(const Rational& x) { return x; }
inline Complex conj(const Complex& x) { return std::conj(x); }
inline double magnitude(const Rational& x) { return std::fabs(x.to_double()); }
inline double magnitude(const Complex& x) { return std::abs(x); }

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
// Coefficient text without its sign; sign returned separately.
inline std::pair<bool, std::string> coeff_text(const Rational& x) { return {x.num() < 0, abs(x).str()}; }
inline std::pair<bool, std::string> coeff_text(const Complex& x) {
    if (x.imag() == 0.0) return {x.real() < 0, fmt_double(std::fabs(x.real()))};
    return {false, "(" + fmt_double(x.real()) + (x.imag() < 0 ? "" : "+") + fmt_double(x.imag()) + "i)"};
}

}  // namespace gr_detail

/// Finitely supported sum of group elements with coefficients T (Rational or Complex).
/// Keys are freely reduced words; group relations enter only through the trace oracle.
template <typename T>
class GroupRingElement {
public:
    using Coeff = T;
    using Terms = std::map<Word, T>;

    GroupRingElement() = default;
    static GroupRingElement scalar(const T& c) { return monomial(c, Word{}); }
    static GroupRingElement one() { return scalar(T(1)); }
    static GroupRingElement monomial(const T& c, const Word& g) {
        GroupRingElement x;
        x.add_term(g, c);
        return x;
    }
    static GroupRingElement group(const Word& g) { return monomial(T(1), g); }

    [[nodiscard]] const Terms& terms() const noexcept { return terms_; }
    [[nodiscard]] std::size_t support_size() const noexcept { return terms_.size(); }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }

    [[nodiscard]] T coefficient(const Word& g) const {
        auto it = terms_.find(g);
        return it == terms_.end() ? T(0) : it->second;
    }

    void add_term(const Word& g, const T& c) {
        if (gr_detail::is_zero(c)) return;
        auto [it, fresh] = terms_.try_emplace(g, c);
        if (!fresh) {
            it->second += c;
            if (gr_detail::is_zero(it->second)) terms_.erase(it);
        }
    }

    GroupRingElement& operator+=(const GroupRingElement& y) {
        for (const auto& [g, c] : y.terms_) add_term(g, c);
        return *this;
    }
    GroupRingElement& operator-=(const GroupRingElement& y) {
        for (const auto& [g, c] : y.terms_) add_term(g, -c);
        return *this;
    }
    friend GroupRingElement operator+(GroupRingElement x, const GroupRingElement& y) { return x += y; }
    friend GroupRingElement operator-(GroupRingElement x, const GroupRingElement& y) { return x -= y; }
    friend GroupRingElement operator-(const GroupRingElement& x) { return x.scaled(T(-1)); }

    [[nodiscard]] GroupRingElement scaled(const T& s) const {
        GroupRingElement r;
        if (gr_detail::is_zero(s)) return r;
        for (const auto& [g, c] : terms_) r.terms_.emplace(g, c * s);
        return r;
    }

    /// Convolution product; throws SupportCapExceeded if the result would exceed `cap` terms.
    [[nodiscard]] GroupRingElement mul(const GroupRingElement& y, std::size_t cap = default_support_cap) const {
        GroupRingElement r;
        for (const auto& [g, c] : terms_)
            for (const auto& [h, d] : y.terms_) {
                r.add_term(g * h, c * d);
                if (r.terms_.size() > cap) throw SupportCapExceeded(cap);
            }
        return r;
    }
    friend GroupRingElement operator*(const GroupRingElement& x, const GroupRingElement& y) { return x.mul(y); }

    /// lambda g -> conj(lambda) g^-1.
    [[nodiscard]] GroupRingElement adjoint() const {
        GroupRingElement r;
        for (const auto& [g, c] : terms_) r.terms_.emplace(g.inverse(), gr_detail::conj(c));
        return r;
    }

    /// Sum of |coefficients|; bounds the operator norm of right multiplication.
    [[nodiscard]] double l1_norm() const {
        double s = 0;
        for (const auto& [g, c] : terms_) s += gr_detail::magnitude(c);
        return s;
    }

    /// Canonical text "c*word + c*word - ..." in word order; "0" when empty.
    [[nodiscard]] std::string str(std::span<const std::string> names = {}) const {
        if (terms_.empty()) return "0";
        std::string s;
        bool first = true;
        for (const auto& [g, c] : terms_) {
            auto [neg, txt] = gr_detail::coeff_text(c);
            if (first) s += neg ? "-" : "";
            else s += neg ? " - " : " + ";
            s += txt + "*" + g.to_string(names);
            first = false;
        }
        return s;
    }

    friend bool operator==(const GroupRingElement&, const GroupRingElement&) = default;

private:
    Terms terms_;
};

using ExactElement = GroupRingElement<Rational>;
using Element = GroupRingElement<Complex>;

inline Element to_complex(const ExactElement& x) {
    Element r;
    for (const auto& [g, c] : x.terms()) r.add_term(g, Complex(c.to_double(), 0.0));
    return r;
}

/// Dense matrix of group-ring elements.
template <typename T>
class GroupRingMatrix {
public:
    GroupRingMatrix() = default;
    GroupRingMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {}

    static GroupRingMatrix identity(std::size_t n) {
        GroupRingMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = GroupRingElement<T>::one();
        return m;
    }
    static GroupRingMatrix single(const GroupRingElement<T>& x) {
        GroupRingMatrix m(1, 1);
        m(0, 0) = x;
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }
    GroupRingElement<T>& operator()(std::size_t i, std::size_t j) { return e_.at(i * cols_ + j); }
    const GroupRingElement<T>& operator()(std::size_t i, std::size_t j) const { return e_.at(i * cols_ + j); }

    friend GroupRingMatrix operator+(const GroupRingMatrix& x, const GroupRingMatrix& y) {
        x.check_same(y);
        GroupRingMatrix r = x;
        for (std::size_t k = 0; k < r.e_.size(); ++k) r.e_[k] += y.e_[k];
        return r;
    }
    friend GroupRingMatrix operator-(const GroupRingMatrix& x, const GroupRingMatrix& y) {
        x.check_same(y);
        GroupRingMatrix r = x;
        for (std::size_t k = 0; k < r.e_.size(); ++k) r.e_[k] -= y.e_[k];
        return r;
    }
    [[nodiscard]] GroupRingMatrix mul(const GroupRingMatrix& y, std::size_t cap = default_support_cap) const {
        if (cols_ != y.rows_) throw std::invalid_argument("matrix product dimension mismatch");
        GroupRingMatrix r(rows_, y.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < y.cols_; ++j)
                for (std::size_t k = 0; k < cols_; ++k) {
                    if ((*this)(i, k).is_zero() || y(k, j).is_zero()) continue;
                    r(i, j) += (*this)(i, k).mul(y(k, j), cap);
                    if (r(i, j).support_size() > cap) throw SupportCapExceeded(cap);
                }
        return r;
    }
    friend GroupRingMatrix operator*(const GroupRingMatrix& x, const GroupRingMatrix& y) { return x.mul(y); }

    /// Conjugate transpose with entrywise adjoint.
    [[nodiscard]] GroupRingMatrix adjoint() const {
        GroupRingMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j).adjoint();
        return r;
    }
    [[nodiscard]] GroupRingMatrix transpose() const {
        GroupRingMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    [[nodiscard]] GroupRingMatrix without_column(std::size_t j) const {
        if (j >= cols_) throw std::out_of_range("column index out of range");
        GroupRingMatrix r(rows_, cols_ - 1);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0, c = 0; k < cols_; ++k)
                if (k != j) r(i, c++) = (*this)(i, k);
        return r;
    }
    [[nodiscard]] GroupRingMatrix without_row(std::size_t i) const {
        if (i >= rows_) throw std::out_of_range("row index out of range");
        GroupRingMatrix r(rows_ - 1, cols_);
        for (std::size_t k = 0, rr = 0; k < rows_; ++k)
            if (k != i) {
                for (std::size_t j = 0; j < cols_; ++j) r(rr, j) = (*this)(k, j);
                ++rr;
            }
        return r;
    }
    /// Submatrix on the given row and column index lists (in the given order).
    [[nodiscard]] GroupRingMatrix select(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const {
        GroupRingMatrix r(rs.size(), cs.size());
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (std::size_t j = 0; j < cs.size(); ++j) r(i, j) = (*this)(rs.at(i), cs.at(j));
        return r;
    }

    /// Schur-test bound sqrt(max row l1 * max column l1) on the operator norm.
    [[nodiscard]] double opnorm_bound() const {
        double row = 0, col = 0;
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j).l1_norm();
            row = std::max(row, s);
        }
        for (std::size_t j = 0; j < cols_; ++j) {
            double s = 0;
            for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, j).l1_norm();
            col = std::max(col, s);
        }
        return std::sqrt(row * col);
    }

    [[nodiscard]] std::string str(std::span<const std::string> names = {}) const {
        std::string s;
        for (std::size_t i = 0; i < rows_; ++i) {
            s += "[";
            for (std::size_t j = 0; j < cols_; ++j) s += (j ? " | " : "") + (*this)(i, j).str(names);
            s += "]\n";
        }
        return s;
    }

    friend bool operator==(const GroupRingMatrix&, const GroupRingMatrix&) = default;

private:
    void check_same(const GroupRingMatrix& y) const {
        if (rows_ != y.rows_ || cols_ != y.cols_) throw std::invalid_argument("matrix dimension mismatch");
    }
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<GroupRingElement<T>> e_;
};

using ExactMatrix = GroupRingMatrix<Rational>;
using Matrix = GroupRingMatrix<Complex>;

inline Matrix to_complex(const ExactMatrix& m) {
    Matrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = to_complex(m(i, j));
    return r;
}

// ---- Fox calculus ----

/// Free derivative d r / d g_i with integer coefficients.
inline ExactElement fox_derivative(const Word& r, std::uint32_t i) {
    ExactElement d;
    Word prefix;
    for (const auto& s : r.syllables()) {
        if (s.gen == i) {
            if (s.exp > 0) d.add_term(prefix, Rational(1));
            else d.add_term(prefix * Word::generator(i, -1), Rational(-1));
        }
        prefix *= Word::generator(s.gen, s.exp);
    }
    return d;
}

/// Rows = relators, columns = generators.
inline ExactMatrix fox_matrix(const GroupPresentation& p) {
    ExactMatrix m(p.relator_count(), p.generator_count());
    for (std::size_t i = 0; i < p.relator_count(); ++i)
        for (std::uint32_t j = 0; j < p.generator_count(); ++j) m(i, j) = fox_derivative(p.relators()[i], j);
    return m;
}

/// Fundamental identity residual sum_j (dr/dg_j)(g_j - 1) - (r - 1), exactly zero in the free group ring.
inline ExactElement fox_identity_residual(const Word& r, std::size_t generator_count) {
    ExactElement lhs;
    for (std::uint32_t j = 0; j < generator_count; ++j)
        lhs += fox_derivative(r, j) * (ExactElement::group(Word::generator(j)) - ExactElement::one());
    return lhs - (ExactElement::group(r) - ExactElement::one());
}

// ---- kappa twist ----

struct TwistParameters {
    CohomologyClass phi;
    double t = 1.0;
};

/// lambda g -> lambda t^phi(g) g.
template <typename T>
Element kappa_twist(const GroupRingElement<T>& x, const TwistParameters& tw) {
    if (!(tw.t > 0)) throw std::invalid_argument("twist parameter t must be positive");
    Element r;
    for (const auto& [g, c] : x.terms()) {
        const double f = std::pow(tw.t, tw.phi(g).to_double());
        if constexpr (std::is_same_v<T, Rational>) r.add_term(g, Complex(c.to_double() * f, 0.0));
        else r.add_term(g, c * f);
    }
    return r;
}

template <typename T>
Matrix kappa_twist(const GroupRingMatrix<T>& m, const TwistParameters& tw) {
    Matrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = kappa_twist(m(i, j), tw);
    return r;
}

/// Exact twist for rational t and integral phi on the support.
inline ExactElement kappa_twist_exact(const ExactElement& x, const CohomologyClass& phi, const Rational& t) {
    ExactElement r;
    for (const auto& [g, c] : x.terms()) {
        const Rational e = phi(g);
        if (!e.is_integer()) throw std::invalid_argument("exact twist needs integral phi on the support");
        Rational f(1);
        const Rational base = e.num() < 0 ? Rational(1) / t : t;
        for (std::int64_t k = 0; k < (e.num() < 0 ? -e.num() : e.num()); ++k) f *= base;
        r.add_term(g, c * f);
    }
    return r;
}

// ---- trace ----

/// Decides whether a word is the identity (see wordproblem.hpp).
using IdentityOracle = std::function<Verdict(const Word&)>;

inline IdentityOracle free_oracle() {
    return [](const Word& w) { return w.is_identity() ? Verdict::Identity : Verdict::NotIdentity; };
}
inline IdentityOracle abelian_oracle(std::size_t rank) {
    return [rank](const Word& w) { return oracle_abelian(w, rank).value; };
}
inline IdentityOracle quotient_oracle(const GroupPresentation& p, std::vector<FiniteQuotient> qs, int depth = 2) {
    return [p, qs = std::move(qs), depth](const Word& w) { return oracle_quotients(p, w, qs, depth).value; };
}

struct TraceValue {
    Complex value;
    bool heuristic = false;  ///< some Unknown word carried a nonzero coefficient
};

template <typename T>
TraceValue trace(const GroupRingElement<T>& x, const IdentityOracle& oracle) {
    TraceValue tv;
    for (const auto& [g, c] : x.terms()) {
        const auto v = g.is_identity() ? Verdict::Identity : oracle(g);
        if (v == Verdict::Unknown) tv.heuristic = true;
        if (v != Verdict::Identity) continue;
        if constexpr (std::is_same_v<T, Rational>) tv.value += c.to_double();
        else tv.value += c;
    }
    return tv;
}

template <typename T>
TraceValue trace(const GroupRingMatrix<T>& m, const IdentityOracle& oracle) {
    if (!m.is_square()) throw std::invalid_argument("trace of a non-square matrix");
    TraceValue tv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto d = trace(m(i, i), oracle);
        tv.value += d.value;
        tv.heuristic = tv.heuristic || d.heuristic;
    }
    return tv;
}

// ---- Neumann series ----

template <typename T>
struct NeumannResult {
    GroupRingElement<T> value;
    double residual_bound = 0;  ///< ||y||^(n+1) / (1 - ||y||)
};

/// Truncated inverse sum_{n=0}^{order} y^n of x = 1 - y; requires l1(y) < 1.
template <typename T>
NeumannResult<T> neumann_inverse(const GroupRingElement<T>& x, int order, std::size_t cap = default_support_cap) {
    const auto y = GroupRingElement<T>::one() - x;
    const double q = y.l1_norm();
    if (!(q < 1.0)) throw std::domain_error("neumann_inverse: ||1 - x||_1 = " + std::to_string(q) + " >= 1");
    NeumannResult<T> r{GroupRingElement<T>::one(), 0.0};
    auto power = GroupRingElement<T>::one();
    for (int n = 1; n <= order; ++n) {
        power = power.mul(y, cap);
        r.value += power;
    }
    r.residual_bound = std::pow(q, order + 1) / (1.0 - q);
    return r;
}

template <typename T>
struct NeumannMatrixResult {
    GroupRingMatrix<T> value;
    double residual_bound = 0;
};

/// Matrix version for C = I - Y with opnorm_bound(Y) < 1.
template <typename T>
NeumannMatrixResult<T> neumann_inverse(const GroupRingMatrix<T>& c, int order, std::size_t cap = default_support_cap) {
    if (!c.is_square()) throw std::invalid_argument("neumann_inverse of a non-square matrix");
    const auto id = GroupRingMatrix<T>::identity(c.rows());
    const auto y = id - c;
    const double q = y.opnorm_bound();
    if (!(q < 1.0)) throw std::domain_error("neumann_inverse: ||I - C|| bound " + std::to_string(q) + " >= 1");
    NeumannMatrixResult<T> r{id, 0.0};
    auto power = id;
    for (int n = 1; n <= order; ++n) {
        power = power.mul(y, cap);
        r.value = r.value + power;
    }
    r.residual_bound = std::pow(q, order + 1) / (1.0 - q);
    return r;
}

}  // namespace l2tor

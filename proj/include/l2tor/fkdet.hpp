#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "l2tor/groupring.hpp"
#include "l2tor/quotient.hpp"

namespace l2tor {

enum class DetMethod { Rules, Quotient, Series, SchurComposite };

inline const char* to_string(DetMethod m) {
    switch (m) {
        case DetMethod::Rules: return "rules";
        case DetMethod::Quotient: return "quotient";
        case DetMethod::Series: return "series";
        default: return "schur-composite";
    }
}

inline DetMethod parse_det_method(const std::string& s) {
    if (s == "rules") return DetMethod::Rules;
    if (s == "quotient") return DetMethod::Quotient;
    if (s == "series") return DetMethod::Series;
    if (s == "schur-composite") return DetMethod::SchurComposite;
    throw std::invalid_argument("unknown determinant method '" + s + "'");
}

/// A Fuglede-Kadison determinant value with how it was obtained.
struct DeterminantEstimate {
    double value = 0.0;
    DetMethod method = DetMethod::Rules;
    std::map<std::string, double> params;
    std::vector<double> diagnostics;  ///< partial values (series) / family sequence (quotient)
    std::vector<std::string> notes;   ///< rule trace, truncation notes
    double kernel_defect = 0.0;
    double log_uncertainty = 0.0;     ///< convergence spread |log v_last - log v_prev| (families)
    bool heuristic = false;
};

// ---------------------------------------------------------------- rules

/// Decides whether a (non-identity) element certainly has infinite order.
using InfiniteOrderTest = std::function<bool(const Word&)>;

inline InfiniteOrderTest infinite_order_test(const GroupPresentation& p, const CohomologyClass& phi,
                                             bool torsion_free, std::vector<FiniteQuotient> quotients = {}) {
    return [p, phi, torsion_free, qs = std::move(quotients)](const Word& w) {
        if (w.is_identity()) return false;
        const auto r = has_infinite_order(p, w, phi, torsion_free, qs);
        return r.value && r.certainty == Certainty::Certain;
    };
}

/// In a free group every non-identity element has infinite order.
inline InfiniteOrderTest free_group_infinite_order() {
    return [](const Word& w) { return !w.is_identity(); };
}

struct RulesResult {
    double value = 0.0;
    std::vector<std::string> trace;
};

namespace rules_detail {

inline std::string gens_used(const Element& x) {
    std::vector<bool> used;
    for (const auto& [g, c] : x.terms())
        for (const auto& l : g.letters()) {
            if (used.size() <= l.gen) used.resize(l.gen + 1, false);
            used[l.gen] = true;
        }
    std::string s;
    for (std::size_t i = 0; i < used.size(); ++i)
        if (used[i]) s += (s.empty() ? "" : ",") + Word::generator_name({}, static_cast<std::uint32_t>(i));
    return "<" + s + ">";
}

// 1x1 recognizers: monomial (|lambda|) and two-term lambda g + mu h with g^-1 h of infinite order.
inline std::optional<RulesResult> entry(const Element& x, const InfiniteOrderTest& inf) {
    RulesResult r;
    if (x.is_zero()) {
        r.trace.push_back("zero entry: det 0");
        return r;
    }
    const auto& t = x.terms();
    if (t.size() == 1) {
        r.value = std::abs(t.begin()->second);
        r.trace.push_back("monomial: det(lambda g) = |lambda| = " + std::to_string(r.value));
        return r;
    }
    if (t.size() == 2) {
        const auto& [g, lam] = *t.begin();
        const auto& [h, mu] = *std::next(t.begin());
        const Word d = g.inverse() * h;
        if (!inf(d)) return std::nullopt;
        r.value = std::max(std::abs(lam), std::abs(mu));
        r.trace.push_back("two-term: lambda g (1 + (mu/lambda) g^-1 h), g^-1 h infinite order -> max(|lambda|,|mu|) = " +
                          std::to_string(r.value) + " [support in " + gens_used(x) + "]");
        return r;
    }
    return std::nullopt;
}

// Maximum bipartite matching rows -> columns over nonzero entries (augmenting paths).
inline std::optional<std::vector<int>> perfect_matching(const Matrix& m) {
    const std::size_t n = m.rows();
    std::vector<int> col_of(n, -1), row_of(n, -1);
    std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t i, std::vector<bool>& seen) {
        for (std::size_t j = 0; j < n; ++j) {
            if (m(i, j).is_zero() || seen[j]) continue;
            seen[j] = true;
            if (row_of[j] < 0 || augment(static_cast<std::size_t>(row_of[j]), seen)) {
                row_of[j] = static_cast<int>(i);
                col_of[i] = static_cast<int>(j);
                return true;
            }
        }
        return false;
    };
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<bool> seen(n, false);
        if (!augment(i, seen)) return std::nullopt;
    }
    return col_of;
}

// Tarjan SCC over rows: i -> k when entry (i, col_of[k]) is nonzero.
inline std::vector<std::vector<std::size_t>> row_blocks(const Matrix& m, const std::vector<int>& col_of) {
    const std::size_t n = m.rows();
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> comps;
    int counter = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on[v] = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == v || m(v, static_cast<std::size_t>(col_of[k])).is_zero()) continue;
            if (index[k] < 0) {
                visit(k);
                low[v] = std::min(low[v], low[k]);
            } else if (on[k]) {
                low[v] = std::min(low[v], index[k]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> comp;
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on[w] = false;
                comp.push_back(w);
            } while (w != v);
            comps.push_back(std::move(comp));
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (index[v] < 0) visit(v);
    return comps;
}

}  // namespace rules_detail

/// Exact determinant by the rules: monomials, two-term elements with an infinite-order
/// quotient, zero / structurally singular matrices, and block-triangular forms (after any
/// row/column permutation, which also covers the transpose) whose diagonal blocks are
/// recognized. Returns nothing when no pattern applies.
inline std::optional<RulesResult> det_rules(const Matrix& m, const InfiniteOrderTest& inf) {
    if (!m.is_square()) throw std::invalid_argument("det_rules: matrix is not square");
    const std::size_t n = m.rows();
    if (n == 0) return RulesResult{1.0, {"empty matrix: det 1"}};
    if (n == 1) return rules_detail::entry(m(0, 0), inf);
    const auto col_of = rules_detail::perfect_matching(m);
    if (!col_of) return RulesResult{0.0, {"no perfect matching of nonzero entries: not injective, det 0"}};
    const auto blocks = rules_detail::row_blocks(m, *col_of);
    RulesResult r{1.0, {}};
    r.trace.push_back("block-triangular after permutation: " + std::to_string(blocks.size()) + " diagonal block(s)");
    for (const auto& b : blocks) {
        if (b.size() != 1) return std::nullopt;
        const auto i = b.front();
        auto e = rules_detail::entry(m(i, static_cast<std::size_t>((*col_of)[i])), inf);
        if (!e) return std::nullopt;
        r.value *= e->value;
        for (auto& s : e->trace) r.trace.push_back("  " + s);
    }
    return r;
}

inline std::optional<RulesResult> det_rules(const ExactMatrix& m, const InfiniteOrderTest& inf) {
    return det_rules(to_complex(m), inf);
}

/// Multiplicativity on an explicit factorization supplied by the caller.
inline std::optional<RulesResult> det_rules_product(const std::vector<Matrix>& factors, const InfiniteOrderTest& inf) {
    RulesResult r{1.0, {"explicit factorization into " + std::to_string(factors.size()) + " factor(s)"}};
    for (const auto& f : factors) {
        auto d = det_rules(f, inf);
        if (!d) return std::nullopt;
        r.value *= d->value;
        for (auto& s : d->trace) r.trace.push_back("  " + s);
    }
    return r;
}

inline DeterminantEstimate to_estimate(const RulesResult& r) {
    DeterminantEstimate e;
    e.value = r.value;
    e.method = DetMethod::Rules;
    e.notes = r.trace;
    return e;
}

// ---------------------------------------------------------------- finite quotients

struct QuotientOptions {
    std::size_t cyclic_order = 1;           ///< N of the cyclic phi-cover (1 = plain quotient)
    std::optional<CohomologyClass> phi;     ///< integral class for the cyclic cover
    std::vector<CohomologyClass> cover;     ///< several classes: (Z/N)^k cover (overrides phi)
    double frequency_offset = 0.0;          ///< 0.5: midpoint characters, i.e. quadrature for Q x Z^k
    double eps_rel = 1e-9;                  ///< singular values <= eps * sigma_max are kernel
    std::size_t max_dimension = 4096;       ///< cap on n*|Q| per Fourier block
    std::size_t workers = 1;
};

class RepresentationTooLarge : public std::length_error {
public:
    using std::length_error::length_error;
};

namespace quotient_detail {

// Column-major rows x cols block.
inline std::vector<double> singular_values(std::vector<Complex>& a, std::size_t rows, std::size_t cols) {
    std::vector<double> s(std::min(rows, cols));
    if (s.empty()) return s;
    const int ri = static_cast<int>(rows), ci = static_cast<int>(cols);
    const auto info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', ri, ci, a.data(), ri, s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw std::runtime_error("zgesdd failed with info " + std::to_string(info));
    return s;
}

struct Term {
    std::size_t row, col;
    Complex coeff;
    std::vector<std::int64_t> phi;      // cover class values
    std::vector<std::uint32_t> target;  // target[q] = index of q * image(word)
};

}  // namespace quotient_detail

/// Normalized log-determinant estimate through the regular representation of the finite
/// image Q (optionally times Z/N via phi), block-diagonalized over N-th roots of unity.
/// Rectangular matrices give the determinant of the injective part (nonzero singular values).
inline DeterminantEstimate det_quotient(const Matrix& m, const FiniteQuotient& q, const QuotientOptions& opt = {}) {
    const std::size_t n = std::max(m.rows(), m.cols());
    const std::size_t N = std::max<std::size_t>(1, opt.cyclic_order);
    std::vector<CohomologyClass> classes = opt.cover;
    if (classes.empty() && opt.phi) classes.push_back(*opt.phi);
    if (N > 1 && classes.empty()) throw std::invalid_argument("det_quotient: cyclic cover needs a class");
    const std::size_t k = N > 1 ? classes.size() : 0;
    std::size_t blocks = 1;
    for (std::size_t i = 0; i < k; ++i) {
        if (blocks > (std::size_t{1} << 24) / N) throw RepresentationTooLarge("too many Fourier blocks");
        blocks *= N;
    }

    if (q.order * n > opt.max_dimension)
        throw RepresentationTooLarge("representation block " + std::to_string(q.order * n) + " exceeds cap " +
                                     std::to_string(opt.max_dimension));
    const auto elems = enumerate_group(q.images, q.degree, opt.max_dimension);
    const std::size_t Q = elems.size();
    std::unordered_map<Permutation, std::uint32_t, PermutationHash> index;
    for (std::size_t i = 0; i < Q; ++i) index.emplace(elems[i], static_cast<std::uint32_t>(i));

    std::vector<quotient_detail::Term> terms;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (const auto& [w, c] : m(i, j).terms()) {
                quotient_detail::Term t{i, j, c, {}, std::vector<std::uint32_t>(Q)};
                for (std::size_t l = 0; l < k; ++l) {
                    const Rational f = classes[l](w) * Rational(classes[l].common_denominator());
                    t.phi.push_back(f.num());
                }
                const auto img = q.image(w);
                for (std::size_t x = 0; x < Q; ++x) t.target[x] = index.at(elems[x] * img);
                terms.push_back(std::move(t));
            }

    const std::size_t nr = m.rows() * Q, nc = m.cols() * Q;
    const auto Ni = static_cast<std::int64_t>(N);
    auto block = [&](std::size_t freq) {
        // digits of freq base N; phase sum_l (j_l + offset) psi_l(w) / N
        std::vector<double> js(k);
        for (std::size_t l = 0, f = freq; l < k; ++l, f /= N) js[l] = static_cast<double>(f % N);
        std::vector<Complex> a(nr * nc, Complex{});
        for (const auto& t : terms) {
            double turns = 0;
            for (std::size_t l = 0; l < k; ++l) {
                const std::int64_t e = t.phi[l];
                const double jl = js[l];
                // reduce the integer part exactly, keep the offset part in floating point
                turns += static_cast<double>((static_cast<std::int64_t>(jl) * e) % Ni) / static_cast<double>(N) +
                         opt.frequency_offset * static_cast<double>(e) / static_cast<double>(N);
            }
            const double ang = 2.0 * std::numbers::pi * turns;
            const Complex z = t.coeff * Complex(std::cos(ang), std::sin(ang));
            for (std::size_t x = 0; x < Q; ++x) {
                const std::size_t r = t.row * Q + x, c = t.col * Q + t.target[x];
                a[c * nr + r] += z;  // column-major
            }
        }
        return quotient_detail::singular_values(a, nr, nc);
    };

    std::vector<std::vector<double>> svs(blocks);
    const std::size_t workers = std::max<std::size_t>(1, std::min(opt.workers, blocks));
    if (workers == 1) {
        for (std::size_t f = 0; f < blocks; ++f) svs[f] = block(f);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::future<void>> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.push_back(std::async(std::launch::async, [&] {
                for (std::size_t f = next++; f < blocks; f = next++) svs[f] = block(f);
            }));
        for (auto& f : pool) f.get();
    }

    double smax = 0;
    for (const auto& s : svs)
        for (double v : s) smax = std::max(smax, v);
    const double cut = opt.eps_rel * smax;
    double logsum = 0;
    std::size_t dropped = 0, total = 0;
    for (const auto& s : svs)
        for (double v : s) {
            ++total;
            if (v <= cut) ++dropped;
            else logsum += std::log(v);
        }

    DeterminantEstimate e;
    e.method = DetMethod::Quotient;
    e.value = smax == 0 ? 0.0 : std::exp(logsum / static_cast<double>(Q * blocks));
    e.kernel_defect = total ? static_cast<double>(dropped) / static_cast<double>(total) : 0.0;
    e.heuristic = true;
    e.params = {{"quotient_order", static_cast<double>(Q)},
                {"quotient_degree", static_cast<double>(q.degree)},
                {"cyclic_order", static_cast<double>(N)},
                {"cover_rank", static_cast<double>(k)},
                {"frequency_offset", opt.frequency_offset},
                {"eps_rel", opt.eps_rel}};
    e.diagnostics = {e.value};
    return e;
}

/// One (quotient, cyclic order) member of an estimator family.
struct QuotientStage {
    FiniteQuotient quotient;
    std::size_t cyclic_order = 1;
};

/// Runs det_quotient over an increasing family; the value is the last stage, the
/// diagnostics are the whole sequence (kernel defect of the last stage). With
/// `extrapolate`, when the last two stages share the quotient and the cyclic order
/// doubles, log v is extrapolated linearly in 1/N (Richardson). The spread between the
/// last two stages (or the extrapolation step) is reported as log_uncertainty.
inline DeterminantEstimate det_quotient_family(const Matrix& m, const std::vector<QuotientStage>& family,
                                               QuotientOptions opt = {}, bool extrapolate = false) {
    if (family.empty()) throw std::invalid_argument("det_quotient_family: empty family");
    DeterminantEstimate last;
    std::vector<double> seq, defects;
    for (const auto& st : family) {
        opt.cyclic_order = st.cyclic_order;
        last = det_quotient(m, st.quotient, opt);
        seq.push_back(last.value);
        defects.push_back(last.kernel_defect);
    }
    last.diagnostics = seq;
    last.params["family_size"] = static_cast<double>(family.size());
    if (seq.size() >= 2 && seq.back() > 0 && seq[seq.size() - 2] > 0) {
        const double l2 = std::log(seq.back()), l1 = std::log(seq[seq.size() - 2]);
        last.log_uncertainty = std::fabs(l2 - l1);
        const auto& a = family[family.size() - 2];
        const auto& b = family.back();
        if (extrapolate && a.quotient == b.quotient && b.cyclic_order == 2 * a.cyclic_order && defects.back() == 0) {
            last.value = std::exp(2 * l2 - l1);
            last.params["richardson"] = 1;
        }
    }
    bool persistent = true;
    for (double d : defects) persistent = persistent && d > 0.05;
    if (persistent) last.notes.push_back("kernel defect persists across the family: likely not weakly acyclic");
    return last;
}

// ---------------------------------------------------------------- trace series

struct SeriesOptions {
    std::size_t support_cap = default_support_cap;
};

/// exp(n ln K - 1/2 sum_{p<=pmax} tr((I - M M^* / K^2)^p) / p). Partial values are
/// non-increasing upper bounds of the limit.
inline DeterminantEstimate det_series(const Matrix& m, double K, int pmax, const IdentityOracle& oracle,
                                      const SeriesOptions& opt = {}) {
    if (!m.is_square()) throw std::invalid_argument("det_series: matrix is not square");
    const double bound = m.opnorm_bound();
    if (!(K >= bound)) throw std::domain_error("det_series: K = " + std::to_string(K) +
                                               " is below the norm bound " + std::to_string(bound));
    const std::size_t n = m.rows();
    const auto id = Matrix::identity(n);
    Matrix mm = m.mul(m.adjoint(), opt.support_cap);
    Matrix scaled(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scaled(i, j) = mm(i, j).scaled(Complex(1.0 / (K * K), 0.0));
    const Matrix P = id - scaled;

    DeterminantEstimate e;
    e.method = DetMethod::Series;
    e.params = {{"K", K}, {"pmax", static_cast<double>(pmax)}};
    double logv = static_cast<double>(n) * std::log(K);
    e.diagnostics.push_back(std::exp(logv));
    Matrix power = id;
    int reached = 0;
    for (int p = 1; p <= pmax; ++p) {
        try {
            power = power.mul(P, opt.support_cap);
        } catch (const SupportCapExceeded& ex) {
            e.notes.push_back("series truncated at p = " + std::to_string(p - 1) + ": " + ex.what());
            e.heuristic = true;
            break;
        }
        const auto tr = trace(power, oracle);
        e.heuristic = e.heuristic || tr.heuristic;
        logv -= 0.5 * tr.value.real() / p;
        e.diagnostics.push_back(std::exp(logv));
        reached = p;
    }
    e.params["depth_reached"] = reached;
    e.value = std::exp(logv);
    e.notes.push_back("injectivity assumed, not verified");
    return e;
}

inline double default_series_K(const Matrix& m) { return 1.001 * m.opnorm_bound(); }

// ---------------------------------------------------------------- Schur complement

using Estimator = std::function<DeterminantEstimate(const Matrix&)>;

/// det [[A, B], [C, D]] = det(C) det(A C^-1 D - B) with C^-1 by a truncated Neumann series.
inline DeterminantEstimate det_schur(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D, int order,
                                     const Estimator& est, std::size_t cap = default_support_cap) {
    if (!C.is_square() || A.rows() != B.rows() || C.rows() != D.rows() || A.cols() != C.cols() ||
        B.cols() != D.cols() || A.rows() != C.rows() || B.cols() != C.cols())
        throw std::invalid_argument("det_schur: inconsistent block dimensions");
    const auto inv = neumann_inverse(C, order, cap);
    const Matrix S = A.mul(inv.value, cap).mul(D, cap) - B;
    const auto dc = est(C);
    const auto ds = est(S);
    DeterminantEstimate e;
    e.method = DetMethod::SchurComposite;
    e.value = dc.value * ds.value;
    e.heuristic = dc.heuristic || ds.heuristic || dc.method != DetMethod::Rules || ds.method != DetMethod::Rules;
    e.kernel_defect = std::max(dc.kernel_defect, ds.kernel_defect);
    e.params = {{"inversion_order", static_cast<double>(order)}, {"neumann_residual", inv.residual_bound}};
    e.diagnostics = {dc.value, ds.value};
    e.notes.push_back(std::string("det(C) by ") + to_string(dc.method) + ", det(S) by " + to_string(ds.method));
    return e;
}

}  // namespace l2tor

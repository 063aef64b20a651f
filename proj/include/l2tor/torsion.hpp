#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "l2tor/catalog.hpp"
#include "l2tor/fkdet.hpp"

namespace l2tor {

// ---------------------------------------------------------------- chain complexes

/// prod_i det(d_i)^((-1)^i), boundaries listed from d_1 upward. d_i maps C_i -> C_{i-1}
/// acting on row vectors, so d_{i+1} d_i is the matrix product in that order.
inline DeterminantEstimate chain_torsion(const std::vector<Matrix>& boundaries, const Estimator& est) {
    DeterminantEstimate e;
    e.method = DetMethod::SchurComposite;
    for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
        if (boundaries[i + 1].cols() != boundaries[i].rows())
            throw std::invalid_argument("chain_torsion: boundary " + std::to_string(i + 2) + " does not compose with " +
                                        std::to_string(i + 1));
        try {
            const auto dd = boundaries[i + 1].mul(boundaries[i]);
            bool zero = true;
            for (std::size_t r = 0; r < dd.rows(); ++r)
                for (std::size_t c = 0; c < dd.cols(); ++c) zero = zero && dd(r, c).is_zero();
            if (!zero)
                e.notes.push_back("warning: d" + std::to_string(i + 2) + " d" + std::to_string(i + 1) +
                                  " is not zero in the free group ring");
        } catch (const SupportCapExceeded&) {
            e.notes.push_back("warning: dd = 0 check skipped (support cap)");
        }
    }
    double logv = 0;
    bool all_rules = true;
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        const auto d = est(boundaries[i]);
        e.diagnostics.push_back(d.value);
        e.heuristic = e.heuristic || d.heuristic;
        e.kernel_defect = std::max(e.kernel_defect, d.kernel_defect);
        all_rules = all_rules && d.method == DetMethod::Rules;
        if (d.value == 0) {
            e.value = 0;
            e.notes.push_back("boundary " + std::to_string(i + 1) + " has zero determinant estimate");
            return e;
        }
        logv += ((i + 1) % 2 == 0 ? 1.0 : -1.0) * std::log(d.value);
    }
    if (all_rules) e.method = DetMethod::Rules;
    e.value = std::exp(logv);
    return e;
}

class VanishingFactor : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Torsion of 0 -> C^j --C--> C^k --B--> C^(k+l-j) --A--> C^l -> 0 from submatrices:
/// det(B(J,L)) / (det(C(J)) det(A(L))), where A(L) keeps the L-rows of A, B(J,L) deletes
/// the J-rows and L-columns of B, and C(J) keeps the J-columns of C. Indices are 0-based.
inline DeterminantEstimate lemma_torsion(const Matrix& A, const Matrix& B, const Matrix& C,
                                         const std::vector<std::size_t>& L, const std::vector<std::size_t>& J,
                                         const Estimator& est) {
    const std::size_t l = A.cols(), k = B.rows(), j = J.size();
    if (B.cols() != A.rows() || L.size() != l || j >= k || (j > 0 && (C.rows() != j || C.cols() != k)))
        throw std::invalid_argument("lemma_torsion: inconsistent sizes");
    auto complement = [](std::size_t n, const std::vector<std::size_t>& s) {
        std::vector<std::size_t> r;
        for (std::size_t i = 0; i < n; ++i)
            if (std::find(s.begin(), s.end(), i) == s.end()) r.push_back(i);
        return r;
    };
    std::vector<std::size_t> all_cols_a(l), all_rows_c(j);
    for (std::size_t i = 0; i < l; ++i) all_cols_a[i] = i;
    for (std::size_t i = 0; i < j; ++i) all_rows_c[i] = i;

    const Matrix AL = A.select(L, all_cols_a);
    const Matrix BJL = B.select(complement(k, J), complement(B.cols(), L));
    const auto da = est(AL);
    DeterminantEstimate dc;
    dc.value = 1.0;
    if (j > 0) dc = est(C.select(all_rows_c, J));
    if (da.value == 0) throw VanishingFactor("lemma_torsion: det(A(L)) vanishes");
    if (dc.value == 0) throw VanishingFactor("lemma_torsion: det(C(J)) vanishes");
    const auto db = est(BJL);

    DeterminantEstimate e;
    e.method = (da.method == DetMethod::Rules && db.method == DetMethod::Rules &&
                (j == 0 || dc.method == DetMethod::Rules))
                   ? DetMethod::Rules
                   : DetMethod::SchurComposite;
    e.value = db.value / (dc.value * da.value);
    e.heuristic = da.heuristic || db.heuristic || dc.heuristic;
    e.kernel_defect = db.kernel_defect;
    e.diagnostics = {db.value, dc.value, da.value};
    std::string ls, js;
    for (auto x : L) ls += (ls.empty() ? "" : ",") + std::to_string(x);
    for (auto x : J) js += (js.empty() ? "" : ",") + std::to_string(x);
    e.notes.push_back("L = {" + ls + "}, J = {" + js + "}");
    return e;
}

// ---------------------------------------------------------------- presentations

enum class TorsionMethod { Rules, Quotient, Series, Auto };

inline TorsionMethod parse_torsion_method(const std::string& s) {
    if (s == "rules") return TorsionMethod::Rules;
    if (s == "quotient") return TorsionMethod::Quotient;
    if (s == "series") return TorsionMethod::Series;
    if (s == "auto") return TorsionMethod::Auto;
    throw std::invalid_argument("unknown method '" + s + "' (rules|quotient|series|auto)");
}

inline const char* to_string(TorsionMethod m) {
    switch (m) {
        case TorsionMethod::Rules: return "rules";
        case TorsionMethod::Quotient: return "quotient";
        case TorsionMethod::Series: return "series";
        default: return "auto";
    }
}

struct EstimatorConfig {
    TorsionMethod method = TorsionMethod::Auto;
    std::vector<QuotientStage> family;  ///< quotient estimator stages (last stage = reported value)
    std::vector<CohomologyClass> cover; ///< classes of the abelian cover (empty: phi)
    double frequency_offset = 0.0;      ///< 0.5: midpoint characters (quadrature over Z^k)
    bool extrapolate = false;           ///< Richardson step over the last two stages
    int series_depth = 60;
    double eps_rel = 1e-9;
    std::size_t max_dimension = 4096;
    std::size_t workers = 1;
    double zero_threshold = 1e-6;       ///< numerator below this with large kernel defect -> 0
    double zero_defect = 0.05;
};

/// n log-spaced points on [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0) || !(hi > lo) || n < 2) throw std::invalid_argument("grid needs 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) /
                                           static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

inline std::vector<double> default_grid() { return log_grid(0.125, 8.0, 17); }

struct TorsionSpec {
    GroupPresentation presentation;
    CohomologyClass phi;
    std::vector<double> grid = default_grid();
    EstimatorConfig estimator;
    std::uint32_t dropped_generator = 0;
    std::optional<std::size_t> dropped_relator;
    bool torsion_free = true;

    static TorsionSpec from_catalog(const CatalogEntry& e) {
        if (!e.meta.has_presentation) throw std::invalid_argument("catalog entry has no presentation");
        TorsionSpec s;
        s.presentation = e.presentation;
        s.phi = e.phi;
        s.dropped_generator = e.meta.dropped_generator;
        s.dropped_relator = e.meta.dropped_relator;
        s.torsion_free = e.meta.torsion_free;
        return s;
    }

    void validate() const {
        if (!validate_class(presentation, phi)) throw std::invalid_argument("class does not vanish on the relators");
        if (dropped_generator >= presentation.generator_count())
            throw std::invalid_argument("dropped generator index out of range");
        if (dropped_relator && *dropped_relator >= presentation.relator_count())
            throw std::invalid_argument("dropped relator index out of range");
        const std::size_t rels = presentation.relator_count() - (dropped_relator ? 1 : 0);
        if (rels + 1 != presentation.generator_count())
            throw std::invalid_argument("deficiency-one presentation required (after dropping a relator): " +
                                        std::to_string(presentation.generator_count()) + " generators, " +
                                        std::to_string(rels) + " relators");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("grid must be strictly increasing");
        for (double t : grid)
            if (!(t > 0)) throw std::invalid_argument("grid points must be positive");
    }
};

struct TorsionPoint {
    double t = 1.0;
    double value = 0.0;
    DeterminantEstimate numerator;
    double denominator = 1.0;
    double log_uncertainty = 0.0;
    bool heuristic = false;
    std::vector<std::string> flags;
};

struct TorsionCurve {
    std::string name;
    std::string phi;
    std::string method;
    std::vector<TorsionPoint> points;
};

/// Fox matrix of the deficiency-one presentation with the dropped generator's column removed.
inline ExactMatrix torsion_numerator_matrix(const TorsionSpec& spec) {
    const auto p = spec.dropped_relator ? spec.presentation.without_relator(*spec.dropped_relator) : spec.presentation;
    return fox_matrix(p).without_column(spec.dropped_generator);
}

/// tau(t) = det(kappa_t(Fox matrix without column j)) / det(t^phi(g_j) g_j - 1), the
/// denominator being max{1, t^phi(g_j)} exactly.
inline TorsionPoint torsion_at(const TorsionSpec& spec, double t) {
    if (!(t > 0)) throw std::invalid_argument("t must be positive");
    const Word gj = Word::generator(spec.dropped_generator);
    const Rational e = spec.phi(gj);
    if (e.is_zero()) {
        const auto inf = has_infinite_order(spec.presentation, gj, spec.phi, spec.torsion_free);
        if (!(inf.value && inf.certainty == Certainty::Certain))
            throw std::invalid_argument("dropped generator needs phi != 0 or certified infinite order");
    }
    TorsionPoint pt;
    pt.t = t;
    pt.denominator = std::max(1.0, std::pow(t, e.to_double()));

    const Matrix M = kappa_twist(torsion_numerator_matrix(spec), TwistParameters{spec.phi, t});
    const auto& cfg = spec.estimator;
    const auto inf = infinite_order_test(spec.presentation, spec.phi, spec.torsion_free);

    std::optional<DeterminantEstimate> num;
    if (cfg.method == TorsionMethod::Rules || cfg.method == TorsionMethod::Auto) {
        if (auto r = det_rules(M, inf)) num = to_estimate(*r);
        else if (cfg.method == TorsionMethod::Rules)
            throw std::runtime_error("rules engine does not recognize the numerator at t = " + std::to_string(t));
    }
    if (!num) {
        const bool use_quotient =
            cfg.method == TorsionMethod::Quotient || (cfg.method == TorsionMethod::Auto && !cfg.family.empty());
        if (use_quotient) {
            if (cfg.family.empty()) throw std::invalid_argument("quotient method needs a quotient family");
            QuotientOptions qo;
            qo.phi = spec.phi;
            qo.cover = cfg.cover;
            qo.frequency_offset = cfg.frequency_offset;
            qo.eps_rel = cfg.eps_rel;
            qo.max_dimension = cfg.max_dimension;
            qo.workers = cfg.workers;
            num = det_quotient_family(M, cfg.family, qo, cfg.extrapolate);
        } else {
            std::vector<FiniteQuotient> qs;
            for (const auto& st : cfg.family) qs.push_back(st.quotient);
            const auto oracle = spec.presentation.is_free() ? free_oracle()
                                                            : quotient_oracle(spec.presentation, std::move(qs));
            num = det_series(M, default_series_K(M), cfg.series_depth, oracle);
        }
    }
    pt.numerator = *num;
    pt.heuristic = num->heuristic;
    pt.log_uncertainty = num->log_uncertainty;
    pt.value = num->value / pt.denominator;
    if (num->value < cfg.zero_threshold && num->kernel_defect > cfg.zero_defect) {
        pt.value = 0;
        pt.heuristic = true;
        pt.flags.push_back("not weakly acyclic (heuristic)");
    }
    return pt;
}

/// Evaluates the grid. With `errors`, a failing point is kept (value 0, flagged) and its
/// message collected instead of aborting the curve.
inline TorsionCurve torsion_curve(const TorsionSpec& spec, std::vector<std::string>* errors = nullptr) {
    spec.validate();
    TorsionCurve c;
    c.name = spec.presentation.name();
    c.phi = spec.phi.str();
    c.method = to_string(spec.estimator.method);
    c.points.resize(spec.grid.size());
    std::vector<std::string> errs(spec.grid.size());
    // Grid points fan out over workers; the determinant of each point uses one thread.
    auto inner = spec;
    inner.estimator.workers = 1;
    auto eval = [&](std::size_t i) {
        if (!errors) {
            c.points[i] = torsion_at(inner, spec.grid[i]);
            return;
        }
        try {
            c.points[i] = torsion_at(inner, spec.grid[i]);
        } catch (const std::exception& e) {
            c.points[i].t = spec.grid[i];
            c.points[i].value = 0;
            c.points[i].flags.push_back(std::string("estimator failure: ") + e.what());
            errs[i] = "t = " + std::to_string(spec.grid[i]) + ": " + e.what();
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(spec.estimator.workers, spec.grid.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < spec.grid.size(); ++i) eval(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::future<void>> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.push_back(std::async(std::launch::async, [&] {
                for (std::size_t i = next++; i < spec.grid.size(); i = next++) eval(i);
            }));
        for (auto& f : pool) f.get();
    }
    if (errors)
        for (auto& e : errs)
            if (!e.empty()) errors->push_back(std::move(e));
    return c;
}

struct FamilyOptions {
    std::size_t quotient_degree = 0;  ///< 0: 8 for two generators, else 4
    std::size_t cyclic_order = 0;     ///< 0: by cover rank (64, 32, 16, 8)
    bool abelian_cover = true;        ///< cover along a basis of Hom(G, Z); else along phi only
    bool midpoint = true;
    bool extrapolate = true;
    QuotientSearchOptions search;
};

/// Two-stage family (Q, N/2), (Q, N) over the largest admissible finite image Q; the
/// cover classes default to an integral basis of Hom(G, Z).
inline void configure_quotient_family(TorsionSpec& spec, const FamilyOptions& fo = {}) {
    const auto& p = spec.presentation;
    const std::size_t d = fo.quotient_degree ? fo.quotient_degree : (p.generator_count() == 2 ? 8 : 4);
    const auto q = select_quotient(p, d, fo.search);
    if (!q) throw std::runtime_error("no finite quotient of degree <= " + std::to_string(d));
    auto& cfg = spec.estimator;
    cfg.cover = fo.abelian_cover ? cohomology_basis(p) : std::vector<CohomologyClass>{spec.phi};
    if (cfg.cover.empty()) cfg.cover = {spec.phi};
    static constexpr std::size_t by_rank[] = {64, 64, 32, 16, 8};
    const std::size_t N = fo.cyclic_order ? fo.cyclic_order : by_rank[std::min<std::size_t>(cfg.cover.size(), 4)];
    cfg.family.clear();
    if (N >= 2) cfg.family.push_back({*q, N / 2});
    cfg.family.push_back({*q, N});
    cfg.frequency_offset = fo.midpoint ? 0.5 : 0.0;
    cfg.extrapolate = fo.extrapolate;
    cfg.max_dimension = std::max(cfg.max_dimension, q->order * std::max(p.generator_count(), p.relator_count()));
}

}  // namespace l2tor

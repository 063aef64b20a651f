#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "l2tor/catalog.hpp"

namespace l2tor {

/// Plain (t, value) samples; what the fits consume.
struct CurveSample {
    double t = 1.0;
    double value = 0.0;
    bool flagged = false;  ///< excluded from fits (zero / not weakly acyclic)
    double log_uncertainty = 0.0;  ///< estimator convergence spread, widens the C band
};

class InsufficientPoints : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct LineFit {
    double slope = 0, intercept = 0;
    double rms_residual = 0, max_residual = 0;
};

/// Least squares y = slope x + intercept.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw InsufficientPoints("line fit needs at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw InsufficientPoints("line fit needs distinct abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += r * r;
        f.max_residual = std::max(f.max_residual, std::fabs(r));
    }
    f.rms_residual = std::sqrt(ss / static_cast<double>(n));
    return f;
}

struct FitReport {
    double k_minus = 0, k_plus = 0;
    double thurston_estimate = 0;
    double residual_minus = 0, residual_plus = 0;  ///< rms of the end-window line fits (log scale)
    std::optional<double> symmetry_slope;          ///< s in log tau(t) - log tau(1/t) = s log t + c
    std::optional<double> gauge_k;                 ///< exponent divided out for C (k + x)
    std::optional<double> leading_coefficient;
    double c_low = 0, c_high = 0;                  ///< band of pointwise C(t) on the window
    std::size_t window_points = 0;
    std::vector<std::string> notes;
};

namespace asym_detail {

inline std::vector<CurveSample> usable(const std::vector<CurveSample>& c) {
    std::vector<CurveSample> out;
    for (const auto& s : c)
        if (!s.flagged && s.value > 0 && s.t > 0) out.push_back(s);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    return out;
}

inline LineFit log_fit(const std::vector<CurveSample>& pts) {
    std::vector<double> x, y;
    for (const auto& p : pts) {
        x.push_back(std::log(p.t));
        y.push_back(std::log(p.value));
    }
    return fit_line(x, y);
}

}  // namespace asym_detail

/// End slopes of log tau against log t over the lowest/highest `window` fraction of points.
inline FitReport degree_fit(const std::vector<CurveSample>& curve, double window = 0.25) {
    const auto pts = asym_detail::usable(curve);
    const auto m = static_cast<std::size_t>(std::ceil(window * static_cast<double>(pts.size())));
    if (m < 3 || 2 * m > pts.size() + 1)
        throw InsufficientPoints("degree_fit needs at least 3 unflagged points per end window (have " +
                                 std::to_string(pts.size()) + " points, window " + std::to_string(m) + ")");
    const std::vector<CurveSample> lo(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(m));
    const std::vector<CurveSample> hi(pts.end() - static_cast<std::ptrdiff_t>(m), pts.end());
    const auto fl = asym_detail::log_fit(lo), fh = asym_detail::log_fit(hi);
    FitReport r;
    r.k_minus = fl.slope;
    r.k_plus = fh.slope;
    r.thurston_estimate = fh.slope - fl.slope;
    r.residual_minus = fl.rms_residual;
    r.residual_plus = fh.rms_residual;
    r.window_points = m;
    return r;
}

struct SymmetryFit {
    LineFit line;
    std::size_t pairs = 0;
    double relative_residual = 0;  ///< max residual / max(1, max |y|)
};

/// Fits log tau(t) - log tau(1/t) against log t over grid pairs (t, 1/t) with t > 1.
inline SymmetryFit symmetry_fit(const std::vector<CurveSample>& curve, double rel_tol = 1e-9) {
    const auto pts = asym_detail::usable(curve);
    std::vector<double> x, y;
    for (const auto& p : pts) {
        if (p.t <= 1.0 + rel_tol) continue;
        for (const auto& q : pts)
            if (std::fabs(q.t * p.t - 1.0) <= rel_tol * 10) {
                x.push_back(std::log(p.t));
                y.push_back(std::log(p.value) - std::log(q.value));
                break;
            }
    }
    SymmetryFit s;
    s.pairs = x.size();
    if (x.size() < 2) throw InsufficientPoints("symmetry fit needs at least two (t, 1/t) pairs");
    s.line = fit_line(x, y);
    double ymax = 1.0;
    for (double v : y) ymax = std::max(ymax, std::fabs(v));
    s.relative_residual = s.line.max_residual / ymax;
    return s;
}

struct LeadingOptions {
    double window = 0.25;
    std::optional<double> t_min;  ///< use every point with t >= t_min instead of the top window
    bool integral_gauge = true;   ///< snap k + x to an integer (integral classes)
};

/// tau(t) ~ C t^(k+x) as t -> infinity; k + x from the symmetry slope s and x: (s + x)/2.
/// C is the pointwise ratio at the largest t; the band is [min, max] over the window of
/// C(t) exp(-+u(t)) with u the per-point log uncertainty.
inline FitReport leading_fit(const std::vector<CurveSample>& curve, std::optional<double> x = {},
                             const LeadingOptions& opt = {}) {
    FitReport r;
    try {
        r = degree_fit(curve, opt.window);
    } catch (const InsufficientPoints& e) {
        if (!x) throw;
        r.notes.push_back(std::string("degree fit unavailable: ") + e.what());
    }
    const double xn = x ? *x : r.thurston_estimate;
    const auto sym = symmetry_fit(curve);
    r.symmetry_slope = sym.line.slope;
    double k = (sym.line.slope + xn) / 2.0;
    if (opt.integral_gauge) {
        const double snapped = std::round(k);
        if (std::fabs(snapped - k) > 0.25) r.notes.push_back("gauge exponent far from an integer; not snapped");
        else k = snapped;
    }
    r.gauge_k = k;

    const auto pts = asym_detail::usable(curve);
    std::vector<CurveSample> win;
    if (opt.t_min) {
        for (const auto& p : pts)
            if (p.t >= *opt.t_min) win.push_back(p);
    } else {
        const auto m = static_cast<std::size_t>(std::ceil(opt.window * static_cast<double>(pts.size())));
        win.assign(pts.end() - static_cast<std::ptrdiff_t>(std::min(m, pts.size())), pts.end());
    }
    if (win.empty()) throw InsufficientPoints("leading_fit: empty window");
    r.window_points = win.size();
    r.c_low = INFINITY;
    r.c_high = 0;
    for (const auto& p : win) {
        const double c = p.value / std::pow(p.t, k);
        r.c_low = std::min(r.c_low, c * std::exp(-p.log_uncertainty));
        r.c_high = std::max(r.c_high, c * std::exp(p.log_uncertainty));
    }
    r.leading_coefficient = win.back().value / std::pow(win.back().t, k);
    if (!(r.c_high / r.c_low < 1.5)) r.notes.push_back("wide band: fit not converged");
    return r;
}

/// Slope c of log curve1(t) - log curve2(t^r) = c log t, fitted through the origin, for
/// curve1 computed with r*phi and curve2 with phi. Returns (c, max residual / max(1, max|y|)).
inline std::pair<double, double> scaling_fit(const std::vector<CurveSample>& scaled_class,
                                             const std::vector<CurveSample>& base_at_t_pow_r) {
    if (scaled_class.size() != base_at_t_pow_r.size() || scaled_class.size() < 2)
        throw InsufficientPoints("scaling_fit needs matched samples");
    double sxy = 0, sxx = 0, ymax = 1.0;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < scaled_class.size(); ++i) {
        const auto& a = scaled_class[i];
        const auto& b = base_at_t_pow_r[i];
        if (a.flagged || b.flagged || a.value <= 0 || b.value <= 0) continue;
        const double xv = std::log(a.t), yv = std::log(a.value) - std::log(b.value);
        xs.push_back(xv);
        ys.push_back(yv);
        sxy += xv * yv;
        sxx += xv * xv;
        ymax = std::max(ymax, std::fabs(yv));
    }
    const double c = sxx > 0 ? sxy / sxx : 0.0;
    double res = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) res = std::max(res, std::fabs(ys[i] - c * xs[i]));
    return {c, res / ymax};
}

// ---------------------------------------------------------------- bounds

/// Product of exp(vol/6pi) over pieces on which the class restricts to zero.
inline double volume_bound(const std::vector<JsjPiece>& pieces) {
    double s = 0;
    for (const auto& p : pieces) {
        if (p.volume < 0) throw std::invalid_argument("negative volume for piece " + p.name);
        if (p.phi_restriction_zero) s += p.volume;
    }
    return std::exp(s / (6.0 * std::numbers::pi));
}

inline double volume_exponential(double volume) { return std::exp(volume / (6.0 * std::numbers::pi)); }

struct BoundsCheck {
    std::string name;
    bool satisfied = false;
    std::string detail;
};

struct BoundsRecord {
    double lower = 1.0;  ///< A(N, phi)
    double c_estimate = 0, c_low = 0, c_high = 0;
    std::optional<double> upper;        ///< relative torsion of the cut manifold, when supplied
    std::optional<double> volume_cap;   ///< exp(vol(N)/6pi), when the total volume is known
    std::vector<BoundsCheck> checks;
    std::string conjecture_note = "equality of C with the cut-manifold torsion is conjectural; not asserted";

    [[nodiscard]] bool satisfied() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.satisfied; });
    }
};

/// Checks 1 <= A <= C <= upper (and C <= exp(vol/6pi)) against the C band [c_low, c_high];
/// comparisons allow a relative slack `tol` for floating-point noise in exact cases.
inline BoundsRecord bounds_report(double A, const FitReport& fit, std::optional<double> upper = {},
                                  std::optional<double> total_volume = {}, double tol = 1e-9) {
    BoundsRecord b;
    b.lower = A;
    b.c_estimate = fit.leading_coefficient.value_or(0.0);
    b.c_low = fit.c_low;
    b.c_high = fit.c_high;
    b.upper = upper;
    auto num = [](double v) { return std::to_string(v); };
    const double lo = 1.0 - tol, hi = 1.0 + tol;
    b.checks.push_back({"1 <= A", A >= lo, "A = " + num(A)});
    b.checks.push_back({"A <= C", A <= fit.c_high * hi, "A = " + num(A) + ", C band high = " + num(fit.c_high)});
    if (upper)
        b.checks.push_back({"C <= upper", fit.c_low <= *upper * hi,
                            "C band low = " + num(fit.c_low) + ", upper = " + num(*upper)});
    if (total_volume) {
        b.volume_cap = volume_exponential(*total_volume);
        b.checks.push_back({"C <= exp(vol/6pi)", fit.c_low <= *b.volume_cap * hi,
                            "C band low = " + num(fit.c_low) + ", cap = " + num(*b.volume_cap)});
    }
    return b;
}

}  // namespace l2tor

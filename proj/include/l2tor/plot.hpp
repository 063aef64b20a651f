#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "l2tor/asymptotics.hpp"

namespace l2tor {

/// A straight line in log-log coordinates: y = coeff * t^exponent, drawn dashed.
struct Asymptote {
    double coeff = 1.0;
    double exponent = 0.0;
    std::string label;
};

namespace plot_detail {

inline std::string f3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

inline std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

}  // namespace plot_detail

/// Log-log SVG of a curve; flagged/nonpositive samples are drawn as crosses on the bottom axis.
inline std::string svg_loglog(const std::vector<CurveSample>& curve, const std::vector<Asymptote>& asymptotes,
                              const std::string& title) {
    using plot_detail::f3;
    const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
    std::vector<CurveSample> pts;
    for (const auto& s : curve)
        if (s.t > 0) pts.push_back(s);
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.t < b.t; });

    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool have = false;
    for (const auto& s : pts) {
        const double lx = std::log10(s.t);
        if (!have) x0 = x1 = lx;
        x0 = std::min(x0, lx);
        x1 = std::max(x1, lx);
        have = true;
    }
    have = false;
    for (const auto& s : pts) {
        if (s.flagged || !(s.value > 0)) continue;
        const double ly = std::log10(s.value);
        if (!have) y0 = y1 = ly;
        y0 = std::min(y0, ly);
        y1 = std::max(y1, ly);
        have = true;
    }
    if (x1 - x0 < 1e-9) x1 = x0 + 1;
    y0 = std::floor(y0 - 0.05);
    y1 = std::ceil(y1 + 0.05);
    if (y1 - y0 < 1) y1 = y0 + 1;

    auto X = [&](double lx) { return L + (lx - x0) / (x1 - x0) * (W - L - R); };
    auto Y = [&](double ly) { return H - B - (ly - y0) / (y1 - y0) * (H - T - B); };

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f3(W) + "\" height=\"" + f3(H) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + f3(W / 2) + "\" y=\"20\" text-anchor=\"middle\">" + plot_detail::esc(title) + "</text>\n";
    // axes + decade ticks
    s += "<g stroke=\"black\"><line x1=\"" + f3(L) + "\" y1=\"" + f3(H - B) + "\" x2=\"" + f3(W - R) + "\" y2=\"" +
         f3(H - B) + "\"/><line x1=\"" + f3(L) + "\" y1=\"" + f3(T) + "\" x2=\"" + f3(L) + "\" y2=\"" + f3(H - B) +
         "\"/></g>\n";
    for (double d = std::ceil(x0); d <= x1 + 1e-9; d += 1)
        s += "<text x=\"" + f3(X(d)) + "\" y=\"" + f3(H - B + 18) + "\" text-anchor=\"middle\">1e" +
             std::to_string(static_cast<int>(d)) + "</text>\n";
    for (double d = y0; d <= y1 + 1e-9; d += 1)
        s += "<text x=\"" + f3(L - 8) + "\" y=\"" + f3(Y(d) + 4) + "\" text-anchor=\"end\">1e" +
             std::to_string(static_cast<int>(d)) + "</text>\n";
    s += "<text x=\"" + f3(W / 2) + "\" y=\"" + f3(H - 10) + "\" text-anchor=\"middle\">t</text>\n";
    s += "<text x=\"15\" y=\"" + f3(H / 2) + "\" transform=\"rotate(-90 15 " + f3(H / 2) +
         ")\" text-anchor=\"middle\">tau(t)</text>\n";

    // asymptotes
    const char* colors[] = {"#d62728", "#2ca02c", "#9467bd", "#8c564b"};
    std::size_t k = 0;
    for (const auto& a : asymptotes) {
        if (!(a.coeff > 0)) continue;
        const double ya = std::log10(a.coeff) + a.exponent * x0, yb = std::log10(a.coeff) + a.exponent * x1;
        const char* col = colors[k % 4];
        s += "<line x1=\"" + f3(X(x0)) + "\" y1=\"" + f3(Y(ya)) + "\" x2=\"" + f3(X(x1)) + "\" y2=\"" + f3(Y(yb)) +
             "\" stroke=\"" + col + "\" stroke-dasharray=\"6,4\"/>\n";
        s += "<text x=\"" + f3(W - R - 4) + "\" y=\"" + f3(T + 14 * (k + 1)) + "\" text-anchor=\"end\" fill=\"" + col +
             "\">" + plot_detail::esc(a.label) + "</text>\n";
        ++k;
    }
    s += "</svg>\n";
    // the curve itself
    std::string poly;
    std::string marks;
    for (const auto& p : pts) {
        const double px = X(std::log10(p.t));
        if (p.flagged || !(p.value > 0)) {
            marks += "<text x=\"" + f3(px) + "\" y=\"" + f3(H - B - 4) + "\" text-anchor=\"middle\" fill=\"gray\">x</text>\n";
            continue;
        }
        const double py = Y(std::log10(p.value));
        poly += f3(px) + "," + f3(py) + " ";
        marks += "<circle cx=\"" + f3(px) + "\" cy=\"" + f3(py) + "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    }
    const std::string body = "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"" + poly +
                             "\"/>\n" + marks;
    s.insert(s.size() - std::string("</svg>\n").size(), body);
    return s;
}

/// The two end asymptotes implied by a fit (slopes k_-, k_+ through the end samples).
inline std::vector<Asymptote> fit_asymptotes(const std::vector<CurveSample>& curve, const FitReport& fit) {
    std::vector<Asymptote> out;
    std::vector<CurveSample> pts;
    for (const auto& s : curve)
        if (!s.flagged && s.value > 0) pts.push_back(s);
    if (pts.empty()) return out;
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    const auto& lo = pts.front();
    const auto& hi = pts.back();
    out.push_back({lo.value / std::pow(lo.t, fit.k_minus), fit.k_minus, "t->0 slope " + plot_detail::f3(fit.k_minus)});
    if (fit.leading_coefficient && fit.gauge_k)
        out.push_back({*fit.leading_coefficient, *fit.gauge_k,
                       "C t^" + plot_detail::f3(*fit.gauge_k) + ", C = " + plot_detail::f3(*fit.leading_coefficient)});
    else
        out.push_back({hi.value / std::pow(hi.t, fit.k_plus), fit.k_plus, "t->inf slope " + plot_detail::f3(fit.k_plus)});
    return out;
}

}  // namespace l2tor

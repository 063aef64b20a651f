#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "l2tor/asymptotics.hpp"
#include "l2tor/torsion.hpp"

namespace l2tor {

inline constexpr const char* toolchain_version = "l2tor 0.1.0";

// ---------------------------------------------------------------- volumes

struct VolumeRecord {
    std::string name;
    double volume = 0;
    std::string source;
    friend bool operator==(const VolumeRecord&, const VolumeRecord&) = default;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct VolumeTable {
    std::vector<VolumeRecord> records;

    [[nodiscard]] const VolumeRecord* find(const std::string& name) const {
        for (const auto& r : records)
            if (r.name == name) return &r;
        return nullptr;
    }
    [[nodiscard]] double volume(const std::string& name) const {
        if (const auto* r = find(name)) return r->volume;
        throw std::out_of_range("no volume for '" + name + "'");
    }
};

namespace data_detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
    double v = 0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end || s.empty()) throw DataError(where + ": malformed number '" + s + "'");
    return v;
}

}  // namespace data_detail

/// CSV with header `name,volume` (optional third column `source`).
inline VolumeTable parse_volumes(std::istream& in, const std::string& label = "volumes") {
    VolumeTable t;
    std::string line;
    std::size_t lineno = 0;
    bool header = false, has_source = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        if (data_detail::trim(line).empty()) continue;
        const auto cols = data_detail::split_csv(line);
        const std::string where = label + ":" + std::to_string(lineno);
        if (!header) {
            if (cols.size() < 2 || cols[0] != "name" || cols[1] != "volume" || cols.size() > 3 ||
                (cols.size() == 3 && cols[2] != "source"))
                throw DataError(where + ": expected header 'name,volume[,source]'");
            has_source = cols.size() == 3;
            header = true;
            continue;
        }
        if (cols.size() != (has_source ? 3u : 2u) && !(has_source && cols.size() == 2))
            throw DataError(where + ": expected " + std::string(has_source ? "3" : "2") + " columns");
        if (cols[0].empty()) throw DataError(where + ": empty name");
        VolumeRecord r{cols[0], data_detail::parse_double(cols[1], where), cols.size() > 2 ? cols[2] : label};
        if (r.volume < 0) throw DataError(where + ": negative volume");
        if (t.find(r.name)) throw DataError(where + ": duplicate name '" + r.name + "'");
        t.records.push_back(std::move(r));
    }
    if (!header) throw DataError(label + ": missing header 'name,volume'");
    return t;
}

inline VolumeTable load_volumes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open volume table " + path.string());
    return parse_volumes(in, path.filename().string());
}

// ---------------------------------------------------------------- JSON

inline nlohmann::json to_json(const DeterminantEstimate& e) {
    return {{"value", e.value},         {"method", to_string(e.method)}, {"params", e.params},
            {"diagnostics", e.diagnostics}, {"notes", e.notes},          {"kernel_defect", e.kernel_defect},
            {"log_uncertainty", e.log_uncertainty}, {"heuristic", e.heuristic}};
}

inline DeterminantEstimate estimate_from_json(const nlohmann::json& j) {
    DeterminantEstimate e;
    e.value = j.at("value").get<double>();
    e.method = parse_det_method(j.at("method").get<std::string>());
    e.params = j.at("params").get<std::map<std::string, double>>();
    e.diagnostics = j.at("diagnostics").get<std::vector<double>>();
    e.notes = j.at("notes").get<std::vector<std::string>>();
    e.kernel_defect = j.at("kernel_defect").get<double>();
    e.log_uncertainty = j.value("log_uncertainty", 0.0);
    e.heuristic = j.at("heuristic").get<bool>();
    return e;
}

namespace data_detail {
template <typename T>
nlohmann::json opt(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
template <typename T>
std::optional<T> get_opt(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}
}  // namespace data_detail

inline nlohmann::json to_json(const FitReport& f) {
    using data_detail::opt;
    return {{"k_minus", f.k_minus},
            {"k_plus", f.k_plus},
            {"thurston_estimate", f.thurston_estimate},
            {"residual_minus", f.residual_minus},
            {"residual_plus", f.residual_plus},
            {"symmetry_slope", opt(f.symmetry_slope)},
            {"gauge_k", opt(f.gauge_k)},
            {"leading_coefficient", opt(f.leading_coefficient)},
            {"c_low", f.c_low},
            {"c_high", f.c_high},
            {"window_points", f.window_points},
            {"notes", f.notes}};
}

inline FitReport fit_from_json(const nlohmann::json& j) {
    using data_detail::get_opt;
    FitReport f;
    f.k_minus = j.at("k_minus").get<double>();
    f.k_plus = j.at("k_plus").get<double>();
    f.thurston_estimate = j.at("thurston_estimate").get<double>();
    f.residual_minus = j.at("residual_minus").get<double>();
    f.residual_plus = j.at("residual_plus").get<double>();
    f.symmetry_slope = get_opt<double>(j, "symmetry_slope");
    f.gauge_k = get_opt<double>(j, "gauge_k");
    f.leading_coefficient = get_opt<double>(j, "leading_coefficient");
    f.c_low = j.at("c_low").get<double>();
    f.c_high = j.at("c_high").get<double>();
    f.window_points = j.at("window_points").get<std::size_t>();
    f.notes = j.at("notes").get<std::vector<std::string>>();
    return f;
}

inline nlohmann::json to_json(const BoundsRecord& b) {
    using data_detail::opt;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : b.checks) checks.push_back({{"name", c.name}, {"satisfied", c.satisfied}, {"detail", c.detail}});
    return {{"lower", b.lower},   {"c_estimate", b.c_estimate},       {"c_low", b.c_low},
            {"c_high", b.c_high}, {"upper", opt(b.upper)},            {"volume_cap", opt(b.volume_cap)},
            {"checks", checks},   {"satisfied", b.satisfied()},       {"conjecture_note", b.conjecture_note}};
}

inline BoundsRecord bounds_from_json(const nlohmann::json& j) {
    using data_detail::get_opt;
    BoundsRecord b;
    b.lower = j.at("lower").get<double>();
    b.c_estimate = j.at("c_estimate").get<double>();
    b.c_low = j.at("c_low").get<double>();
    b.c_high = j.at("c_high").get<double>();
    b.upper = get_opt<double>(j, "upper");
    b.volume_cap = get_opt<double>(j, "volume_cap");
    for (const auto& c : j.at("checks"))
        b.checks.push_back({c.at("name").get<std::string>(), c.at("satisfied").get<bool>(),
                            c.at("detail").get<std::string>()});
    b.conjecture_note = j.at("conjecture_note").get<std::string>();
    return b;
}

inline nlohmann::json to_json(const TorsionCurve& c) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.points)
        pts.push_back({{"t", p.t},
                       {"value", p.value},
                       {"denominator", p.denominator},
                       {"heuristic", p.heuristic},
                       {"log_uncertainty", p.log_uncertainty},
                       {"flags", p.flags},
                       {"numerator", to_json(p.numerator)}});
    return {{"name", c.name}, {"phi", c.phi}, {"method", c.method}, {"points", pts}};
}

// ---------------------------------------------------------------- curves

inline std::vector<CurveSample> samples(const TorsionCurve& c) {
    std::vector<CurveSample> s;
    for (const auto& p : c.points) s.push_back({p.t, p.value, !p.flags.empty() || p.value <= 0, p.log_uncertainty});
    return s;
}

namespace data_detail {
inline std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace data_detail

inline std::string curve_csv(const TorsionCurve& c) {
    std::string s = "t,value,method,heuristic,log_uncertainty\n";
    for (const auto& p : c.points)
        s += data_detail::num17(p.t) + "," + data_detail::num17(p.value) + "," + to_string(p.numerator.method) + "," +
             (p.heuristic ? "1" : "0") + "," + data_detail::num17(p.log_uncertainty) + "\n";
    return s;
}

struct LoadedCurve {
    std::vector<CurveSample> samples;
    std::vector<std::string> methods;
    bool any_heuristic = false;
};

inline LoadedCurve parse_curve_csv(std::istream& in, const std::string& label = "curve") {
    LoadedCurve c;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (data_detail::trim(line).empty()) continue;
        const auto cols = data_detail::split_csv(line);
        const std::string where = label + ":" + std::to_string(lineno);
        if (!header) {
            if (cols.size() < 2 || cols[0] != "t" || cols[1] != "value")
                throw DataError(where + ": expected header 't,value,method,heuristic'");
            header = true;
            continue;
        }
        if (cols.size() < 2) throw DataError(where + ": expected at least t,value");
        CurveSample s{data_detail::parse_double(cols[0], where), data_detail::parse_double(cols[1], where), false};
        s.flagged = s.value <= 0;
        if (cols.size() > 4 && !cols[4].empty()) s.log_uncertainty = data_detail::parse_double(cols[4], where);
        c.samples.push_back(s);
        c.methods.push_back(cols.size() > 2 ? cols[2] : "");
        c.any_heuristic = c.any_heuristic || (cols.size() > 3 && cols[3] == "1");
    }
    if (!header) throw DataError(label + ": empty curve file");
    return c;
}

inline LoadedCurve load_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open curve file " + path.string());
    return parse_curve_csv(in, path.string());
}

/// Writes via a temporary file and rename so readers never see partial content.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp);
        out << content;
        out.flush();
        if (!out) throw DataError("write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DataError("cannot rename " + tmp + " to " + path.string() + ": " + ec.message());
}

// ---------------------------------------------------------------- results

/// 64-bit FNV-1a as 16 hex digits.
inline std::string fnv_digest(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Canonical text of a spec; equal specs give equal text.
inline std::string canonical_spec(const TorsionSpec& s) {
    std::string out = format_presentation(s.presentation, s.phi);
    out += "grid:";
    for (double t : s.grid) out += " " + data_detail::num17(t);
    out += "\nmethod: " + std::string(to_string(s.estimator.method));
    out += "\ndrop-generator: " + std::to_string(s.dropped_generator);
    out += "\ndrop-relator: " + (s.dropped_relator ? std::to_string(*s.dropped_relator) : std::string("none"));
    out += "\nseries-depth: " + std::to_string(s.estimator.series_depth);
    out += "\neps: " + data_detail::num17(s.estimator.eps_rel);
    for (const auto& st : s.estimator.family)
        out += "\nstage: " + st.quotient.str() + " N=" + std::to_string(st.cyclic_order);
    return out + "\n";
}

struct ResultRecord {
    std::string spec_digest;
    std::string spec_text;
    std::string curve_file;
    FitReport fit;
    std::optional<BoundsRecord> bounds;
    std::string created;
    std::string toolchain = toolchain_version;

    [[nodiscard]] nlohmann::json to_json() const {
        return {{"spec_digest", spec_digest},
                {"spec_text", spec_text},
                {"curve_file", curve_file},
                {"fit", l2tor::to_json(fit)},
                {"bounds", bounds ? l2tor::to_json(*bounds) : nlohmann::json(nullptr)},
                {"created", created},
                {"toolchain", toolchain}};
    }
    static ResultRecord from_json(const nlohmann::json& j) {
        ResultRecord r;
        r.spec_digest = j.at("spec_digest").get<std::string>();
        r.spec_text = j.at("spec_text").get<std::string>();
        r.curve_file = j.at("curve_file").get<std::string>();
        r.fit = fit_from_json(j.at("fit"));
        if (!j.at("bounds").is_null()) r.bounds = bounds_from_json(j.at("bounds"));
        r.created = j.at("created").get<std::string>();
        r.toolchain = j.at("toolchain").get<std::string>();
        return r;
    }
    friend bool operator==(const ResultRecord& a, const ResultRecord& b) { return a.to_json() == b.to_json(); }
};

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Results root: $L2T_RESULTS_DIR if set, else `fallback`.
inline std::filesystem::path results_root(const std::filesystem::path& fallback = "results") {
    if (const char* env = std::getenv("L2T_RESULTS_DIR"); env && *env) return env;
    return fallback;
}

/// Writes <dir>/report.json (and curve.csv + curve.json when a curve is given).
inline void store_result_in(const std::filesystem::path& dir, ResultRecord& r, const TorsionCurve* curve = nullptr) {
    if (r.spec_digest.empty()) r.spec_digest = fnv_digest(r.spec_text);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
    if (curve) {
        write_atomic(dir / "curve.csv", curve_csv(*curve));
        write_atomic(dir / "curve.json", to_json(*curve).dump(2) + "\n");
        r.curve_file = "curve.csv";
    }
    write_atomic(dir / "report.json", r.to_json().dump(2) + "\n");
}

/// Writes results/<digest>/{report.json, curve.csv, curve.json}.
inline std::filesystem::path store_result(const std::filesystem::path& root, ResultRecord r,
                                          const TorsionCurve* curve = nullptr) {
    if (r.spec_digest.empty()) r.spec_digest = fnv_digest(r.spec_text);
    const auto dir = root / r.spec_digest;
    store_result_in(dir, r, curve);
    return dir;
}

inline ResultRecord load_result(const std::filesystem::path& root, const std::string& digest) {
    const auto path = root / digest / "report.json";
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return ResultRecord::from_json(nlohmann::json::parse(ss.str()));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": malformed record: " + e.what());
    }
}

}  // namespace l2tor

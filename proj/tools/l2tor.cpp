// l2tor: compute, fit and verify L2-Alexander torsion curves.
//
// Exit codes: 0 ok, 1 property failure, 2 input error, 3 estimator non-convergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "l2tor/l2tor.hpp"

namespace {

using namespace l2tor;

constexpr int kOk = 0, kPropertyFailure = 1, kInputError = 2, kNonConvergence = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Source {
    std::string catalog;
    std::string file;
    std::string phi;
};

struct Loaded {
    GroupPresentation presentation;
    std::optional<CohomologyClass> phi;
    std::optional<CatalogEntry> entry;
};

Loaded load_source(const Source& s) {
    if (s.catalog.empty() == s.file.empty()) throw InputError("exactly one of --catalog and --file is required");
    Loaded l;
    if (!s.catalog.empty()) {
        try {
            l.entry = catalog_get(s.catalog);
        } catch (const std::out_of_range& e) {
            std::string names;
            for (const auto& n : catalog_names()) names += " " + n;
            throw InputError(std::string(e.what()) + "; known:" + names);
        }
        if (!l.entry->meta.has_presentation)
            throw InputError("catalog entry '" + s.catalog + "' is metadata-only (no presentation)");
        l.presentation = l.entry->presentation;
        l.phi = l.entry->phi;
    } else {
        try {
            auto pf = load_presentation(s.file);
            l.presentation = pf.presentation;
            l.phi = pf.phi;
        } catch (const ParseError& e) {
            throw InputError(s.file + ": " + e.what());
        } catch (const std::runtime_error& e) {
            throw InputError(e.what());
        }
    }
    if (!s.phi.empty()) {
        try {
            l.phi = CohomologyClass::parse(s.phi);
        } catch (const std::exception& e) {
            throw InputError("--phi: " + std::string(e.what()));
        }
    }
    return l;
}

double parse_number(const std::string& s, const std::string& what) {
    try {
        if (s.find('/') != std::string::npos) return Rational::parse(s).to_double();
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw InputError(what + ": cannot parse '" + s + "'");
    }
}

std::vector<double> parse_grid(const std::string& g) {
    std::vector<std::string> parts;
    std::stringstream ss(g);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw InputError("--grid expects lo:hi:n");
    const double lo = parse_number(parts[0], "--grid lo"), hi = parse_number(parts[1], "--grid hi");
    const double n = parse_number(parts[2], "--grid n");
    if (!(lo > 0) || !(hi > lo) || n < 2 || n != std::floor(n)) throw InputError("--grid needs 0 < lo < hi and integer n >= 2");
    return log_grid(lo, hi, static_cast<std::size_t>(n));
}

std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(double v, int prec = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

// Catalog-derived lower / upper / volume for the bounds report.
struct BoundsInputs {
    double A = 1.0;
    std::optional<double> upper;
    std::optional<double> volume;
    std::optional<double> x;
};

BoundsInputs bounds_inputs(const std::optional<CatalogEntry>& e) {
    BoundsInputs b;
    if (!e) return b;
    const auto& m = e->meta;
    b.A = m.jsj.empty() ? 1.0 : volume_bound(m.jsj);
    if (m.graph_manifold) b.upper = 1.0;
    if (m.volume) b.volume = m.volume->value;
    if (m.thurston_norm) b.x = m.thurston_norm->value;
    return b;
}

void print_fit(const FitReport& f, const std::optional<BoundsRecord>& b) {
    std::cout << "quantity             value\n";
    std::cout << "k_minus              " << fmt(f.k_minus) << "\n";
    std::cout << "k_plus               " << fmt(f.k_plus) << "\n";
    std::cout << "thurston_estimate    " << fmt(f.thurston_estimate) << "\n";
    if (f.symmetry_slope) std::cout << "symmetry_slope       " << fmt(*f.symmetry_slope) << "\n";
    if (f.gauge_k) std::cout << "gauge_exponent       " << fmt(*f.gauge_k) << "\n";
    if (f.leading_coefficient) std::cout << "leading_coefficient  " << fmt(*f.leading_coefficient) << "\n";
    std::cout << "C_band               [" << fmt(f.c_low) << ", " << fmt(f.c_high) << "]\n";
    for (const auto& n : f.notes) std::cout << "note: " << n << "\n";
    if (b) {
        for (const auto& c : b->checks)
            std::cout << (c.satisfied ? "ok   " : "FAIL ") << c.name << "  (" << c.detail << ")\n";
        std::cout << "note: " << b->conjecture_note << "\n";
    }
}

bool fit_converged(const FitReport& f) {
    for (const auto& n : f.notes)
        if (n.find("not converged") != std::string::npos || n.find("not snapped") != std::string::npos) return false;
    return true;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const std::vector<std::string>& suites, const std::string& json_path, const std::string& fault) {
    Fault f = Fault::None;
    if (fault == "fox") f = Fault::FoxProductRule;
    else if (!fault.empty()) throw InputError("unknown fault '" + fault + "'");
    const auto rep = run_verify(suites, f);
    std::size_t failed = 0;
    for (const auto& r : rep.results) {
        if (!r.passed) ++failed;
        std::cout << (r.passed ? "ok   " : "FAIL ") << r.suite << ": " << r.name;
        if (!r.passed && !r.detail.empty()) std::cout << "  -- " << r.detail;
        std::cout << "\n";
    }
    nlohmann::json summary = {{"ok", rep.ok()},
                              {"passed", rep.results.size() - failed},
                              {"failed", failed},
                              {"seconds", rep.seconds}};
    std::cout << summary.dump() << "\n";
    if (!json_path.empty()) write_atomic(json_path, rep.to_json().dump(2) + "\n");
    return rep.ok() ? kOk : kPropertyFailure;
}

// ---------------------------------------------------------------- torsion

struct TorsionArgs {
    Source src;
    std::string grid = "1/8:8:17";
    std::string method = "auto";
    std::size_t quotient_degree = 0;
    std::size_t cyclic_order = 0;
    std::string cover = "abelian";
    int series_depth = 60;
    std::string out;
    std::size_t workers = 0;
    std::optional<std::uint32_t> drop_generator;
    std::optional<std::size_t> drop_relator;
};

TorsionSpec build_spec(const TorsionArgs& a, Loaded& l) {
    if (!l.phi) throw InputError("no class given: use --phi or a 'phi:' line in the presentation file");
    TorsionSpec spec;
    if (l.entry) spec = TorsionSpec::from_catalog(*l.entry);
    spec.presentation = l.presentation;
    spec.phi = *l.phi;
    if (spec.phi.size() != spec.presentation.generator_count())
        throw InputError("class has " + std::to_string(spec.phi.size()) + " weights, presentation has " +
                         std::to_string(spec.presentation.generator_count()) + " generators");
    if (!validate_class(spec.presentation, spec.phi)) throw InputError("class does not vanish on the relators");
    if (!l.entry) {
        // files: drop the first generator with phi != 0; drop the last relator if the deficiency is 0
        for (std::uint32_t i = 0; i < spec.presentation.generator_count(); ++i)
            if (!spec.phi(Word::generator(i)).is_zero()) {
                spec.dropped_generator = i;
                break;
            }
        if (spec.presentation.relator_count() == spec.presentation.generator_count() &&
            spec.presentation.relator_count() > 0)
            spec.dropped_relator = spec.presentation.relator_count() - 1;
    }
    if (a.drop_generator) spec.dropped_generator = *a.drop_generator;
    if (a.drop_relator) spec.dropped_relator = *a.drop_relator;
    spec.grid = parse_grid(a.grid);
    try {
        spec.estimator.method = parse_torsion_method(a.method);
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    spec.estimator.series_depth = a.series_depth;
    spec.estimator.workers = a.workers ? a.workers : default_workers();
    if (a.cover != "abelian" && a.cover != "phi") throw InputError("--cover must be 'abelian' or 'phi'");
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    if (spec.estimator.method != TorsionMethod::Rules) {
        FamilyOptions fo;
        fo.quotient_degree = a.quotient_degree;
        fo.cyclic_order = a.cyclic_order;
        fo.abelian_cover = a.cover == "abelian";
        fo.search.workers = spec.estimator.workers;
        configure_quotient_family(spec, fo);
    }
    return spec;
}

int cmd_torsion(const TorsionArgs& a) {
    auto l = load_source(a.src);
    auto spec = build_spec(a, l);
    std::vector<std::string> errors;
    const auto curve = torsion_curve(spec, &errors);
    for (const auto& e : errors) std::cerr << "estimator failure at " << e << "\n";

    ResultRecord rec;
    rec.spec_text = canonical_spec(spec);
    rec.spec_digest = fnv_digest(rec.spec_text);
    rec.created = utc_timestamp();
    const auto dir = a.out.empty() ? results_root() / rec.spec_digest : std::filesystem::path(a.out);

    const auto smp = samples(curve);
    const auto bi = bounds_inputs(l.entry);
    int status = errors.empty() ? kOk : kNonConvergence;
    std::vector<Asymptote> asym;
    try {
        rec.fit = leading_fit(smp, bi.x);
        if (!fit_converged(rec.fit)) status = kNonConvergence;
        asym = fit_asymptotes(smp, rec.fit);
    } catch (const InsufficientPoints& e) {
        rec.fit.notes.push_back(std::string("fit unavailable: ") + e.what());
        status = kNonConvergence;
    }
    if (l.entry && status != kNonConvergence) rec.bounds = bounds_report(bi.A, rec.fit, bi.upper, bi.volume);
    store_result_in(dir, rec, &curve);
    write_atomic(dir / "plot.svg", svg_loglog(smp, asym, curve.name + "  phi = (" + curve.phi + ")"));

    std::cout << "t                    tau(t)\n";
    for (const auto& p : curve.points)
        std::cout << fmt(p.t, 8) << std::string(21 - std::min<std::size_t>(20, fmt(p.t, 8).size()), ' ')
                  << fmt(p.value, 10) << (p.flags.empty() ? "" : "  [" + p.flags.front() + "]") << "\n";
    print_fit(rec.fit, rec.bounds);
    std::cout << "wrote " << dir.string() << "/{curve.csv,curve.json,report.json,plot.svg}\n";
    return status;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    std::string curve;
    std::string catalog;
    std::optional<double> x, t_min, A, upper, volume;
    double window = 0.25;
    std::string out;
};

int cmd_fit(const FitArgs& a) {
    LoadedCurve lc;
    try {
        lc = load_curve_csv(a.curve);
    } catch (const DataError& e) {
        throw InputError(e.what());
    }
    std::optional<CatalogEntry> entry;
    if (!a.catalog.empty()) {
        try {
            entry = catalog_get(a.catalog);
        } catch (const std::out_of_range& e) {
            throw InputError(e.what());
        }
    }
    auto bi = bounds_inputs(entry);
    if (a.x) bi.x = a.x;
    if (a.A) bi.A = *a.A;
    if (a.upper) bi.upper = a.upper;
    if (a.volume) bi.volume = a.volume;

    LeadingOptions lo;
    lo.window = a.window;
    lo.t_min = a.t_min;
    FitReport fit;
    try {
        fit = leading_fit(lc.samples, bi.x, lo);
    } catch (const InsufficientPoints& e) {
        std::cerr << "fit: " << e.what() << "\n";
        return kNonConvergence;
    }
    const auto bounds = bounds_report(bi.A, fit, bi.upper, bi.volume);
    print_fit(fit, bounds);
    const std::filesystem::path dir = a.out.empty() ? std::filesystem::path(a.curve).parent_path() : std::filesystem::path(a.out);
    std::error_code ec;
    if (!dir.empty()) std::filesystem::create_directories(dir, ec);
    write_atomic(dir / "fit.json", to_json(fit).dump(2) + "\n");
    write_atomic(dir / "bounds.json", to_json(bounds).dump(2) + "\n");
    if (!fit_converged(fit)) return kNonConvergence;
    return bounds.satisfied() ? kOk : kPropertyFailure;
}

// ---------------------------------------------------------------- quotients

int cmd_quotients(const Source& src, std::size_t degree, std::size_t limit, const std::string& out, std::size_t workers) {
    const auto l = load_source(src);
    if (degree < 1) throw InputError("--quotient-degree must be >= 1");
    QuotientSearchOptions opts;
    opts.workers = workers ? workers : default_workers();
    const auto res = quotient_search_ex(l.presentation, degree, limit, opts);
    std::ostringstream os;
    for (const auto& q : res.quotients) {
        os << "order=" << q.order << " degree=" << q.degree;
        for (std::size_t i = 0; i < q.images.size(); ++i)
            os << " " << l.presentation.generators()[i] << "=" << q.images[i].cycles();
        os << "\n";
    }
    if (out.empty()) std::cout << os.str();
    else write_atomic(out, os.str());
    std::cerr << res.quotients.size() << " quotient(s)" << (res.truncated ? " (search truncated)" : "") << "\n";
    return kOk;
}

void add_source(CLI::App* c, Source& s) {
    c->add_option("--catalog", s.catalog, "catalog entry (trefoil, trefoil-torus, figure8, borromean, whitehead, ...)");
    c->add_option("--file", s.file, "presentation file");
    c->add_option("--phi", s.phi, "cohomology class, comma separated (e.g. 0,-1,0)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"L2-Alexander torsion of knot and link exteriors"};
    app.require_subcommand(1);

    std::vector<std::string> suites;
    std::string verify_json, fault;
    auto* verify = app.add_subcommand("verify", "run the identity / invariant suites");
    verify->add_option("--suite", suites, "rules, mahler, fox, u0v0, paper (repeatable; default all)")->delimiter(',');
    verify->add_option("--json", verify_json, "write the full machine-readable report here");
    verify->add_option("--inject-fault", fault)->group("");

    TorsionArgs ta;
    auto* torsion = app.add_subcommand("torsion", "compute a torsion curve");
    add_source(torsion, ta.src);
    torsion->add_option("--grid", ta.grid, "lo:hi:n, log-spaced (default 1/8:8:17)");
    torsion->add_option("--method", ta.method, "rules|quotient|series|auto");
    torsion->add_option("--quotient-degree", ta.quotient_degree, "max permutation degree of the finite image");
    torsion->add_option("--cyclic-order", ta.cyclic_order, "characters per cover direction (last stage)");
    torsion->add_option("--cover", ta.cover, "abelian (basis of Hom(G,Z)) or phi");
    torsion->add_option("--series-depth", ta.series_depth, "trace-series depth");
    torsion->add_option("--out", ta.out, "output directory (default $L2T_RESULTS_DIR or results/<digest>)");
    torsion->add_option("--workers", ta.workers, "worker threads (default: logical cores)");
    torsion->add_option("--drop-generator", ta.drop_generator, "generator whose Fox column is removed");
    torsion->add_option("--drop-relator", ta.drop_relator, "relator removed to reach deficiency one");

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "fit degrees and leading coefficient of a curve");
    fit->add_option("curve", fa.curve, "curve.csv")->required();
    fit->add_option("--catalog", fa.catalog, "take x, A, upper bound and volume from a catalog entry");
    fit->add_option("--x", fa.x, "known Thurston norm");
    fit->add_option("--t-min", fa.t_min, "fit C on t >= t_min instead of the top window");
    fit->add_option("--window", fa.window, "end-window fraction");
    fit->add_option("--A", fa.A, "lower bound A(N, phi)");
    fit->add_option("--upper", fa.upper, "upper bound for C");
    fit->add_option("--volume", fa.volume, "total volume: checks C <= exp(vol/6pi)");
    fit->add_option("--out", fa.out, "output directory (default: next to the curve)");

    Source qs;
    std::size_t qdeg = 3, qlimit = 50, qworkers = 0;
    std::string qout;
    auto* quot = app.add_subcommand("quotients", "list transitive permutation quotients");
    add_source(quot, qs);
    quot->add_option("--quotient-degree", qdeg, "max degree");
    quot->add_option("--limit", qlimit, "max number of quotients");
    quot->add_option("--out", qout, "output file (default stdout)");
    quot->add_option("--workers", qworkers, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        if (*verify) return cmd_verify(suites, verify_json, fault);
        if (*torsion) return cmd_torsion(ta);
        if (*fit) return cmd_fit(fa);
        if (*quot) return cmd_quotients(qs, qdeg, qlimit, qout, qworkers);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNonConvergence;
    }
    return kInputError;
}

#include "fiocalc/experiment.hpp"

#include "fiocalc/catalog.hpp"
#include "fiocalc/maslov.hpp"
#include "fiocalc/oscillatory.hpp"
#include "fiocalc/symbols.hpp"
#include "fiocalc/verify.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace fiocalc {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& what) {
    if (!j.is_object()) throw ValidationError(what + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ValidationError(what + ": unknown field '" + it.key() + "'");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvFile {
public:
    CsvFile(const std::string& dir, const std::string& name) : path_(dir + "/" + name) {
        std::filesystem::create_directories(dir);
        out_.open(path_, std::ios::trunc);
        if (!out_) throw ValidationError("cannot open output file " + path_);
    }
    void header(const std::string& line) { out_ << line << "\n"; }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

Vec vec_from(const json& j) {
    Vec v(static_cast<int>(j.size()));
    for (int i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
    return v;
}

std::pair<Vec, Vec> point_from(const json& j) {
    reject_unknown(j, {"y", "eta"}, "point");
    return {vec_from(j.at("y")), vec_from(j.at("eta"))};
}

PhaseKind phase_from(const json& j) {
    if (j.is_null()) return PhaseKind::Gaussian;
    reject_unknown(j, {"phase", "chart"}, "phase");
    const std::string kind = j.at("phase").get<std::string>();
    if (kind == "real_chart") return PhaseKind::RealChart;
    if (kind == "gaussian") return PhaseKind::Gaussian;
    throw ValidationError("phase: unknown kind '" + kind + "'");
}

/// Amplitude expression over (y, etahat, |eta|); variables y1.., eh1.., r
/// (aliases y, eh at n = 1).
std::function<Complex(const Vec&, const Vec&)> amplitude_from(const json& j, int n) {
    reject_unknown(j, {"order", "amplitude", "amplitude_im"}, "symbol");
    std::vector<std::string> vars;
    if (n == 1) {
        vars = {"y", "eh", "r"};
    } else {
        for (int i = 1; i <= n; ++i) vars.push_back("y" + std::to_string(i));
        for (int i = 1; i <= n; ++i) vars.push_back("eh" + std::to_string(i));
        vars.push_back("r");
    }
    const Expr re = Expr::parse(j.at("amplitude").get<std::string>(), vars);
    const Expr im = j.contains("amplitude_im")
                        ? Expr::parse(j.at("amplitude_im").get<std::string>(), vars)
                        : Expr();
    return [re, im, n](const Vec& y, const Vec& eta) {
        std::vector<double> vals;
        vals.reserve(2 * n + 1);
        for (int i = 0; i < n; ++i) vals.push_back(y[i]);
        const double r = eta.norm();
        for (int i = 0; i < n; ++i) vals.push_back(eta[i] / r);
        vals.push_back(r);
        return Complex(re.eval(vals), im.empty() ? 0.0 : im.eval(vals));
    };
}

PrincipalSymbol symbol_from(const json& j, CanonicalMap map) {
    PrincipalSymbol s;
    s.order = j.value("order", 0.0);
    s.amplitude = amplitude_from(j, map.n);
    s.map = std::move(map);
    return s;
}

Path path_from(const json& j, int n) {
    reject_unknown(j, {"waypoints", "samples_per_segment"}, "path");
    std::vector<std::pair<Vec, Vec>> pts;
    for (const auto& w : j.at("waypoints")) {
        if (static_cast<int>(w.size()) != 2 * n)
            throw ValidationError("path: each waypoint needs n y-entries then n eta-entries");
        Vec y(n), eta(n);
        for (int i = 0; i < n; ++i) y[i] = w.at(i).get<double>();
        for (int i = 0; i < n; ++i) eta[i] = w.at(n + i).get<double>();
        pts.emplace_back(y, eta);
    }
    return waypoint_path(pts);
}

// ---------------------------------------------------------------------------

ExperimentOutcome run_validate_map(const json& cfg, const std::string& out_dir) {
    reject_unknown(cfg, {"task", "map", "samples", "tol", "seed", "out"}, "validate-map");
    const CanonicalMap map = map_from_json(cfg.at("map"));
    const double tol = cfg.value("tol", 1e-8);
    Rng rng(cfg.value("seed", 1234u));
    const auto samples = random_samples(map.n, cfg.value("samples", 100), rng);
    const CanonicalReport rep = validate_canonical(map, samples, tol);

    CsvFile csv(out_dir, "validate_map.csv");
    csv.header("identity,residual,tolerance,pass");
    const std::pair<const char*, double> rows[] = {
        {"two-form-yy", rep.two_form_yy},   {"two-form-ee", rep.two_form_ee},
        {"two-form-mixed", rep.two_form_mixed}, {"euler-x", rep.euler_x},
        {"euler-xi", rep.euler_xi},         {"one-form-e", rep.one_form_e},
        {"one-form-y", rep.one_form_y}};
    for (const auto& [id, v] : rows)
        csv.row({id, fmt(v), fmt(tol), v < tol ? "1" : "0"});

    ExperimentOutcome out;
    out.files = {csv.path()};
    std::ostringstream os;
    os << map.name << ": max residual " << fmt(rep.max_residual());
    if (!rep.pass) {
        out.exit_code = 2;
        os << "; mismatch in validate_canonical check '" << rep.worst_identity() << "'";
    }
    out.summary = os.str();
    return out;
}

ExperimentOutcome run_indices(const json& cfg, const std::string& out_dir) {
    reject_unknown(cfg, {"task", "maps", "point", "points", "seed", "out"}, "indices");
    const auto& maps = cfg.at("maps");
    if (maps.size() != 2) throw ValidationError("indices: need exactly two maps");
    const CanonicalMap m1 = map_from_json(maps.at(0));
    const CanonicalMap m2 = map_from_json(maps.at(1));
    if (m1.n != m2.n) throw ValidationError("indices: dimension mismatch");
    std::vector<std::pair<Vec, Vec>> points;
    if (cfg.contains("point")) points.push_back(point_from(cfg.at("point")));
    if (cfg.contains("points"))
        for (const auto& p : cfg.at("points")) points.push_back(point_from(p));
    if (points.empty()) throw ValidationError("indices: no evaluation points");
    Rng rng(cfg.value("seed", 1234u));

    CsvFile csv(out_dir, "indices.csv");
    csv.header("k,kappa_direct,r,dim_l1_vertical,dim_l2_vertical,dim_l1_l2");
    ExperimentOutcome out;
    for (const auto& [y, eta] : points) {
        const int k = composition_index(m1, m2, y, eta, rng);
        const LagrangianFrame l1 = image_of_vertical(m1, y, eta);
        const CanonicalMap inv2 = inverse_map(m2);
        const auto [px, pxi] = m1(y, eta);
        const auto [wy, we] = inv2(px, pxi);
        const LagrangianFrame l2 = image_of_vertical(m2, wy, we);
        const int kappa = kashiwara_direct(l1, l2);
        const auto dims = intersection_dims(l1, l2);
        const int r =
            m1.n + dims.dim_l1_vertical - dims.dim_l2_vertical - dims.dim_l1_l2;
        csv.row({std::to_string(k), std::to_string(kappa), std::to_string(r),
                 std::to_string(dims.dim_l1_vertical), std::to_string(dims.dim_l2_vertical),
                 std::to_string(dims.dim_l1_l2)});
        if (2 * k != kappa + r) {
            out.exit_code = 2;
            out.summary = "mismatch in composition_index check 'graph-index-vs-direct'";
        }
    }
    out.files = {csv.path()};
    if (out.summary.empty())
        out.summary = "indices for " + m1.name + " against " + m2.name + " written";
    return out;
}

ExperimentOutcome run_maslov_path(const json& cfg, const std::string& out_dir) {
    reject_unknown(cfg, {"task", "map", "phase", "path", "anchor", "samples", "tol", "seed", "out"},
                   "maslov-path");
    const CanonicalMap map = map_from_json(cfg.at("map"));
    const PhaseKind kind = phase_from(cfg.value("phase", json()));
    const Path path = path_from(cfg.at("path"), map.n);

    TrackOptions opts;
    opts.samples = cfg.at("path").value("samples_per_segment", 32) *
                       std::max<int>(1, static_cast<int>(cfg.at("path").at("waypoints").size()) - 1) +
                   1;
    opts.anchor_theta_phi = cfg.value("anchor", 0);
    opts.tol = cfg.value("tol", map.provenance == Provenance::NumericFlow ? 1e-6 : -1.0);

    const PhaseSpec spec{kind, map, "default"};
    const BranchState st = track_branch(spec, path, opts);

    CsvFile csv(out_dir, "maslov_path.csv");
    csv.header("parameter,theta_r,theta_s,theta_phi,rank");
    for (std::size_t i = 0; i < st.s.size(); ++i)
        csv.row({fmt(st.s[i]), fmt(st.theta_r[i]), fmt(st.theta_s[i]),
                 std::to_string(st.theta_phi[i]), std::to_string(st.rank[i])});

    CsvFile events(out_dir, "maslov_events.csv");
    events.header("parameter,rank_before,rank_at,rank_after,theta_jump");
    for (const RankEvent& ev : st.events)
        events.row({fmt(ev.s), std::to_string(ev.rank_before), std::to_string(ev.rank_at),
                    std::to_string(ev.rank_after), std::to_string(ev.theta_jump)});

    ExperimentOutcome out;
    out.files = {csv.path(), events.path()};
    std::ostringstream os;
    os << "path index " << -(st.theta_phi.back() - st.theta_phi.front()) << ", "
       << st.events.size() << " rank events";
    out.summary = os.str();
    return out;
}

ExperimentOutcome run_compose_symbols(const json& cfg, const std::string& out_dir) {
    reject_unknown(cfg, {"task", "maps", "symbols", "mode", "point", "seed", "out"},
                   "compose-symbols");
    const auto& maps = cfg.at("maps");
    const auto& symbols = cfg.at("symbols");
    if (maps.size() != 2 || symbols.size() != 2)
        throw ValidationError("compose-symbols: need two maps and two symbols");
    const PrincipalSymbol s1 = symbol_from(symbols.at(0), map_from_json(maps.at(0)));
    const PrincipalSymbol s2 = symbol_from(symbols.at(1), map_from_json(maps.at(1)));
    const auto [y, eta] = point_from(cfg.at("point"));
    const std::string mode = cfg.value("mode", "star");
    Rng rng(cfg.value("seed", 1234u));

    SymbolValue v;
    if (mode == "star") v = star_composition(s1, s2, y, eta, rng);
    else if (mode == "compose") v = composition_symbol(s1, s2, y, eta, rng);
    else throw ValidationError("compose-symbols: mode must be 'star' or 'compose'");

    CsvFile csv(out_dir, "compose_symbols.csv");
    csv.header("mode,k,order,value_re,value_im");
    csv.row({mode, std::to_string(v.index), fmt(v.order), fmt(v.value.real()),
             fmt(v.value.imag())});

    ExperimentOutcome out;
    out.files = {csv.path()};
    std::ostringstream os;
    os << mode << " value (" << fmt(v.value.real()) << ", " << fmt(v.value.imag()) << ") with k = "
       << v.index;
    out.summary = os.str();
    return out;
}

ExperimentOutcome run_extract_symbol(const json& cfg, const std::string& out_dir) {
    reject_unknown(cfg, {"task", "map", "phase", "symbol", "probe", "seed", "out"},
                   "extract-symbol");
    const CanonicalMap map = map_from_json(cfg.at("map"));
    const PhaseKind kind = phase_from(cfg.value("phase", json()));

    const json& pj = cfg.at("probe");
    reject_unknown(pj, {"y", "eta", "lambdas", "rho_radius", "spatial_width", "low_radius"},
                   "probe");
    ExtractionSpec probe;
    probe.y0 = vec_from(pj.at("y"));
    probe.eta0 = vec_from(pj.at("eta"));
    probe.eta0 /= probe.eta0.norm();
    for (const auto& l : pj.at("lambdas")) probe.lambdas.push_back(l.get<double>());
    probe.rho_radius = pj.value("rho_radius", map.n == 1 ? 0.4 : 0.8);

    KernelSpec spec;
    spec.map = map;
    spec.phase = kind;
    const json sym = cfg.value("symbol", json{{"amplitude", "1"}});
    spec.amplitude = amplitude_from(sym, map.n);
    spec.order = sym.value("order", 0.0);
    const double lam_max = *std::max_element(probe.lambdas.begin(), probe.lambdas.end());
    spec.cutoff.spatial_width = pj.value("spatial_width", map.n == 1 ? 0.3 : 0.6);
    spec.cutoff.low_radius = pj.value("low_radius", 1.0);
    spec.quad = QuadSpec::for_lambda(map.n, lam_max, 1.9,
                                     std::max(0.55, 1.2 * spec.cutoff.spatial_width
                                                        + 0.25));

    const ExtractResult res = extract_symbol(spec, probe);

    CsvFile csv(out_dir, "extract_lambda.csv");
    csv.header("lambda,normalized_re,normalized_im");
    for (std::size_t i = 0; i < res.lambdas.size(); ++i)
        csv.row({fmt(res.lambdas[i]), fmt(res.normalized[i].real()),
                 fmt(res.normalized[i].imag())});
    CsvFile fit(out_dir, "extract_fit.csv");
    fit.header("value_re,value_im,error_bar,fitted_exponent,low_confidence");
    fit.row({fmt(res.value.real()), fmt(res.value.imag()), fmt(res.error_bar),
             fmt(res.fitted_exponent), res.low_confidence ? "1" : "0"});

    ExperimentOutcome out;
    out.files = {csv.path(), fit.path()};
    std::ostringstream os;
    os << "extracted (" << fmt(res.value.real()) << ", " << fmt(res.value.imag())
       << ") error bar " << fmt(res.error_bar);
    if (res.low_confidence) os << " [low confidence]";
    out.summary = os.str();
    return out;
}

ExperimentOutcome run_verify_suite(const json& cfg, const std::string& out_dir,
                                   std::ostream& log) {
    reject_unknown(cfg, {"task", "only", "seed", "out"}, "verify-suite");
    VerifyOptions opts;
    opts.seed = cfg.value("seed", 20240817u);
    if (cfg.contains("only"))
        for (const auto& id : cfg.at("only")) opts.only.push_back(id.get<std::string>());

    const auto results = verify_suite(opts, log);

    CsvFile csv(out_dir, "verify.csv");
    csv.header("id,pass,seconds,detail");
    for (const auto& r : results) {
        std::string detail = r.detail;
        for (char& c : detail)
            if (c == ',') c = ';';
        csv.row({r.id, r.pass ? "1" : "0", fmt(r.seconds), detail});
    }

    ExperimentOutcome out;
    out.files = {csv.path()};
    int failed = 0;
    for (const auto& r : results)
        if (!r.pass) ++failed;
    std::ostringstream os;
    os << results.size() - failed << "/" << results.size() << " criteria passed";
    out.summary = os.str();
    out.exit_code = all_passed(results) ? 0 : 2;
    return out;
}

}  // namespace

std::string default_out_dir() {
    if (const char* env = std::getenv("FIOCALC_OUT_DIR")) return env;
    return ".";
}

ExperimentOutcome run_experiment(const nlohmann::json& config, const std::string& out_dir,
                                 std::ostream& log) {
    if (!config.is_object() || !config.contains("task"))
        throw ValidationError("config: expected an object with a 'task' field");
    const std::string task = config.at("task").get<std::string>();
    const std::string dir = out_dir.empty() ? default_out_dir() : out_dir;
    if (task == "validate-map") return run_validate_map(config, dir);
    if (task == "indices") return run_indices(config, dir);
    if (task == "maslov-path") return run_maslov_path(config, dir);
    if (task == "compose-symbols") return run_compose_symbols(config, dir);
    if (task == "extract-symbol") return run_extract_symbol(config, dir);
    if (task == "verify-suite") return run_verify_suite(config, dir, log);
    throw ValidationError("config: unknown task '" + task + "'");
}

}  // namespace fiocalc

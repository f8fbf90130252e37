#include "fiocalc/verify.hpp"

#include "fiocalc/catalog.hpp"
#include "fiocalc/maslov.hpp"
#include "fiocalc/oscillatory.hpp"
#include "fiocalc/symbols.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

namespace fiocalc {

namespace {

std::pair<Vec, Vec> pt2(double y1, double y2, double e1, double e2) {
    Vec y(2), e(2);
    y << y1, y2;
    e << e1, e2;
    return {y, e};
}

std::function<Complex(const Vec&, const Vec&)> unit_amp() {
    return [](const Vec&, const Vec&) { return Complex(1.0, 0.0); };
}

KernelSpec make_spec(CanonicalMap map, PhaseKind kind, double lambda_max,
                     std::function<Complex(const Vec&, const Vec&)> amp = unit_amp(),
                     double order = 0.0, bool amplitude_constant = true) {
    KernelSpec spec;
    spec.quad = QuadSpec::for_lambda(map.n, lambda_max);
    spec.map = std::move(map);
    spec.phase = kind;
    spec.amplitude = std::move(amp);
    spec.order = order;
    spec.amplitude_constant = amplitude_constant;
    return spec;
}

CanonicalMap wiggly_flow(double time, int steps) {
    std::vector<std::vector<Expr>> metric(2, std::vector<Expr>(2));
    metric[0][0] = Expr::parse("1", {"x1", "x2"});
    metric[0][1] = Expr::parse("0", {"x1", "x2"});
    metric[1][0] = Expr::parse("0", {"x1", "x2"});
    metric[1][1] = Expr::parse("(1+0.3*sin(x1))^(-2)", {"x1", "x2"});
    return flow_map(metric_flow_spec(metric, time, steps));
}

LagrangianFrame random_valid_frame(Rng& rng, int n, const BasePoint& base) {
    const Mat b = rng.nondegenerate_matrix(n);
    const Mat s = rng.sym_matrix(n);
    return {b, Mat(b.transpose().partialPivLu().solve(s)), base};
}

double degrees(const Complex& z) { return std::arg(z) * 180.0 / M_PI; }

double angle_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), 360.0);
    return std::min(d, 360.0 - d);
}

// ---------------------------------------------------------------------------

CriterionResult check_a1(Rng& rng) {
    CriterionResult res{"A1", true, "", 0};
    std::ostringstream detail;
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = static_cast<int>(rng.integer(1, 4));
        BasePoint base{rng.vector(n), rng.unit_vector(n), "default"};
        const Mat a1 = rng.sym_matrix(n);
        const Mat a2 = rng.sym_matrix(n);
        const GraphIndexResult g = kashiwara_graphs(a1, a2);
        const int direct = kashiwara_direct(graph_frame_over_vertical(a1, base),
                                            graph_frame_over_vertical(a2, base));
        if (g.kappa != direct || 2 * g.varkappa != g.kappa + g.r) {
            res.pass = false;
            detail << "mismatch at trial " << trial << " (graph-kappa " << g.kappa << ", direct "
                   << direct << "); ";
            break;
        }
        ++checked;
    }
    detail << checked << "/1000 graph pairs: graph-formula kappa == 3n-signature and "
           << "varkappa == (kappa+r)/2 exactly";
    res.detail = detail.str();
    return res;
}

CriterionResult check_a2(Rng& rng) {
    CriterionResult res{"A2", true, "", 0};
    int checked = 0;
    std::ostringstream detail;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = static_cast<int>(rng.integer(1, 4));
        BasePoint base{rng.vector(n), rng.unit_vector(n), "default"};
        const LagrangianFrame l1 = random_valid_frame(rng, n, base);
        const LagrangianFrame l2 = random_valid_frame(rng, n, base);
        const int k12 = kashiwara_direct(l1, l2);
        const int k21 = kashiwara_direct(l2, l1);
        const auto dims = intersection_dims(l1, l2);
        const int r12 = n + dims.dim_l1_vertical - dims.dim_l2_vertical - dims.dim_l1_l2;
        const int v12 = varkappa_frames(l1, l2, rng);
        const int v21 = varkappa_frames(l2, l1, rng);
        const bool ok = (k12 == -k21) && ((k12 + r12) % 2 == 0) && (v12 == (k12 + r12) / 2) &&
                        (v12 + v21 == n - dims.dim_l1_l2);
        if (!ok) {
            res.pass = false;
            detail << "identity failed at trial " << trial << "; ";
            break;
        }
        ++checked;
    }
    detail << checked << "/500 frame pairs: varkappa integral, "
           << "varkappa(L1,L2)+varkappa(L2,L1) == n - dim(L1^L2), kappa antisymmetric";
    res.detail = detail.str();
    return res;
}

CriterionResult check_a3(Rng& rng) {
    CriterionResult res{"A3", true, "", 0};
    std::ostringstream detail;

    std::vector<CanonicalMap> analytic;
    analytic.push_back(identity_map(1));
    analytic.push_back(identity_map(2));
    analytic.push_back(half_wave_map(1, 0.7));
    analytic.push_back(half_wave_map(2, 1.0));
    analytic.push_back(half_wave_map(2, -1.0));
    analytic.push_back(lift_map("y+y^3"));
    Mat L(2, 2);
    L << 1, 0.5, 0, 1;
    analytic.push_back(linear_symplectic_map(L));

    double worst_analytic = 0.0;
    for (const auto& m : analytic) {
        const CanonicalReport rep = validate_canonical(m, random_samples(m.n, 100, rng), 1e-10);
        worst_analytic = std::max(worst_analytic, rep.max_residual());
        if (!rep.pass) {
            res.pass = false;
            detail << m.name << " failed " << rep.worst_identity() << " at "
                   << rep.max_residual() << "; ";
        }
    }
    detail << "analytic catalog worst residual " << worst_analytic << " (tol 1e-10)";

    const CanonicalMap flow = wiggly_flow(2.0, 1000);
    const auto flow_samples = random_samples(2, 6, rng);
    const CanonicalReport frep = validate_canonical(flow, flow_samples, 1e-6);
    detail << "; flow(1000 steps) worst " << frep.max_residual() << " [" << frep.worst_identity()
           << "] (tol 1e-6)";
    if (!frep.pass) res.pass = false;

    // Order of accuracy against a refined reference.
    const auto [y, eta] = flow_samples[0];
    const auto ref = wiggly_flow(2.0, 16000)(y, eta);
    auto err = [&](int steps) {
        const auto [x, xi] = wiggly_flow(2.0, steps)(y, eta);
        return (x - ref.first).norm() + (xi - ref.second).norm();
    };
    const double e1 = err(1000), e2 = err(2000);
    const double ratio = e1 / e2;
    detail << "; refinement ratio " << ratio << " (order-2 target 4)";
    if (!(ratio > 2.6 && ratio < 6.0)) res.pass = false;

    res.detail = detail.str();
    return res;
}

CriterionResult check_a4(Rng& rng) {
    CriterionResult res{"A4", true, "", 0};
    std::ostringstream detail;
    std::vector<CanonicalMap> maps;
    maps.push_back(identity_map(2));
    maps.push_back(half_wave_map(2, 0.9));
    maps.push_back(half_wave_map(2, -0.6));
    maps.push_back(lift_map("y+y^3"));
    Mat L(2, 2);
    L << 1, 0.4, 0, 1;
    maps.push_back(linear_symplectic_map(L));
    maps.push_back(wiggly_flow(2.0, 300));

    int paths_checked = 0;
    for (const auto& m : maps) {
        const bool is_flow = m.provenance == Provenance::NumericFlow;
        const int n_paths = is_flow ? 4 : 20;
        for (int k = 0; k < n_paths; ++k) {
            const auto a = random_samples(m.n, 1, rng)[0];
            const auto b = random_samples(m.n, 1, rng)[0];
            const Path path = waypoint_path({a, b});
            TrackOptions opts;
            opts.samples = is_flow ? 17 : 33;
            opts.tol = is_flow ? 1e-5 : -1.0;
            opts.integer_slack = is_flow ? 0.05 : 0.02;
            BranchState real_state, gauss_state;
            try {
                real_state = track_branch(PhaseSpec{PhaseKind::RealChart, m}, path, opts);
                gauss_state = track_branch(PhaseSpec{PhaseKind::Gaussian, m}, path, opts);
            } catch (const Error&) {
                --k;  // rare invalid draw (chart degeneracy); redraw
                continue;
            }
            if (!real_state.events.empty() || !gauss_state.events.empty()) continue;
            // Common anchoring at zero: the integer curves must agree exactly
            // at shared parameters (compare the endpoints and the base grid).
            if (real_state.theta_phi.front() != gauss_state.theta_phi.front() ||
                real_state.theta_phi.back() != gauss_state.theta_phi.back()) {
                res.pass = false;
                detail << m.name << " branch mismatch between phase kinds; ";
            }
            // Constant-m identity on the chart-phase segment.
            long m0 = 0;
            bool first = true;
            for (std::size_t i = 0; i < real_state.s.size(); ++i) {
                const auto [py, pe] = path.at(real_state.s[i]);
                const PhaseJet jet = phase_jet(PhaseSpec{PhaseKind::RealChart, m}, py, pe);
                const long diff =
                    real_state.theta_phi[i] - inertia(Mat(jet.ee.real()), opts.tol).kappa_plus;
                if (first) {
                    m0 = diff;
                    first = false;
                } else if (diff != m0) {
                    res.pass = false;
                    detail << m.name << " chart-segment constant drifted; ";
                    break;
                }
            }
            ++paths_checked;
        }
    }
    detail << paths_checked << " constant-rank paths: integer branches equal across phase kinds, "
           << "chart-segment constant stable";
    res.detail = detail.str();
    return res;
}

CriterionResult check_a5(Rng& rng) {
    CriterionResult res{"A5", true, "", 0};
    std::ostringstream detail;

    ExtractionSpec probe;
    probe.y0 = Vec::Zero(2);
    probe.eta0 = Vec(2);
    probe.eta0 << 1.0, 0.0;
    probe.rho_radius = 1.0;
    probe.lambdas = {45, 60, 85, 115, 150};

    // Direct route: kernel of the time-reversed translation.  The spatial
    // windows must contain the first transverse Fresnel zone (width
    // ~ sqrt(2 pi / lambda)) with room to spare at the smallest probe
    // frequency, otherwise the truncation pollutes the 1/lambda fit.
    auto direct_spec = make_spec(half_wave_map(2, -1.0), PhaseKind::RealChart, 150.0);
    direct_spec.cutoff.spatial_width = 0.75;
    direct_spec.quad = QuadSpec::for_lambda(2, 150.0, 1.9, 0.95);
    const ExtractResult direct = extract_symbol(direct_spec, probe);

    const double mod_err = std::abs(std::abs(direct.value) - 1.0);
    const double phase_deg = degrees(direct.value);
    const double to_quarter = angle_distance(phase_deg, 90.0);
    const double to_zero = angle_distance(phase_deg, 0.0);

    detail << "measured " << direct.value << " (|.| err " << mod_err << ", phase " << phase_deg
           << " deg)";
    if (mod_err > 0.05) {
        res.pass = false;
        detail << " modulus outside 5%";
    }
    const bool quarter_wins = to_quarter <= 10.0;
    const bool zero_wins = to_zero <= 10.0;
    if (!quarter_wins && !zero_wins) {
        res.pass = false;
        detail << "; phase matches neither candidate";
    } else {
        detail << "; verdict: " << (quarter_wins ? "index-arithmetic route (value i)"
                                                 : "plain-conjugation shortcut (value 1)");
    }

    // Symbolic predictions for the record.
    const auto [x0, xi0] = pt2(1.0, 0.0, 1.0, 0.0);
    const AdjointValue av = adjoint_symbol(
        PrincipalSymbol{0.0, unit_amp(), half_wave_map(2, 1.0), SymbolView::Singular, {}},
        Vec(x0), Vec(xi0), rng);
    detail << "; symbolic candidates " << av.value_step_arithmetic << " vs "
           << av.value_conjugate_only;
    if (quarter_wins &&
        std::abs(direct.value - av.value_step_arithmetic) > 0.2) {
        res.pass = false;
        detail << "; winner does not match the index-arithmetic value";
    }

    // Independent z-integral route.
    ExtractionSpec cprobe = probe;
    cprobe.lambdas = {45, 60, 80, 100};
    auto id_spec = make_spec(identity_map(2), PhaseKind::RealChart, 100.0);
    auto hw_spec = make_spec(half_wave_map(2, 1.0), PhaseKind::RealChart, 100.0);
    hw_spec.cutoff.spatial_width = 0.75;
    hw_spec.quad = QuadSpec::for_lambda(2, 100.0, 1.9, 0.95);
    const ExtractResult composed = compose_numeric(id_spec, hw_spec, true, cprobe);
    const double gap = std::abs(composed.value - direct.value);
    const double bars = composed.error_bar + direct.error_bar + 0.05;
    detail << "; z-integral route " << composed.value << " (gap " << gap << ", bars " << bars
           << ")";
    if (gap > bars) {
        res.pass = false;
        detail << "; composition route disagrees";
    }
    res.detail = detail.str();
    return res;
}

CriterionResult check_a6() {
    CriterionResult res{"A6", true, "", 0};
    std::ostringstream detail;
    ExtractionSpec probe;
    probe.y0 = Vec::Constant(1, 0.1);
    probe.eta0 = Vec::Constant(1, 1.0);
    probe.rho_radius = 0.4;
    probe.lambdas = {50, 100, 200, 300, 400};

    const ExtractResult id_res =
        extract_symbol(make_spec(identity_map(1), PhaseKind::RealChart, 400.0), probe);
    detail << "identity " << id_res.value << " exp " << id_res.fitted_exponent;
    if (std::abs(id_res.value - Complex(1, 0)) > 0.03 || std::abs(id_res.fitted_exponent) > 0.05)
        res.pass = false;

    probe.y0 = Vec::Zero(1);
    const ExtractResult hw_res =
        extract_symbol(make_spec(half_wave_map(1, 1.0), PhaseKind::RealChart, 400.0), probe);
    detail << "; half-wave " << hw_res.value << " exp " << hw_res.fitted_exponent;
    if (std::abs(hw_res.value - Complex(1, 0)) > 0.03 || std::abs(hw_res.fitted_exponent) > 0.05)
        res.pass = false;

    res.detail = detail.str();
    return res;
}

CriterionResult check_a7(Rng& rng) {
    CriterionResult res{"A7", true, "", 0};
    std::ostringstream detail;
    const double t = 0.4, s = 0.7;
    ExtractionSpec probe;
    probe.y0 = Vec::Zero(1);
    probe.eta0 = Vec::Constant(1, 1.0);
    probe.rho_radius = 0.4;
    probe.lambdas = {40, 60, 85, 110};

    const auto spec_t = make_spec(half_wave_map(1, t), PhaseKind::RealChart, 110.0);
    const auto spec_s = make_spec(half_wave_map(1, s), PhaseKind::RealChart, 110.0);
    const ExtractResult composed = compose_numeric(spec_t, spec_s, false, probe);

    const auto spec_sum = make_spec(half_wave_map(1, t + s), PhaseKind::RealChart, 110.0);
    const ExtractResult direct = extract_symbol(spec_sum, probe);

    const SymbolValue symbolic = composition_symbol(
        PrincipalSymbol{0.0, unit_amp(), half_wave_map(1, t), SymbolView::Singular, {}},
        PrincipalSymbol{0.0, unit_amp(), half_wave_map(1, s), SymbolView::Singular, {}},
        probe.y0, probe.eta0, rng);

    detail << "z-integral " << composed.value << ", symbolic " << symbolic.value
           << ", direct sum " << direct.value;
    if (std::abs(composed.value - symbolic.value) > 0.03) res.pass = false;
    if (std::abs(composed.value - direct.value) > 0.03) res.pass = false;
    if (std::abs(direct.value - symbolic.value) > 0.03) res.pass = false;
    res.detail = detail.str();
    return res;
}

CriterionResult check_a8(Rng& rng) {
    CriterionResult res{"A8", true, "", 0};
    std::ostringstream detail;

    const CanonicalMap lift = lift_map("y+y^3");
    const double y0v = 0.2;

    auto a_sym = [](const Vec& x, const Vec& xi) {
        return Complex(2.0 + std::sin(x[0]), 0.0) * (xi[0] > 0 ? 1.0 : -1.0);
    };

    ExtractionSpec probe;
    probe.y0 = Vec::Constant(1, y0v);
    probe.eta0 = Vec::Constant(1, 1.0);
    probe.rho_radius = 0.35;
    probe.lambdas = {120, 160, 200, 260};
    const double lam_max = 260.0;

    const auto spec_v = make_spec(lift, PhaseKind::RealChart, lam_max);
    // The multiplier symbol depends on the base point: no offset caching.
    const auto spec_a =
        make_spec(identity_map(1), PhaseKind::RealChart, lam_max, a_sym, 0.0, false);

    const double delta = 0.85 * M_PI / (spec_v.quad.r_max + lam_max);
    const auto [xs, xis] = lift(probe.y0, probe.eta0);

    // Inner slice of V at y0, composed through A, then through V*.
    const Vec wpad = Vec::Constant(1, spec_v.cutoff.spatial_width + 0.15);
    const GridSpec w_grid = GridSpec::lattice(probe.y0, xs - wpad, xs + wpad, delta);
    const KernelSlice v_slice = synthesize_slice(spec_v, probe.y0, w_grid);

    const Vec zpad = Vec::Constant(1, 2 * spec_v.cutoff.spatial_width + 0.2);
    const GridSpec z_grid = GridSpec::lattice(probe.y0, xs - zpad, xs + zpad, delta);
    const KernelSlice av_slice = compose_slice(v_slice, spec_a, false, z_grid);

    const Vec xpad = Vec::Constant(1, probe.rho_radius + 2 * delta);
    const GridSpec x_grid = GridSpec::lattice(probe.y0, probe.y0 - xpad, probe.y0 + xpad, delta);
    const KernelSlice b_slice = compose_slice(av_slice, spec_v, true, x_grid);

    const ExtractResult extracted = extract_symbol(b_slice, identity_map(1), 0.0, probe);

    const Complex predicted = a_sym(xs, xis);  // |sigma_V|^2 = 1 for the unit lift symbol
    const double rel = std::abs(extracted.value - predicted) / std::abs(predicted);
    detail << "extracted " << extracted.value << ", predicted " << predicted << " (rel err "
           << rel << ")";
    if (rel > 0.05) res.pass = false;

    // The same number through the symbol calculus.
    const PrincipalSymbol v{0.0, unit_amp(), lift, SymbolView::Singular, {}};
    const Path still = waypoint_path(
        {{probe.y0, probe.eta0}, {probe.y0, probe.eta0}});
    const Complex egorov = egorov_symbol(v, v, a_sym, still, probe.y0, probe.eta0);
    detail << "; calculus value " << egorov;
    if (std::abs(egorov - predicted) > 1e-8) res.pass = false;
    (void)rng;
    res.detail = detail.str();
    return res;
}

CriterionResult check_a9(Rng& rng) {
    CriterionResult res{"A9", true, "", 0};
    std::ostringstream detail;
    const CanonicalMap flow = wiggly_flow(6.0, 700);
    const double th0 = 0.10, th1 = 0.55;
    auto path = Path{[th0, th1](double s) {
        const double th = th0 + (th1 - th0) * s;
        Vec y(2), eta(2);
        y << -M_PI / 2, 0.0;
        eta << std::sin(th), std::cos(th);
        return std::make_pair(y, eta);
    }};
    TrackOptions opts;
    opts.samples = 33;
    opts.tol = 1e-6;

    const long idx = maslov_index_of_path(flow, path, PhaseKind::Gaussian, opts);
    detail << "fold index " << idx;
    if (std::abs(idx) != 1) res.pass = false;

    TrackOptions fine = opts;
    fine.samples = 65;
    if (maslov_index_of_path(flow, path, PhaseKind::Gaussian, fine) != idx) {
        res.pass = false;
        detail << "; index changed under path refinement";
    }
    if (maslov_index_of_path(flow, path, PhaseKind::RealChart, opts) != idx) {
        res.pass = false;
        detail << "; index changed under phase swap";
    }

    // Cocycle numbers across the fold from two spatial charts.
    const BranchState st = track_branch(PhaseSpec{PhaseKind::Gaussian, flow}, path, opts);
    if (st.events.size() != 1) {
        res.pass = false;
        detail << "; expected one fold event, saw " << st.events.size();
        res.detail = detail.str();
        return res;
    }
    const double sev = st.events[0].s;
    const auto [yc, ec] = path.at(sev);
    const auto [xc, xic] = flow(yc, ec);

    // Cocycle across chart pairs: curvature shifts the eta-Hessian by a term
    // quadratic in xstar_eta, so the second chart disagrees with the first
    // beyond its own degeneracy locus.  The overlap where both chart phases
    // are nondegenerate splits into components; the component integers must
    // include a matching +-1 pair across the fold.
    const PhaseSpec chart_a{PhaseKind::RealChart, flow};
    bool cocycle_found = false;
    bool antisym_ok = true;
    for (double q : {-0.8, 0.8, -1.6, 1.6, -2.5, 2.5}) {
        std::vector<Mat> hess(2, Mat::Zero(2, 2));
        for (int k = 0; k < 2; ++k) hess[k] = q * xic[k] / xic.squaredNorm() * Mat::Identity(2, 2);
        const CanonicalMap conj =
            conjugate_target_chart(flow, quadratic_chart(xc, hess, "second"));
        const PhaseSpec chart_b{PhaseKind::RealChart, conj};

        // Sample the path away from the fold; keep points where both chart
        // phases are comfortably nondegenerate, then group into maximal runs.
        struct OverlapSample {
            PhaseJet a, b;
            double s;
        };
        std::vector<std::vector<OverlapSample>> components(1);
        for (int k = 0; k <= 40; ++k) {
            const double s = k / 40.0;
            if (std::abs(s - sev) < 0.06) {
                if (!components.back().empty()) components.emplace_back();
                continue;
            }
            const auto [py, pe] = path.at(s);
            const PhaseJet ja = phase_jet(chart_a, py, pe);
            const PhaseJet jb = phase_jet(chart_b, py, pe);
            const double margin_a = std::abs(ja.xe.determinant()) /
                                    std::max(1e-300, std::pow(ja.xe.norm(), 2) / 2);
            const double margin_b = std::abs(jb.xe.determinant()) /
                                    std::max(1e-300, std::pow(jb.xe.norm(), 2) / 2);
            if (margin_a < 0.08 || margin_b < 0.08) {
                if (!components.back().empty()) components.emplace_back();
                continue;
            }
            components.back().push_back({ja, jb, s});
        }
        for (const auto& comp : components) {
            if (comp.size() < 3) continue;
            std::vector<PhaseJet> ja, jb;
            for (const auto& smp : comp) {
                ja.push_back(smp.a);
                jb.push_back(smp.b);
            }
            try {
                const int mjk = cocycle_number(ja, jb, 1e-6);
                const int mkj = cocycle_number(jb, ja, 1e-6);
                if (mjk + mkj != 0) antisym_ok = false;
                if (std::abs(mjk) == 1 && !cocycle_found) {
                    cocycle_found = true;
                    detail << "; cocycle m_jk = " << mjk << " on the component ["
                           << comp.front().s << ", " << comp.back().s << "] (chart curvature "
                           << q << ")";
                }
            } catch (const Error&) {
                // Residual degeneracy inside the run: not a usable component.
            }
        }
        if (cocycle_found) break;
    }
    if (!antisym_ok) {
        res.pass = false;
        detail << "; cocycle antisymmetry failed";
    }
    if (!cocycle_found) {
        res.pass = false;
        detail << "; no chart pair produced a unit cocycle";
    }
    (void)rng;
    res.detail = detail.str();
    return res;
}

CriterionResult check_a10() {
    CriterionResult res{"A10", true, "", 0};
    std::ostringstream detail;
    ExtractionSpec probe;
    probe.eta0 = Vec::Constant(1, 1.0);
    probe.rho_radius = 0.4;
    probe.lambdas = {50, 80, 110, 140};

    struct Case {
        const char* name;
        CanonicalMap map;
        double y0;
    };
    std::vector<Case> cases;
    cases.push_back({"identity", identity_map(1), 0.1});
    cases.push_back({"lift", lift_map("y+y^3"), 0.2});
    cases.push_back({"half-wave", half_wave_map(1, 1.0), 0.0});
    for (auto& c : cases) {
        probe.y0 = Vec::Constant(1, c.y0);
        const auto real_spec = make_spec(c.map, PhaseKind::RealChart, 140.0);
        const auto gauss_spec = make_spec(c.map, PhaseKind::Gaussian, 140.0);
        const PhaseIndependenceResult r = phase_independence_residual(real_spec, gauss_spec, probe);
        detail << c.name << " residual " << r.residual << " (bars " << r.combined_error << "); ";
        if (r.residual > r.combined_error + 0.01) res.pass = false;
    }
    res.detail = detail.str();
    return res;
}

}  // namespace

std::vector<CriterionResult> verify_suite(const VerifyOptions& opts, std::ostream& log) {
    std::vector<std::pair<std::string, std::function<CriterionResult(Rng&)>>> checks = {
        {"A1", [](Rng& r) { return check_a1(r); }},
        {"A2", [](Rng& r) { return check_a2(r); }},
        {"A3", [](Rng& r) { return check_a3(r); }},
        {"A4", [](Rng& r) { return check_a4(r); }},
        {"A5", [](Rng& r) { return check_a5(r); }},
        {"A6", [](Rng&) { return check_a6(); }},
        {"A7", [](Rng& r) { return check_a7(r); }},
        {"A8", [](Rng& r) { return check_a8(r); }},
        {"A9", [](Rng& r) { return check_a9(r); }},
        {"A10", [](Rng&) { return check_a10(); }},
    };

    std::vector<CriterionResult> results;
    for (auto& [id, fn] : checks) {
        if (!opts.only.empty() &&
            std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end())
            continue;
        Rng rng(opts.seed + std::hash<std::string>{}(id));
        const auto start = std::chrono::steady_clock::now();
        CriterionResult res;
        try {
            res = fn(rng);
        } catch (const std::exception& e) {
            res.id = id;
            res.pass = false;
            res.detail = std::string("exception: ") + e.what();
        }
        res.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        log << (res.pass ? "PASS " : "FAIL ") << res.id << "  [" << res.seconds << " s]  "
            << res.detail << "\n";
        log.flush();
        results.push_back(std::move(res));
    }
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

}  // namespace fiocalc

#include "fiocalc/maslov.hpp"

#include "fiocalc/inertia.hpp"

#include <Eigen/SVD>

#include <map>
#include <sstream>

namespace fiocalc {

double theta_s(const PhaseJet& jet, double tol) {
    const CMat C = Complex(0, -1) * jet.ee;  // phi_ee / i
    const double arg = det_plus_arg(ComplexSymMatrix::from(C), tol);
    const int rank = rank_of(jet.xstar_eta, tol < 0 ? 1e-7 : tol);
    return arg / M_PI - 0.5 * rank;
}

Path waypoint_path(const std::vector<std::pair<Vec, Vec>>& waypoints) {
    if (waypoints.size() < 2) throw ValidationError("waypoint_path: need at least two waypoints");
    auto pts = std::make_shared<std::vector<std::pair<Vec, Vec>>>(waypoints);
    return Path{[pts](double s) {
        const int segs = static_cast<int>(pts->size()) - 1;
        double u = std::clamp(s, 0.0, 1.0) * segs;
        int k = std::min(static_cast<int>(u), segs - 1);
        u -= k;
        const auto& [y0, e0] = (*pts)[k];
        const auto& [y1, e1] = (*pts)[k + 1];
        return std::make_pair(Vec(y0 + u * (y1 - y0)), Vec(e0 + u * (e1 - e0)));
    }};
}

namespace {

struct SamplePoint {
    double s;
    Complex det_xe;     // det phi_xe
    double theta_s;
    int rank;           // rank xstar_eta with a clean threshold
    double sv_ratio;    // smallest "kept" singular-value ratio (diagnostic)
};

struct Tracker {
    const PhaseSpec& spec;
    const Path& path;
    double tol;
    std::map<double, SamplePoint> cache;

    const SamplePoint& sample(double s) {
        auto it = cache.find(s);
        if (it != cache.end()) return it->second;
        const auto [y, eta] = path.at(s);
        const PhaseJet jet = phase_jet(spec, y, eta);
        SamplePoint p;
        p.s = s;
        p.det_xe = jet.xe.determinant();
        if (spec.kind == PhaseKind::RealChart) {
            const double scale = std::pow(jet.xe.norm() / std::sqrt(double(spec.map.n)),
                                          spec.map.n);
            if (std::abs(p.det_xe) < 1e-6 * std::max(scale, 1e-300))
                throw DomainError(
                    "track_branch: det phi_xe ~ 0 for the chart phase; use the gaussian phase "
                    "or switch charts");
        }
        p.theta_s = theta_s(jet, tol);
        // Rank with a tolerance band an order of magnitude wide; values inside
        // the band are resolved by refinement around the event.
        Eigen::JacobiSVD<Mat> svd(jet.xstar_eta);
        const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
        const double lo = 1e-8 * std::max(smax, 1.0), hi = 10 * lo;
        int r_lo = 0, r_hi = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i) {
            if (svd.singularValues()(i) > lo) ++r_lo;
            if (svd.singularValues()(i) > hi) ++r_hi;
        }
        p.rank = r_hi;  // conservative count; band cases only occur inside events
        p.sv_ratio = smax > 0 ? svd.singularValues()(svd.singularValues().size() - 1) / smax : 0.0;
        return cache.emplace(s, p).first->second;
    }
};

double arg_increment_det2(const SamplePoint& a, const SamplePoint& b) {
    // Increment of arg det^2 between consecutive samples, from the principal
    // argument of the determinant ratio.
    return 2.0 * std::arg(b.det_xe / a.det_xe);
}

}  // namespace

BranchState track_branch(const PhaseSpec& spec, const Path& path, const TrackOptions& opts) {
    if (opts.samples < 2) throw ValidationError("track_branch: need at least two samples");
    Tracker tracker{spec, path, opts.tol, {}};

    struct Node {
        double s;
        double theta_r;
    };

    // Anchor so that theta_phi(start) equals the requested integer.
    const SamplePoint& first = tracker.sample(0.0);
    std::vector<Node> nodes;
    nodes.push_back({0.0, first.theta_s + static_cast<double>(opts.anchor_theta_phi)});

    const double ds = 1.0 / (opts.samples - 1);

    // Advance from `a` (with known theta_r) to `b`; subdivides on coarse
    // argument increments or non-integer theta_phi at the endpoint.
    std::function<void(double, double, int)> advance = [&](double sa, double sb, int depth) {
        const SamplePoint& a = tracker.sample(sa);
        const SamplePoint& b = tracker.sample(sb);
        const double inc = arg_increment_det2(a, b) / (2.0 * M_PI);
        const double theta_r_b = nodes.back().theta_r + inc;
        const double phi_b = theta_r_b - b.theta_s;
        const bool too_coarse = std::abs(inc) >= 0.25;  // quarter turn of arg det^2
        const bool non_integer = std::abs(phi_b - std::round(phi_b)) > opts.integer_slack;
        if ((too_coarse || non_integer) && depth < opts.max_refine_depth &&
            (sb - sa) > 1e-12) {
            const double mid = 0.5 * (sa + sb);
            advance(sa, mid, depth + 1);
            advance(mid, sb, depth + 1);
            return;
        }
        if (too_coarse || non_integer) {
            std::ostringstream os;
            os << "track_branch: branch not resolved on [" << sa << ", " << sb
               << "] (increment " << inc << ", theta_phi deviation "
               << std::abs(phi_b - std::round(phi_b)) << ")";
            throw RefinementError(os.str(), sa, sb);
        }
        nodes.push_back({sb, theta_r_b});
    };

    for (int k = 0; k + 1 < opts.samples; ++k) advance(k * ds, (k + 1) * ds, 0);

    BranchState out;
    out.s.reserve(nodes.size());
    for (const Node& nd : nodes) {
        const SamplePoint& p = tracker.sample(nd.s);
        out.s.push_back(nd.s);
        out.theta_r.push_back(nd.theta_r);
        out.theta_s.push_back(p.theta_s);
        const double phi = nd.theta_r - p.theta_s;
        out.theta_phi.push_back(std::lround(phi));
        out.rank.push_back(p.rank);
    }

    // Locate theta_phi jumps: refine the bracketing interval to the event
    // resolution, tracking the branch inside it.
    for (std::size_t k = 0; k + 1 < out.s.size(); ++k) {
        if (out.theta_phi[k] == out.theta_phi[k + 1]) continue;
        double lo = out.s[k], hi = out.s[k + 1];
        double theta_r_lo = out.theta_r[k];
        long phi_lo = out.theta_phi[k];
        const long phi_hi_target = out.theta_phi[k + 1];
        int min_rank = std::min(out.rank[k], out.rank[k + 1]);
        while (hi - lo > opts.event_resolution) {
            const double mid = 0.5 * (lo + hi);
            const SamplePoint& pl = tracker.sample(lo);
            const SamplePoint& pm = tracker.sample(mid);
            min_rank = std::min(min_rank, pm.rank);
            const double tr_mid = theta_r_lo + arg_increment_det2(pl, pm) / (2.0 * M_PI);
            const long phi_mid = std::lround(tr_mid - pm.theta_s);
            if (phi_mid == phi_lo) {
                lo = mid;
                theta_r_lo = tr_mid;
            } else {
                hi = mid;
            }
        }
        RankEvent ev;
        ev.s = 0.5 * (lo + hi);
        ev.rank_before = out.rank[k];
        ev.rank_after = out.rank[k + 1];
        ev.rank_at = min_rank;
        ev.theta_jump = phi_hi_target - out.theta_phi[k];
        // A genuine event passes through a lower rank; estimate it at the
        // located parameter.
        const auto [y, eta] = path.at(ev.s);
        const PhaseJet jet = phase_jet(spec, y, eta);
        Eigen::JacobiSVD<Mat> svd(jet.xstar_eta);
        const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
        int r = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > 1e-4 * std::max(smax, 1.0)) ++r;
        ev.rank_at = std::min(ev.rank_at, r);
        out.events.push_back(ev);
    }
    return out;
}

std::vector<double> theta_r_continued(const PhaseSpec& spec, const Path& path, int samples,
                                      double anchor, double tol) {
    if (samples < 2) throw ValidationError("theta_r_continued: need at least two samples");
    Tracker tracker{spec, path, tol, {}};
    std::vector<double> out(samples);
    out[0] = anchor;
    const double ds = 1.0 / (samples - 1);
    for (int k = 0; k + 1 < samples; ++k) {
        const SamplePoint& a = tracker.sample(k * ds);
        const SamplePoint& b = tracker.sample((k + 1) * ds);
        const double inc = arg_increment_det2(a, b);
        if (!(std::abs(inc) < M_PI / 2))
            throw RefinementError("theta_r_continued: argument increment >= pi/2", k * ds,
                                  (k + 1) * ds);
        out[k + 1] = out[k] + inc / (2.0 * M_PI);
    }
    return out;
}

long maslov_index_of_path(const CanonicalMap& map, const Path& path, PhaseKind kind,
                          const TrackOptions& opts) {
    PhaseSpec spec{kind, map, "default"};
    BranchState st;
    try {
        st = track_branch(spec, path, opts);
    } catch (const RefinementError& err) {
        // An unresolvable interval touching the path boundary means the
        // endpoint itself sits on a rank-change event.
        const double margin = 1e-4;
        if (err.interval_lo < margin || err.interval_hi > 1.0 - margin)
            throw DomainError("maslov_index_of_path: path endpoint sits on a rank-change event");
        throw;
    }
    for (const RankEvent& ev : st.events) {
        if (ev.s < 10 * opts.event_resolution || ev.s > 1.0 - 10 * opts.event_resolution)
            throw DomainError("maslov_index_of_path: path endpoint sits on a rank-change event");
    }
    return -(st.theta_phi.back() - st.theta_phi.front());
}

int cocycle_number(const std::vector<PhaseJet>& jets_j, const std::vector<PhaseJet>& jets_k,
                   double tol) {
    if (jets_j.size() != jets_k.size() || jets_j.empty())
        throw ValidationError("cocycle_number: need matching non-empty sample lists");
    bool have = false;
    int value = 0;
    for (std::size_t i = 0; i < jets_j.size(); ++i) {
        const auto half_sgn = [tol](const PhaseJet& jet) {
            if (jet.ee.imag().norm() > 1e-8 * std::max(1.0, jet.ee.norm()))
                throw ValidationError("cocycle_number: phase is not real-valued on the overlap");
            return inertia(Mat(jet.ee.real()), tol).sgn;
        };
        const int twice = half_sgn(jets_j[i]) - half_sgn(jets_k[i]);
        if (twice % 2 != 0)
            throw DomainError("cocycle_number: half-integer difference (rank mismatch on overlap)");
        const int v = twice / 2;
        if (have && v != value)
            throw DomainError("cocycle_number: value not constant over the overlap");
        value = v;
        have = true;
    }
    return value;
}

}  // namespace fiocalc

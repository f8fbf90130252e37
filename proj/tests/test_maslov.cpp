#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fiocalc/catalog.hpp"
#include "fiocalc/maslov.hpp"

using namespace fiocalc;

namespace {

std::pair<Vec, Vec> pt(std::initializer_list<double> y, std::initializer_list<double> eta) {
    Vec a(static_cast<int>(y.size())), b(static_cast<int>(eta.size()));
    int i = 0;
    for (double v : y) a[i++] = v;
    i = 0;
    for (double v : eta) b[i++] = v;
    return {a, b};
}

CanonicalMap wiggly_flow(double time, int steps) {
    std::vector<std::vector<Expr>> metric(2, std::vector<Expr>(2));
    metric[0][0] = Expr::parse("1", {"x1", "x2"});
    metric[0][1] = Expr::parse("0", {"x1", "x2"});
    metric[1][0] = Expr::parse("0", {"x1", "x2"});
    metric[1][1] = Expr::parse("(1+0.3*sin(x1))^(-2)", {"x1", "x2"});
    return flow_map(metric_flow_spec(metric, time, steps));
}

/// Angle path through the fold of the wiggly flow at t = 6: the caustic
/// sits between angles 0.25 and 0.30 from the vertical direction.
Path caustic_path(double theta0, double theta1) {
    return Path{[theta0, theta1](double s) {
        const double th = theta0 + (theta1 - theta0) * s;
        Vec y(2), eta(2);
        y << -M_PI / 2, 0.0;
        eta << std::sin(th), std::cos(th);
        return std::make_pair(y, eta);
    }};
}

}  // namespace

TEST_CASE("theta_s at the distinguished half-wave points") {
    const auto [y, eta] = pt({0.0, 0.0}, {1.0, 0.0});

    PhaseSpec spec{PhaseKind::RealChart, identity_map(2)};
    CHECK(theta_s(phase_jet(spec, y, eta)) == doctest::Approx(0.0));

    spec.map = half_wave_map(2, 1.0);
    CHECK(theta_s(phase_jet(spec, y, eta)) == doctest::Approx(0.0));

    spec.map = half_wave_map(2, -1.0);
    CHECK(theta_s(phase_jet(spec, y, eta)) == doctest::Approx(-1.0));
}

TEST_CASE("theta_s with the gaussian phase in closed form for the half wave") {
    // phi_ee / i has the nonzero eigenvalue (t/|eta|)(t + i): it contributes
    // atan(1/t) for t > 0, and the rank term subtracts 1/2.
    const auto [y, eta] = pt({0.2, 0.1}, {0.0, 1.0});
    for (double t : {0.5, 1.0, 2.0}) {
        const PhaseSpec spec{PhaseKind::Gaussian, half_wave_map(2, t)};
        const double expect = std::atan(1.0 / t) / M_PI - 0.5;
        CHECK(theta_s(phase_jet(spec, y, eta)) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("theta_r continuation along simple paths") {
    const auto path = waypoint_path({pt({0.0, 0.0}, {1.0, 0.2}), pt({0.4, 0.1}, {0.6, 0.9})});

    const PhaseSpec real_hw{PhaseKind::RealChart, half_wave_map(2, 1.0)};
    auto curve = theta_r_continued(real_hw, path, 33, 0.25);
    for (double v : curve) CHECK(v == doctest::Approx(0.25));  // det^2 stays positive

    const PhaseSpec gauss_id{PhaseKind::Gaussian, identity_map(2)};
    curve = theta_r_continued(gauss_id, path, 33, 0.0);
    for (double v : curve) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("theta_r continuation around an eta circle is refinement stable") {
    const CanonicalMap hw = half_wave_map(2, 1.0);
    const PhaseSpec spec{PhaseKind::Gaussian, hw};
    auto circle = Path{[](double s) {
        Vec y(2), eta(2);
        y << 0.0, 0.0;
        const double th = 2 * M_PI * s;
        eta << std::cos(th), std::sin(th);
        return std::make_pair(y, eta);
    }};
    const auto coarse = theta_r_continued(spec, circle, 65, 0.0);
    const auto fine = theta_r_continued(spec, circle, 129, 0.0);
    CHECK(std::abs(coarse.back() - fine.back()) < 1e-8);
    // det phi_xe = 1 - i t is constant on the circle, so the branch returns
    // to its anchor.
    CHECK(coarse.back() == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("chart phase errors out where the chart degenerates") {
    // Conjugating the half wave with the curvature chart sends
    // det xistar_eta through zero along the eta swing.
    const CanonicalMap hw = half_wave_map(2, 1.0);
    const auto [y0, eta0] = pt({0.0, 0.0}, {1.0, 0.0});
    const auto [xs, xis] = hw(y0, eta0);
    Mat h0 = Mat::Zero(2, 2);
    h0(1, 1) = 1.0;
    const ChartMap chart = quadratic_chart(xs, {h0, Mat::Zero(2, 2)}, "degenerate");
    const PhaseSpec spec{PhaseKind::RealChart, conjugate_target_chart(hw, chart)};
    auto swing = Path{[](double s) {
        Vec y(2), eta(2);
        y << 0.0, 0.0;
        const double th = -0.3 + 0.6 * s;
        eta << std::cos(th), std::sin(th);
        return std::make_pair(y, eta);
    }};
    CHECK_THROWS_AS(theta_r_continued(spec, swing, 65, 0.0), DomainError);
}

TEST_CASE("branch tracking keeps theta_phi integral and anchored") {
    Rng rng(5);
    std::vector<CanonicalMap> maps;
    maps.push_back(identity_map(2));
    maps.push_back(half_wave_map(2, 1.0));
    maps.push_back(lift_map("y+0.3*sin(y)"));
    for (const auto& m : maps) {
        for (int trial = 0; trial < 3; ++trial) {
            const auto a = random_samples(m.n, 1, rng)[0];
            const auto b = random_samples(m.n, 1, rng)[0];
            const Path path = waypoint_path({a, b});
            for (PhaseKind kind : {PhaseKind::RealChart, PhaseKind::Gaussian}) {
                const PhaseSpec spec{kind, m};
                const BranchState st = track_branch(spec, path);
                CHECK(st.theta_phi.front() == 0);
                for (std::size_t k = 0; k < st.s.size(); ++k) {
                    CHECK(std::abs((st.theta_r[k] - st.theta_s[k]) - st.theta_phi[k]) < 1e-6);
                }
                CHECK(st.events.empty());
                CHECK(st.theta_phi.back() == 0);
            }
        }
    }
}

TEST_CASE("maslov index vanishes on constant-rank and closed contractible paths") {
    const CanonicalMap hw = half_wave_map(2, 1.0);
    const Path segment = waypoint_path({pt({0.0, 0.0}, {1.0, 0.1}), pt({0.3, 0.2}, {0.4, 1.0})});
    CHECK(maslov_index_of_path(hw, segment, PhaseKind::Gaussian) == 0);
    CHECK(maslov_index_of_path(hw, segment, PhaseKind::RealChart) == 0);

    auto loop = Path{[](double s) {
        Vec y(2), eta(2);
        const double th = 2 * M_PI * s;
        y << 0.1 * std::cos(th), 0.1 * std::sin(th);
        eta << 1.0 + 0.2 * std::sin(th), 0.3 * std::sin(th);
        return std::make_pair(y, eta);
    }};
    CHECK(maslov_index_of_path(hw, loop, PhaseKind::Gaussian) == 0);
}

TEST_CASE("fold crossing carries a unit index, stable under refinement and phase swap") {
    const CanonicalMap flow = wiggly_flow(6.0, 700);
    const Path path = caustic_path(0.10, 0.55);
    TrackOptions opts;
    opts.samples = 33;
    opts.tol = 1e-6;

    const long idx = maslov_index_of_path(flow, path, PhaseKind::Gaussian, opts);
    CHECK(std::abs(idx) == 1);

    TrackOptions fine = opts;
    fine.samples = 65;
    CHECK(maslov_index_of_path(flow, path, PhaseKind::Gaussian, fine) == idx);
    CHECK(maslov_index_of_path(flow, path, PhaseKind::RealChart, opts) == idx);

    // The event is located where the vertical-image rank dips.
    PhaseSpec spec{PhaseKind::Gaussian, flow};
    const BranchState st = track_branch(spec, path, opts);
    REQUIRE(st.events.size() == 1);
    CHECK(st.events[0].rank_at < st.events[0].rank_before);
    CHECK(st.events[0].theta_jump == -idx);
}

TEST_CASE("theta_phi minus kappa_plus of phi_ee is constant on chart segments") {
    const CanonicalMap hw = half_wave_map(2, -0.8);
    const PhaseSpec spec{PhaseKind::RealChart, hw};
    const Path path = waypoint_path({pt({0.0, 0.0}, {1.0, 0.05}), pt({0.2, -0.1}, {0.7, 0.7})});
    TrackOptions opts;
    opts.anchor_theta_phi = 2;  // deliberately shifted branch
    const BranchState st = track_branch(spec, path, opts);
    long m = 0;
    for (std::size_t k = 0; k < st.s.size(); ++k) {
        const auto [y, eta] = path.at(st.s[k]);
        const PhaseJet jet = phase_jet(spec, y, eta);
        const long diff = st.theta_phi[k] - inertia(Mat(jet.ee.real())).kappa_plus;
        if (k == 0) m = diff;
        CHECK(diff == m);
    }
}

TEST_CASE("anchor shifts act modulo four on the symbol factor") {
    const CanonicalMap hw = half_wave_map(2, 1.0);
    const PhaseSpec spec{PhaseKind::Gaussian, hw};
    const Path path = waypoint_path({pt({0.0, 0.0}, {1.0, 0.1}), pt({0.1, 0.0}, {0.2, 1.0})});
    TrackOptions base;
    TrackOptions shifted;
    shifted.anchor_theta_phi = 4;
    const BranchState a = track_branch(spec, path, base);
    const BranchState b = track_branch(spec, path, shifted);
    for (std::size_t k = 0; k < std::min(a.s.size(), b.s.size()); ++k) {
        const Complex fa = ipow(-a.theta_phi[k]);
        const Complex fb = ipow(-b.theta_phi[k]);
        CHECK(std::abs(fa - fb) < 1e-12);
    }
}

TEST_CASE("endpoint on a rank event is rejected") {
    const CanonicalMap flow = wiggly_flow(6.0, 500);
    TrackOptions opts;
    opts.samples = 33;
    opts.tol = 1e-6;
    PhaseSpec spec{PhaseKind::Gaussian, flow};
    const BranchState st = track_branch(spec, caustic_path(0.10, 0.55), opts);
    REQUIRE(st.events.size() == 1);
    const double th_star = 0.10 + (0.55 - 0.10) * st.events[0].s;
    CHECK_THROWS_AS(
        maslov_index_of_path(flow, caustic_path(0.10, th_star), PhaseKind::Gaussian, opts),
        DomainError);
}

TEST_CASE("cocycle numbers across chart pairs") {
    const CanonicalMap hw = half_wave_map(2, 1.0);
    const PhaseSpec spec{PhaseKind::RealChart, hw};
    Rng rng(7);
    std::vector<PhaseJet> jets;
    for (const auto& [y, eta] : random_samples(2, 6, rng)) jets.push_back(phase_jet(spec, y, eta));
    CHECK(cocycle_number(jets, jets) == 0);

    // Antisymmetry across a random chart pair sharing the overlap samples.
    const auto [y0, eta0] = pt({0.0, 0.0}, {1.0, 0.0});
    const auto [xs, xis] = hw(y0, eta0);
    std::vector<Mat> hess;
    for (int k = 0; k < 2; ++k) hess.push_back(rng.sym_matrix(2, 0.4));
    const CanonicalMap conj = conjugate_target_chart(hw, quadratic_chart(xs, hess, "second"));
    const PhaseSpec spec2{PhaseKind::RealChart, conj};
    std::vector<PhaseJet> jets_a, jets_b;
    for (int k = -2; k <= 2; ++k) {
        Vec eta(2);
        eta << std::cos(0.05 * k), std::sin(0.05 * k);
        jets_a.push_back(phase_jet(spec, y0, eta));
        jets_b.push_back(phase_jet(spec2, y0, eta));
    }
    const int mab = cocycle_number(jets_a, jets_b);
    const int mba = cocycle_number(jets_b, jets_a);
    CHECK(mab + mba == 0);
}

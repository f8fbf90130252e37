#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fiocalc/catalog.hpp"

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

std::vector<std::vector<Expr>> wiggly_metric() {
    std::vector<std::vector<Expr>> metric(2, std::vector<Expr>(2));
    metric[0][0] = Expr::parse("1", {"x1", "x2"});
    metric[0][1] = Expr::parse("0", {"x1", "x2"});
    metric[1][0] = Expr::parse("0", {"x1", "x2"});
    metric[1][1] = Expr::parse("(1+0.3*sin(x1))^(-2)", {"x1", "x2"});
    return metric;
}

}  // namespace

TEST_CASE("catalog maps satisfy the defining identities") {
    Rng rng(3);
    std::vector<CanonicalMap> maps;
    maps.push_back(identity_map(2));
    maps.push_back(half_wave_map(2, 1.0));
    maps.push_back(half_wave_map(1, -0.7));
    maps.push_back(lift_map("y+y^3"));
    Mat L(2, 2);
    L << 2, 1, 0, 1;
    maps.push_back(linear_symplectic_map(L));
    for (const auto& m : maps) {
        const auto samples = random_samples(m.n, 100, rng);
        const CanonicalReport rep = validate_canonical(m, samples, 1e-10);
        INFO(m.name, " worst identity: ", rep.worst_identity(), " = ", rep.max_residual());
        CHECK(rep.pass);
    }
}

TEST_CASE("the one-dimensional cubic lift in closed form") {
    const CanonicalMap m = lift_map("y+y^3");
    const auto [x, xi] = m(Vec::Constant(1, 0.5), Vec::Constant(1, 2.0));
    CHECK(x[0] == doctest::Approx(0.5 + 0.125));
    CHECK(xi[0] == doctest::Approx(2.0 / (1 + 3 * 0.25)));
}

TEST_CASE("a broken map fails the mixed two-form block with the expected residual") {
    CanonicalMap broken;
    broken.n = 2;
    broken.name = "broken";
    broken.eval = [](const Vec& y, const Vec& eta) {
        return std::make_pair(Vec(y + eta / eta.norm()), Vec(2 * eta));
    };
    broken.jac = [&broken](const Vec& y, const Vec& eta) {
        return fd_jacobian(
            [](const Vec& yy, const Vec& ee) {
                return std::make_pair(Vec(yy + ee / ee.norm()), Vec(2 * ee));
            },
            y, eta);
    };
    Rng rng(9);
    const CanonicalReport rep = validate_canonical(broken, random_samples(2, 20, rng), 1e-10);
    CHECK_FALSE(rep.pass);
    // Se' Xy - Xe' Sy = 2I at these samples, so the defect is ||2I - I|| = ||I||.
    CHECK(rep.two_form_mixed == doctest::Approx(Mat::Identity(2, 2).norm()).epsilon(1e-6));
}

TEST_CASE("image of the vertical subspace") {
    const CanonicalMap id = identity_map(2);
    auto [y, eta] = pt({0.1, 0.2}, {1.0, 0.0});
    LagrangianFrame f = image_of_vertical(id, y, eta);
    CHECK(f.B.norm() == doctest::Approx(0.0));
    CHECK((f.C - Mat::Identity(2, 2)).norm() == doctest::Approx(0.0));
    CHECK(validate_frame(f).ok);

    const CanonicalMap hw = half_wave_map(2, 1.0);
    f = image_of_vertical(hw, y, eta);
    Mat expect = Mat::Zero(2, 2);
    expect(1, 1) = 1.0;
    CHECK((f.B - expect).norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK((f.C - Mat::Identity(2, 2)).norm() == doctest::Approx(0.0));
    CHECK(validate_frame(f).ok);

    const CanonicalMap lift = lift_map("y+y^3");
    const auto [y1, e1] = pt({0.5}, {1.0});
    f = image_of_vertical(lift, y1, e1);
    CHECK(f.B(0, 0) == doctest::Approx(0.0));
    CHECK(f.C(0, 0) == doctest::Approx(1.0 / (1 + 3 * 0.25)));
}

TEST_CASE("composition identities at sample points") {
    Rng rng(11);
    const CanonicalMap hw1 = half_wave_map(2, 0.4);
    const CanonicalMap hw2 = half_wave_map(2, 0.9);
    const CanonicalMap both = compose_maps(hw1, hw2);
    const CanonicalMap direct = half_wave_map(2, 1.3);
    const CanonicalMap id = identity_map(2);
    const CanonicalMap hw_id = compose_maps(id, hw1);
    for (const auto& [y, eta] : random_samples(2, 25, rng)) {
        const auto [a, b] = both(y, eta);
        const auto [c, d] = direct(y, eta);
        CHECK((a - c).norm() < 1e-12);
        CHECK((b - d).norm() < 1e-12);
        const Mat jb = both.jac(y, eta).full();
        const Mat jd = direct.jac(y, eta).full();
        CHECK((jb - jd).norm() < 1e-12);
        const auto [e, f] = hw_id(y, eta);
        const auto [g, h] = hw1(y, eta);
        CHECK((e - g).norm() < 1e-12);
        CHECK((f - h).norm() < 1e-12);
    }

    // lift(f) o lift(g) = lift(f o g): with inner f = y + y^3 evaluated
    // first, then g = 2y, the composite is the lift of 2(y + y^3).
    const CanonicalMap lf = lift_map("y+y^3");
    const CanonicalMap lg = lift_map("2*y");
    const CanonicalMap lfg = compose_maps(lf, lg);
    const CanonicalMap direct1 = lift_map("2*y + 2*y^3");
    for (const auto& [y, eta] : random_samples(1, 25, rng)) {
        const auto [a, b] = lfg(y, eta);
        const auto [c, d] = direct1(y, eta);
        CHECK((a - c).norm() < 1e-12);
        CHECK((b - d).norm() < 1e-12);
        CHECK((lfg.jac(y, eta).full() - direct1.jac(y, eta).full()).norm() < 1e-10);
    }
}

TEST_CASE("analytic inverses and the generic Newton fallback") {
    Rng rng(13);
    const CanonicalMap lift = lift_map("y+y^3");
    const CanonicalMap inv = inverse_map(lift);
    for (const auto& [y, eta] : random_samples(1, 20, rng)) {
        const auto [x, xi] = lift(y, eta);
        const auto [yy, ee] = inv(x, xi);
        CHECK((yy - y).norm() < 1e-10);
        CHECK((ee - eta).norm() < 1e-10);
        const Mat ji = inv.jac(x, xi).full();
        const Mat jf = lift.jac(y, eta).full();
        CHECK((ji * jf - Mat::Identity(2, 2)).norm() < 1e-9);
    }
    // A map stripped of its analytic inverse exercises the Newton route.
    CanonicalMap bare = half_wave_map(2, 0.6);
    bare.inverse_ptr = nullptr;
    const CanonicalMap ninv = inverse_map(bare);
    for (const auto& [y, eta] : random_samples(2, 10, rng)) {
        const auto [x, xi] = bare(y, eta);
        const auto [yy, ee] = ninv(x, xi);
        CHECK((yy - y).norm() < 1e-9);
        CHECK((ee - eta).norm() < 1e-9);
    }
}

TEST_CASE("finite differences agree with the analytic blocks") {
    Rng rng(17);
    for (const CanonicalMap& m : {half_wave_map(2, 1.0), lift_map("y+0.3*sin(y)")}) {
        for (const auto& [y, eta] : random_samples(m.n, 10, rng)) {
            const JacBlocks a = m.jac(y, eta);
            const JacBlocks fd = fd_jacobian(m.eval, y, eta);
            CHECK((a.full() - fd.full()).norm() < 1e-7 * std::max(1.0, a.full().norm()));
        }
    }
}

TEST_CASE("rank of the vertical image is chart independent") {
    Rng rng(19);
    const CanonicalMap hw = half_wave_map(2, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto samples = random_samples(2, 1, rng);
        const auto& [y, eta] = samples[0];
        const LagrangianFrame f = image_of_vertical(hw, y, eta);
        std::vector<Mat> hess;
        for (int k = 0; k < 2; ++k) hess.push_back(rng.sym_matrix(2, 0.5));
        const ChartMap chart = quadratic_chart(f.base.x, hess);
        const LagrangianFrame g = transform_frame(f, chart);
        CHECK(rank_of(f.B) == rank_of(g.B));
    }
}

TEST_CASE("flow of the flat Hamiltonian reproduces the half wave") {
    std::vector<std::vector<Expr>> metric(2, std::vector<Expr>(2));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            metric[i][j] = Expr::parse(i == j ? "1" : "0", {"x1", "x2"});
    FlowSpec spec = metric_flow_spec(metric, 1.0, 1000);
    const CanonicalMap flow = flow_map(spec);
    const CanonicalMap hw = half_wave_map(2, 1.0);
    Rng rng(23);
    for (const auto& [y, eta] : random_samples(2, 5, rng)) {
        const auto [a, b] = flow(y, eta);
        const auto [c, d] = hw(y, eta);
        CHECK((a - c).norm() < 1e-8);
        CHECK((b - d).norm() < 1e-8);
        CHECK((flow.jac(y, eta).full() - hw.jac(y, eta).full()).norm() < 1e-6);
    }

    FlowSpec zero = spec;
    zero.time = 0.0;
    const CanonicalMap still = flow_map(zero);
    const auto [y, eta] = pt({0.3, -0.2}, {0.8, 0.6});
    const auto [a, b] = still(y, eta);
    CHECK((a - y).norm() == doctest::Approx(0.0));
    CHECK((b - eta).norm() == doctest::Approx(0.0));
}

TEST_CASE("curved-metric flow is canonical and composes additively") {
    const auto metric = wiggly_metric();
    const CanonicalMap flow2 = flow_map(metric_flow_spec(metric, 2.0, 1000));
    Rng rng(29);
    const auto samples = random_samples(2, 8, rng);
    const CanonicalReport rep = validate_canonical(flow2, samples, 1e-6);
    INFO("worst identity ", rep.worst_identity(), " = ", rep.max_residual());
    CHECK(rep.pass);

    const CanonicalMap fa = flow_map(metric_flow_spec(metric, 0.8, 400));
    const CanonicalMap fb = flow_map(metric_flow_spec(metric, 1.2, 600));
    const CanonicalMap fab = compose_maps(fa, fb);
    for (int k = 0; k < 3; ++k) {
        const auto& [y, eta] = samples[k];
        const auto [a, b] = fab(y, eta);
        const auto [c, d] = flow2(y, eta);
        CHECK((a - c).norm() < 1e-5);
        CHECK((b - d).norm() < 1e-5);
    }
}

TEST_CASE("flow accuracy improves at second order under step refinement") {
    const auto metric = wiggly_metric();
    const auto [y, eta] = pt({0.4, 0.1}, {0.6, 0.8});
    const auto reference = flow_map(metric_flow_spec(metric, 2.0, 16000))(y, eta);
    auto err = [&](int steps) {
        const auto [x, xi] = flow_map(metric_flow_spec(metric, 2.0, steps))(y, eta);
        return (x - reference.first).norm() + (xi - reference.second).norm();
    };
    const double e1 = err(500), e2 = err(1000);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.5);
}

TEST_CASE("catalog construction from JSON with unknown-field rejection") {
    const CanonicalMap hw = map_from_json(nlohmann::json{{"map", "half_wave"}, {"t", 1.0}});
    CHECK(hw.n == 2);
    const CanonicalMap lift = map_from_json(nlohmann::json{{"map", "lift"}, {"f", "y+y^3"}});
    CHECK(lift.n == 1);
    const nlohmann::json flow = {{"map", "flow"},
                                 {"metric", {{1.0, 0.0}, {0.0, "(1+0.3*sin(x1))^(-2)"}}},
                                 {"t", 0.5},
                                 {"steps", 200}};
    CHECK(map_from_json(flow).n == 2);

    CHECK_THROWS_AS(map_from_json(nlohmann::json{{"map", "half_wave"}, {"tt", 1.0}}),
                    ValidationError);
    CHECK_THROWS_AS(map_from_json(nlohmann::json{{"map", "warp"}}), ValidationError);
}

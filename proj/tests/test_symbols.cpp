#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fiocalc/catalog.hpp"
#include "fiocalc/symbols.hpp"

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

std::function<Complex(const Vec&, const Vec&)> unit_amp() {
    return [](const Vec&, const Vec&) { return Complex(1.0, 0.0); };
}

PrincipalSymbol unit_symbol(CanonicalMap map) {
    PrincipalSymbol s;
    s.order = 0.0;
    s.amplitude = unit_amp();
    s.map = std::move(map);
    return s;
}

}  // namespace

TEST_CASE("singular values at the half-wave family") {
    const auto [y, eta] = pt({0.0, 0.0}, {1.0, 0.0});

    const PhaseSpec id_real{PhaseKind::RealChart, identity_map(2)};
    CHECK(std::abs(singular_from_amplitude(unit_amp(), id_real, y, eta) - Complex(1, 0)) < 1e-12);

    const PhaseSpec hw{PhaseKind::RealChart, half_wave_map(2, 1.0)};
    CHECK(std::abs(singular_from_amplitude(unit_amp(), hw, y, eta) - Complex(1, 0)) < 1e-12);

    const PhaseSpec hw_rev{PhaseKind::RealChart, half_wave_map(2, -1.0)};
    CHECK(std::abs(singular_from_amplitude(unit_amp(), hw_rev, y, eta) - Complex(0, 1)) < 1e-12);
}

TEST_CASE("phase independence of the singular value at full-rank points") {
    // Where the vertical image projects with full rank onto the base, both
    // phase kinds give theta_s = 0 and the same singular value.
    Rng rng(3);
    std::vector<CanonicalMap> maps;
    maps.push_back(identity_map(2));
    maps.push_back(lift_map("y+y^3"));
    maps.push_back(half_wave_map(1, 0.7));
    for (const auto& m : maps) {
        for (const auto& [y, eta] : random_samples(m.n, 10, rng)) {
            const PhaseSpec real{PhaseKind::RealChart, m};
            const PhaseSpec gauss{PhaseKind::Gaussian, m};
            const Complex a = singular_from_amplitude(unit_amp(), real, y, eta);
            const Complex b = singular_from_amplitude(unit_amp(), gauss, y, eta);
            CHECK(std::abs(a - b) < 1e-10);
        }
    }
}

TEST_CASE("classical branch values") {
    const auto [y, eta] = pt({0.1, 0.0}, {1.0, 0.2});
    const PrincipalSymbol s = unit_symbol(half_wave_map(2, 1.0));

    // Query at the anchor: the branch reduces to the singular value.
    const Path still = waypoint_path({pt({0.1, 0.0}, {1.0, 0.2}), pt({0.1, 0.0}, {1.0, 0.2})});
    const PhaseSpec gauss{PhaseKind::Gaussian, s.map};
    const Complex expect = singular_from_amplitude(unit_amp(), gauss, y, eta);
    CHECK(std::abs(classical_branch(s, still, y, eta) - expect) < 1e-10);

    // For the identity map the branch is the plain symbol everywhere.
    const PrincipalSymbol sid = unit_symbol(identity_map(2));
    const auto [q, qe] = pt({0.4, 0.2}, {0.3, 1.0});
    const Path run = waypoint_path({pt({0.0, 0.0}, {1.0, 0.0}), pt({0.4, 0.2}, {0.3, 1.0})});
    CHECK(std::abs(classical_branch(sid, run, q, qe) - Complex(1, 0)) < 1e-10);
}

TEST_CASE("composition index distinguishes order") {
    Rng rng(5);
    const auto [y, eta] = pt({0.0, 0.0}, {1.0, 0.0});
    const CanonicalMap id = identity_map(2);
    const CanonicalMap hw = half_wave_map(2, 1.0);

    CHECK(composition_index(hw, hw, y, eta, rng) == 0);
    CHECK(composition_index(id, hw, y, eta, rng) == 1);
    CHECK(composition_index(hw, id, y, eta, rng) == 0);
}

TEST_CASE("composition index equals the direct arithmetic on random pairs") {
    Rng rng(7);
    std::vector<CanonicalMap> catalog;
    catalog.push_back(identity_map(2));
    catalog.push_back(half_wave_map(2, 1.0));
    catalog.push_back(half_wave_map(2, -0.6));
    Mat L(2, 2);
    L << 1, 0.5, 0, 1;
    catalog.push_back(linear_symplectic_map(L));
    int trials = 0;
    while (trials < 200) {
        const auto& m1 = catalog[static_cast<std::size_t>(rng.integer(0, 3))];
        const auto& m2 = catalog[static_cast<std::size_t>(rng.integer(0, 3))];
        const auto [y, eta] = random_samples(2, 1, rng)[0];
        const int k = composition_index(m1, m2, y, eta, rng);
        // Recompute (kappa_direct + r) / 2 from scratch as the oracle.
        const LagrangianFrame l1 = image_of_vertical(m1, y, eta);
        const CanonicalMap inv2 = inverse_map(m2);
        const auto [py, pe] = m1(y, eta);
        const auto [wy, we] = inv2(py, pe);
        const LagrangianFrame l2 = image_of_vertical(m2, wy, we);
        const int kappa = kashiwara_direct(l1, l2);
        const auto dims = intersection_dims(l1, l2);
        const int r = 2 + dims.dim_l1_vertical - dims.dim_l2_vertical - dims.dim_l1_l2;
        CHECK(2 * k == kappa + r);
        ++trials;
    }
}

TEST_CASE("star composition values") {
    Rng rng(9);
    const auto [y, eta] = pt({0.2, 0.1}, {1.0, 0.0});

    // V against itself: unit modulus squared at zero index.
    PrincipalSymbol s = unit_symbol(half_wave_map(2, 1.0));
    s.amplitude = [](const Vec&, const Vec& e) { return Complex(0.6, 0.8) * e.norm(); };
    s.order = 1.0;
    const SymbolValue vv = star_composition(s, s, y, eta, rng);
    CHECK(vv.index == 0);
    CHECK(vv.order == doctest::Approx(2.0));
    CHECK(std::abs(vv.value - Complex(1.0, 0.0)) < 1e-10);  // |0.6 + 0.8i|^2

    // Two pseudodifferential factors multiply pointwise.
    PrincipalSymbol a = unit_symbol(identity_map(2));
    a.amplitude = [](const Vec& yy, const Vec&) { return Complex(2.0 + yy[0], 0.0); };
    PrincipalSymbol b = unit_symbol(identity_map(2));
    b.amplitude = [](const Vec& yy, const Vec&) { return Complex(0.0, 1.0 + yy[1]); };
    const SymbolValue ab = star_composition(a, b, y, eta, rng);
    CHECK(ab.index == 0);
    CHECK(std::abs(ab.value - Complex(2.2, 0.0) * std::conj(Complex(0.0, 1.1))) < 1e-12);

    // Identity against the half wave: the unit index shows up.
    const SymbolValue ihw = star_composition(unit_symbol(identity_map(2)),
                                             unit_symbol(half_wave_map(2, 1.0)), y, eta, rng);
    CHECK(ihw.index == 1);
    CHECK(std::abs(ihw.value - Complex(0, 1)) < 1e-12);
}

TEST_CASE("adjoint values by both routes") {
    Rng rng(11);
    // One-dimensional catalog maps: the index vanishes and the routes agree.
    const auto [x1, xi1] = pt({0.6}, {1.0});
    PrincipalSymbol lift = unit_symbol(lift_map("y+y^3"));
    lift.amplitude = [](const Vec& yy, const Vec&) { return Complex(1.0 + 0.2 * yy[0], 0.4); };
    const AdjointValue av = adjoint_symbol(lift, x1, xi1, rng);
    CHECK(av.index_step_arithmetic == 0);
    CHECK(std::abs(av.value_step_arithmetic - av.value_conjugate_only) < 1e-10);

    // Half wave at n = 2: the routes differ by exactly one factor of i.
    const auto [x2, xi2] = pt({0.5, 0.0}, {1.0, 0.0});
    const AdjointValue hw = adjoint_symbol(unit_symbol(half_wave_map(2, 1.0)), x2, xi2, rng);
    CHECK(hw.index_step_arithmetic == 1);
    CHECK(std::abs(hw.value_step_arithmetic - Complex(0, 1) * hw.value_conjugate_only) < 1e-12);

    // Pseudodifferential case: plain conjugation under both routes.
    PrincipalSymbol pdo = unit_symbol(identity_map(2));
    pdo.amplitude = [](const Vec& yy, const Vec&) { return Complex(yy[0], 0.7); };
    const AdjointValue ap = adjoint_symbol(pdo, x2, xi2, rng);
    CHECK(ap.index_step_arithmetic == 0);
    CHECK(std::abs(ap.value_step_arithmetic - ap.value_conjugate_only) < 1e-12);
}

TEST_CASE("composition symbol values and associativity for lifts") {
    Rng rng(13);
    const auto [y, eta] = pt({0.3}, {1.0});

    PrincipalSymbol s1 = unit_symbol(lift_map("y+y^3"));
    s1.amplitude = [](const Vec& yy, const Vec&) { return Complex(1.0 + yy[0], 0.0); };
    PrincipalSymbol one = unit_symbol(identity_map(1));
    const SymbolValue through = composition_symbol(s1, one, y, eta, rng);
    CHECK(through.index == 0);
    CHECK(std::abs(through.value - Complex(1.3, 0.0)) < 1e-12);

    PrincipalSymbol s2 = unit_symbol(lift_map("2*y"));
    s2.amplitude = [](const Vec& yy, const Vec&) { return Complex(0.5, yy[0]); };
    PrincipalSymbol s3 = unit_symbol(lift_map("y+0.3*sin(y)"));
    s3.amplitude = [](const Vec& yy, const Vec&) { return Complex(1.0, -0.2 * yy[0]); };

    // ((s3 s2) s1) = (s3 (s2 s1)) pointwise: all indices vanish for lifts.
    auto val_left = [&] {
        PrincipalSymbol s21;
        const CanonicalMap m21 = compose_maps(s1.map, s2.map);
        const auto inner1 = s1;
        const auto inner2 = s2;
        s21.map = m21;
        s21.order = 0.0;
        s21.amplitude = [inner1, inner2](const Vec& yy, const Vec& ee) {
            Rng local(1);
            return composition_symbol(inner1, inner2, yy, ee, local).value;
        };
        return composition_symbol(s21, s3, y, eta, rng).value;
    }();
    auto val_right = [&] {
        PrincipalSymbol s32;
        const CanonicalMap m32 = compose_maps(s2.map, s3.map);
        const auto inner2 = s2;
        const auto inner3 = s3;
        s32.map = m32;
        s32.order = 0.0;
        s32.amplitude = [inner2, inner3](const Vec& yy, const Vec& ee) {
            Rng local(1);
            return composition_symbol(inner2, inner3, yy, ee, local).value;
        };
        return composition_symbol(s1, s32, y, eta, rng).value;
    }();
    CHECK(std::abs(val_left - val_right) < 1e-10);
}

TEST_CASE("egorov symbol for unit-modulus factors") {
    const auto [y, eta] = pt({0.2}, {1.0});
    const PrincipalSymbol v = unit_symbol(lift_map("y+y^3"));
    const Path still = waypoint_path({pt({0.2}, {1.0}), pt({0.2}, {1.0})});

    // a == 1 conjugated by a unit symbol: exactly one.
    const Complex one = egorov_symbol(v, v, unit_amp(), still, y, eta);
    CHECK(std::abs(one - Complex(1, 0)) < 1e-10);

    // Real classical symbols conjugate to real outputs.
    auto a_real = [](const Vec& xx, const Vec& xxi) {
        return Complex(2.0 + std::sin(xx[0]), 0.0) * (xxi[0] > 0 ? 1.0 : -1.0);
    };
    const Complex out = egorov_symbol(v, v, a_real, still, y, eta);
    CHECK(std::abs(out.imag()) < 1e-10);
    const auto [mx, me] = v.map(y, eta);
    CHECK(out.real() == doctest::Approx(a_real(mx, me).real()));
}

TEST_CASE("branch values are unchanged modulo anchor shifts by four") {
    const PrincipalSymbol s = unit_symbol(half_wave_map(2, 1.0));
    const auto [q, qe] = pt({0.3, 0.1}, {0.4, 1.0});
    const Path run = waypoint_path({pt({0.0, 0.0}, {1.0, 0.0}), pt({0.3, 0.1}, {0.4, 1.0})});
    const Complex direct = classical_branch(s, run, q, qe);
    // Shifting the anchor by a full period multiplies by i^(-4k) = 1.
    CHECK(std::abs(direct * ipow(4L) - direct * ipow(-4L)) < 1e-12);
}

TEST_CASE("conic support bookkeeping") {
    ConicSupport a;
    a.y_lo = Vec::Constant(2, -1.0);
    a.y_hi = Vec::Constant(2, 1.0);
    a.angle_center = 0.0;
    a.angle_halfwidth = 0.5;
    ConicSupport b = a;
    b.angle_center = 0.4;

    Vec y = Vec::Zero(2), e1(2), e2(2);
    e1 << 1.0, 0.0;
    e2 << 0.0, 1.0;
    CHECK(a.contains(y, e1));
    CHECK_FALSE(a.contains(y, e2));

    const auto isect = ConicSupport::intersect(a, b);
    REQUIRE(isect.has_value());
    CHECK(isect->angle_halfwidth == doctest::Approx(0.3).epsilon(1e-9));

    ConicSupport far = a;
    far.angle_center = 2.0;
    CHECK_FALSE(ConicSupport::intersect(a, far).has_value());

    // Pushing through the half wave keeps directions and bounds the image box.
    const ConicSupport img = a.map_through(half_wave_map(2, 1.0));
    CHECK(img.contains(Vec::Constant(2, 0.2) + e1, e1));
}

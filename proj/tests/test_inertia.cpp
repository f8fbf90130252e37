#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fiocalc/inertia.hpp"

using namespace fiocalc;

namespace {

Mat diag2(double a, double b) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

}  // namespace

TEST_CASE("inertia of diagonal and small symmetric matrices") {
    CHECK(inertia(diag2(2, -3)) == Inertia{1, 1, 2, 0});
    CHECK(inertia(Mat::Zero(3, 3)) == Inertia{0, 0, 0, 0});

    // Eigenvalues of [[1,2],[2,1]] from the characteristic polynomial:
    // (1 - t)^2 - 4 = 0  =>  t = 3, -1.
    Mat a(2, 2);
    a << 1, 2, 2, 1;
    CHECK(inertia(a) == Inertia{1, 1, 2, 0});
}

TEST_CASE("asymmetric input is rejected with a measure") {
    Mat a(2, 2);
    a << 0, 1, 0, 0;
    CHECK_THROWS_AS(inertia(a), ValidationError);
}

TEST_CASE("congruence invariance of inertia") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = static_cast<int>(rng.integer(1, 5));
        const Mat s = rng.sym_matrix(n);
        const Mat j = rng.nondegenerate_matrix(n);
        const Mat congruent = j.transpose() * s * j;
        CHECK(inertia(congruent) == inertia(s));
    }
}

TEST_CASE("det_plus_arg at distinguished points") {
    const int n = 2;
    // Real positive definite: the branch is normalized to zero.
    CHECK(det_plus_arg({Mat::Identity(n, n), Mat::Zero(n, n)}) == doctest::Approx(0.0));
    // Purely imaginary: (pi/2) sgn of the imaginary part.
    CHECK(det_plus_arg({Mat::Zero(n, n), Mat::Identity(n, n)}) == doctest::Approx(M_PI));
    // diag(1, i): argument sum 0 + pi/2.
    CHECK(det_plus_arg({diag2(1, 0), diag2(0, 1)}) == doctest::Approx(M_PI / 2));
}

TEST_CASE("det_plus_arg congruence invariance") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = static_cast<int>(rng.integer(1, 4));
        // Re C psd: build as G'G; arbitrary symmetric imaginary part.
        const Mat g = rng.matrix(n, n);
        const ComplexSymMatrix c{Mat(g.transpose() * g), rng.sym_matrix(n)};
        const Mat j = rng.nondegenerate_matrix(n);
        const ComplexSymMatrix cj{Mat(j.transpose() * c.real_part * j),
                                  Mat(j.transpose() * c.imag_part * j)};
        CHECK(det_plus_arg(cj) == doctest::Approx(det_plus_arg(c)).epsilon(1e-9));
    }
}

TEST_CASE("negative real part is a domain error") {
    CHECK_THROWS_AS(det_plus_arg({diag2(-1, 1), Mat::Zero(2, 2)}), DomainError);
}

TEST_CASE("continuation along matrix curves") {
    // Constant curve: identically zero.
    std::vector<ComplexSymMatrix> path;
    for (int k = 0; k <= 10; ++k) path.push_back({Mat::Identity(2, 2), Mat::Zero(2, 2)});
    auto curve = det_plus_arg_continued(path);
    for (double v : curve) CHECK(v == doctest::Approx(0.0));

    // diag(1, i s): kernel stratum changes at s = 0, endpoint pi/2.
    path.clear();
    for (int k = 0; k <= 40; ++k) {
        const double s = k / 40.0;
        path.push_back({diag2(1, 0), diag2(0, s)});
    }
    curve = det_plus_arg_continued(path);
    CHECK(curve.front() == doctest::Approx(0.0));
    CHECK(curve.back() == doctest::Approx(M_PI / 2));
    CHECK(curve.back() == doctest::Approx(det_plus_arg({diag2(1, 0), diag2(0, 1)})));

    // Scalar e^{is} up to pi/3.
    path.clear();
    for (int k = 0; k <= 32; ++k) {
        const double s = (M_PI / 3) * k / 32.0;
        path.push_back({Mat::Constant(1, 1, std::cos(s)), Mat::Constant(1, 1, std::sin(s))});
    }
    curve = det_plus_arg_continued(path);
    CHECK(curve.back() == doctest::Approx(M_PI / 3));
}

TEST_CASE("continuation reports refinement needs") {
    // Two samples a quarter turn apart exceed the per-step budget.
    std::vector<ComplexSymMatrix> path = {
        {Mat::Identity(2, 2), Mat::Zero(2, 2)},
        {Mat::Zero(2, 2), Mat::Identity(2, 2)},
    };
    CHECK_THROWS_AS(det_plus_arg_continued(path), RefinementError);
}

TEST_CASE("continuation endpoint is stable under refinement") {
    auto make_path = [](int samples) {
        std::vector<ComplexSymMatrix> path;
        for (int k = 0; k <= samples; ++k) {
            const double s = 1.2 * k / samples;
            Mat re(2, 2), im(2, 2);
            re << 1 + 0.3 * s, 0.1 * s, 0.1 * s, 1.0;
            im << std::sin(s), 0.2 * s, 0.2 * s, 0.5 * s;
            path.push_back({re, im});
        }
        return path;
    };
    const double coarse = det_plus_arg_continued(make_path(200)).back();
    const double fine = det_plus_arg_continued(make_path(400)).back();
    CHECK(std::abs(coarse - fine) < 1e-6);
}

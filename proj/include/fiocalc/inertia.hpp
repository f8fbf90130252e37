#pragma once

#include "fiocalc/common.hpp"

namespace fiocalc {

/// Eigenvalue counts of a real symmetric matrix at a tolerance.
struct Inertia {
    int kappa_plus = 0;   // strictly positive eigenvalues
    int kappa_minus = 0;  // strictly negative eigenvalues
    int rank = 0;         // kappa_plus + kappa_minus
    int sgn = 0;          // kappa_plus - kappa_minus

    bool operator==(const Inertia&) const = default;
};

/// Eigenvalues with |lambda| <= tol * max(1, ||S||) are counted into the
/// kernel.  Rejects matrices whose asymmetry exceeds the same threshold.
Inertia inertia(const Mat& S, double tol = -1.0);

int kappa_plus(const Mat& S, double tol = -1.0);
int kappa_minus(const Mat& S, double tol = -1.0);
int sgn(const Mat& S, double tol = -1.0);
int rank_sym(const Mat& S, double tol = -1.0);

/// Numerical rank of a general (possibly complex) matrix by singular values.
int rank_of(const Mat& M, double tol = -1.0);
int rank_of(const CMat& M, double tol = -1.0);

/// Complex symmetric matrix C = C1 + i C2 with both parts real symmetric.
struct ComplexSymMatrix {
    Mat real_part;
    Mat imag_part;

    CMat matrix() const { return real_part.cast<Complex>() + Complex(0, 1) * imag_part.cast<Complex>(); }
    static ComplexSymMatrix from(const CMat& C) { return {C.real(), C.imag()}; }
};

/// det(C + P) with P the orthogonal projection onto ker C, together with the
/// data needed for branch tracking.
struct DetPlus {
    Complex value;       // det(C + P)
    double arg_sum;      // sum of principal eigenvalue arguments, each in [-pi/2, pi/2]
    int kernel_dim;
};

DetPlus det_plus(const ComplexSymMatrix& C, double tol = -1.0);

/// Branch of arg det_+ that vanishes for real C: the sum of eigenvalue
/// arguments of C + P, each argument taken in [-pi/2, pi/2].  Requires the
/// real part positive semidefinite (up to tol).
double det_plus_arg(const ComplexSymMatrix& C, double tol = -1.0);

/// Continuous branch of arg det_+ along a sampled matrix curve, anchored at
/// det_plus_arg of the first sample.  Within a stratum of constant kernel
/// dimension the branch is continued through argument increments of det_+;
/// an increment of magnitude >= pi/2 raises RefinementError.  Where the
/// kernel dimension changes between consecutive samples the accumulated
/// winding offset is carried across unchanged, so the curve agrees with the
/// pointwise values on every stratum reachable without winding.
std::vector<double> det_plus_arg_continued(const std::vector<ComplexSymMatrix>& samples,
                                           double tol = -1.0);

}  // namespace fiocalc

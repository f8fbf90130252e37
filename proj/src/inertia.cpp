#include "fiocalc/inertia.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <sstream>

namespace fiocalc {

Inertia inertia(const Mat& S, double tol) {
    if (S.rows() != S.cols()) throw ValidationError("inertia: matrix must be square");
    const double scale = S.norm();
    const double thresh = resolve_tol(tol, scale);
    const double asym = (S - S.transpose()).norm();
    if (asym > thresh) {
        std::ostringstream os;
        os << "inertia: input not symmetric, asymmetry " << asym << " exceeds " << thresh;
        throw ValidationError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
    Inertia out;
    for (int i = 0; i < S.rows(); ++i) {
        const double ev = es.eigenvalues()[i];
        if (ev > thresh) ++out.kappa_plus;
        else if (ev < -thresh) ++out.kappa_minus;
    }
    out.rank = out.kappa_plus + out.kappa_minus;
    out.sgn = out.kappa_plus - out.kappa_minus;
    return out;
}

int kappa_plus(const Mat& S, double tol) { return inertia(S, tol).kappa_plus; }
int kappa_minus(const Mat& S, double tol) { return inertia(S, tol).kappa_minus; }
int sgn(const Mat& S, double tol) { return inertia(S, tol).sgn; }
int rank_sym(const Mat& S, double tol) { return inertia(S, tol).rank; }

int rank_of(const Mat& M, double tol) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(M);
    const double thresh = resolve_tol(tol, svd.singularValues().size() ? svd.singularValues()(0) : 0.0);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > thresh) ++r;
    return r;
}

int rank_of(const CMat& M, double tol) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<CMat> svd(M);
    const double thresh = resolve_tol(tol, svd.singularValues().size() ? svd.singularValues()(0) : 0.0);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > thresh) ++r;
    return r;
}

namespace {

void check_complex_sym(const ComplexSymMatrix& C, double thresh) {
    if (C.real_part.rows() != C.real_part.cols() || C.imag_part.rows() != C.imag_part.cols() ||
        C.real_part.rows() != C.imag_part.rows())
        throw ValidationError("det_plus: parts must be square of equal size");
    const double asym = (C.real_part - C.real_part.transpose()).norm() +
                        (C.imag_part - C.imag_part.transpose()).norm();
    if (asym > thresh)
        throw ValidationError("det_plus: parts not symmetric within tolerance");
}

}  // namespace

DetPlus det_plus(const ComplexSymMatrix& C, double tol) {
    const CMat M = C.matrix();
    const int n = static_cast<int>(M.rows());
    const double scale = M.norm();
    const double thresh = resolve_tol(tol, scale);
    check_complex_sym(C, thresh);

    Eigen::SelfAdjointEigenSolver<Mat> re(0.5 * (C.real_part + C.real_part.transpose()),
                                          Eigen::EigenvaluesOnly);
    if (re.eigenvalues().minCoeff() < -thresh)
        throw DomainError("det_plus: real part has a negative eigenvalue");

    // Kernel projector from the singular value decomposition of C.
    Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullV);
    CMat P = CMat::Zero(n, n);
    int kernel_dim = 0;
    for (int i = 0; i < n; ++i) {
        if (svd.singularValues()(i) <= thresh) {
            const CVec v = svd.matrixV().col(i);
            P += v * v.adjoint();
            ++kernel_dim;
        }
    }

    Eigen::ComplexEigenSolver<CMat> es(M + P, false);
    DetPlus out;
    out.kernel_dim = kernel_dim;
    out.value = Complex(1.0, 0.0);
    out.arg_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const Complex lam = es.eigenvalues()(i);
        if (lam.real() < -100.0 * thresh)
            throw NumericsError("det_plus: eigenvalue of C + P with negative real part");
        out.value *= lam;
        out.arg_sum += std::atan2(lam.imag(), std::max(lam.real(), 0.0));
    }
    return out;
}

double det_plus_arg(const ComplexSymMatrix& C, double tol) {
    return det_plus(C, tol).arg_sum;
}

std::vector<double> det_plus_arg_continued(const std::vector<ComplexSymMatrix>& samples,
                                           double tol) {
    if (samples.empty()) return {};
    std::vector<DetPlus> pts;
    pts.reserve(samples.size());
    for (const auto& s : samples) pts.push_back(det_plus(s, tol));

    std::vector<double> out(samples.size());
    out[0] = pts[0].arg_sum;
    for (std::size_t k = 1; k < samples.size(); ++k) {
        if (pts[k].kernel_dim == pts[k - 1].kernel_dim) {
            const double inc = std::arg(pts[k].value / pts[k - 1].value);
            if (!(std::abs(inc) < M_PI / 2)) {
                throw RefinementError("det_plus_arg_continued: argument increment >= pi/2, refine sampling",
                                      static_cast<double>(k - 1), static_cast<double>(k));
            }
            out[k] = out[k - 1] + inc;
        } else {
            // Kernel stratum changed: keep the accumulated winding offset and
            // follow the pointwise branch on the new stratum.
            const double offset = out[k - 1] - pts[k - 1].arg_sum;
            out[k] = pts[k].arg_sum + offset;
        }
    }
    return out;
}

}  // namespace fiocalc

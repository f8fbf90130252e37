#pragma once

#include "fiocalc/maslov.hpp"

#include <optional>

namespace fiocalc {

/// Conic region: spatial box times a direction cone, used as a coarse
/// over-approximation of where an amplitude lives.  Directions are encoded
/// by the angle of eta in the plane (n = 2) or by 0 / pi for the two rays
/// (n = 1); halfwidth >= pi means all directions.
struct ConicSupport {
    Vec y_lo, y_hi;
    double angle_center = 0.0;
    double angle_halfwidth = M_PI;

    bool contains(const Vec& y, const Vec& eta) const;
    static std::optional<ConicSupport> intersect(const ConicSupport& a, const ConicSupport& b);
    /// Image under the map, bounded by pushing a sample grid through.
    ConicSupport map_through(const CanonicalMap& map, int samples_per_dim = 5) const;
};

enum class SymbolView { Singular, ClassicalBranch };

/// Positively homogeneous leading amplitude attached to a canonical map.
struct PrincipalSymbol {
    double order = 0.0;
    std::function<Complex(const Vec&, const Vec&)> amplitude;
    CanonicalMap map;
    SymbolView view = SymbolView::Singular;
    std::optional<ConicSupport> support;

    Complex amp(const Vec& y, const Vec& eta) const { return amplitude(y, eta); }
};

/// i^(-theta_s) p(theta): the phase-kind-resolved value of the singular
/// symbol at a point.
Complex singular_from_amplitude(const std::function<Complex(const Vec&, const Vec&)>& p_m,
                                const PhaseSpec& phase, const Vec& y, const Vec& eta,
                                double tol = -1.0);

/// i^(-theta_phi(query)) s(query) with the branch anchored to 0 at the path
/// start; the path must run from the anchor point to the query.
Complex classical_branch(const PrincipalSymbol& s, const Path& path_from_anchor, const Vec& y,
                         const Vec& eta, int samples = 65, double tol = -1.0);

/// Modified index of the image frames d(map1)(V) and d(map2)(V) at the
/// common point map1(theta) = map2(composed(theta)); equals the kappa_-
/// arithmetic of the graph forms over a shared transversal horizontal and is
/// asserted against (kashiwara_direct + r) / 2.
int composition_index(const CanonicalMap& map1, const CanonicalMap& map2, const Vec& y,
                      const Vec& eta, Rng& rng, double tol = -1.0);

struct SymbolValue {
    Complex value;
    double order = 0.0;
    int index = 0;  // the i-power used
    std::optional<ConicSupport> support;
};

/// Value of the symbol of (second)^* (first) at theta:
/// i^k s1(theta) conj(s2(composed theta)), k the modified index above.
SymbolValue star_composition(const PrincipalSymbol& s1, const PrincipalSymbol& s2, const Vec& y,
                             const Vec& eta, Rng& rng, double tol = -1.0);

/// Both candidate adjoint values: the index-arithmetic route (star
/// composition against the identity) and the plain conjugation.
struct AdjointValue {
    Complex value_step_arithmetic;
    Complex value_conjugate_only;
    int index_step_arithmetic = 0;
    int index_difference = 0;
};

AdjointValue adjoint_symbol(const PrincipalSymbol& s, const Vec& x, const Vec& xi, Rng& rng,
                            double tol = -1.0);

/// Value of the symbol of (second)(first) at theta:
/// i^k s1(theta) s2(first(theta)).
SymbolValue composition_symbol(const PrincipalSymbol& s1, const PrincipalSymbol& s2, const Vec& y,
                               const Vec& eta, Rng& rng, double tol = -1.0);

/// sigma_{V1,anchor}(q) a(map(q)) conj(sigma_{V2,anchor}(q)) for a
/// zero-index pair V1, V2 attached to the same map.
Complex egorov_symbol(const PrincipalSymbol& s1, const PrincipalSymbol& s2,
                      const std::function<Complex(const Vec&, const Vec&)>& a_symbol,
                      const Path& path_from_anchor, const Vec& y, const Vec& eta,
                      int samples = 65, double tol = -1.0);

}  // namespace fiocalc

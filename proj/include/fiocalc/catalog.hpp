#pragma once

#include "fiocalc/canonical.hpp"

#include <json.hpp>

namespace fiocalc {

CanonicalMap identity_map(int n);

/// xstar = y + t eta/|eta|, xistar = eta.
CanonicalMap half_wave_map(int n, double t);

/// (y, eta) -> (L y, L^-T eta).
CanonicalMap linear_symplectic_map(const Mat& L);

/// Cotangent lift of the separable diffeomorphism x_i = f_i(y_i); each
/// component is an expression in the variable "y".
CanonicalMap lift_map(const std::vector<Expr>& components);
CanonicalMap lift_map(const std::string& f_text);

/// FlowSpec for h = sqrt(xi' g(x)^-1 xi); metric entries are expressions in
/// x1..xn (constants allowed).
FlowSpec metric_flow_spec(const std::vector<std::vector<Expr>>& metric, double time, int steps);

/// Catalog construction from JSON, e.g. {"map":"half_wave","t":1.0,"n":2},
/// {"map":"lift","f":"y+y^3"}, {"map":"flow","metric":[[...]],"t":2.0,"steps":1000}.
/// Unknown keys are rejected.
CanonicalMap map_from_json(const nlohmann::json& j);

/// Random conic-domain samples for validation sweeps: y in a box, eta with
/// |eta| in [0.5, 2].
std::vector<std::pair<Vec, Vec>> random_samples(int n, int count, Rng& rng, double y_box = 1.5);

}  // namespace fiocalc

#pragma once

#include "fiocalc/phase.hpp"

namespace fiocalc {

/// Single-valued index part built from the eta-Hessian of the phase:
/// pi^-1 arg det_+ (phi_ee / i) - rank(xstar_eta) / 2.
/// For real phases this equals -kappa_+(phi_ee).
double theta_s(const PhaseJet& jet, double tol = -1.0);

/// Parametrized curve in the conic domain, s in [0, 1].
struct Path {
    std::function<std::pair<Vec, Vec>(double)> at;
};

/// Piecewise-linear path through waypoints (y, eta).
Path waypoint_path(const std::vector<std::pair<Vec, Vec>>& waypoints);

struct RankEvent {
    double s = 0.0;
    int rank_before = 0;
    int rank_at = 0;
    int rank_after = 0;
    long theta_jump = 0;  // theta_phi(after) - theta_phi(before)
};

/// Discretized branch data along a path: the tracked arg det^2 phi_xe curve
/// (theta_r), the pointwise theta_s curve, their integer difference
/// theta_phi, ranks, and the located rank-change events.
struct BranchState {
    std::vector<double> s;
    std::vector<double> theta_r;
    std::vector<double> theta_s;
    std::vector<long> theta_phi;
    std::vector<int> rank;
    std::vector<RankEvent> events;
};

struct TrackOptions {
    int samples = 129;
    long anchor_theta_phi = 0;   // branch normalization at the path start
    double tol = -1.0;
    int max_refine_depth = 14;
    double event_resolution = 1e-6;
    double integer_slack = 0.02;  // |theta_phi - round| allowed before refining
};

/// Continue the branch along the path with the given phase kind.  Intervals
/// whose argument increment is too coarse or whose theta_phi lands between
/// integers are subdivided; a persistent violation raises RefinementError.
BranchState track_branch(const PhaseSpec& spec, const Path& path, const TrackOptions& opts = {});

/// Continuous branch of (2pi)^-1 arg det^2 phi_xe along the path, anchored
/// at the given start value.
std::vector<double> theta_r_continued(const PhaseSpec& spec, const Path& path, int samples,
                                      double anchor, double tol = -1.0);

/// Minus the increment of theta_phi along the path; rejects paths whose
/// endpoints sit on a rank-change event.
long maslov_index_of_path(const CanonicalMap& map, const Path& path, PhaseKind kind,
                          const TrackOptions& opts = {});

/// Integer (1/2) sgn (phi_j)_ee - (1/2) sgn (phi_k)_ee, asserted constant
/// over the common samples; both phases must be real-valued there.
int cocycle_number(const std::vector<PhaseJet>& jets_j, const std::vector<PhaseJet>& jets_k,
                   double tol = -1.0);

}  // namespace fiocalc

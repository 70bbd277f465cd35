#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radial/measure.hpp"
#include "radial/transport.hpp"

namespace radial {

// Parameters of the shell scan. The candidate family is every closed radial
// interval between distinct atom radii when there are at most
// exact_radius_cap of them; for larger clouds, boundaries start on mass
// quantiles (coarse_cells of them) and are refined around the running
// maximizer for refine_rounds rounds. Shells are processed in decreasing
// mass order, so a shell can be skipped as soon as its mass cannot beat the
// best min(mass, w1) found so far.
struct RadialityParams {
    RefParams ref;
    int exact_radius_cap = 48;
    int coarse_cells = 8;
    int refine_rounds = 2;
    double min_mass = 1e-9;
};

struct ShellRow {
    RadialInterval interval;
    double mass = 0.0;
    double w1 = 0.0;     // estimate from w1_to_uniform
    double spread = 0.0; // min-max envelope width over repeats
};

struct ShellCandidate {
    RadialInterval interval;
    double mass = 0.0;
};

// The radiality certificate at reference resolution.
//
// epsilon_star = max over the candidate family of min(mass, w1), which is
// the infimum of the levels eps at which every shell of mass >= eps moves
// to the uniform sphere measure for at most eps. The infimum need not be
// attained, so validate() checks shells with mass strictly above
// epsilon_star.
struct RadialityReport {
    double epsilon_star = 0.0;
    std::vector<ShellRow> shells; // all evaluated shells
    int worst_shell = -1;         // argmax of min(mass, w1)
    bool proper = false;
    double grid_step = 0.0; // largest cell mass of the boundary grid; 0 = exact
    int ref_size = 0;       // 0 means the per-shell default schedule
    int repeats = 0;
    std::uint64_t seed = 0;
    std::string interval_convention = "closed";

    void validate() const;
};

RadialityReport radiality_epsilon(const PointCloud& cloud,
                                  const RadialityParams& params = {});

// The exact candidate family: every closed interval between distinct radii
// whose mass is at least min_mass. Intended for small or few-radius clouds;
// throws when the cloud has more than 2000 distinct radii.
std::vector<ShellCandidate> shell_candidates(const PointCloud& cloud,
                                             double min_mass);

struct RadialityDecision {
    bool radial = false;
    ShellRow witness; // first violating shell when not radial
    bool has_witness = false;
};

// Certifies "every candidate shell with mass >= epsilon has w1 within
// epsilon" conservatively: a shell passes when estimate + spread <= epsilon.
RadialityDecision is_eps_radial(const PointCloud& cloud, double epsilon,
                                const RadialityParams& params = {});

// Smallest support radius r with mass{|x| <= r} >= p, for p in (0, 1].
double quantile_radius(const PointCloud& cloud, double p);

std::string report_to_json(const RadialityReport& report);
RadialityReport report_from_json(const std::string& text);

// Super-gaussian tail check along one direction. M is the positive median
// of |<x, u>| (midpoint of the feasible interval); the check asks for mass
// at least c * exp(-C t^2) beyond t*M on both sides, for t on a step grid
// over [0, R].
struct TailRow {
    double t = 0.0;
    double mass_pos = 0.0;
    double mass_neg = 0.0;
    double threshold = 0.0;
};

struct TailParams {
    double c = 0.05;
    double C = 4.0;
    double R = 2.0;
    double t_step = 0.1;
};

struct TailReport {
    bool pass = false;
    double median = 0.0;
    std::vector<TailRow> rows;
    int witness = -1; // first failing grid index when !pass
    TailParams params;
};

TailReport supergaussian_check(const PointCloud& cloud,
                               const Eigen::VectorXd& direction,
                               const TailParams& params = {});

std::string tail_report_to_json(const TailReport& report);

} // namespace radial

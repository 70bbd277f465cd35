#include "radial/radiality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

#include "radial/rng.hpp"

namespace radial {

namespace {

using nlohmann::json;

struct RadiusGroups {
    std::vector<double> radius;  // ascending, exact values
    std::vector<double> mass;    // per group
    std::vector<double> prefix;  // prefix[g] = mass of groups [0, g)
    std::vector<int> atom_start; // into atoms_sorted, size G+1
    std::vector<int> atoms_sorted;
};

RadiusGroups group_radii(const PointCloud& cloud) {
    const int N = static_cast<int>(cloud.size());
    std::vector<double> r(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        r[static_cast<std::size_t>(i)] = cloud.points.row(i).norm();
    }
    RadiusGroups g;
    g.atoms_sorted.resize(static_cast<std::size_t>(N));
    std::iota(g.atoms_sorted.begin(), g.atoms_sorted.end(), 0);
    std::sort(g.atoms_sorted.begin(), g.atoms_sorted.end(), [&](int a, int b) {
        const double ra = r[static_cast<std::size_t>(a)];
        const double rb = r[static_cast<std::size_t>(b)];
        return ra != rb ? ra < rb : a < b;
    });
    for (int k = 0; k < N; ++k) {
        const int i = g.atoms_sorted[static_cast<std::size_t>(k)];
        const double ri = r[static_cast<std::size_t>(i)];
        if (g.radius.empty() || g.radius.back() != ri) {
            g.radius.push_back(ri);
            g.mass.push_back(0.0);
            g.atom_start.push_back(k);
        }
        g.mass.back() += cloud.weights[i];
    }
    g.atom_start.push_back(N);
    g.prefix.assign(g.radius.size() + 1, 0.0);
    for (std::size_t k = 0; k < g.radius.size(); ++k) {
        g.prefix[k + 1] = g.prefix[k] + g.mass[k];
    }
    return g;
}

// One evaluator shared by radiality_epsilon and is_eps_radial so both see
// the exact same numbers for the same shell of the same cloud.
class ShellEvaluator {
  public:
    ShellEvaluator(const PointCloud& cloud, const RadialityParams& params)
        : params_(params), groups_(group_radii(cloud)) {
        const SphericalMeasure unit = radial_project(cloud);
        units_ = unit.cloud.points;
        weights_ = cloud.weights;
        dim_ = static_cast<int>(cloud.dim());
    }

    const RadiusGroups& groups() const { return groups_; }
    int group_count() const { return static_cast<int>(groups_.radius.size()); }

    double range_mass(int gl, int gu) const {
        return groups_.prefix[static_cast<std::size_t>(gu) + 1] -
               groups_.prefix[static_cast<std::size_t>(gl)];
    }

    ShellRow evaluate(int gl, int gu) const {
        const int a0 = groups_.atom_start[static_cast<std::size_t>(gl)];
        const int a1 = groups_.atom_start[static_cast<std::size_t>(gu) + 1];
        const double mass = range_mass(gl, gu);
        SphericalMeasure shell;
        shell.cloud.points.resize(a1 - a0, dim_);
        shell.cloud.weights.resize(a1 - a0);
        for (int k = a0; k < a1; ++k) {
            const int i = groups_.atoms_sorted[static_cast<std::size_t>(k)];
            shell.cloud.points.row(k - a0) = units_.row(i);
            shell.cloud.weights[k - a0] = weights_[i] / mass;
        }
        RefParams rp = params_.ref;
        rp.ref_size = ref_size_for(a1 - a0);
        rp.seed = derive_seed(params_.ref.seed,
                              static_cast<std::uint64_t>(gl) *
                                      (static_cast<std::uint64_t>(
                                           groups_.radius.size()) +
                                       1) +
                                  static_cast<std::uint64_t>(gu));
        const W1Estimate est = w1_to_uniform(shell, rp);
        ShellRow row;
        row.interval = {groups_.radius[static_cast<std::size_t>(gl)],
                        groups_.radius[static_cast<std::size_t>(gu)]};
        row.mass = mass;
        row.w1 = est.estimate;
        row.spread = est.spread();
        return row;
    }

    int ref_size_for(int atoms) const {
        if (params_.ref.ref_size > 0) return params_.ref.ref_size;
        if (dim_ <= 2) return std::max(2000, 10 * atoms);
        return std::clamp(4 * atoms, 1500, 3000);
    }

  private:
    RadialityParams params_;
    RadiusGroups groups_;
    PointMatrix units_;
    Eigen::VectorXd weights_;
    int dim_ = 0;
};

struct Candidate {
    int gl, gu;
    double mass;
};

bool candidate_order(const Candidate& a, const Candidate& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    if (a.gl != b.gl) return a.gl < b.gl;
    return a.gu < b.gu;
}

// Boundary cuts for the adaptive grid: mass quantiles snapped to group
// boundaries, always including both ends.
std::vector<int> quantile_cuts(const RadiusGroups& g, int cells) {
    const int G = static_cast<int>(g.radius.size());
    std::set<int> cuts{0, G};
    for (int k = 1; k < cells; ++k) {
        const double target = static_cast<double>(k) / cells;
        const auto it =
            std::lower_bound(g.prefix.begin(), g.prefix.end(), target);
        int c = static_cast<int>(it - g.prefix.begin());
        c = std::clamp(c, 1, G - 1);
        cuts.insert(c);
    }
    return {cuts.begin(), cuts.end()};
}

int mass_median_cut(const RadiusGroups& g, int lo, int hi) {
    // Cut position inside (lo, hi) that splits the cell's mass most evenly.
    const double target =
        0.5 * (g.prefix[static_cast<std::size_t>(lo)] +
               g.prefix[static_cast<std::size_t>(hi)]);
    const auto it = std::lower_bound(g.prefix.begin() + lo + 1,
                                     g.prefix.begin() + hi, target);
    int c = static_cast<int>(it - g.prefix.begin());
    return std::clamp(c, lo + 1, hi - 1);
}

} // namespace

std::vector<ShellCandidate> shell_candidates(const PointCloud& cloud,
                                             double min_mass) {
    cloud.validate();
    const RadiusGroups g = group_radii(cloud);
    const int G = static_cast<int>(g.radius.size());
    if (G > 2000) {
        throw std::invalid_argument(
            "shell_candidates: " + std::to_string(G) +
            " distinct radii; the exact interval family is quadratic, use "
            "radiality_epsilon's adaptive grid instead");
    }
    std::vector<ShellCandidate> out;
    for (int gl = 0; gl < G; ++gl) {
        for (int gu = gl; gu < G; ++gu) {
            const double mass = g.prefix[static_cast<std::size_t>(gu) + 1] -
                                g.prefix[static_cast<std::size_t>(gl)];
            if (mass >= min_mass) {
                out.push_back({{g.radius[static_cast<std::size_t>(gl)],
                                g.radius[static_cast<std::size_t>(gu)]},
                               mass});
            }
        }
    }
    return out;
}

RadialityReport radiality_epsilon(const PointCloud& cloud,
                                  const RadialityParams& params) {
    cloud.validate();
    if (!is_proper(cloud)) {
        throw std::domain_error(
            "radiality_epsilon: cloud has an atom at the origin");
    }
    const ShellEvaluator ev(cloud, params);
    const RadiusGroups& g = ev.groups();
    const int G = ev.group_count();
    const bool exact = G <= params.exact_radius_cap;

    std::vector<int> cuts;
    std::set<std::pair<int, int>> seen;
    std::vector<Candidate> cands;
    auto push_candidate = [&](int gl, int gu) {
        if (!seen.insert({gl, gu}).second) return;
        const double mass = ev.range_mass(gl, gu);
        if (mass >= params.min_mass) cands.push_back({gl, gu, mass});
    };

    // Exact transport on spheres of dimension >= 3 is the expensive case;
    // for large clouds the grid family is restricted to local unions (cell,
    // two adjacent cells, full interval). The resolution of the certificate
    // is what grid_step reports either way.
    const bool local_only = cloud.dim() >= 3 && cloud.size() > 1500;

    if (exact) {
        cuts.resize(static_cast<std::size_t>(G) + 1);
        std::iota(cuts.begin(), cuts.end(), 0);
        for (int gl = 0; gl < G; ++gl) {
            for (int gu = gl; gu < G; ++gu) push_candidate(gl, gu);
        }
    } else {
        cuts = quantile_cuts(g, params.coarse_cells);
        for (std::size_t p = 0; p < cuts.size(); ++p) {
            for (std::size_t q = p + 1; q < cuts.size(); ++q) {
                const bool full = p == 0 && q == cuts.size() - 1;
                if (local_only && q - p > 2 && !full) continue;
                push_candidate(cuts[p], cuts[q] - 1);
            }
        }
        // Heavy single-radius shells (atoms sharing one radius) are cheap
        // and catch point masses the quantile grid would blur away.
        std::vector<int> heavy;
        for (int k = 0; k < G; ++k) {
            if (g.mass[static_cast<std::size_t>(k)] >= 0.01) heavy.push_back(k);
        }
        std::sort(heavy.begin(), heavy.end(), [&](int a, int b) {
            const double ma = g.mass[static_cast<std::size_t>(a)];
            const double mb = g.mass[static_cast<std::size_t>(b)];
            return ma != mb ? ma > mb : a < b;
        });
        if (heavy.size() > 32) heavy.resize(32);
        for (const int k : heavy) push_candidate(k, k);
    }

    std::vector<ShellRow> rows;
    std::map<std::pair<int, int>, double> w1_of;
    double best = 0.0;

    auto run_pass = [&](std::vector<Candidate> batch) {
        std::sort(batch.begin(), batch.end(), candidate_order);
        for (const Candidate& c : batch) {
            if (c.mass <= best) break; // sorted: nothing below can win
            // Mixture convexity: a shell's w1 is at most the mass-weighted
            // mean over any exact partition into evaluated cells.
            double ub_mass = 0.0, ub_acc = 0.0;
            for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
                if (cuts[p] < c.gl || cuts[p + 1] - 1 > c.gu) continue;
                const auto it = w1_of.find({cuts[p], cuts[p + 1] - 1});
                if (it == w1_of.end()) {
                    ub_mass = -1.0;
                    break;
                }
                const double cm = ev.range_mass(cuts[p], cuts[p + 1] - 1);
                ub_mass += cm;
                ub_acc += cm * it->second;
            }
            if (ub_mass > 0.0 && std::abs(ub_mass - c.mass) < 1e-12 &&
                ub_acc / c.mass <= best) {
                continue;
            }
            const ShellRow row = ev.evaluate(c.gl, c.gu);
            rows.push_back(row);
            w1_of[{c.gl, c.gu}] = row.w1;
            best = std::max(best, std::min(row.mass, row.w1));
        }
    };

    // Evaluating the grid cells (and the full interval) first feeds the
    // mixture-convexity bound, which then prunes most multi-cell unions on
    // diffuse clouds; the candidate family itself is unchanged.
    auto split_pass = [&](std::vector<Candidate> batch) {
        auto is_cell = [&](const Candidate& c) {
            const auto at = std::lower_bound(cuts.begin(), cuts.end(), c.gl);
            return at != cuts.end() && *at == c.gl &&
                   std::next(at) != cuts.end() && *std::next(at) == c.gu + 1;
        };
        std::vector<Candidate> first, rest;
        for (const Candidate& c : batch) {
            const bool lead = is_cell(c) || (c.gl == 0 && c.gu == G - 1);
            (lead ? first : rest).push_back(c);
        }
        run_pass(std::move(first));
        run_pass(std::move(rest));
    };

    split_pass(std::move(cands));

    if (!exact) {
        for (int round = 0; round < params.refine_rounds; ++round) {
            // Locate the running maximizer among evaluated shells and split
            // the grid cells touching its two boundaries.
            double best_score = -1.0;
            std::pair<int, int> target{-1, -1};
            for (const auto& [key, w1] : w1_of) {
                const double score =
                    std::min(ev.range_mass(key.first, key.second), w1);
                if (score > best_score) {
                    best_score = score;
                    target = key;
                }
            }
            if (target.first < 0) break;
            std::set<int> cutset(cuts.begin(), cuts.end());
            std::vector<int> added;
            for (const int b : {target.first, target.second + 1}) {
                // Split the cell ending at b and the cell starting at b.
                std::vector<std::pair<int, int>> cells;
                const auto at = cutset.lower_bound(b);
                if (at != cutset.end() && at != cutset.begin()) {
                    cells.push_back({*std::prev(at), *at});
                }
                if (at != cutset.end() && *at == b &&
                    std::next(at) != cutset.end()) {
                    cells.push_back({b, *std::next(at)});
                }
                for (const auto& [lo, hi] : cells) {
                    if (hi - lo < 2) continue;
                    const int c = mass_median_cut(g, lo, hi);
                    if (cutset.insert(c).second) added.push_back(c);
                }
            }
            if (added.empty()) break;
            cuts.assign(cutset.begin(), cutset.end());
            std::vector<Candidate> extra;
            auto cut_index = [&](int cut) {
                return static_cast<int>(
                    std::lower_bound(cuts.begin(), cuts.end(), cut) -
                    cuts.begin());
            };
            for (const int c : added) {
                for (const int other : cuts) {
                    if (other == c) continue;
                    if (local_only &&
                        std::abs(cut_index(other) - cut_index(c)) > 2) {
                        continue;
                    }
                    const int lo = std::min(c, other);
                    const int hi = std::max(c, other);
                    if (!seen.insert({lo, hi - 1}).second) continue;
                    const double mass = ev.range_mass(lo, hi - 1);
                    if (mass >= params.min_mass) extra.push_back({lo, hi - 1, mass});
                }
            }
            split_pass(std::move(extra));
        }
    }

    RadialityReport report;
    report.epsilon_star = best;
    report.proper = true;
    report.ref_size = params.ref.ref_size;
    report.repeats = params.ref.repeats;
    report.seed = params.ref.seed;
    if (!exact) {
        for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
            report.grid_step = std::max(
                report.grid_step, ev.range_mass(cuts[p], cuts[p + 1] - 1));
        }
    }
    std::sort(rows.begin(), rows.end(), [](const ShellRow& a, const ShellRow& b) {
        if (a.interval.lo != b.interval.lo) return a.interval.lo < b.interval.lo;
        return a.interval.hi < b.interval.hi;
    });
    report.shells = std::move(rows);
    double best_score = -1.0;
    for (std::size_t k = 0; k < report.shells.size(); ++k) {
        const double score =
            std::min(report.shells[k].mass, report.shells[k].w1);
        if (score > best_score) {
            best_score = score;
            report.worst_shell = static_cast<int>(k);
        }
    }
    report.validate();
    return report;
}

RadialityDecision is_eps_radial(const PointCloud& cloud, double epsilon,
                                const RadialityParams& params) {
    cloud.validate();
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("is_eps_radial: epsilon must be positive");
    }
    if (!is_proper(cloud)) {
        throw std::domain_error("is_eps_radial: cloud has an atom at the origin");
    }
    const ShellEvaluator ev(cloud, params);
    const int G = ev.group_count();
    std::vector<std::pair<int, int>> family;
    if (G <= params.exact_radius_cap) {
        for (int gl = 0; gl < G; ++gl) {
            for (int gu = gl; gu < G; ++gu) family.push_back({gl, gu});
        }
    } else {
        const std::vector<int> cuts =
            quantile_cuts(ev.groups(), params.coarse_cells);
        // Same local-union restriction as the epsilon_star scan, so both
        // certifiers answer about the same shell family.
        const bool local_only = cloud.dim() >= 3 && cloud.size() > 1500;
        for (std::size_t p = 0; p < cuts.size(); ++p) {
            for (std::size_t q = p + 1; q < cuts.size(); ++q) {
                const bool full = p == 0 && q == cuts.size() - 1;
                if (local_only && q - p > 2 && !full) continue;
                family.push_back({cuts[p], cuts[q] - 1});
            }
        }
    }
    std::sort(family.begin(), family.end());
    RadialityDecision out;
    for (const auto& [gl, gu] : family) {
        if (ev.range_mass(gl, gu) < epsilon) continue;
        const ShellRow row = ev.evaluate(gl, gu);
        if (row.w1 + row.spread > epsilon) {
            out.radial = false;
            out.witness = row;
            out.has_witness = true;
            return out;
        }
    }
    out.radial = true;
    return out;
}

double quantile_radius(const PointCloud& cloud, double p) {
    cloud.validate();
    if (!(p > 0.0) || p > 1.0) {
        throw std::invalid_argument("quantile_radius: p must be in (0, 1]");
    }
    const RadiusGroups g = group_radii(cloud);
    for (std::size_t k = 0; k < g.radius.size(); ++k) {
        if (g.prefix[k + 1] >= p - 1e-15) return g.radius[k];
    }
    return g.radius.back();
}

void RadialityReport::validate() const {
    if (shells.empty() || worst_shell < 0 ||
        worst_shell >= static_cast<int>(shells.size())) {
        throw std::logic_error("radiality report: missing worst shell");
    }
    if (!(epsilon_star >= 0.0)) {
        throw std::logic_error("radiality report: negative epsilon_star");
    }
    const ShellRow& w = shells[static_cast<std::size_t>(worst_shell)];
    if (std::abs(std::min(w.mass, w.w1) - epsilon_star) > 1e-12) {
        throw std::logic_error(
            "radiality report: worst shell does not realize epsilon_star");
    }
    for (const ShellRow& row : shells) {
        row.interval.validate();
        if (!(row.mass > 0.0) || row.mass > 1.0 + kMassTol || row.w1 < 0.0 ||
            row.spread < 0.0) {
            throw std::logic_error("radiality report: malformed shell row");
        }
        // epsilon_star is an infimum and may fail at mass == epsilon_star
        // exactly (a Dirac cloud), hence the strict comparison.
        if (row.mass > epsilon_star + 1e-12 &&
            row.w1 > epsilon_star + row.spread + 1e-9) {
            throw std::logic_error(
                "radiality report: shell above epsilon_star moves too far");
        }
    }
}

namespace {

json shell_to_json(const ShellRow& row) {
    return json{{"lo", row.interval.lo},
                {"hi", row.interval.hi},
                {"mass", row.mass},
                {"w1", row.w1},
                {"spread", row.spread}};
}

ShellRow shell_from_json(const json& j) {
    ShellRow row;
    row.interval.lo = j.at("lo").get<double>();
    row.interval.hi = j.at("hi").get<double>();
    row.mass = j.at("mass").get<double>();
    row.w1 = j.at("w1").get<double>();
    row.spread = j.at("spread").get<double>();
    return row;
}

} // namespace

std::string report_to_json(const RadialityReport& report) {
    json shells = json::array();
    for (const ShellRow& row : report.shells) shells.push_back(shell_to_json(row));
    const json j{{"epsilon_star", report.epsilon_star},
                 {"shells", std::move(shells)},
                 {"worst_shell", report.worst_shell},
                 {"proper", report.proper},
                 {"params", json{{"ref_size", report.ref_size},
                                 {"repeats", report.repeats},
                                 {"seed", report.seed},
                                 {"grid_step", report.grid_step},
                                 {"intervals", report.interval_convention}}}};
    return j.dump(2);
}

RadialityReport report_from_json(const std::string& text) {
    const json j = json::parse(text);
    RadialityReport report;
    report.epsilon_star = j.at("epsilon_star").get<double>();
    for (const json& s : j.at("shells")) {
        report.shells.push_back(shell_from_json(s));
    }
    report.worst_shell = j.at("worst_shell").get<int>();
    report.proper = j.at("proper").get<bool>();
    const json& p = j.at("params");
    report.ref_size = p.at("ref_size").get<int>();
    report.repeats = p.at("repeats").get<int>();
    report.seed = p.at("seed").get<std::uint64_t>();
    report.grid_step = p.at("grid_step").get<double>();
    report.interval_convention = p.at("intervals").get<std::string>();
    return report;
}

TailReport supergaussian_check(const PointCloud& cloud,
                               const Eigen::VectorXd& direction,
                               const TailParams& params) {
    cloud.validate();
    if (direction.size() != cloud.dim()) {
        throw std::invalid_argument("supergaussian_check: dimension mismatch");
    }
    if (direction.norm() < 1e-12) {
        throw std::invalid_argument("supergaussian_check: zero direction");
    }
    if (!(params.c > 0.0) || !(params.C > 0.0) || !(params.R > 0.0) ||
        !(params.t_step > 0.0)) {
        throw std::invalid_argument("supergaussian_check: bad parameters");
    }
    const int N = static_cast<int>(cloud.size());
    std::vector<double> phi(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        phi[static_cast<std::size_t>(i)] =
            cloud.points.row(i).dot(direction.transpose());
    }

    // Positive median of |phi|: the feasible interval is
    //   [ smallest m with mass{|phi| <= m} >= 1/2 ,
    //     largest  m with mass{|phi| >= m} >= 1/2 ]
    // and the midpoint is used. No positive median exists when more than
    // half the mass sits at phi = 0.
    std::vector<std::pair<double, double>> abs_phi;
    abs_phi.reserve(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        abs_phi.push_back(
            {std::abs(phi[static_cast<std::size_t>(i)]), cloud.weights[i]});
    }
    std::sort(abs_phi.begin(), abs_phi.end());
    double m_lo = -1.0, m_hi = -1.0;
    {
        double cum = 0.0;
        for (const auto& [v, w] : abs_phi) {
            cum += w;
            if (cum >= 0.5 - 1e-15) {
                m_lo = v;
                break;
            }
        }
        double tail = 0.0;
        for (std::size_t k = abs_phi.size(); k-- > 0;) {
            tail += abs_phi[k].second;
            if (tail >= 0.5 - 1e-15) {
                m_hi = abs_phi[k].first;
                break;
            }
        }
    }
    if (!(m_hi > 0.0)) {
        throw std::domain_error(
            "supergaussian_check: no positive median (more than half the "
            "mass has zero component along the direction)");
    }
    const double median = 0.5 * (m_lo + m_hi);

    TailReport report;
    report.median = median;
    report.params = params;

    std::vector<double> sorted_phi = phi;
    std::sort(sorted_phi.begin(), sorted_phi.end());
    std::vector<std::size_t> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return phi[a] < phi[b];
    });
    std::vector<double> cum_weight(static_cast<std::size_t>(N) + 1, 0.0);
    for (std::size_t k = 0; k < order.size(); ++k) {
        cum_weight[k + 1] = cum_weight[k] + cloud.weights[
            static_cast<Eigen::Index>(order[k])];
    }
    const double total = cum_weight.back();
    auto mass_at_least = [&](double threshold) {
        // mass{phi >= threshold}
        std::size_t lo = 0, hi = order.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (phi[order[mid]] < threshold) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        return total - cum_weight[lo];
    };
    auto mass_at_most = [&](double threshold) {
        // mass{phi <= threshold}
        std::size_t lo = 0, hi = order.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (phi[order[mid]] <= threshold) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        return cum_weight[lo];
    };

    report.pass = true;
    for (int k = 0;; ++k) {
        const double t = k * params.t_step;
        if (t > params.R + 1e-12) break;
        TailRow row;
        row.t = t;
        row.threshold = params.c * std::exp(-params.C * t * t);
        row.mass_pos = mass_at_least(t * median);
        row.mass_neg = mass_at_most(-t * median);
        report.rows.push_back(row);
        if ((row.mass_pos < row.threshold || row.mass_neg < row.threshold) &&
            report.pass) {
            report.pass = false;
            report.witness = k;
        }
    }
    return report;
}

std::string tail_report_to_json(const TailReport& report) {
    json rows = json::array();
    for (const TailRow& r : report.rows) {
        rows.push_back(json{{"t", r.t},
                            {"mass_pos", r.mass_pos},
                            {"mass_neg", r.mass_neg},
                            {"threshold", r.threshold}});
    }
    const json j{{"pass", report.pass},
                 {"median", report.median},
                 {"witness", report.witness},
                 {"params", json{{"c", report.params.c},
                                 {"C", report.params.C},
                                 {"R", report.params.R},
                                 {"t_step", report.params.t_step}}},
                 {"rows", std::move(rows)}};
    return j.dump(2);
}

} // namespace radial

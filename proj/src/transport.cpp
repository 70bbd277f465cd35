#include "radial/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numeric>

#include "radial/detail/network_simplex.hpp"
#include "radial/rng.hpp"

namespace radial {

namespace {

double geodesic_raw(const double* x, const double* y, Eigen::Index dim) {
    double dot = 0.0;
    for (Eigen::Index c = 0; c < dim; ++c) dot += x[c] * y[c];
    if (dot >= 1.0 - 1e-12) {
        if (std::memcmp(x, y, sizeof(double) * static_cast<std::size_t>(dim)) ==
            0) {
            return 0.0;
        }
        if (dot > 1.0) dot = 1.0;
    } else if (dot < -1.0) {
        dot = -1.0;
    }
    return std::acos(dot);
}

// Orders atoms so that nearby indices are geometrically close; the
// northwest-corner starting basis of the solver is then near-optimal.
std::vector<int> locality_order(const PointMatrix& pts) {
    const int n = static_cast<int>(pts.rows());
    const Eigen::Index d = pts.cols();
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    if (d == 1) {
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return pts(a, 0) < pts(b, 0); });
        return idx;
    }
    if (d == 2) {
        std::vector<double> key(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            key[static_cast<std::size_t>(i)] = std::atan2(pts(i, 1), pts(i, 0));
        }
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return key[static_cast<std::size_t>(a)] <
                   key[static_cast<std::size_t>(b)];
        });
        return idx;
    }
    // Latitude bands, serpentine in azimuth within each band. Higher
    // dimensions just reuse the first three coordinates; the ordering only
    // affects speed, never the optimum.
    const int bands =
        std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n) / 2.0)));
    std::vector<std::pair<double, double>> key(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double z = std::clamp(pts(i, d - 1), -1.0, 1.0);
        int band = static_cast<int>((z + 1.0) / 2.0 * bands);
        band = std::clamp(band, 0, bands - 1);
        double az = std::atan2(pts(i, 1), pts(i, 0));
        if (band % 2 == 1) az = -az;
        key[static_cast<std::size_t>(i)] = {static_cast<double>(band), az};
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return key[static_cast<std::size_t>(a)] <
               key[static_cast<std::size_t>(b)];
    });
    return idx;
}

// Collects, for every atom on each side, the k atoms on the other side at the
// smallest geodesic distance, as arc ids i * n + j in the permuted indexing.
// Geodesic distance is monotone in the inner product, so the selection runs
// on blocks of the Gram matrix (one dense multiply per block, no acos).
std::vector<std::int64_t> neighbor_shortlist(const Eigen::MatrixXd& src,
                                             const Eigen::MatrixXd& dst,
                                             int k) {
    const int m = static_cast<int>(src.rows());
    const int n = static_cast<int>(dst.rows());
    std::vector<std::int64_t> arcs;
    arcs.reserve(2 * static_cast<std::size_t>(m + n) *
                 static_cast<std::size_t>(k));
    std::vector<int> order;
    const auto harvest = [&](const Eigen::MatrixXd& G, int row0,
                             bool rows_are_sources) {
        const int kk = std::min(static_cast<int>(G.cols()), k);
        for (Eigen::Index r = 0; r < G.rows(); ++r) {
            order.resize(static_cast<std::size_t>(G.cols()));
            std::iota(order.begin(), order.end(), 0);
            std::nth_element(order.begin(), order.begin() + (kk - 1),
                             order.end(),
                             [&](int x, int y) { return G(r, x) > G(r, y); });
            for (int t = 0; t < kk; ++t) {
                const int c = order[static_cast<std::size_t>(t)];
                arcs.push_back(rows_are_sources
                                   ? static_cast<std::int64_t>(row0 + r) * n + c
                                   : static_cast<std::int64_t>(c) * n +
                                         (row0 + static_cast<int>(r)));
            }
        }
    };
    constexpr int kBlock = 512;
    for (int r0 = 0; r0 < m; r0 += kBlock) {
        const int rc = std::min(kBlock, m - r0);
        const Eigen::MatrixXd G = src.middleRows(r0, rc) * dst.transpose();
        harvest(G, r0, true);
    }
    for (int r0 = 0; r0 < n; r0 += kBlock) {
        const int rc = std::min(kBlock, n - r0);
        const Eigen::MatrixXd G = dst.middleRows(r0, rc) * src.transpose();
        harvest(G, r0, false);
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    return arcs;
}

} // namespace

double geodesic_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size() || x.size() == 0) {
        throw std::invalid_argument("geodesic_distance: dimension mismatch");
    }
    return geodesic_raw(x.data(), y.data(), x.size());
}

TransportPlan w1_exact(const SphericalMeasure& a, const SphericalMeasure& b,
                       int size_cap) {
    a.validate();
    b.validate();
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("w1_exact: dimension mismatch");
    }
    const int m = static_cast<int>(a.size());
    const int n = static_cast<int>(b.size());
    if (m + n > size_cap) {
        throw std::invalid_argument(
            "w1_exact: combined atom count " + std::to_string(m + n) +
            " exceeds cap " + std::to_string(size_cap));
    }

    const std::vector<int> sp = locality_order(a.cloud.points);
    const std::vector<int> tp = locality_order(b.cloud.points);
    std::vector<double> supply(static_cast<std::size_t>(m));
    std::vector<double> demand(static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i) {
        supply[static_cast<std::size_t>(i)] =
            a.cloud.weights[sp[static_cast<std::size_t>(i)]];
    }
    for (int j = 0; j < n; ++j) {
        demand[static_cast<std::size_t>(j)] =
            b.cloud.weights[tp[static_cast<std::size_t>(j)]];
    }

    const double* pa = a.cloud.points.data();
    const double* pb = b.cloud.points.data();
    const Eigen::Index dim = a.dim();
    auto cost = [&](int i, int j) {
        return geodesic_raw(pa + static_cast<Eigen::Index>(
                                     sp[static_cast<std::size_t>(i)]) *
                                     dim,
                            pb + static_cast<Eigen::Index>(
                                     tp[static_cast<std::size_t>(j)]) *
                                     dim,
                            dim);
    };
    // Beyond ~50k arcs, seed pricing with nearest-neighbor arcs from both
    // sides; the solver still certifies against the full arc set.
    std::vector<std::int64_t> shortlist;
    const std::vector<std::int64_t>* sl = nullptr;
    if (static_cast<std::int64_t>(m) * n > 50000) {
        Eigen::MatrixXd src(m, dim);
        Eigen::MatrixXd dst(n, dim);
        for (int i = 0; i < m; ++i) {
            src.row(i) = a.cloud.points.row(sp[static_cast<std::size_t>(i)]);
        }
        for (int j = 0; j < n; ++j) {
            dst.row(j) = b.cloud.points.row(tp[static_cast<std::size_t>(j)]);
        }
        shortlist = neighbor_shortlist(src, dst, 16);
        sl = &shortlist;
    }
    detail::SimplexSolution sol =
        detail::solve_transport(std::move(supply), std::move(demand), cost, sl);

    TransportPlan plan;
    plan.cost = sol.cost;
    plan.min_reduced_cost = sol.min_reduced_cost;
    plan.duality_gap = sol.duality_gap;
    plan.source_potential.assign(static_cast<std::size_t>(m), 0.0);
    plan.target_potential.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < m; ++i) {
        plan.source_potential[static_cast<std::size_t>(
            sp[static_cast<std::size_t>(i)])] =
            sol.source_potential[static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < n; ++j) {
        plan.target_potential[static_cast<std::size_t>(
            tp[static_cast<std::size_t>(j)])] =
            sol.sink_potential[static_cast<std::size_t>(j)];
    }
    plan.entries.reserve(sol.flows.size());
    for (const detail::FlowEntry& f : sol.flows) {
        plan.entries.push_back({sp[static_cast<std::size_t>(f.source)],
                                tp[static_cast<std::size_t>(f.sink)], f.mass});
    }
    std::sort(plan.entries.begin(), plan.entries.end(),
              [](const PlanEntry& x, const PlanEntry& y) {
                  return x.source != y.source ? x.source < y.source
                                              : x.target < y.target;
              });
    return plan;
}

double w1_value(const SphericalMeasure& a, const SphericalMeasure& b) {
    a.validate();
    b.validate();
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("w1_value: dimension mismatch");
    }
    if (a.dim() == 1) {
        // S^0 carries the two-point metric of diameter pi.
        const double pi = 3.14159265358979323846264338328;
        return pi * total_variation(a.cloud, b.cloud);
    }
    if (a.dim() == 2) return circle_w1(a, b);
    return w1_exact(a, b).cost;
}

UniformReference uniform_reference(int dim, int size, std::uint64_t seed) {
    if (dim < 1 || size < 1) {
        throw std::invalid_argument("uniform_reference: need dim, size >= 1");
    }
    UniformReference out;
    out.dim = dim;
    out.size = size;
    out.seed = seed;
    out.measure.cloud.points.resize(size, dim);
    out.measure.cloud.weights =
        Eigen::VectorXd::Constant(size, 1.0 / static_cast<double>(size));
    Rng rng(derive_seed(seed, 0x5eedULL));
    for (int i = 0; i < size; ++i) {
        double norm2 = 0.0;
        do {
            for (int c = 0; c < dim; ++c) {
                const double g = rng.gaussian();
                out.measure.cloud.points(i, c) = g;
                norm2 += g * g;
            }
        } while (norm2 < 1e-24);
        out.measure.cloud.points.row(i) /= std::sqrt(norm2);
    }
    return out;
}

W1Estimate w1_to_uniform(const SphericalMeasure& a, const RefParams& params) {
    a.validate();
    if (params.repeats < 1) {
        throw std::invalid_argument("w1_to_uniform: repeats must be >= 1");
    }
    const int atoms = static_cast<int>(a.size());
    int M = params.ref_size > 0 ? params.ref_size
                                : std::max(2000, 10 * atoms);
    if (a.dim() >= 3 && atoms + M > params.lp_cap) {
        M = params.lp_cap - atoms;
        if (M < 50) {
            throw std::invalid_argument(
                "w1_to_uniform: cloud too large for an exact reference "
                "comparison under the size cap");
        }
    }
    W1Estimate est;
    est.lo = std::numeric_limits<double>::infinity();
    est.hi = -est.lo;
    double sum = 0.0;
    for (int r = 0; r < params.repeats; ++r) {
        const UniformReference ref = uniform_reference(
            static_cast<int>(a.dim()), M,
            derive_seed(params.seed, static_cast<std::uint64_t>(r)));
        const double v = w1_value(a, ref.measure);
        sum += v;
        est.lo = std::min(est.lo, v);
        est.hi = std::max(est.hi, v);
    }
    est.estimate = sum / params.repeats;
    return est;
}

LipschitzWitness coordinate_witness(int k) {
    if (k < 0) throw std::invalid_argument("coordinate_witness: index < 0");
    return [k](const Eigen::VectorXd& x) {
        if (k >= x.size()) {
            throw std::invalid_argument("coordinate_witness: index out of range");
        }
        return x[k];
    };
}

LipschitzWitness distance_witness(const Eigen::VectorXd& point) {
    Eigen::VectorXd p = point;
    const double r = p.norm();
    if (r < 1e-12) {
        throw std::invalid_argument("distance_witness: zero base point");
    }
    p /= r;
    return [p](const Eigen::VectorXd& x) { return geodesic_distance(x, p); };
}

DualBound kr_dual_lower_bound(const SphericalMeasure& a,
                              const SphericalMeasure& b,
                              const std::vector<LipschitzWitness>& witnesses) {
    a.validate();
    b.validate();
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("kr_dual_lower_bound: dimension mismatch");
    }
    if (witnesses.empty()) {
        throw std::invalid_argument("kr_dual_lower_bound: no witnesses");
    }
    DualBound out;
    out.value = -std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < witnesses.size(); ++w) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            acc += witnesses[w](a.cloud.points.row(i).transpose()) *
                   a.cloud.weights[i];
        }
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            acc -= witnesses[w](b.cloud.points.row(j).transpose()) *
                   b.cloud.weights[j];
        }
        if (acc > out.value) {
            out.value = acc;
            out.best_witness = static_cast<int>(w);
        }
    }
    return out;
}

double support_lower_bound(const SphericalMeasure& a,
                           const SphericalMeasure& reference) {
    a.validate();
    reference.validate();
    if (a.dim() != reference.dim()) {
        throw std::invalid_argument("support_lower_bound: dimension mismatch");
    }
    const Eigen::Index dim = a.dim();
    const double* pa = a.cloud.points.data();
    const double* pr = reference.cloud.points.data();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < reference.size(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            best = std::min(best, geodesic_raw(pr + j * dim, pa + i * dim, dim));
        }
        acc += best * reference.cloud.weights[j];
    }
    return acc;
}

} // namespace radial

#include "radial/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace radial {

void PointCloud::validate() const {
    if (points.rows() != weights.size()) {
        throw std::invalid_argument("point cloud: " +
                                    std::to_string(points.rows()) +
                                    " atoms but " +
                                    std::to_string(weights.size()) + " weights");
    }
    if (points.rows() == 0) {
        throw std::invalid_argument("point cloud: no atoms");
    }
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
            throw std::invalid_argument("point cloud: weight " +
                                        std::to_string(i) +
                                        " is not strictly positive");
        }
    }
    if (!points.allFinite()) {
        throw std::invalid_argument("point cloud: non-finite coordinate");
    }
    const double mass = weights.sum();
    if (std::abs(mass - 1.0) > kMassTol) {
        throw std::invalid_argument("point cloud: weights sum to " +
                                    std::to_string(mass) + ", expected 1");
    }
}

void SphericalMeasure::validate() const {
    cloud.validate();
    for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        const double r = cloud.points.row(i).norm();
        if (std::abs(r - 1.0) > kMassTol) {
            throw std::invalid_argument(
                "spherical measure: atom " + std::to_string(i) +
                " has radius " + std::to_string(r));
        }
    }
}

void RadialInterval::validate() const {
    if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("radial interval: need 0 <= lo <= hi");
    }
}

PointCloud pushforward(const PointCloud& cloud, const Eigen::MatrixXd& map) {
    cloud.validate();
    if (map.cols() != cloud.dim()) {
        throw std::invalid_argument(
            "pushforward: map has " + std::to_string(map.cols()) +
            " columns, cloud dimension is " + std::to_string(cloud.dim()));
    }
    PointCloud out;
    out.points = cloud.points * map.transpose();
    out.weights = cloud.weights;
    return out;
}

SphericalMeasure radial_project(const PointCloud& cloud) {
    cloud.validate();
    SphericalMeasure out;
    out.cloud.points.resize(cloud.size(), cloud.dim());
    out.cloud.weights = cloud.weights;
    for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        const double r = cloud.points.row(i).norm();
        if (r <= kOriginTol) {
            throw std::domain_error(
                "radial projection: atom " + std::to_string(i) +
                " lies at the origin (improper measure)");
        }
        out.cloud.points.row(i) = cloud.points.row(i) / r;
    }
    return out;
}

ConditionedShell condition_on_shell(const PointCloud& cloud,
                                    const RadialInterval& shell) {
    cloud.validate();
    shell.validate();
    std::vector<Eigen::Index> keep;
    double mass = 0.0;
    for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        if (shell.contains(cloud.points.row(i).norm())) {
            keep.push_back(i);
            mass += cloud.weights[i];
        }
    }
    if (keep.empty() || mass <= 0.0) {
        throw std::domain_error("condition_on_shell: shell [" +
                                std::to_string(shell.lo) + ", " +
                                std::to_string(shell.hi) +
                                "] carries no mass");
    }
    ConditionedShell out;
    out.mass = mass;
    out.part.points.resize(static_cast<Eigen::Index>(keep.size()), cloud.dim());
    out.part.weights.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        out.part.points.row(static_cast<Eigen::Index>(k)) =
            cloud.points.row(keep[k]);
        out.part.weights[static_cast<Eigen::Index>(k)] =
            cloud.weights[keep[k]] / mass;
    }
    return out;
}

namespace {

// Lexicographic order on atom coordinates; exact comparisons on purpose.
bool lex_less(const PointMatrix& pts, Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < pts.cols(); ++c) {
        if (pts(a, c) < pts(b, c)) return true;
        if (pts(a, c) > pts(b, c)) return false;
    }
    return false;
}

bool rows_equal(const PointMatrix& pa, Eigen::Index a,
                const PointMatrix& pb, Eigen::Index b) {
    for (Eigen::Index c = 0; c < pa.cols(); ++c) {
        if (pa(a, c) != pb(b, c)) return false;
    }
    return true;
}

bool lex_less2(const PointMatrix& pa, Eigen::Index a,
               const PointMatrix& pb, Eigen::Index b) {
    for (Eigen::Index c = 0; c < pa.cols(); ++c) {
        if (pa(a, c) < pb(b, c)) return true;
        if (pa(a, c) > pb(b, c)) return false;
    }
    return false;
}

std::vector<Eigen::Index> sorted_order(const PointMatrix& pts) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(pts.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        return lex_less(pts, a, b);
    });
    return idx;
}

} // namespace

double total_variation(const PointCloud& a, const PointCloud& b) {
    a.validate();
    b.validate();
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("total_variation: dimension mismatch");
    }
    const auto ia = sorted_order(a.points);
    const auto ib = sorted_order(b.points);
    double acc = 0.0;
    std::size_t p = 0, q = 0;
    while (p < ia.size() || q < ib.size()) {
        // Merge runs of equal atoms on each side before comparing.
        if (p < ia.size() &&
            (q == ib.size() || lex_less2(a.points, ia[p], b.points, ib[q]))) {
            double w = 0.0;
            const Eigen::Index r = ia[p];
            while (p < ia.size() && rows_equal(a.points, ia[p], a.points, r)) {
                w += a.weights[ia[p]];
                ++p;
            }
            acc += w;
        } else if (q < ib.size() &&
                   (p == ia.size() ||
                    lex_less2(b.points, ib[q], a.points, ia[p]))) {
            double w = 0.0;
            const Eigen::Index r = ib[q];
            while (q < ib.size() && rows_equal(b.points, ib[q], b.points, r)) {
                w += b.weights[ib[q]];
                ++q;
            }
            acc += w;
        } else {
            double wa = 0.0, wb = 0.0;
            const Eigen::Index r = ia[p];
            while (p < ia.size() && rows_equal(a.points, ia[p], a.points, r)) {
                wa += a.weights[ia[p]];
                ++p;
            }
            while (q < ib.size() && rows_equal(b.points, ib[q], a.points, r)) {
                wb += b.weights[ib[q]];
                ++q;
            }
            acc += std::abs(wa - wb);
        }
    }
    return 0.5 * acc;
}

PointCloud mixture(const std::vector<std::pair<double, PointCloud>>& parts) {
    if (parts.empty()) {
        throw std::invalid_argument("mixture: no components");
    }
    double lam_sum = 0.0;
    Eigen::Index dim = parts.front().second.dim();
    Eigen::Index total = 0;
    for (const auto& [lam, part] : parts) {
        part.validate();
        if (lam < 0.0 || !std::isfinite(lam)) {
            throw std::invalid_argument("mixture: negative component weight");
        }
        if (part.dim() != dim) {
            throw std::invalid_argument("mixture: dimension mismatch");
        }
        lam_sum += lam;
        total += part.size();
    }
    if (std::abs(lam_sum - 1.0) > kMassTol) {
        throw std::invalid_argument("mixture: component weights sum to " +
                                    std::to_string(lam_sum));
    }
    PointCloud out;
    out.points.resize(total, dim);
    out.weights.resize(total);
    Eigen::Index at = 0;
    for (const auto& [lam, part] : parts) {
        // Zero-weight components contribute nothing; skipping them keeps all
        // weights strictly positive.
        if (lam == 0.0) continue;
        for (Eigen::Index i = 0; i < part.size(); ++i) {
            out.points.row(at) = part.points.row(i);
            out.weights[at] = lam * part.weights[i];
            ++at;
        }
    }
    out.points.conservativeResize(at, dim);
    out.weights.conservativeResize(at);
    if (at == 0) {
        throw std::invalid_argument("mixture: all components have weight 0");
    }
    return out;
}

PointCloud canonicalize(const PointCloud& cloud) {
    cloud.validate();
    const auto idx = sorted_order(cloud.points);
    PointCloud out;
    out.points.resize(cloud.size(), cloud.dim());
    out.weights.resize(cloud.size());
    Eigen::Index at = -1;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (at >= 0 && rows_equal(cloud.points, idx[k], out.points, at)) {
            out.weights[at] += cloud.weights[idx[k]];
        } else {
            ++at;
            out.points.row(at) = cloud.points.row(idx[k]);
            out.weights[at] = cloud.weights[idx[k]];
        }
    }
    out.points.conservativeResize(at + 1, cloud.dim());
    out.weights.conservativeResize(at + 1);
    return out;
}

bool is_proper(const PointCloud& cloud) {
    for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        if (cloud.points.row(i).norm() <= kOriginTol) return false;
    }
    return true;
}

} // namespace radial

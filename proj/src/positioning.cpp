#include "radial/positioning.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <json.hpp>

namespace radial {

namespace {

// Orthonormalize the columns; throws if they are dependent.
Eigen::MatrixXd orthonormalized(const Eigen::MatrixXd& basis) {
    if (basis.cols() < 1 || basis.rows() < basis.cols()) {
        throw std::invalid_argument("subspace basis must be n x k with k <= n");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
    if (qr.rank() < basis.cols()) {
        throw std::invalid_argument("subspace basis columns are dependent");
    }
    Eigen::MatrixXd q = qr.householderQ();
    return q.leftCols(basis.cols());
}

// Distinct projective directions of the support, one representative each.
// Representatives are unit vectors with the first nonzero coordinate made
// positive; grouping tolerance 1e-9.
struct DirectionGroups {
    PointMatrix reps;          // one row per group
    std::vector<double> mass;  // group mass
};

DirectionGroups direction_groups(const PointCloud& cloud) {
    const Eigen::Index N = cloud.size();
    const Eigen::Index n = cloud.dim();
    PointMatrix dirs(N, n);
    for (Eigen::Index i = 0; i < N; ++i) {
        const double r = cloud.points.row(i).norm();
        if (r <= kOriginTol) {
            throw std::domain_error("direction_groups: atom at the origin");
        }
        Eigen::RowVectorXd u = cloud.points.row(i) / r;
        for (Eigen::Index c = 0; c < n; ++c) {
            if (std::abs(u[c]) > 1e-12) {
                if (u[c] < 0) u = -u;
                break;
            }
        }
        dirs.row(i) = u;
    }
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(N));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index c = 0; c < n; ++c) {
            if (dirs(a, c) < dirs(b, c)) return true;
            if (dirs(a, c) > dirs(b, c)) return false;
        }
        return false;
    });
    DirectionGroups out;
    std::vector<Eigen::Index> rep_rows;
    std::vector<double> masses;
    for (const Eigen::Index i : idx) {
        if (!rep_rows.empty() &&
            (dirs.row(rep_rows.back()) - dirs.row(i)).norm() <= 1e-9) {
            masses.back() += cloud.weights[i];
        } else {
            rep_rows.push_back(i);
            masses.push_back(cloud.weights[i]);
        }
    }
    out.reps.resize(static_cast<Eigen::Index>(rep_rows.size()), n);
    for (std::size_t k = 0; k < rep_rows.size(); ++k) {
        out.reps.row(static_cast<Eigen::Index>(k)) = dirs.row(rep_rows[k]);
    }
    out.mass = std::move(masses);
    return out;
}

// Enumerates k-subsets of [0, count) in lexicographic order, calling fn for
// each until fn returns false or the budget runs out. Returns whether the
// enumeration was not cut short by the budget.
bool for_each_subset(int count, int k, long& budget,
                     const std::function<bool(const std::vector<int>&)>& fn) {
    if (k > count || k < 1) return true;
    std::vector<int> pick(static_cast<std::size_t>(k));
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        if (budget-- <= 0) return false;
        if (!fn(pick)) return true;
        int i = k - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == count - k + i) --i;
        if (i < 0) return true;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) {
            pick[static_cast<std::size_t>(j)] =
                pick[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
}

Eigen::MatrixXd columns_from(const PointMatrix& reps,
                             const std::vector<int>& rows) {
    Eigen::MatrixXd basis(reps.cols(), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t c = 0; c < rows.size(); ++c) {
        basis.col(static_cast<Eigen::Index>(c)) = reps.row(rows[c]).transpose();
    }
    return basis;
}

} // namespace

Eigen::MatrixXd second_moment(const PointCloud& cloud) {
    cloud.validate();
    PointMatrix scaled = cloud.points;
    for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        scaled.row(i) *= std::sqrt(cloud.weights[i]);
    }
    Eigen::MatrixXd m = scaled.transpose() * scaled;
    // Symmetrize away the last bits of rounding.
    return 0.5 * (m + m.transpose());
}

double subspace_mass(const PointCloud& cloud, const Eigen::MatrixXd& basis) {
    cloud.validate();
    if (basis.rows() != cloud.dim()) {
        throw std::invalid_argument("subspace_mass: basis rows != cloud dim");
    }
    const Eigen::MatrixXd q = orthonormalized(basis);
    double mass = 0.0;
    for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        const Eigen::VectorXd x = cloud.points.row(i).transpose();
        const double res = (x - q * (q.transpose() * x)).norm();
        if (res <= 1e-9 * std::max(x.norm(), 1e-300)) mass += cloud.weights[i];
    }
    return mass;
}

void DecencyReport::validate() const {
    if (!(alpha > 0.0) || witness_dim < 1) {
        throw std::logic_error("decency report: empty witness");
    }
    if (std::abs(witness_mass / witness_dim - alpha) > 1e-12) {
        throw std::logic_error("decency report: witness does not attain alpha");
    }
}

DecencyReport decency_alpha(const PointCloud& cloud, int max_dim, long budget) {
    cloud.validate();
    if (max_dim < 1) {
        throw std::invalid_argument("decency_alpha: max_dim must be >= 1");
    }
    const int n = static_cast<int>(cloud.dim());
    const DirectionGroups dirs = direction_groups(cloud);
    const int D = static_cast<int>(dirs.reps.rows());

    DecencyReport report;
    report.alpha = 1.0 / n; // the whole space is always a candidate
    report.witness_basis = Eigen::MatrixXd::Identity(n, n);
    report.witness_dim = n;
    report.witness_mass = 1.0;
    report.candidates = 1;

    // Dimension 1: group masses are exactly the line masses.
    for (int gi = 0; gi < D; ++gi) {
        ++report.candidates;
        const double val = dirs.mass[static_cast<std::size_t>(gi)];
        if (val > report.alpha + 1e-15) {
            report.alpha = val;
            report.witness_basis = dirs.reps.row(gi).transpose();
            report.witness_dim = 1;
            report.witness_mass = val;
        }
    }

    bool complete = true;
    const int kmax = std::min({max_dim, D, n});
    for (int k = 2; k <= kmax; ++k) {
        const bool done = for_each_subset(
            D, k, budget, [&](const std::vector<int>& pick) {
                ++report.candidates;
                const Eigen::MatrixXd basis = columns_from(dirs.reps, pick);
                Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
                if (qr.rank() < k) return true; // covered at lower dimension
                const double mass = subspace_mass(cloud, basis);
                const double val = mass / k;
                if (val > report.alpha + 1e-15) {
                    report.alpha = val;
                    report.witness_basis = orthonormalized(basis);
                    report.witness_dim = k;
                    report.witness_mass = mass;
                }
                return true;
            });
        if (!done) {
            complete = false;
            break;
        }
    }
    // Dimension n is always covered by the R^n candidate, and a span of
    // support directions never needs more than min(D, n - 1) of them below
    // that, so the family is complete once kmax reaches min(D, n - 1).
    report.exhaustive = complete && kmax >= std::min(D, n - 1);
    report.validate();
    return report;
}

std::string decency_to_json(const DecencyReport& report) {
    nlohmann::json basis = nlohmann::json::array();
    for (Eigen::Index c = 0; c < report.witness_basis.cols(); ++c) {
        nlohmann::json col = nlohmann::json::array();
        for (Eigen::Index r = 0; r < report.witness_basis.rows(); ++r) {
            col.push_back(report.witness_basis(r, c));
        }
        basis.push_back(std::move(col));
    }
    const nlohmann::json j{{"alpha", report.alpha},
                           {"witness_dim", report.witness_dim},
                           {"witness_mass", report.witness_mass},
                           {"witness_basis", std::move(basis)},
                           {"exhaustive", report.exhaustive},
                           {"candidates", report.candidates}};
    return j.dump(2);
}

std::vector<Eigen::MatrixXd> basic_subspaces(const PointCloud& cloud, double a,
                                             int max_dim) {
    cloud.validate();
    if (!(a > 0.0) || a > 1.0) {
        throw std::invalid_argument("basic_subspaces: need a in (0, 1]");
    }
    const int n = static_cast<int>(cloud.dim());
    const DirectionGroups dirs = direction_groups(cloud);
    const int D = static_cast<int>(dirs.reps.rows());

    // Candidate spans of up to max_dim distinct directions, plus R^n. The
    // same family backs the proper-subspace scan below, so the result is
    // self-consistent under truncation.
    std::vector<Eigen::MatrixXd> candidates;
    long budget = 2000000;
    for (int k = 1; k <= std::min({max_dim, D, n}); ++k) {
        const bool done = for_each_subset(
            D, k, budget, [&](const std::vector<int>& pick) {
                const Eigen::MatrixXd basis = columns_from(dirs.reps, pick);
                Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
                if (qr.rank() == k) candidates.push_back(basis);
                return true;
            });
        if (!done) {
            throw std::invalid_argument(
                "basic_subspaces: candidate budget exceeded; reduce max_dim");
        }
    }
    candidates.push_back(Eigen::MatrixXd::Identity(n, n));

    // A subspace of maximal mass strictly inside E is spanned by the support
    // directions it contains, so spans of independent subsets of those
    // directions cover every proper-subspace mass the family can see.
    std::vector<Eigen::MatrixXd> result;
    for (const Eigen::MatrixXd& basis : candidates) {
        const int dim = static_cast<int>(basis.cols());
        const double mass = subspace_mass(cloud, basis);
        if (mass < a) continue;
        const Eigen::MatrixXd q = orthonormalized(basis);

        std::vector<int> inside;
        for (int gi = 0; gi < D; ++gi) {
            const Eigen::VectorXd u = dirs.reps.row(gi).transpose();
            if ((u - q * (q.transpose() * u)).norm() <= 1e-9) {
                inside.push_back(gi);
            }
        }
        bool basic = true;
        for (int k = 1; k <= std::min(dim - 1, max_dim) && basic; ++k) {
            long sub_budget = 2000000;
            const bool done = for_each_subset(
                static_cast<int>(inside.size()), k, sub_budget,
                [&](const std::vector<int>& pick) {
                    std::vector<int> rows;
                    rows.reserve(pick.size());
                    for (const int p : pick) {
                        rows.push_back(inside[static_cast<std::size_t>(p)]);
                    }
                    const Eigen::MatrixXd sub = columns_from(dirs.reps, rows);
                    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
                    if (static_cast<int>(qr.rank()) < k) return true;
                    if (subspace_mass(cloud, sub) >= a) {
                        basic = false;
                        return false;
                    }
                    return true;
                });
            if (!done) {
                throw std::invalid_argument(
                    "basic_subspaces: proper-subspace scan budget exceeded");
            }
        }
        if (!basic) continue;

        // Deduplicate by projector.
        const Eigen::MatrixXd proj = q * q.transpose();
        bool dup = false;
        for (const Eigen::MatrixXd& other : result) {
            if (other.cols() == q.cols() &&
                (other * other.transpose() - proj).norm() <= 1e-9) {
                dup = true;
                break;
            }
        }
        if (!dup) result.push_back(q);
    }
    return result;
}

PositionResult isotropic_position(const PointCloud& cloud, double tol,
                                  int max_iter) {
    cloud.validate();
    if (!(tol > 0.0) || max_iter < 1) {
        throw std::invalid_argument("isotropic_position: bad tol/max_iter");
    }
    if (!is_proper(cloud)) {
        throw std::domain_error("isotropic_position: atom at the origin");
    }
    const int n = static_cast<int>(cloud.dim());
    if (n == 1) {
        // On the line the radial projection lands on {-1, +1} and the moment
        // is always one; any scalar map works.
        PositionResult res;
        res.map = Eigen::MatrixXd::Identity(1, 1);
        res.residual = 0.0;
        res.converged = true;
        return res;
    }

    // Detects mass concentration that makes the Id/n target unreachable:
    // mass >= 1/2 on a subspace of dimension < n/2, or essentially full mass
    // on any proper subspace. Candidate subspaces come from the top
    // eigenvectors of the current moment matrix, pulled back through T to
    // the original coordinates.
    auto detect_concentration = [&](const Eigen::MatrixXd& T,
                                    const Eigen::MatrixXd& eigvecs) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> inv(T);
        for (int k = 1; k <= n - 1; ++k) {
            Eigen::MatrixXd top(n, k);
            for (int c = 0; c < k; ++c) top.col(c) = eigvecs.col(n - 1 - c);
            Eigen::MatrixXd pre(n, k);
            for (int c = 0; c < k; ++c) pre.col(c) = inv.solve(top.col(c));
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(pre);
            if (qr.rank() < k) continue;
            const double mass = subspace_mass(cloud, pre);
            const bool full = mass >= 1.0 - 1e-12;
            if ((mass >= 0.5 && 2 * k < n) || full) {
                throw SubspaceConcentration(orthonormalized(pre), mass, n);
            }
        }
    };

    PositionResult res;
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(n, n) / std::sqrt(double(n));
    PointMatrix Y = cloud.points; // pushforward image, maintained directly

    auto moment_of = [&](const PointMatrix& pts) {
        PointCloud img;
        img.points = pts;
        img.weights = cloud.weights;
        const SphericalMeasure unit = radial_project(img);
        return Eigen::MatrixXd(double(n) * second_moment(unit.cloud));
    };

    Eigen::MatrixXd M = moment_of(Y);
    int stalls = 0;
    constexpr int kMaxStalls = 10;
    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
        const Eigen::VectorXd& ev = eig.eigenvalues();
        const double residual =
            std::max(std::abs(ev[n - 1] - 1.0), std::abs(ev[0] - 1.0));
        res.trace.push_back(residual);
        res.residual = residual;
        res.iterations = iter;
        if (residual <= tol) {
            res.converged = true;
            break;
        }
        if (ev[0] < 1e-12) detect_concentration(T, eig.eigenvectors());

        // Step T <- normalize(M^{-1/2} T), halving the log-step while the
        // residual refuses to improve; keep the best attempt regardless.
        bool improved = false;
        double exponent = -0.5;
        Eigen::MatrixXd bestT, bestM;
        PointMatrix bestY;
        double best_res = std::numeric_limits<double>::infinity();
        for (int attempt = 0; attempt < 6; ++attempt) {
            Eigen::VectorXd powed(n);
            for (int c = 0; c < n; ++c) {
                powed[c] = std::pow(std::max(ev[c], 1e-14), exponent);
            }
            const Eigen::MatrixXd W = eig.eigenvectors() * powed.asDiagonal() *
                                      eig.eigenvectors().transpose();
            Eigen::MatrixXd Tc = W * T;
            Tc /= Tc.norm();
            PointMatrix Yc = Y * W.transpose();
            if (Yc.rowwise().norm().minCoeff() <= 1e3 * kOriginTol) {
                // The step would push an atom numerically onto the origin,
                // where the radial projection is undefined. Damp further.
                exponent *= 0.5;
                continue;
            }
            const Eigen::MatrixXd Mc = moment_of(Yc);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(Mc);
            const double rc = std::max(std::abs(ec.eigenvalues()[n - 1] - 1.0),
                                       std::abs(ec.eigenvalues()[0] - 1.0));
            if (rc < best_res) {
                best_res = rc;
                bestT = Tc;
                bestM = Mc;
                bestY = Yc;
            }
            if (rc < residual) {
                improved = true;
                break;
            }
            exponent *= 0.5;
        }
        if (!improved) {
            // A stall is either genuine concentration (the scan throws), a
            // plateau worth pushing through briefly, or - after repeated
            // stalls - a fixed point of the damped step, where more
            // iterations only drift the map toward degeneracy.
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ef(
                std::isfinite(best_res) ? bestM : M);
            detect_concentration(std::isfinite(best_res) ? bestT : T,
                                 ef.eigenvectors());
            if (++stalls >= kMaxStalls || !std::isfinite(best_res)) break;
        } else {
            stalls = 0;
        }
        T = bestT;
        M = bestM;
        Y = bestY;
    }
    if (!res.converged) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
        detect_concentration(T, eig.eigenvectors());
    }
    res.map = T;
    return res;
}

StratifiedSplit stratified_split(const PointCloud& cloud,
                                 const Eigen::MatrixXd& basis) {
    cloud.validate();
    if (basis.rows() != cloud.dim()) {
        throw std::invalid_argument("stratified_split: basis rows != cloud dim");
    }
    if (basis.cols() >= cloud.dim()) {
        throw std::invalid_argument("stratified_split: subspace must be proper");
    }
    const Eigen::MatrixXd q = orthonormalized(basis);
    const Eigen::Index N = cloud.size();
    std::vector<Eigen::Index> in, out;
    for (Eigen::Index i = 0; i < N; ++i) {
        const Eigen::VectorXd x = cloud.points.row(i).transpose();
        const double res = (x - q * (q.transpose() * x)).norm();
        if (res <= 1e-9 * std::max(x.norm(), 1e-300)) {
            in.push_back(i);
        } else {
            out.push_back(i);
        }
    }
    if (in.empty()) {
        throw std::domain_error("stratified_split: subspace carries no mass");
    }
    if (out.empty()) {
        throw std::domain_error("stratified_split: subspace carries all mass");
    }
    StratifiedSplit split;
    double lam = 0.0;
    for (const Eigen::Index i : in) lam += cloud.weights[i];
    split.lambda = lam;

    split.on_subspace.points.resize(static_cast<Eigen::Index>(in.size()),
                                    cloud.dim());
    split.on_subspace.weights.resize(static_cast<Eigen::Index>(in.size()));
    for (std::size_t k = 0; k < in.size(); ++k) {
        split.on_subspace.points.row(static_cast<Eigen::Index>(k)) =
            cloud.points.row(in[k]);
        split.on_subspace.weights[static_cast<Eigen::Index>(k)] =
            cloud.weights[in[k]] / lam;
    }
    split.complement.points.resize(static_cast<Eigen::Index>(out.size()),
                                   cloud.dim());
    split.complement.weights.resize(static_cast<Eigen::Index>(out.size()));
    for (std::size_t k = 0; k < out.size(); ++k) {
        const Eigen::VectorXd x = cloud.points.row(out[k]).transpose();
        split.complement.points.row(static_cast<Eigen::Index>(k)) =
            (x - q * (q.transpose() * x)).transpose();
        split.complement.weights[static_cast<Eigen::Index>(k)] =
            cloud.weights[out[k]] / (1.0 - lam);
    }
    return split;
}

namespace {

// Expresses an ambient cloud supported on span(q) in the coordinates of q.
PointCloud restrict_to(const PointCloud& cloud, const Eigen::MatrixXd& q) {
    PointCloud out;
    out.points = cloud.points * q;
    out.weights = cloud.weights;
    return out;
}

// Columns completing q to an orthonormal basis of R^n.
Eigen::MatrixXd complement_basis(const Eigen::MatrixXd& q, int n) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
    Eigen::MatrixXd full = qr.householderQ();
    return full.rightCols(n - q.cols());
}

double sup_directional_moment(const PointCloud& cloud) {
    const SphericalMeasure unit = radial_project(cloud);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        second_moment(unit.cloud));
    return eig.eigenvalues()[cloud.dim() - 1];
}

} // namespace

BalancedResult balanced_position(const PointCloud& cloud, double eps,
                                 double tol, int max_iter) {
    cloud.validate();
    if (!(eps > 0.0)) {
        throw std::invalid_argument("balanced_position: eps must be positive");
    }
    const int n = static_cast<int>(cloud.dim());
    try {
        const PositionResult pos = isotropic_position(cloud, tol, max_iter);
        BalancedResult out;
        out.map = pos.map;
        out.sup_moment = sup_directional_moment(pushforward(cloud, pos.map));
        out.isotropic = pos.converged;
        return out;
    } catch (const SubspaceConcentration& err) {
        const Eigen::MatrixXd& q = err.basis;
        const Eigen::MatrixXd qp = complement_basis(q, n);

        if (err.mass >= 1.0 - 1e-12) {
            // Essentially everything lives in span(q): keep only the on-span
            // atoms, position inside, and act as the identity on the dead
            // complement directions.
            std::vector<Eigen::Index> in;
            for (Eigen::Index i = 0; i < cloud.size(); ++i) {
                const Eigen::VectorXd x = cloud.points.row(i).transpose();
                const double res = (x - q * (q.transpose() * x)).norm();
                if (res <= 1e-9 * std::max(x.norm(), 1e-300)) in.push_back(i);
            }
            PointCloud kept;
            kept.points.resize(static_cast<Eigen::Index>(in.size()),
                               cloud.dim());
            kept.weights.resize(static_cast<Eigen::Index>(in.size()));
            double lam = 0.0;
            for (const Eigen::Index i : in) lam += cloud.weights[i];
            for (std::size_t k = 0; k < in.size(); ++k) {
                kept.points.row(static_cast<Eigen::Index>(k)) =
                    cloud.points.row(in[k]);
                kept.weights[static_cast<Eigen::Index>(k)] =
                    cloud.weights[in[k]] / lam;
            }
            const BalancedResult sub =
                balanced_position(restrict_to(kept, q), eps, tol, max_iter);
            BalancedResult out;
            out.map = q * sub.map * q.transpose() + qp * qp.transpose();
            out.map /= out.map.norm();
            out.sup_moment =
                sup_directional_moment(pushforward(cloud, out.map));
            out.isotropic = false;
            out.splits = sub.splits + 1;
            return out;
        }

        // Proper split: position both parts, recombine block-diagonally, and
        // shrink the subspace block until the measured moment is within
        // eps/2 of the orthogonal-mixture limit max(lambda*mE, (1-lambda)*mP),
        // which block scaling approaches from above.
        const StratifiedSplit split = stratified_split(cloud, q);
        const PointCloud inner_e = restrict_to(split.on_subspace, q);
        const PointCloud inner_p = restrict_to(split.complement, qp);
        const BalancedResult a =
            balanced_position(inner_e, eps / 2, tol, max_iter);
        const BalancedResult b =
            balanced_position(inner_p, eps / 2, tol, max_iter);

        const double m_e = sup_directional_moment(pushforward(inner_e, a.map));
        const double m_p = sup_directional_moment(pushforward(inner_p, b.map));
        const double limit =
            std::max(split.lambda * m_e, (1.0 - split.lambda) * m_p);

        const Eigen::MatrixXd block_e = q * a.map * q.transpose();
        const Eigen::MatrixXd block_p = qp * b.map * qp.transpose();
        BalancedResult out;
        out.isotropic = false;
        out.splits = a.splits + b.splits + 1;
        double shrink = 1.0;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Eigen::MatrixXd map = shrink * block_e + block_p;
            map /= map.norm();
            const double sup = sup_directional_moment(pushforward(cloud, map));
            out.map = map;
            out.sup_moment = sup;
            if (sup <= limit + eps / 2) break;
            shrink *= 0.5;
        }
        return out;
    }
}

} // namespace radial

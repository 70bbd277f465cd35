#include "radial/projection.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <json.hpp>

#include "radial/positioning.hpp"
#include "radial/rng.hpp"

namespace radial {

Eigen::MatrixXd gaussian_matrix(int d, int n, std::uint64_t seed) {
    if (d < 1 || d > n) {
        throw std::invalid_argument("gaussian_matrix: need 1 <= d <= n");
    }
    Rng rng(seed);
    Eigen::MatrixXd gamma(d, n);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < n; ++c) gamma(r, c) = rng.gaussian();
    }
    return gamma;
}

void OrthogonalTuple::validate() const {
    const Eigen::Index ell = vectors.rows();
    if (witness.rows() != ell || coeffs.rows() != ell || coeffs.cols() != ell) {
        throw std::logic_error("orthogonal tuple: inconsistent shapes");
    }
    const Eigen::MatrixXd gram = witness * witness.transpose();
    if ((gram - Eigen::MatrixXd::Identity(ell, ell)).cwiseAbs().maxCoeff() >
        1e-10) {
        throw std::logic_error("orthogonal tuple: witness not orthonormal");
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < ell; ++i) {
        if (!(coeffs(i, i) > 0.0)) {
            throw std::logic_error("orthogonal tuple: nonpositive diagonal");
        }
        Eigen::RowVectorXd rebuilt = Eigen::RowVectorXd::Zero(vectors.cols());
        for (Eigen::Index j = 0; j <= i; ++j) {
            rebuilt += coeffs(i, j) * witness.row(j);
        }
        worst = std::max(worst,
                         (rebuilt - vectors.row(i)).cwiseAbs().maxCoeff());
        for (Eigen::Index j = i + 1; j < ell; ++j) {
            if (coeffs(i, j) != 0.0) {
                throw std::logic_error("orthogonal tuple: not triangular");
            }
        }
    }
    if (worst > 1e-9) {
        throw std::logic_error(
            "orthogonal tuple: reconstruction error above 1e-9");
    }
}

OrthogonalTuple orthogonality_tau(const PointMatrix& vectors) {
    const Eigen::Index ell = vectors.rows();
    const Eigen::Index n = vectors.cols();
    if (ell < 1 || n < 1) {
        throw std::invalid_argument("orthogonality_tau: empty input");
    }
    if (ell > n) {
        throw std::invalid_argument(
            "orthogonality_tau: more vectors than dimensions");
    }
    OrthogonalTuple tuple;
    tuple.vectors = vectors;
    tuple.witness = PointMatrix::Zero(ell, n);
    tuple.coeffs = Eigen::MatrixXd::Zero(ell, ell);
    double tau = 0.0;
    for (Eigen::Index i = 0; i < ell; ++i) {
        if (vectors.row(i).norm() <= kOriginTol) {
            throw std::domain_error("orthogonality_tau: zero vector");
        }
        // Modified Gram-Schmidt: peel one witness direction at a time.
        Eigen::RowVectorXd resid = vectors.row(i);
        for (Eigen::Index j = 0; j < i; ++j) {
            const double a = resid.dot(tuple.witness.row(j));
            tuple.coeffs(i, j) = a;
            resid -= a * tuple.witness.row(j);
        }
        const double diag = resid.norm();
        if (diag < 1e-12) {
            throw std::domain_error(
                "orthogonality_tau: vector " + std::to_string(i) +
                " depends on its predecessors; no finite tau exists");
        }
        tuple.coeffs(i, i) = diag;
        tuple.witness.row(i) = resid / diag;
        for (Eigen::Index j = 0; j < i; ++j) {
            tau = std::max(tau, std::abs(tuple.coeffs(i, j)) / diag);
        }
    }
    tuple.tau = tau;
    return tuple;
}

PointCloud MixtureDecomposition::mixture(const PointCloud& original) const {
    if (tuples.empty()) {
        throw std::domain_error("mixture: decomposition has no tuples");
    }
    double total = 0.0;
    for (const TupleComponent& t : tuples) total += t.weight;
    std::size_t rows = 0;
    for (const TupleComponent& t : tuples) rows += t.atoms.size();
    PointCloud out;
    out.points.resize(static_cast<Eigen::Index>(rows), original.dim());
    out.weights.resize(static_cast<Eigen::Index>(rows));
    Eigen::Index at = 0;
    for (const TupleComponent& t : tuples) {
        const double per_atom =
            t.weight / (total * static_cast<double>(t.atoms.size()));
        for (const Eigen::Index a : t.atoms) {
            out.points.row(at) = original.points.row(a);
            out.weights[at] = per_atom;
            ++at;
        }
    }
    return canonicalize(out);
}

void MixtureDecomposition::validate(const PointCloud& original) const {
    double total = 0.0;
    for (const TupleComponent& t : tuples) {
        if (!(t.weight >= 0.0)) {
            throw std::logic_error("decomposition: negative tuple weight");
        }
        if (static_cast<int>(t.atoms.size()) != ell) {
            throw std::logic_error("decomposition: tuple of wrong size");
        }
        t.tuple.validate();
        if (t.tuple.tau > tau_threshold + 1e-12) {
            throw std::logic_error("decomposition: tuple tau above threshold");
        }
        total += t.weight;
    }
    if (std::abs((1.0 - total) - residual_tv) > 1e-9) {
        throw std::logic_error("decomposition: weight bookkeeping broken");
    }
    if (tuples.empty()) return;
    const double tv = total_variation(original, mixture(original));
    if (tv > residual_tv + 1e-9) {
        throw std::logic_error(
            "decomposition: measured TV exceeds the residual bound");
    }
}

MixtureDecomposition greedy_decomposition(const PointCloud& cloud, int ell,
                                          double tau_threshold, double epsilon,
                                          std::uint64_t seed,
                                          long budget_override) {
    cloud.validate();
    if (ell < 1) {
        throw std::invalid_argument("greedy_decomposition: ell must be >= 1");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument(
            "greedy_decomposition: epsilon must be positive");
    }
    if (!(tau_threshold >= 0.0)) {
        throw std::invalid_argument(
            "greedy_decomposition: negative tau threshold");
    }
    const Eigen::Index N = cloud.size();

    MixtureDecomposition out;
    out.ell = ell;
    out.tau_threshold = tau_threshold;

    double min_w = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < N; ++i) {
        if (cloud.weights[i] > 0.0) min_w = std::min(min_w, cloud.weights[i]);
    }
    long budget = budget_override;
    if (budget <= 0) {
        const double expected =
            std::ceil(1.0 / (static_cast<double>(ell) * min_w));
        budget = 200 * static_cast<long>(std::min(expected, 1e5));
        budget = std::min(budget, 20000000L);
    }

    Rng rng(seed);
    Eigen::VectorXd residual = cloud.weights;
    double residual_mass = residual.sum();
    std::vector<Eigen::Index> chosen(static_cast<std::size_t>(ell));

    while (residual_mass > epsilon && out.attempts < budget) {
        // Count atoms still carrying mass; a tuple needs ell distinct ones.
        Eigen::Index alive = 0;
        for (Eigen::Index i = 0; i < N; ++i) {
            if (residual[i] > 0.0) ++alive;
        }
        if (alive < ell) break;
        ++out.attempts;

        // Sample ell distinct atoms proportional to residual weight.
        double remaining = residual_mass;
        for (int k = 0; k < ell; ++k) {
            double target = rng.uniform() * remaining;
            Eigen::Index pick = -1;
            for (Eigen::Index i = 0; i < N; ++i) {
                if (residual[i] <= 0.0) continue;
                bool used = false;
                for (int j = 0; j < k; ++j) {
                    if (chosen[static_cast<std::size_t>(j)] == i) {
                        used = true;
                        break;
                    }
                }
                if (used) continue;
                target -= residual[i];
                if (target < 0.0) {
                    pick = i;
                    break;
                }
                pick = i; // fall through to the last live atom on rounding
            }
            chosen[static_cast<std::size_t>(k)] = pick;
            remaining -= residual[pick];
        }

        PointMatrix rows(ell, cloud.dim());
        for (int k = 0; k < ell; ++k) {
            rows.row(k) = cloud.points.row(chosen[static_cast<std::size_t>(k)]);
        }
        OrthogonalTuple tuple;
        try {
            tuple = orthogonality_tau(rows);
        } catch (const std::domain_error&) {
            continue; // dependent draw, rejected
        }
        if (tuple.tau > tau_threshold) continue;

        double m = std::numeric_limits<double>::infinity();
        for (int k = 0; k < ell; ++k) {
            m = std::min(m, residual[chosen[static_cast<std::size_t>(k)]]);
        }
        TupleComponent comp;
        comp.weight = static_cast<double>(ell) * m;
        comp.atoms.assign(chosen.begin(), chosen.end());
        comp.tuple = std::move(tuple);
        out.tuples.push_back(std::move(comp));
        for (int k = 0; k < ell; ++k) {
            residual[chosen[static_cast<std::size_t>(k)]] -= m;
        }
        residual_mass -= static_cast<double>(ell) * m;
        residual_mass = std::max(residual_mass, 0.0);
    }

    out.residual_tv = 0.0;
    for (const TupleComponent& t : out.tuples) out.residual_tv += t.weight;
    out.residual_tv = 1.0 - out.residual_tv;
    out.complete = out.residual_tv <= epsilon + 1e-12;
    out.validate(cloud);
    return out;
}

double gaussian_tv_bound(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         double C_const) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows()) {
        throw std::invalid_argument("gaussian_tv_bound: need square k x k");
    }
    const Eigen::Index k = A.rows();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) {
        throw std::invalid_argument("gaussian_tv_bound: singular A");
    }
    const Eigen::MatrixXd diff =
        B * lu.inverse() - Eigen::MatrixXd::Identity(k, k);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(diff);
    return C_const * static_cast<double>(k) * svd.singularValues()[0];
}

void PipelineResult::validate(const PointCloud& original) const {
    const Eigen::MatrixXd product = projection * position_map;
    if ((product - composite).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::logic_error("pipeline result: composite != projection*map");
    }
    const PointCloud direct = pushforward(original, composite);
    if (direct.size() != marginal.size() ||
        (direct.points - marginal.points).cwiseAbs().maxCoeff() != 0.0 ||
        (direct.weights - marginal.weights).cwiseAbs().maxCoeff() != 0.0) {
        throw std::logic_error(
            "pipeline result: marginal is not the composite pushforward");
    }
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

// Builds the result for one projection trial; `positioned` must already be
// the pushforward of `original` under position_map.
PipelineResult certify_trial(const PointCloud& original,
                             const Eigen::MatrixXd& position_map,
                             const Eigen::MatrixXd& gamma, std::uint64_t seed,
                             const RadialityParams& params) {
    PipelineResult res;
    res.position_map = position_map;
    res.projection = gamma;
    res.composite = gamma * position_map;
    res.marginal = pushforward(original, res.composite);
    for (Eigen::Index i = 0; i < res.marginal.size(); ++i) {
        const double image = res.marginal.points.row(i).norm();
        const double source = original.points.row(i).norm();
        if (image <= 1e-12 * source) throw DegenerateProjection(seed, i);
    }
    res.report = radiality_epsilon(res.marginal, params);
    res.seed = seed;
    res.trial_seed = seed;
    return res;
}

} // namespace

std::string pipeline_to_json(const PipelineResult& result) {
    nlohmann::json j;
    j["seed"] = result.seed;
    j["trial_seed"] = result.trial_seed;
    j["trial"] = result.trial;
    j["trials"] = result.trials;
    j["target_epsilon"] = result.target_epsilon;
    j["achieved"] = result.achieved;
    j["epsilon_star"] = result.report.epsilon_star;
    if (std::isfinite(result.input_alpha)) {
        j["input_alpha"] = result.input_alpha;
    }
    if (std::isfinite(result.moment_sup)) {
        j["moment_sup"] = result.moment_sup;
    }
    j["position_map"] = matrix_json(result.position_map);
    j["projection"] = matrix_json(result.projection);
    j["composite"] = matrix_json(result.composite);
    nlohmann::json marginal;
    marginal["dim"] = result.marginal.dim();
    marginal["points"] = matrix_json(result.marginal.points);
    nlohmann::json ws = nlohmann::json::array();
    for (Eigen::Index i = 0; i < result.marginal.size(); ++i) {
        ws.push_back(result.marginal.weights[i]);
    }
    marginal["weights"] = std::move(ws);
    j["marginal"] = std::move(marginal);
    j["report"] = nlohmann::json::parse(report_to_json(result.report));
    return j.dump(2);
}

PipelineResult project_and_certify(const PointCloud& cloud, int d,
                                   std::uint64_t seed,
                                   const RadialityParams& params,
                                   bool identity_gamma) {
    cloud.validate();
    if (!is_proper(cloud)) {
        throw std::domain_error("project_and_certify: atom at the origin");
    }
    const int n = static_cast<int>(cloud.dim());
    if (d < 1 || d > n) {
        throw std::invalid_argument("project_and_certify: need 1 <= d <= n");
    }
    if (identity_gamma && d != n) {
        throw std::invalid_argument(
            "project_and_certify: identity projection requires d == n");
    }
    const Eigen::MatrixXd gamma = identity_gamma
                                      ? Eigen::MatrixXd::Identity(n, n)
                                      : gaussian_matrix(d, n, seed);
    PipelineResult res = certify_trial(
        cloud, Eigen::MatrixXd::Identity(n, n), gamma, seed, params);
    res.achieved = false;
    res.target_epsilon = 0.0;
    return res;
}

PipelineResult full_pipeline(const PointCloud& cloud, int d,
                             double target_epsilon, std::uint64_t seed,
                             const PipelineParams& params) {
    cloud.validate();
    const int n = static_cast<int>(cloud.dim());
    if (d < 1 || d > n) {
        throw std::invalid_argument("full_pipeline: need 1 <= d <= n");
    }
    if (!(target_epsilon > 0.0)) {
        throw std::invalid_argument("full_pipeline: target must be positive");
    }
    if (params.retries < 1) {
        throw std::invalid_argument("full_pipeline: retries must be >= 1");
    }

    const DecencyReport decency = decency_alpha(cloud, params.decency_max_dim);
    const PositionResult pos = isotropic_position(
        cloud, params.position_tol, params.position_max_iter);
    const PointCloud positioned = pushforward(cloud, pos.map);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        second_moment(radial_project(positioned).cloud));
    const double moment_sup = eig.eigenvalues()[n - 1];

    PipelineResult best;
    bool have_best = false;
    int trials_run = 0;
    for (int r = 0; r < params.retries; ++r) {
        const std::uint64_t trial_seed = derive_seed(seed, r);
        ++trials_run;
        PipelineResult res;
        try {
            const Eigen::MatrixXd gamma =
                d == n ? Eigen::MatrixXd::Identity(n, n)
                       : gaussian_matrix(d, n, trial_seed);
            res = certify_trial(cloud, pos.map, gamma, trial_seed,
                                params.radiality);
        } catch (const DegenerateProjection&) {
            continue; // probability-zero seed, try the next
        }
        res.trial = r;
        if (!have_best || res.report.epsilon_star < best.report.epsilon_star) {
            best = std::move(res);
            have_best = true;
        }
        if (best.report.epsilon_star <= target_epsilon) break;
    }
    if (!have_best) {
        throw DegenerateProjection(seed, 0);
    }
    best.seed = seed;
    best.trials = trials_run;
    best.target_epsilon = target_epsilon;
    best.achieved = best.report.epsilon_star <= target_epsilon;
    best.input_alpha = decency.alpha;
    best.moment_sup = moment_sup;
    return best;
}

} // namespace radial

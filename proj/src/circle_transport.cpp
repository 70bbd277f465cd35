#include <algorithm>
#include <cmath>
#include <vector>

#include "radial/transport.hpp"

// Exact transport on the unit circle. With arc length as the ground metric,
// W1(mu, nu) = min_alpha integral |F_mu(t) - F_nu(t) - alpha| dt taken around
// the circle, and the minimizing alpha is a length-weighted median of the
// CDF difference. For two discrete measures the difference is piecewise
// constant; against the continuous uniform measure it is piecewise linear
// with slope -1/(2 pi). Both cases reduce to closed-form sums.

namespace radial {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Event {
    double angle;
    double jump;
};

double atom_angle(const Eigen::VectorXd& x) {
    double t = std::atan2(x[1], x[0]);
    if (t < 0.0) t += kTwoPi;
    return t;
}

std::vector<Event> merged_events(std::vector<Event> ev) {
    std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) {
        return a.angle < b.angle;
    });
    std::vector<Event> out;
    for (const Event& e : ev) {
        if (!out.empty() && out.back().angle == e.angle) {
            out.back().jump += e.jump;
        } else {
            out.push_back(e);
        }
    }
    return out;
}

} // namespace

double circle_w1(const SphericalMeasure& a, const SphericalMeasure& b) {
    a.validate();
    b.validate();
    if (a.dim() != 2 || b.dim() != 2) {
        throw std::invalid_argument("circle_w1: dimension must be 2");
    }
    std::vector<Event> ev;
    ev.reserve(static_cast<std::size_t>(a.size() + b.size()));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        ev.push_back({atom_angle(a.cloud.points.row(i)), a.cloud.weights[i]});
    }
    for (Eigen::Index j = 0; j < b.size(); ++j) {
        ev.push_back({atom_angle(b.cloud.points.row(j)), -b.cloud.weights[j]});
    }
    const std::vector<Event> events = merged_events(std::move(ev));
    const std::size_t K = events.size();

    // Segment k runs from events[k].angle to the next event; g is the value
    // of F_a - F_b there.
    std::vector<double> g(K), len(K);
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        acc += events[k].jump;
        g[k] = acc;
        const double next =
            (k + 1 < K) ? events[k + 1].angle : events[0].angle + kTwoPi;
        len[k] = next - events[k].angle;
    }

    // Length-weighted median of g minimizes sum len * |g - alpha|.
    std::vector<std::size_t> order(K);
    for (std::size_t k = 0; k < K; ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return g[x] < g[y]; });
    double cum = 0.0;
    double alpha = g[order.back()];
    for (const std::size_t k : order) {
        cum += len[k];
        if (cum >= kTwoPi / 2.0) {
            alpha = g[k];
            break;
        }
    }

    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) total += len[k] * std::abs(g[k] - alpha);
    return total;
}

double circle_w1_uniform(const SphericalMeasure& a) {
    a.validate();
    if (a.dim() != 2) {
        throw std::invalid_argument("circle_w1_uniform: dimension must be 2");
    }
    std::vector<Event> ev;
    ev.reserve(static_cast<std::size_t>(a.size()));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        ev.push_back({atom_angle(a.cloud.points.row(i)), a.cloud.weights[i]});
    }
    const std::vector<Event> events = merged_events(std::move(ev));
    const std::size_t K = events.size();

    // Piece k: G starts at v[k] just after the jump and falls linearly by
    // len[k] / (2 pi) until the next atom.
    std::vector<double> v(K), len(K), vend(K);
    double acc = 0.0, used = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        acc += events[k].jump;
        const double next =
            (k + 1 < K) ? events[k + 1].angle : events[0].angle + kTwoPi;
        len[k] = next - events[k].angle;
        v[k] = acc - used / kTwoPi;
        used += len[k];
        vend[k] = acc - used / kTwoPi;
    }

    // T(alpha) = measure{t : G(t) <= alpha} is piecewise linear and
    // increasing; the optimal alpha solves T(alpha) = pi. Kinks happen only
    // at piece endpoint values, so locate the bracket and interpolate.
    auto below_length = [&](double alpha) {
        double t = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            t += std::clamp((alpha - vend[k]) * kTwoPi, 0.0, len[k]);
        }
        return t;
    };
    std::vector<double> knots;
    knots.reserve(2 * K);
    for (std::size_t k = 0; k < K; ++k) {
        knots.push_back(v[k]);
        knots.push_back(vend[k]);
    }
    std::sort(knots.begin(), knots.end());
    double lo = knots.front(), hi = knots.back();
    double t_lo = below_length(lo), t_hi = below_length(hi);
    for (const double x : knots) {
        const double t = below_length(x);
        if (t <= kTwoPi / 2.0 && (x > lo || t > t_lo)) {
            lo = x;
            t_lo = t;
        }
        if (t >= kTwoPi / 2.0 && x < hi) {
            hi = x;
            t_hi = t;
        }
    }
    double alpha = lo;
    if (t_hi > t_lo) {
        alpha = lo + (kTwoPi / 2.0 - t_lo) * (hi - lo) / (t_hi - t_lo);
    }

    // integral |G - alpha| over a linear piece from p down to q:
    // same sign -> trapezoid; sign change -> pi (p^2 + q^2) for this slope.
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const double p = v[k] - alpha;
        const double q = vend[k] - alpha;
        if (p >= 0.0 && q >= 0.0) {
            total += 0.5 * (p + q) * len[k];
        } else if (p <= 0.0 && q <= 0.0) {
            total += -0.5 * (p + q) * len[k];
        } else {
            total += (p * p + q * q) * (kTwoPi / 2.0);
        }
    }
    return total;
}

} // namespace radial

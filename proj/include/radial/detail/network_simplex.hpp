#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace radial::detail {

// Exact solver for the balanced transportation problem
//
//     min sum_{i,j} c(i,j) f(i,j)   s.t.  sum_j f(i,j) = supply[i],
//                                         sum_i f(i,j) = demand[j],  f >= 0
//
// as a network simplex on the spanning-tree basis. Arcs are implicit: costs
// are evaluated on demand through the callback, so no m*n cost matrix is ever
// stored.
//
// Two devices keep large geometric instances fast without giving up
// exactness:
//  - supplies receive a tiny deterministic relative perturbation (~1e-12),
//    which breaks the ties that otherwise cause long runs of degenerate
//    pivots on equal-weight inputs; the optimal cost moves by at most
//    pi * 1e-12 and the flow marginals by the same relative amount;
//  - the caller may pass a shortlist of arcs (e.g. nearest neighbors, see
//    transport.cpp); pricing then works on the shortlist, whose costs are
//    cached, and a full sweep over all m*n arcs certifies optimality and
//    harvests any violating arcs back into the shortlist. The final basis
//    is therefore optimal for the complete arc set, shortlist or not.
//
// The caller is expected to order sources and sinks so that nearby indices
// are geometrically close (see transport.cpp); the northwest-corner start is
// then already near-optimal, which keeps pivot counts low.

struct FlowEntry {
    int source = 0;
    int sink = 0;
    double mass = 0.0;
};

struct SimplexSolution {
    std::vector<FlowEntry> flows; // basic arcs with positive flow
    double cost = 0.0;
    std::vector<double> source_potential;
    std::vector<double> sink_potential;
    double min_reduced_cost = 0.0; // from the final certification sweep
    double duality_gap = 0.0;      // |primal - dual|
    long pivots = 0;
    long scanned = 0; // pricing entries examined (profiling aid)
    long touched = 0; // tree nodes visited in pivots (profiling aid)
};

template <class CostFn>
class TransportSimplex {
  public:
    TransportSimplex(std::vector<double> supply, std::vector<double> demand,
                     CostFn cost)
        : a_(std::move(supply)), b_(std::move(demand)), cost_(std::move(cost)) {
        m_ = static_cast<int>(a_.size());
        n_ = static_cast<int>(b_.size());
        V_ = m_ + n_;
        if (m_ == 0 || n_ == 0) {
            throw std::invalid_argument("transport: empty marginal");
        }
        double sa = 0.0, sb = 0.0;
        for (double x : a_) {
            if (!(x > 0.0)) throw std::invalid_argument("transport: supply <= 0");
            sa += x;
        }
        for (double x : b_) {
            if (!(x > 0.0)) throw std::invalid_argument("transport: demand <= 0");
            sb += x;
        }
        // Anti-degeneracy: distinct relative nudges on the supply side kill
        // the partial-sum ties behind zero-flow pivots.
        const double xi = 1e-12 / static_cast<double>(m_ + 1);
        double sa2 = 0.0;
        for (int i = 0; i < m_; ++i) {
            a_[static_cast<std::size_t>(i)] *= 1.0 + xi * (i + 1);
            sa2 += a_[static_cast<std::size_t>(i)];
        }
        // Rescale demand so both sides balance to the last bit we can manage.
        const double f = sa2 / sb;
        for (double& x : b_) x *= f;
    }

    // Restricts pricing to these arcs (ids i * n + j) until they are
    // exhausted; full sweeps keep the result exact regardless of content.
    void set_shortlist(const std::vector<std::int64_t>& arcs) {
        pool_.clear();
        pool_.reserve(arcs.size());
        for (const std::int64_t arc : arcs) {
            const int i = static_cast<int>(arc / n_);
            const int j = static_cast<int>(arc % n_);
            pool_.push_back({i, j, cost_(i, j)});
        }
    }

    SimplexSolution solve() {
        init_basis();
        const long pivot_limit = 500L * static_cast<long>(V_) + 5000000L;
        while (true) {
            Cand c = price();
            if (c.i < 0) {
                recompute_potentials();
                c = harvest_sweep();
                if (c.i < 0) break;
            }
            if (pivot(c) && pivots_ > pivot_limit) {
                throw std::runtime_error("transport: pivot limit exceeded");
            }
        }
        return extract();
    }

  private:
    static constexpr double kEnterTol = 1e-12;

    struct Cand {
        int i = 0; // source index
        int j = 0; // sink index
        double cost = 0.0;
    };

    // node ids: source i -> i, sink j -> m_ + j
    int m_ = 0, n_ = 0, V_ = 0;
    std::vector<double> a_, b_;
    CostFn cost_;

    std::vector<int> par_;
    std::vector<double> pflow_; // flow on the arc to the parent
    std::vector<double> pot_;   // on tree arcs, pot[i] + pot[m+j] = c(i,j)
    std::vector<int> depth_;
    std::vector<int> child_, next_, prev_; // first child + sibling links

    std::vector<Cand> pool_;  // shortlist arcs with cached costs
    std::vector<Cand> cands_; // current negative-reduced-cost candidates
    std::size_t cursor_ = 0;  // wrap position in pool_ or the implicit range
    std::int64_t flat_cursor_ = 0;
    long pivots_ = 0;
    long stall_ = 0;
    long scanned_ = 0;
    long touched_ = 0;
    bool bland_ = false;
    double min_rc_final_ = 0.0;
    std::vector<int> path_u_, path_v_, chain_, stack_;

    double reduced_of(const Cand& c) const {
        return c.cost - pot_[c.i] - pot_[m_ + c.j];
    }

    void add_child(int p, int c) {
        next_[c] = child_[p];
        prev_[c] = -1;
        if (child_[p] != -1) prev_[child_[p]] = c;
        child_[p] = c;
    }

    void remove_child(int p, int c) {
        if (prev_[c] != -1) {
            next_[prev_[c]] = next_[c];
        } else {
            child_[p] = next_[c];
        }
        if (next_[c] != -1) prev_[next_[c]] = prev_[c];
    }

    void init_basis() {
        par_.assign(V_, -1);
        pflow_.assign(V_, 0.0);
        pot_.assign(V_, 0.0);
        depth_.assign(V_, 0);
        child_.assign(V_, -1);
        next_.assign(V_, -1);
        prev_.assign(V_, -1);

        // Northwest-corner start. Each step emits one basic arc and advances
        // one index, so exactly m + n - 1 arcs come out and they form a
        // staircase spanning tree.
        struct Arc {
            int i, j;
            double f;
        };
        std::vector<Arc> basis;
        basis.reserve(static_cast<std::size_t>(V_));
        int i = 0, j = 0;
        double ra = a_[0], rb = b_[0];
        while (true) {
            const double t = std::min(ra, rb);
            basis.push_back({i, j, t});
            ra -= t;
            rb -= t;
            if (i == m_ - 1 && j == n_ - 1) break;
            if (ra <= rb && i < m_ - 1) {
                ++i;
                ra = a_[i];
            } else if (j < n_ - 1) {
                ++j;
                rb = b_[j];
            } else {
                ++i;
                ra = a_[i];
            }
        }

        // Build the rooted tree (root = source 0) from the staircase.
        std::vector<std::vector<std::pair<int, double>>> adj(
            static_cast<std::size_t>(V_));
        for (const Arc& e : basis) {
            adj[static_cast<std::size_t>(e.i)].push_back({m_ + e.j, e.f});
            adj[static_cast<std::size_t>(m_ + e.j)].push_back({e.i, e.f});
        }
        stack_.clear();
        stack_.push_back(0);
        std::vector<char> seen(static_cast<std::size_t>(V_), 0);
        seen[0] = 1;
        while (!stack_.empty()) {
            const int x = stack_.back();
            stack_.pop_back();
            for (const auto& [y, f] : adj[static_cast<std::size_t>(x)]) {
                if (seen[static_cast<std::size_t>(y)]) continue;
                seen[static_cast<std::size_t>(y)] = 1;
                par_[y] = x;
                pflow_[y] = f;
                depth_[y] = depth_[x] + 1;
                add_child(x, y);
                stack_.push_back(y);
            }
        }
        recompute_potentials();
        cursor_ = 0;
        flat_cursor_ = 0;
        cands_.clear();
    }

    void recompute_potentials() {
        // Walk the tree from the root; each arc pins the child's potential.
        pot_[0] = 0.0;
        stack_.clear();
        stack_.push_back(0);
        while (!stack_.empty()) {
            const int x = stack_.back();
            stack_.pop_back();
            for (int c = child_[x]; c != -1; c = next_[c]) {
                const int src = c < m_ ? c : x;
                const int snk = c < m_ ? x - m_ : c - m_;
                pot_[c] = cost_(src, snk) - pot_[x];
                stack_.push_back(c);
            }
        }
    }

    // Picks the best candidate from cands_. Entries are re-priced against
    // the current potentials; a clean list returns {-1, -1, 0}.
    Cand pop_best_candidate() {
        if (cands_.empty()) return {-1, -1, 0.0};
        double best_rc = -kEnterTol;
        std::size_t best_at = cands_.size();
        for (std::size_t k = 0; k < cands_.size(); ++k) {
            const double rc = reduced_of(cands_[k]);
            if (rc < best_rc) {
                best_rc = rc;
                best_at = k;
            }
        }
        if (best_at == cands_.size()) {
            cands_.clear();
            return {-1, -1, 0.0};
        }
        const Cand out = cands_[best_at];
        cands_[best_at] = cands_.back();
        cands_.pop_back();
        return out;
    }

    // Returns an arc with reduced cost < -kEnterTol, or {-1,...} after a
    // clean wrap of the pricing range (shortlist when present, every arc
    // otherwise). Harvested candidates are kept and re-checked, which
    // amortizes scans over many pivots.
    Cand price() {
        const std::int64_t A =
            static_cast<std::int64_t>(m_) * static_cast<std::int64_t>(n_);
        if (bland_) {
            for (int i = 0; i < m_; ++i) {
                for (int j = 0; j < n_; ++j) {
                    const double c = cost_(i, j);
                    if (c - pot_[i] - pot_[m_ + j] < -kEnterTol) {
                        return {i, j, c};
                    }
                }
            }
            return {-1, -1, 0.0};
        }
        Cand found = pop_best_candidate();
        if (found.i >= 0) return found;

        const std::size_t want = 128;
        if (!pool_.empty()) {
            // Shortlist mode: wrap the pool once, collecting candidates.
            std::size_t steps = 0;
            while (steps < pool_.size() && cands_.size() < want) {
                const Cand& c = pool_[cursor_];
                if (++cursor_ == pool_.size()) cursor_ = 0;
                ++steps;
                if (reduced_of(c) < -kEnterTol) cands_.push_back(c);
            }
            scanned_ += static_cast<long>(steps);
            return pop_best_candidate();
        }

        const std::int64_t block = std::max<std::int64_t>(
            1024, static_cast<std::int64_t>(std::sqrt(static_cast<double>(A))));
        std::int64_t steps = 0;
        while (steps < A && cands_.size() < want) {
            const std::int64_t stop = std::min<std::int64_t>(block, A - steps);
            for (std::int64_t k = 0; k < stop; ++k) {
                const std::int64_t arc = flat_cursor_;
                if (++flat_cursor_ == A) flat_cursor_ = 0;
                const int i = static_cast<int>(arc / n_);
                const int j = static_cast<int>(arc % n_);
                const double c = cost_(i, j);
                if (c - pot_[i] - pot_[m_ + j] < -kEnterTol) {
                    cands_.push_back({i, j, c});
                }
            }
            steps += stop;
        }
        scanned_ += steps;
        return pop_best_candidate();
    }

    // Certification sweep over every arc. Returns the most negative arc (or
    // {-1,...} when optimal) and harvests the worst offenders into the
    // candidate list and the pool, so the next pivots do not each pay
    // another sweep.
    Cand harvest_sweep() {
        Cand best{-1, -1, 0.0};
        double best_rc = 0.0;
        std::vector<Cand> found;
        for (int i = 0; i < m_; ++i) {
            const double pi = pot_[i];
            for (int j = 0; j < n_; ++j) {
                const double c = cost_(i, j);
                const double rc = c - pi - pot_[m_ + j];
                if (rc < best_rc) {
                    best_rc = rc;
                    best = {i, j, c};
                }
                if (rc < -kEnterTol && found.size() < 4096) {
                    found.push_back({i, j, c});
                }
            }
        }
        scanned_ += static_cast<long>(m_) * n_;
        min_rc_final_ = best_rc;
        if (best_rc >= -kEnterTol) return {-1, -1, 0.0};
        // Keep the most negative 128 offenders, deterministically.
        const std::size_t keep = std::min<std::size_t>(found.size(), 128);
        const auto order = [&](const Cand& x, const Cand& y) {
            const double rx = reduced_of(x);
            const double ry = reduced_of(y);
            if (rx != ry) return rx < ry;
            return x.i != y.i ? x.i < y.i : x.j < y.j;
        };
        std::partial_sort(found.begin(),
                          found.begin() + static_cast<std::ptrdiff_t>(keep),
                          found.end(), order);
        found.resize(keep);
        for (const Cand& c : found) {
            cands_.push_back(c);
            if (!pool_.empty()) pool_.push_back(c);
        }
        return best;
    }

    std::int64_t tree_arc_id(int x) const {
        const int p = par_[x];
        const int src = x < m_ ? x : p;
        const int snk = x < m_ ? p - m_ : x - m_;
        return static_cast<std::int64_t>(src) * n_ + snk;
    }

    // Performs one simplex pivot on the entering arc. Returns true if the
    // basis changed (false when the candidate had gone stale).
    bool pivot(const Cand& enter) {
        const double rc = reduced_of(enter);
        if (rc >= -kEnterTol) return false;

        const int u = enter.i;
        const int v = m_ + enter.j;

        // Cycle = entering arc + tree path u..v. Collect the two branches up
        // to the common ancestor.
        path_u_.clear();
        path_v_.clear();
        int xu = u, xv = v;
        while (xu != xv) {
            if (depth_[xu] >= depth_[xv]) {
                path_u_.push_back(xu);
                xu = par_[xu];
            } else {
                path_v_.push_back(xv);
                xv = par_[xv];
            }
        }

        // Pushing flow along the entering arc (source u toward sink v)
        // decreases tree arcs hanging from a sink on v's branch and from a
        // source on u's branch. Scan v's branch first; first minimum wins.
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1;
        bool leave_on_u = false;
        for (const int x : path_v_) {
            if (x >= m_ && pflow_[x] < theta) {
                theta = pflow_[x];
                leave = x;
                leave_on_u = false;
            }
        }
        for (const int x : path_u_) {
            if (x < m_ && pflow_[x] < theta) {
                theta = pflow_[x];
                leave = x;
                leave_on_u = true;
            }
        }
        if (bland_ && leave >= 0) {
            // Bland mode: among minimum-ratio arcs take the smallest arc id.
            std::int64_t best_id = tree_arc_id(leave);
            for (const int x : path_v_) {
                if (x >= m_ && pflow_[x] <= theta &&
                    tree_arc_id(x) < best_id) {
                    best_id = tree_arc_id(x);
                    leave = x;
                    leave_on_u = false;
                }
            }
            for (const int x : path_u_) {
                if (x < m_ && pflow_[x] <= theta && tree_arc_id(x) < best_id) {
                    best_id = tree_arc_id(x);
                    leave = x;
                    leave_on_u = true;
                }
            }
        }

        for (const int x : path_v_) {
            pflow_[x] += (x >= m_) ? -theta : theta;
            if (pflow_[x] < 0.0) pflow_[x] = 0.0;
        }
        for (const int x : path_u_) {
            pflow_[x] += (x < m_) ? -theta : theta;
            if (pflow_[x] < 0.0) pflow_[x] = 0.0;
        }

        // Re-root the detached subtree at the entering arc's endpoint inside
        // it, then hang it under the other endpoint.
        const int w = leave_on_u ? u : v;
        const int z = leave_on_u ? v : u;
        chain_.clear();
        for (int x = w;; x = par_[x]) {
            chain_.push_back(x);
            if (x == leave) break;
        }
        int prev = z;
        double carry = theta;
        for (const int x : chain_) {
            const int oldp = par_[x];
            const double oldf = pflow_[x];
            remove_child(oldp, x);
            add_child(prev, x);
            par_[x] = prev;
            pflow_[x] = carry;
            prev = x;
            carry = oldf;
        }

        // Potentials on the moved side shift uniformly by +-rc; internal
        // arcs stay tight because sources and sinks shift oppositely.
        const double d_src = leave_on_u ? rc : -rc;
        const double d_snk = -d_src;
        stack_.clear();
        stack_.push_back(w);
        while (!stack_.empty()) {
            const int x = stack_.back();
            stack_.pop_back();
            depth_[x] = depth_[par_[x]] + 1;
            pot_[x] += (x < m_) ? d_src : d_snk;
            ++touched_;
            for (int c = child_[x]; c != -1; c = next_[c]) stack_.push_back(c);
        }
        touched_ += static_cast<long>(path_u_.size() + path_v_.size());

        ++pivots_;
        if (theta > 0.0) {
            stall_ = 0;
            bland_ = false;
        } else if (++stall_ > 4L * V_) {
            bland_ = true;
        }
        return true;
    }

    SimplexSolution extract() {
        SimplexSolution out;
        out.pivots = pivots_;
        out.scanned = scanned_;
        out.touched = touched_;
        out.min_reduced_cost = min_rc_final_;
        out.source_potential.assign(static_cast<std::size_t>(m_), 0.0);
        out.sink_potential.assign(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i < m_; ++i) {
            out.source_potential[static_cast<std::size_t>(i)] = pot_[i];
        }
        for (int j = 0; j < n_; ++j) {
            out.sink_potential[static_cast<std::size_t>(j)] = pot_[m_ + j];
        }
        double primal = 0.0;
        for (int x = 1; x < V_; ++x) {
            if (pflow_[x] <= 0.0) continue;
            const int p = par_[x];
            const int src = x < m_ ? x : p;
            const int snk = x < m_ ? p - m_ : x - m_;
            out.flows.push_back({src, snk, pflow_[x]});
            primal += pflow_[x] * cost_(src, snk);
        }
        out.cost = primal;
        double dual = 0.0;
        for (int i = 0; i < m_; ++i) dual += a_[static_cast<std::size_t>(i)] * pot_[i];
        for (int j = 0; j < n_; ++j) dual += b_[static_cast<std::size_t>(j)] * pot_[m_ + j];
        out.duality_gap = std::abs(primal - dual);
        return out;
    }
};

template <class CostFn>
SimplexSolution solve_transport(std::vector<double> supply,
                                std::vector<double> demand, CostFn cost,
                                const std::vector<std::int64_t>* shortlist =
                                    nullptr) {
    TransportSimplex<CostFn> solver(std::move(supply), std::move(demand),
                                    std::move(cost));
    if (shortlist != nullptr && !shortlist->empty()) {
        solver.set_shortlist(*shortlist);
    }
    return solver.solve();
}

} // namespace radial::detail

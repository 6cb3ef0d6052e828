#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mpa_engine.hpp"
#include "scma/decoders.hpp"
#include "scma/errors.hpp"

namespace scma {

namespace {

constexpr double kMissingPenalty = 20.0;  // nats below the worst listed hypothesis

struct Searcher {
    const SubcarrierSearch& p;
    int list_size;
    int depth;
    std::vector<int> order;        // level -> user
    std::vector<double> remaining;  // level -> sum of max |value| over levels >= level
    std::vector<int> path;          // per user
    std::vector<std::pair<double, std::vector<int>>> list;
    std::vector<long> visited;

    bool allowed(int i, int a) const { return p.allowed.empty() || p.allowed[i][a]; }

    double radius() const {
        return static_cast<int>(list.size()) < list_size ? std::numeric_limits<double>::infinity()
                                                         : list.back().first;
    }

    void insert(double metric) {
        auto pos = std::upper_bound(list.begin(), list.end(), metric,
                                    [](double m, const auto& e) { return m < e.first; });
        list.insert(pos, {metric, path});
        if (static_cast<int>(list.size()) > list_size) list.pop_back();
    }

    void descend(int level, cplx residual) {
        const int i = order[level];
        const bool leaf = level + 1 == depth;
        struct Child {
            double bound;
            int alt;
            cplx residual;
        };
        std::vector<Child> children;
        for (int a = 0; a < static_cast<int>(p.values[i].size()); ++a) {
            if (!allowed(i, a)) continue;
            const cplx r = residual - p.values[i][a];
            double bound;
            if (leaf) {
                bound = std::norm(r);
            } else {
                const double gap = std::max(0.0, std::abs(r) - remaining[level + 1]);
                bound = gap * gap;
            }
            children.push_back({bound, a, r});
        }
        std::stable_sort(children.begin(), children.end(),
                         [](const Child& x, const Child& y) { return x.bound < y.bound; });
        for (const auto& c : children) {
            if (c.bound >= radius()) break;
            ++visited[level];
            path[i] = c.alt;
            if (leaf) {
                insert(c.bound);
            } else {
                descend(level + 1, c.residual);
            }
        }
    }
};

}  // namespace

CandidateList lsd_subcarrier(const SubcarrierSearch& problem, int list_size) {
    if (list_size < 1) throw ParameterError("list size must be >= 1");
    const int d = static_cast<int>(problem.values.size());
    if (static_cast<int>(problem.gain_abs.size()) != d) throw DimensionError("gain_abs size mismatch");
    if (!problem.allowed.empty() && static_cast<int>(problem.allowed.size()) != d) {
        throw DimensionError("allowed set count mismatch");
    }
    for (int i = 0; i < d; ++i) {
        bool any = problem.values[i].size() > 0;
        if (!problem.allowed.empty()) {
            any = std::find(problem.allowed[i].begin(), problem.allowed[i].end(), true) !=
                  problem.allowed[i].end();
        }
        if (!any) throw ParameterError("empty allowed set");
    }

    CandidateList out;
    out.visited_per_level.assign(d, 0);
    if (d == 0) return out;

    Searcher s{problem, list_size, d, {}, {}, std::vector<int>(d, 0), {}, std::vector<long>(d, 0)};
    s.order.resize(d);
    std::iota(s.order.begin(), s.order.end(), 0);
    std::stable_sort(s.order.begin(), s.order.end(),
                     [&](int a, int b) { return problem.gain_abs[a] > problem.gain_abs[b]; });
    s.remaining.assign(d + 1, 0.0);
    for (int level = d - 1; level >= 0; --level) {
        const int i = s.order[level];
        double mx = 0.0;
        for (int a = 0; a < static_cast<int>(problem.values[i].size()); ++a) {
            if (s.allowed(i, a)) mx = std::max(mx, std::abs(problem.values[i][a]));
        }
        s.remaining[level] = s.remaining[level + 1] + mx;
    }
    s.descend(0, problem.y);

    out.visited_per_level = s.visited;
    for (auto& [metric, combo] : s.list) {
        out.metrics.push_back(metric);
        out.combos.push_back(std::move(combo));
    }
    return out;
}

namespace {

struct ListDecoderSetup {
    std::vector<detail::RowContributions> rows;
    ProjectionTable projection;
    bool projected = false;
};

ListDecoderSetup make_setup(const Codebook& cb, const Received& rx, bool use_projection) {
    ListDecoderSetup s;
    s.projected = use_projection;
    if (use_projection) s.projection = build_projection_table(cb);
    for (int k = 0; k < cb.fg.K; ++k) {
        s.rows.push_back(detail::row_contributions(cb, rx.gains, k, cb.fg.rows[k],
                                                   use_projection ? &s.projection : nullptr));
    }
    return s;
}

SubcarrierSearch search_problem(const Received& rx, int k, const detail::RowContributions& rc) {
    SubcarrierSearch p;
    p.y = rx.y[k];
    p.values = rc.values;
    for (int j : rc.users) p.gain_abs.push_back(std::abs(rx.gains(k, j)));
    return p;
}

/// Candidate list -> hypothesis table with canonical (row-order) metrics.
detail::NodeTable list_table(const Received& rx, int k, const detail::RowContributions& rc,
                             const CandidateList& list) {
    detail::NodeTable node;
    node.users = rc.users;
    auto& t = node.table;
    t.users = static_cast<int>(rc.users.size());
    t.group = rc.group;
    long space = 1;
    for (const auto& v : rc.values) {
        t.alternatives.push_back(static_cast<int>(v.size()));
        space *= static_cast<long>(v.size());
    }
    const double inv = 1.0 / rx.noise_var;
    for (const auto& combo : list.combos) {
        cplx r = rx.y[k];
        for (int i = 0; i < t.users; ++i) r = r - rc.values[i][combo[i]];
        t.combos.insert(t.combos.end(), combo.begin(), combo.end());
        t.loglik.push_back(-std::norm(r) * inv);
    }
    t.complete = static_cast<long>(list.combos.size()) == space;
    if (!t.loglik.empty()) {
        t.clamp_loglik = *std::min_element(t.loglik.begin(), t.loglik.end()) - kMissingPenalty;
    }
    return node;
}

DecodeResult run_list_mpa(const Codebook& cb, std::vector<detail::NodeTable> tables, int max_iters,
                          DecodeResult r) {
    detail::MessagePassing mp(cb, FnMode::max_log);
    mp.set_tables(std::move(tables));
    for (int it = 1; it <= max_iters; ++it) {
        const double change = mp.iterate();
        r.iterations_used = it;
        if (change < kConvergenceTol) break;
    }
    r.posteriors = mp.posteriors();
    r.hypotheses_evaluated = mp.hypotheses();
    detail::finalize(cb, r);
    return r;
}

void check(const Codebook& cb, const Received& rx, int list_size, int max_iters) {
    if (static_cast<int>(rx.y.size()) != cb.fg.K) throw DimensionError("received vector length != K");
    if (rx.gains.rows() != cb.fg.K || rx.gains.cols() != cb.fg.J) {
        throw DimensionError("gain matrix must be K x J");
    }
    if (list_size < 1) throw ParameterError("list size must be >= 1");
    if (max_iters < 1) throw ParameterError("max_iters must be >= 1");
}

}  // namespace

DecodeResult lsd_mpa(const Codebook& cb, const Received& rx, int list_size, int max_iters,
                     bool use_projection) {
    check(cb, rx, list_size, max_iters);
    const auto setup = make_setup(cb, rx, use_projection);
    const int dc = cb.fg.max_row_weight();
    DecodeResult r;
    r.visited_nodes.assign(cb.fg.K, std::vector<long>(dc, 0));
    r.candidate_list_sizes.assign(cb.fg.K, 0);
    std::vector<detail::NodeTable> tables(cb.fg.K);
    for (int k = 0; k < cb.fg.K; ++k) {
        const auto& rc = setup.rows[k];
        const auto list = lsd_subcarrier(search_problem(rx, k, rc), list_size);
        for (std::size_t l = 0; l < list.visited_per_level.size(); ++l) {
            r.visited_nodes[k][l] += list.visited_per_level[l];
        }
        r.candidate_list_sizes[k] = static_cast<int>(list.combos.size());
        tables[k] = list_table(rx, k, rc, list);
    }
    return run_list_mpa(cb, std::move(tables), max_iters, std::move(r));
}

DecodeResult np_lsd_mpa(const Codebook& cb, const Received& rx, int list_size, int rounds,
                        int max_iters, bool use_projection) {
    check(cb, rx, list_size, max_iters);
    if (rounds < 1) throw ParameterError("rounds must be >= 1");
    const auto setup = make_setup(cb, rx, use_projection);
    const int K = cb.fg.K;
    const int dc = cb.fg.max_row_weight();
    DecodeResult r;
    r.visited_nodes.assign(K, std::vector<long>(dc, 0));
    r.candidate_list_sizes.assign(K, 0);

    // global allowed label sets per user
    std::vector<std::vector<bool>> allowed(cb.fg.J, std::vector<bool>(cb.M, true));
    std::vector<CandidateList> lists(K);
    for (int round = 0; round < rounds; ++round) {
        for (int k = 0; k < K; ++k) {
            const auto& rc = setup.rows[k];
            auto problem = search_problem(rx, k, rc);
            problem.allowed.resize(rc.users.size());
            for (std::size_t i = 0; i < rc.users.size(); ++i) {
                const int j = rc.users[i];
                problem.allowed[i].assign(rc.values[i].size(), false);
                for (int m = 0; m < cb.M; ++m) {
                    if (allowed[j][m]) problem.allowed[i][rc.group[i][m]] = true;
                }
            }
            lists[k] = lsd_subcarrier(problem, list_size);
            for (std::size_t l = 0; l < lists[k].visited_per_level.size(); ++l) {
                r.visited_nodes[k][l] += lists[k].visited_per_level[l];
            }

            // intersect survivors into the global sets
            for (std::size_t i = 0; i < rc.users.size(); ++i) {
                const int j = rc.users[i];
                std::vector<bool> present(rc.values[i].size(), false);
                for (const auto& combo : lists[k].combos) present[combo[i]] = true;
                std::vector<bool> next(cb.M, false);
                bool any = false;
                for (int m = 0; m < cb.M; ++m) {
                    next[m] = allowed[j][m] && present[rc.group[i][m]];
                    any = any || next[m];
                }
                if (any) allowed[j] = std::move(next);
            }
        }
    }
    std::vector<detail::NodeTable> tables(K);
    for (int k = 0; k < K; ++k) {
        r.candidate_list_sizes[k] = static_cast<int>(lists[k].combos.size());
        tables[k] = list_table(rx, k, setup.rows[k], lists[k]);
    }
    return run_list_mpa(cb, std::move(tables), max_iters, std::move(r));
}

}  // namespace scma

#include "scma/fn_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scma/errors.hpp"

namespace scma {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void normalize_max_zero(std::vector<double>& v) {
    const double mx = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(mx)) return;
    for (auto& x : v) x -= mx;
}

}  // namespace

double log_sum_exp(const std::vector<double>& v) {
    const double mx = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

HypothesisTable full_table(cplx y, const std::vector<CVec>& values,
                           const std::vector<std::vector<int>>& group, double noise_var) {
    HypothesisTable t;
    t.users = static_cast<int>(values.size());
    t.group = group;
    long total = 1;
    for (const auto& v : values) {
        t.alternatives.push_back(static_cast<int>(v.size()));
        total *= static_cast<long>(v.size());
    }
    t.combos.resize(static_cast<std::size_t>(total) * t.users);
    t.loglik.resize(total);
    const int d = t.users;
    std::vector<int> idx(d, 0);
    std::vector<cplx> partial(d + 1);
    partial[0] = y;
    for (int i = 0; i < d; ++i) partial[i + 1] = partial[i] - values[i][0];
    const double inv = 1.0 / noise_var;
    for (long h = 0; h < total; ++h) {
        std::copy(idx.begin(), idx.end(), t.combos.begin() + h * d);
        t.loglik[h] = -std::norm(partial[d]) * inv;
        // advance mixed-radix counter, last user fastest
        int i = d - 1;
        while (i >= 0 && ++idx[i] == t.alternatives[i]) {
            idx[i] = 0;
            --i;
        }
        if (i < 0) break;
        for (int r = i; r < d; ++r) partial[r + 1] = partial[r] - values[r][idx[r]];
    }
    return t;
}

long fn_update(const HypothesisTable& table, const std::vector<std::vector<double>>& incoming,
               FnMode mode, std::vector<std::vector<double>>& outgoing) {
    const int d = table.users;
    if (!table.complete && mode != FnMode::max_log) {
        throw ParameterError("candidate-list tables support only max-log updates");
    }
    // aggregate label messages onto alternatives
    std::vector<std::vector<double>> agg(d);
    for (int i = 0; i < d; ++i) {
        agg[i].assign(table.alternatives[i], kNegInf);
        const auto& g = table.group[i];
        if (mode == FnMode::max_log) {
            for (std::size_t m = 0; m < g.size(); ++m) agg[i][g[m]] = std::max(agg[i][g[m]], incoming[i][m]);
        } else {
            std::vector<std::vector<double>> members(table.alternatives[i]);
            for (std::size_t m = 0; m < g.size(); ++m) members[g[m]].push_back(incoming[i][m]);
            for (int a = 0; a < table.alternatives[i]; ++a) {
                if (!members[a].empty()) agg[i][a] = log_sum_exp(members[a]);
            }
        }
    }

    std::vector<std::vector<double>> best(d);
    for (int i = 0; i < d; ++i) best[i].assign(table.alternatives[i], kNegInf);
    const int H = table.size();
    auto extrinsic = [&](const int* c, int h, int i) {
        double s = table.loglik[h];
        for (int r = 0; r < d; ++r) {
            if (r != i) s += agg[r][c[r]];
        }
        return s;
    };
    for (int h = 0; h < H; ++h) {
        const int* c = table.combo(h);
        for (int i = 0; i < d; ++i) {
            const double s = extrinsic(c, h, i);
            if (s > best[i][c[i]]) best[i][c[i]] = s;
        }
    }

    std::vector<std::vector<double>> out_alt;
    if (mode == FnMode::max_log) {
        out_alt = std::move(best);
        if (!table.complete) {
            std::vector<double> top(d);
            for (int i = 0; i < d; ++i) top[i] = *std::max_element(agg[i].begin(), agg[i].end());
            for (int i = 0; i < d; ++i) {
                double s = table.clamp_loglik;
                for (int r = 0; r < d; ++r) {
                    if (r != i) s += top[r];
                }
                for (auto& v : out_alt[i]) v = std::max(v, s);
            }
        }
    } else {
        std::vector<std::vector<double>> acc(d);
        for (int i = 0; i < d; ++i) acc[i].assign(table.alternatives[i], 0.0);
        for (int h = 0; h < H; ++h) {
            const int* c = table.combo(h);
            for (int i = 0; i < d; ++i) {
                const double ref = best[i][c[i]];
                if (std::isfinite(ref)) acc[i][c[i]] += std::exp(extrinsic(c, h, i) - ref);
            }
        }
        out_alt.resize(d);
        for (int i = 0; i < d; ++i) {
            out_alt[i].resize(table.alternatives[i]);
            for (int a = 0; a < table.alternatives[i]; ++a) {
                out_alt[i][a] = std::isfinite(best[i][a]) ? best[i][a] + std::log(acc[i][a]) : kNegInf;
            }
        }
    }

    outgoing.resize(d);
    for (int i = 0; i < d; ++i) {
        const auto& g = table.group[i];
        outgoing[i].resize(g.size());
        for (std::size_t m = 0; m < g.size(); ++m) outgoing[i][m] = out_alt[i][g[m]];
        normalize_max_zero(outgoing[i]);
    }
    return H;
}

FnNodeOutput fn_update_full(const FnNodeInput& in) {
    std::vector<std::vector<int>> identity(in.contributions.size());
    for (std::size_t i = 0; i < identity.size(); ++i) {
        identity[i].resize(in.contributions[i].size());
        for (std::size_t m = 0; m < identity[i].size(); ++m) identity[i][m] = static_cast<int>(m);
    }
    const auto table = full_table(in.y, in.contributions, identity, in.noise_var);
    FnNodeOutput out;
    out.hypotheses = fn_update(table, in.incoming, in.mode, out.outgoing);
    return out;
}

FnNodeOutput fn_update_projected(const FnNodeInput& in, const std::vector<std::vector<int>>& group) {
    if (group.size() != in.contributions.size()) {
        throw ParameterError("projection table does not cover every colliding user");
    }
    std::vector<CVec> values(group.size());
    for (std::size_t i = 0; i < group.size(); ++i) {
        const auto& g = group[i];
        const auto& c = in.contributions[i];
        if (g.size() != c.size()) throw ParameterError("projection table size mismatch");
        const int count = g.empty() ? 0 : *std::max_element(g.begin(), g.end()) + 1;
        values[i].assign(count, cplx{});
        std::vector<bool> seen(count, false);
        for (std::size_t m = 0; m < g.size(); ++m) {
            if (g[m] < 0) throw ParameterError("projection table has unassigned labels");
            if (!seen[g[m]]) {
                values[i][g[m]] = c[m];
                seen[g[m]] = true;
            } else if (std::abs(values[i][g[m]] - c[m]) > 1e-9 * (1.0 + std::abs(c[m]))) {
                throw ParameterError("labels grouped together carry different values");
            }
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
            throw ParameterError("projection table has empty value groups");
        }
    }
    const auto table = full_table(in.y, values, group, in.noise_var);
    FnNodeOutput out;
    out.hypotheses = fn_update(table, in.incoming, in.mode, out.outgoing);
    return out;
}

}  // namespace scma

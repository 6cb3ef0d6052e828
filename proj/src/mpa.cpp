#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpa_engine.hpp"
#include "scma/errors.hpp"
#include "scma/phy.hpp"

namespace scma {

namespace detail {

RowContributions row_contributions(const Codebook& cb, const Eigen::MatrixXcd& gains, int k,
                                   const std::vector<int>& users,
                                   const ProjectionTable* projection) {
    RowContributions rc;
    rc.users = users;
    for (int j : users) {
        const cplx h = gains(k, j);
        if (projection) {
            const int n = cb.fg.support_position(j, k);
            CVec vals;
            for (const auto& v : projection->values[j][n]) vals.push_back(h * v);
            rc.values.push_back(std::move(vals));
            rc.group.push_back(projection->group[j][n]);
        } else {
            CVec vals(cb.M);
            std::vector<int> g(cb.M);
            for (int m = 0; m < cb.M; ++m) {
                vals[m] = h * cb.words[j][m][k];
                g[m] = m;
            }
            rc.values.push_back(std::move(vals));
            rc.group.push_back(std::move(g));
        }
    }
    return rc;
}

std::vector<NodeTable> full_tables(const Codebook& cb, const Received& rx,
                                   const ProjectionTable* projection) {
    std::vector<NodeTable> out(cb.fg.K);
    for (int k = 0; k < cb.fg.K; ++k) {
        auto rc = row_contributions(cb, rx.gains, k, cb.fg.rows[k], projection);
        out[k].users = rc.users;
        out[k].table = full_table(rx.y[k], rc.values, rc.group, rx.noise_var);
    }
    return out;
}

MessagePassing::MessagePassing(const Codebook& cb, FnMode mode)
    : cb_(cb), mode_(mode), K_(cb.fg.K), J_(cb.fg.J), M_(cb.M) {
    fn_to_vn_.assign(static_cast<std::size_t>(K_) * J_, std::vector<double>(M_, 0.0));
    vn_to_fn_ = fn_to_vn_;
    prob_.assign(J_, std::vector<double>(M_, 1.0 / M_));
    fixed_.assign(J_, false);
}

void MessagePassing::set_tables(std::vector<NodeTable> tables) { tables_ = std::move(tables); }

double MessagePassing::iterate() {
    std::vector<std::vector<double>> incoming;
    std::vector<std::vector<double>> outgoing;
    for (int k = 0; k < K_; ++k) {
        const auto& node = tables_[k];
        if (node.users.empty()) continue;
        incoming.resize(node.users.size());
        for (std::size_t i = 0; i < node.users.size(); ++i) incoming[i] = vn_to_fn(k, node.users[i]);
        hypotheses_ += fn_update(node.table, incoming, mode_, outgoing);
        for (std::size_t i = 0; i < node.users.size(); ++i) fn_to_vn(k, node.users[i]) = outgoing[i];
    }

    double change = 0.0;
    std::vector<double> total(M_);
    for (int j = 0; j < J_; ++j) {
        if (fixed_[j]) continue;
        std::fill(total.begin(), total.end(), 0.0);
        for (int k : cb_.fg.supports[j]) {
            const auto& msg = fn_to_vn(k, j);
            for (int m = 0; m < M_; ++m) total[m] += msg[m];
        }
        const double mx = *std::max_element(total.begin(), total.end());
        double z = 0.0;
        std::vector<double> p(M_);
        for (int m = 0; m < M_; ++m) {
            p[m] = std::exp(total[m] - mx);
            z += p[m];
        }
        for (int m = 0; m < M_; ++m) {
            p[m] /= z;
            change = std::max(change, std::abs(p[m] - prob_[j][m]));
        }
        prob_[j] = std::move(p);
        for (int k : cb_.fg.supports[j]) {
            auto& out = vn_to_fn(k, j);
            const auto& in = fn_to_vn(k, j);
            double omx = -std::numeric_limits<double>::infinity();
            for (int m = 0; m < M_; ++m) {
                out[m] = total[m] - in[m];
                omx = std::max(omx, out[m]);
            }
            for (int m = 0; m < M_; ++m) out[m] -= omx;
        }
    }
    return change;
}

void finalize(const Codebook& cb, DecodeResult& result) {
    const int J = static_cast<int>(result.posteriors.size());
    result.symbols.assign(J, 0);
    result.hard_bits.assign(J, {});
    for (int j = 0; j < J; ++j) {
        const auto& p = result.posteriors[j];
        result.symbols[j] = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
        result.hard_bits[j] = bits_for_symbol(result.symbols[j], cb);
    }
}

}  // namespace detail

namespace {

void check_inputs(const Codebook& cb, const Received& rx, int max_iters) {
    if (static_cast<int>(rx.y.size()) != cb.fg.K) throw DimensionError("received vector length != K");
    if (rx.gains.rows() != cb.fg.K || rx.gains.cols() != cb.fg.J) {
        throw DimensionError("gain matrix must be K x J");
    }
    if (max_iters < 1) throw ParameterError("max_iters must be >= 1");
    if (!(rx.noise_var > 0.0)) throw ParameterError("noise_var must be positive");
}

DecodeResult run_flooding(const Codebook& cb, std::vector<detail::NodeTable> tables, FnMode mode,
                          int max_iters) {
    detail::MessagePassing mp(cb, mode);
    mp.set_tables(std::move(tables));
    DecodeResult r;
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

}  // namespace

DecodeResult mpa_decode(const Codebook& cb, const Received& rx, int max_iters) {
    check_inputs(cb, rx, max_iters);
    return run_flooding(cb, detail::full_tables(cb, rx), FnMode::sum_product, max_iters);
}

DecodeResult max_log_mpa(const Codebook& cb, const Received& rx, int max_iters) {
    check_inputs(cb, rx, max_iters);
    return run_flooding(cb, detail::full_tables(cb, rx), FnMode::max_log, max_iters);
}

DecodeResult projected_mpa(const Codebook& cb, const Received& rx, int max_iters, FnMode mode) {
    check_inputs(cb, rx, max_iters);
    const auto projection = build_projection_table(cb);
    return run_flooding(cb, detail::full_tables(cb, rx, &projection), mode, max_iters);
}

DecodeResult pm_mpa(const Codebook& cb, const Received& rx, int t_judge, int n_judge,
                    int max_iters) {
    check_inputs(cb, rx, max_iters);
    const int J = cb.fg.J;
    if (n_judge < 0 || n_judge > J) throw ParameterError("n_judge must lie in [0, J]");
    if (t_judge < 1 || t_judge > max_iters) throw ParameterError("t_judge must lie in [1, max_iters]");

    detail::MessagePassing mp(cb, FnMode::max_log);
    mp.set_tables(detail::full_tables(cb, rx));
    DecodeResult r;
    std::vector<int> decided(J, -1);
    for (int it = 1; it <= max_iters; ++it) {
        const double change = mp.iterate();
        r.iterations_used = it;
        if (change < kConvergenceTol) break;
        if (it != t_judge || n_judge == 0) continue;

        // rank by convergence metric: max posterior probability
        const auto& post = mp.posteriors();
        std::vector<int> order(J);
        std::iota(order.begin(), order.end(), 0);
        std::vector<double> conf(J);
        for (int j = 0; j < J; ++j) conf[j] = *std::max_element(post[j].begin(), post[j].end());
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return conf[a] > conf[b]; });
        for (int t = 0; t < n_judge; ++t) {
            const int j = order[t];
            const auto& p = post[j];
            decided[j] = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
            mp.fix(j);
        }

        // cancel decided users and rebuild the residual graph
        Received residual = rx;
        std::vector<detail::NodeTable> tables(cb.fg.K);
        for (int k = 0; k < cb.fg.K; ++k) {
            std::vector<int> remaining;
            for (int j : cb.fg.rows[k]) {
                if (decided[j] >= 0) {
                    residual.y[k] -= rx.gains(k, j) * cb.words[j][decided[j]][k];
                } else {
                    remaining.push_back(j);
                }
            }
            auto rc = detail::row_contributions(cb, rx.gains, k, remaining, nullptr);
            tables[k].users = rc.users;
            tables[k].table = full_table(residual.y[k], rc.values, rc.group, rx.noise_var);
        }
        mp.set_tables(std::move(tables));
        if (n_judge == J) break;
    }
    r.posteriors = mp.posteriors();
    r.hypotheses_evaluated = mp.hypotheses();
    detail::finalize(cb, r);
    return r;
}

}  // namespace scma

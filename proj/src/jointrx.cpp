#include "scma/jointrx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scma/errors.hpp"

namespace scma {

GaussianMsg ep_project(std::span<const MixtureComponent> mixture) {
    double z = 0.0;
    for (const auto& c : mixture) {
        if (!(c.weight >= 0.0)) throw ParameterError("mixture weights must be non-negative");
        z += c.weight;
    }
    if (!(z > 0.0)) throw ParameterError("mixture weights sum to zero");
    cplx mean{};
    for (const auto& c : mixture) mean += c.weight * c.mean;
    mean /= z;
    // central second moment, so no cancellation against |mean|^2
    double var = 0.0;
    for (const auto& c : mixture) var += c.weight * (c.var + std::norm(c.mean - mean));
    var /= z;
    return {mean, std::max(var, kVarianceFloor)};
}

std::vector<GaussianMsg> likelihood_update(cplx y, std::span<const GaussianMsg> incoming,
                                           double noise_var) {
    if (incoming.empty()) throw ParameterError("likelihood_update needs at least one belief");
    cplx total_mean{};
    double total_var = 0.0;
    for (const auto& m : incoming) {
        total_mean += m.mean;
        total_var += m.var;
    }
    std::vector<GaussianMsg> out(incoming.size());
    for (std::size_t i = 0; i < incoming.size(); ++i) {
        out[i].mean = y - (total_mean - incoming[i].mean);
        out[i].var = std::max(noise_var + (total_var - incoming[i].var), kVarianceFloor);
    }
    return out;
}

std::vector<double> codeword_loglik(const Codebook& cb, int user,
                                    std::span<const GaussianMsg> extrinsic,
                                    std::span<const cplx> gain_mean,
                                    std::span<const double> gain_var,
                                    std::vector<std::vector<double>>* per_position) {
    const int N = cb.fg.N;
    if (static_cast<int>(extrinsic.size()) != N || static_cast<int>(gain_mean.size()) != N ||
        static_cast<int>(gain_var.size()) != N) {
        throw DimensionError("one extrinsic and gain per support position required");
    }
    std::vector<double> ll(cb.M + 1, 0.0);
    if (per_position) per_position->assign(N, std::vector<double>(cb.M + 1, 0.0));
    for (int n = 0; n < N; ++n) {
        const int k = cb.fg.supports[user][n];
        const auto& e = extrinsic[n];
        for (int m = 0; m <= cb.M; ++m) {
            const cplx x = m < cb.M ? cb.words[user][m][k] : cplx{};
            const double v = e.var + gain_var[n] * std::norm(x);
            const double term = -std::norm(e.mean - gain_mean[n] * x) / v - std::log(v);
            ll[m] += term;
            if (per_position) (*per_position)[n][m] = term;
        }
    }
    return ll;
}

DataPosterior data_message(const std::vector<std::vector<double>>& slot_loglik, double prior_active) {
    if (!(prior_active > 0.0 && prior_active < 1.0)) throw ParameterError("prior_active must lie in (0, 1)");
    DataPosterior out;
    out.activity_llr = std::log(prior_active) - std::log1p(-prior_active);
    std::vector<double> active_ll(slot_loglik.size());
    for (std::size_t t = 0; t < slot_loglik.size(); ++t) {
        const auto& ll = slot_loglik[t];
        const int M = static_cast<int>(ll.size()) - 1;
        std::vector<double> words(ll.begin(), ll.end() - 1);
        active_ll[t] = log_sum_exp(words) - std::log(static_cast<double>(M));
        out.activity_llr += active_ll[t] - ll[M];
    }
    // P(active) via a stable logistic
    const double llr = out.activity_llr;
    const double p_active = llr >= 0 ? 1.0 / (1.0 + std::exp(-llr)) : std::exp(llr) / (1.0 + std::exp(llr));
    out.slots.resize(slot_loglik.size());
    for (std::size_t t = 0; t < slot_loglik.size(); ++t) {
        const auto& ll = slot_loglik[t];
        const int M = static_cast<int>(ll.size()) - 1;
        auto& post = out.slots[t];
        post.assign(M + 1, 0.0);
        const double mx = *std::max_element(ll.begin(), ll.end() - 1);
        double z = 0.0;
        for (int m = 0; m < M; ++m) {
            post[m] = std::exp(ll[m] - mx);
            z += post[m];
        }
        for (int m = 0; m < M; ++m) post[m] *= p_active / z;
        post[M] = 1.0 - p_active;
    }
    return out;
}

ChannelPosterior gaussian_posterior(const ChannelObservations& obs, const Eigen::VectorXd& precision) {
    const auto n = obs.gram.rows();
    if (obs.gram.cols() != n || obs.rhs.size() != n || precision.size() != n) {
        throw DimensionError("observation and precision sizes disagree");
    }
    Eigen::MatrixXcd P = obs.gram;
    for (Eigen::Index i = 0; i < n; ++i) P(i, i) += precision(i);
    Eigen::LLT<Eigen::MatrixXcd> llt(P);
    if (llt.info() != Eigen::Success) throw ParameterError("singular channel precision");
    ChannelPosterior out;
    out.cov = llt.solve(Eigen::MatrixXcd::Identity(n, n));
    out.mean = llt.solve(obs.rhs);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.cov(i, i) = std::max(out.cov(i, i).real(), kVarianceFloor);
    }
    return out;
}

namespace {

void check_frame(const Frame& frame, const PilotBook& pilots, const Codebook& cb) {
    if (frame.pilot_slots != pilots.slots) throw DimensionError("frame and pilot book slot counts differ");
    if (static_cast<int>(frame.received.size()) != frame.pilot_slots + frame.data_slots) {
        throw DimensionError("frame slot count mismatch");
    }
    for (const auto& y : frame.received) {
        if (static_cast<int>(y.size()) != cb.fg.K) throw DimensionError("received vector length != K");
    }
    if (static_cast<int>(pilots.symbols.size()) != cb.fg.J) throw DimensionError("pilot book user count != J");
}

}  // namespace

ChannelObservations channel_observations(const Frame& frame, const PilotBook& pilots,
                                         const Codebook& cb, const Eigen::MatrixXcd& phi,
                                         const SymbolBeliefs& beliefs, const Eigen::MatrixXd& gain_power) {
    const int K = cb.fg.K;
    const int J = cb.fg.J;
    const auto L = phi.cols();
    const auto n = J * L;
    if (!(frame.noise_var > 0.0)) throw ParameterError("noise_var must be positive");
    ChannelObservations obs{Eigen::MatrixXcd::Zero(n, n), Eigen::VectorXcd::Zero(n)};
    Eigen::VectorXcd a(n);
    const double w_pilot = 1.0 / frame.noise_var;
    for (int t = 0; t < frame.pilot_slots; ++t) {
        std::vector<CVec> words(J);
        for (int j = 0; j < J; ++j) words[j] = pilot_word(pilots, cb.fg, j, t);
        for (int k = 0; k < K; ++k) {
            for (int j = 0; j < J; ++j) a.segment(j * L, L) = phi.row(k).transpose() * words[j][k];
            obs.gram.noalias() += w_pilot * (a.conjugate() * a.transpose());
            obs.rhs.noalias() += w_pilot * (a.conjugate() * frame.received[t][k]);
        }
    }
    if (beliefs.empty()) return obs;
    if (static_cast<int>(beliefs.size()) != J) throw DimensionError("symbol belief user count != J");
    if (gain_power.rows() != K || gain_power.cols() != J) throw DimensionError("gain_power must be K x J");

    for (int d = 0; d < frame.data_slots; ++d) {
        const auto& y = frame.received[frame.pilot_slots + d];
        for (int k = 0; k < K; ++k) {
            a.setZero();
            double s = frame.noise_var;
            for (int j : cb.fg.rows[k]) {
                const auto& q = beliefs[j][d][cb.fg.support_position(j, k)];
                cplx mean{};
                double second = 0.0;
                for (int m = 0; m < cb.M; ++m) {
                    const cplx x = cb.words[j][m][k];
                    mean += q[m] * x;
                    second += q[m] * std::norm(x);
                }
                a.segment(j * L, L) = phi.row(k).transpose() * mean;
                s += gain_power(k, j) * std::max(0.0, second - std::norm(mean));
            }
            obs.gram.noalias() += (a.conjugate() * a.transpose()) / s;
            obs.rhs.noalias() += a.conjugate() * (y[k] / s);
        }
    }
    return obs;
}

ChannelPosterior channel_message(const Frame& frame, const PilotBook& pilots, const Codebook& cb,
                                 const Eigen::MatrixXcd& phi, const SymbolBeliefs& beliefs,
                                 const Eigen::MatrixXd& gain_power, const Eigen::VectorXd& precision) {
    return gaussian_posterior(channel_observations(frame, pilots, cb, phi, beliefs, gain_power), precision);
}

Eigen::VectorXd precision_update(const Eigen::VectorXd& second_moments, const SparsePrior& prior) {
    if (!(prior.a > 0.0 && prior.b > 0.0)) throw ParameterError("prior a and b must be positive");
    Eigen::VectorXd out(second_moments.size());
    for (Eigen::Index i = 0; i < second_moments.size(); ++i) {
        if (second_moments(i) < 0.0) throw ParameterError("second moments must be non-negative");
        out(i) = (prior.a + 1.0) / (prior.b + second_moments(i));
    }
    return out;
}

std::vector<bool> activity_detect(std::span<const double> scores, double noise_var, double gamma) {
    if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
    std::vector<bool> out(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j) out[j] = scores[j] > gamma * noise_var;
    return out;
}

std::vector<DecodeResult> decode_data_slots(const Frame& frame, const Codebook& cb,
                                            const Eigen::MatrixXcd& gains,
                                            const std::vector<bool>& active, int mpa_iters) {
    Received rx;
    rx.gains = gains;
    rx.noise_var = frame.noise_var;
    for (int j = 0; j < cb.fg.J; ++j) {
        if (!active[j]) rx.gains.col(j).setZero();
    }
    std::vector<DecodeResult> out;
    out.reserve(frame.data_slots);
    for (int d = 0; d < frame.data_slots; ++d) {
        rx.y = frame.received[frame.pilot_slots + d];
        out.push_back(max_log_mpa(cb, rx, mpa_iters));
    }
    return out;
}

namespace {

// Message from u towards the likelihood node: the tilted belief (incoming
// extrinsic times the codeword mixture) is projected and the extrinsic is
// divided back out. Falls back to the plain projection when the division
// leaves no positive precision.
GaussianMsg ep_message(std::span<const MixtureComponent> prior, const GaussianMsg& ext,
                       std::vector<MixtureComponent>& tilted) {
    tilted.assign(prior.begin(), prior.end());
    double top = -std::numeric_limits<double>::infinity();
    for (auto& c : tilted) {
        if (!(c.weight > 0.0)) continue;
        const double v = ext.var + c.var;
        const double lw = std::log(c.weight) - std::norm(ext.mean - c.mean) / v - std::log(v);
        c.mean = (c.var * ext.mean + ext.var * c.mean) / v;
        c.var = ext.var * c.var / v;
        c.weight = lw;
        top = std::max(top, lw);
    }
    for (std::size_t i = 0; i < tilted.size(); ++i) {
        tilted[i].weight = prior[i].weight > 0.0 ? std::exp(tilted[i].weight - top) : 0.0;
    }
    const auto post = ep_project(tilted);
    const double precision = 1.0 / post.var - 1.0 / ext.var;
    if (!(precision > 1e-12 / ext.var)) return ep_project(prior);
    const double var = 1.0 / precision;
    return {var * (post.mean / post.var - ext.mean / ext.var), std::max(var, kVarianceFloor)};
}

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

Eigen::MatrixXcd gains_from_taps(const Eigen::MatrixXcd& phi, const Eigen::VectorXcd& taps, int J) {
    const auto L = phi.cols();
    Eigen::MatrixXcd g(phi.rows(), J);
    for (int j = 0; j < J; ++j) g.col(j) = phi * taps.segment(j * L, L);
    return g;
}

std::vector<double> tap_energy(const Eigen::VectorXcd& taps, int J, Eigen::Index L) {
    std::vector<double> e(J, 0.0);
    for (int j = 0; j < J; ++j) e[j] = taps.segment(j * L, L).squaredNorm();
    return e;
}

}  // namespace

JointOutput joint_decode(const Frame& frame, const PilotBook& pilots, const Codebook& cb,
                         const JointConfig& cfg) {
    check_frame(frame, pilots, cb);
    if (cfg.L < 1 || cfg.L > cb.fg.N) throw ParameterError("L must lie in [1, N]");
    if (cfg.max_outer_iters < 1) throw ParameterError("max_outer_iters must be >= 1");
    if (!(cfg.damping >= 0.0 && cfg.damping < 1.0)) throw ParameterError("damping must lie in [0, 1)");
    const int K = cb.fg.K;
    const int J = cb.fg.J;
    const int M = cb.M;
    const int L = cfg.L;
    const int T = frame.data_slots;
    const auto phi = dft_matrix(K, L);

    JointOutput out;
    auto& st = out.state;
    st.precision = Eigen::VectorXd::Zero(J * L);
    st.channel = channel_message(frame, pilots, cb, phi, {}, {}, st.precision);
    std::vector<double> prior_word(M + 1, cfg.prior_active / M);
    prior_word[M] = 1.0 - cfg.prior_active;
    st.data_post.assign(J, std::vector<std::vector<double>>(T, prior_word));
    st.u.assign(T, std::vector<std::vector<GaussianMsg>>(K));
    // codeword beliefs sent towards each subcarrier; entry n leaves out the
    // evidence of the user's n-th subcarrier
    SymbolBeliefs row_beliefs(J, std::vector<std::vector<std::vector<double>>>(
                                     T, std::vector<std::vector<double>>(cb.fg.N, prior_word)));

    SymbolBeliefs active_beliefs = row_beliefs;
    std::vector<MixtureComponent> mix(M + 1);
    std::vector<MixtureComponent> tilted(M + 1);
    // extrinsics of the previous pass, [slot][subcarrier][row position]
    std::vector<std::vector<std::vector<GaussianMsg>>> ext_prev(T, std::vector<std::vector<GaussianMsg>>(K));
    std::vector<GaussianMsg> ext_n(cb.fg.N);
    std::vector<cplx> g_n(cb.fg.N);
    std::vector<double> v_n(cb.fg.N);
    for (int it = 1; it <= cfg.max_outer_iters; ++it) {
        st.outer_iterations = it;
        if (cfg.sparse_prior) {
            Eigen::VectorXd second(J * L);
            for (int i = 0; i < J * L; ++i) second(i) = std::norm(st.channel.mean(i)) + st.channel.cov(i, i).real();
            st.precision = precision_update(second, cfg.prior);
        }

        // frequency-domain gain beliefs
        Eigen::MatrixXcd g(K, J);
        Eigen::MatrixXd gv(K, J);
        for (int j = 0; j < J; ++j) {
            const auto block = st.channel.cov.block(j * L, j * L, L, L);
            for (int k = 0; k < K; ++k) {
                g(k, j) = phi.row(k) * st.channel.mean.segment(j * L, L);
                gv(k, j) = std::max((phi.row(k) * block * phi.row(k).adjoint())(0, 0).real(), 0.0);
            }
        }

        // product-variable messages: EP on the codeword mixture, plain
        // projection on the first pass
        std::vector<std::vector<std::vector<double>>> slot_ll(J, std::vector<std::vector<double>>(T));
        SymbolBeliefs terms(J, std::vector<std::vector<std::vector<double>>>(T));
        for (int d = 0; d < T; ++d) {
            const auto& y = frame.received[frame.pilot_slots + d];
            std::vector<std::vector<GaussianMsg>> ext(K);
            for (int k = 0; k < K; ++k) {
                const auto& row = cb.fg.rows[k];
                auto& beliefs = st.u[d][k];
                std::vector<GaussianMsg> fresh(row.size());
                for (std::size_t i = 0; i < row.size(); ++i) {
                    const int j = row[i];
                    const auto& q = row_beliefs[j][d][cb.fg.support_position(j, k)];
                    for (int m = 0; m < M; ++m) {
                        const cplx x = cb.words[j][m][k];
                        mix[m] = {q[m], g(k, j) * x, gv(k, j) * std::norm(x)};
                    }
                    mix[M] = {q[M], cplx{}, 0.0};
                    fresh[i] = it == 1 ? ep_project(mix) : ep_message(mix, ext_prev[d][k][i], tilted);
                }
                if (beliefs.empty() || it == 1) {
                    beliefs = fresh;
                } else {
                    for (std::size_t i = 0; i < row.size(); ++i) {
                        beliefs[i].mean = cfg.damping * beliefs[i].mean + (1.0 - cfg.damping) * fresh[i].mean;
                        beliefs[i].var = cfg.damping * beliefs[i].var + (1.0 - cfg.damping) * fresh[i].var;
                    }
                }
                ext[k] = likelihood_update(y[k], beliefs, frame.noise_var);
                ext_prev[d][k] = ext[k];
            }
            for (int j = 0; j < J; ++j) {
                for (int n = 0; n < cb.fg.N; ++n) {
                    const int k = cb.fg.supports[j][n];
                    const int pos = static_cast<int>(
                        std::find(cb.fg.rows[k].begin(), cb.fg.rows[k].end(), j) - cb.fg.rows[k].begin());
                    ext_n[n] = ext[k][pos];
                    g_n[n] = g(k, j);
                    v_n[n] = gv(k, j);
                }
                slot_ll[j][d] = codeword_loglik(cb, j, ext_n, g_n, v_n, &terms[j][d]);
            }
        }
        std::vector<double> activity_llr(J);
        for (int j = 0; j < J; ++j) {
            auto dm = data_message(slot_ll[j], cfg.prior_active);
            st.data_post[j] = std::move(dm.slots);
            activity_llr[j] = dm.activity_llr;
        }

        // per-row extrinsic codeword beliefs: remove the row's own term. This
        // stays in the log domain; dividing an underflowed posterior by its
        // own likelihood would promote the wrong codeword at high SNR. The
        // channel update regresses on the beliefs given activity, so a user
        // whose activity is still doubtful keeps learning its channel.
        for (int j = 0; j < J; ++j) {
            const double log_active = log_sigmoid(activity_llr[j]);
            const double log_silent = log_sigmoid(-activity_llr[j]);
            for (int d = 0; d < T; ++d) {
                const auto& ll = slot_ll[j][d];
                const double words_z = log_sum_exp(std::vector<double>(ll.begin(), ll.end() - 1));
                auto& rb = row_beliefs[j][d];
                auto& cb_n = active_beliefs[j][d];
                rb.assign(cb.fg.N, std::vector<double>(M + 1, 0.0));
                cb_n.assign(cb.fg.N, std::vector<double>(M + 1, 0.0));
                for (int n = 0; n < cb.fg.N; ++n) {
                    const auto& own = terms[j][d][n];
                    std::vector<double> lg(M + 1);
                    for (int m = 0; m < M; ++m) lg[m] = log_active - words_z + ll[m] - own[m];
                    lg[M] = log_silent - own[M];
                    const double z = log_sum_exp(lg);
                    for (int m = 0; m <= M; ++m) rb[n][m] = std::exp(lg[m] - z);
                    const double za = log_sum_exp(std::vector<double>(lg.begin(), lg.end() - 1));
                    for (int m = 0; m < M; ++m) cb_n[n][m] = std::exp(lg[m] - za);
                }
            }
        }

        const Eigen::VectorXcd previous = st.channel.mean;
        const Eigen::MatrixXd power = g.cwiseAbs2() + gv;
        st.channel = channel_message(frame, pilots, cb, phi, active_beliefs, power, st.precision);
        const double change = (st.channel.mean - previous).cwiseAbs().maxCoeff();
        if (change < cfg.tol) break;
    }

    // inactive users have a zero channel, so the energy is gated by the
    // packet-level activity posterior
    st.activity_prob.assign(J, 0.0);
    st.scores.assign(J, 0.0);
    for (int j = 0; j < J; ++j) {
        st.activity_prob[j] = T > 0 ? 1.0 - st.data_post[j][0][M] : 1.0;
        st.scores[j] = st.activity_prob[j] * st.channel.mean.segment(j * L, L).squaredNorm();
    }
    out.rx.activity.scores = st.scores;
    out.rx.activity.active = activity_detect(st.scores, frame.noise_var, cfg.gamma);
    out.rx.gains = gains_from_taps(phi, st.channel.mean, J);
    out.rx.slots = decode_data_slots(frame, cb, out.rx.gains, out.rx.activity.active, cfg.mpa_iters);
    return out;
}

ReceiverOutput pilot_only_decode(const Frame& frame, const PilotBook& pilots, const Codebook& cb,
                                 const JointConfig& cfg) {
    check_frame(frame, pilots, cb);
    const int K = cb.fg.K;
    const int J = cb.fg.J;
    const int L = cfg.L;
    const auto phi = dft_matrix(K, L);
    Eigen::MatrixXcd A(frame.pilot_slots * K, J * L);
    Eigen::VectorXcd y(frame.pilot_slots * K);
    for (int t = 0; t < frame.pilot_slots; ++t) {
        for (int j = 0; j < J; ++j) {
            const auto w = pilot_word(pilots, cb.fg, j, t);
            for (int k = 0; k < K; ++k) A.block(t * K + k, j * L, 1, L) = phi.row(k) * w[k];
        }
        for (int k = 0; k < K; ++k) y(t * K + k) = frame.received[t][k];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
    if (qr.rank() < J * L) throw ParameterError("pilot matrix is rank deficient");
    const Eigen::VectorXcd taps = qr.solve(y);

    ReceiverOutput out;
    out.activity.scores = tap_energy(taps, J, L);
    out.activity.active = activity_detect(out.activity.scores, frame.noise_var, cfg.gamma);
    out.gains = gains_from_taps(phi, taps, J);
    out.slots = decode_data_slots(frame, cb, out.gains, out.activity.active, cfg.mpa_iters);
    return out;
}

ReceiverOutput genie_decode(const Frame& frame, const Eigen::MatrixXcd& gains,
                            const std::vector<bool>& active, const Codebook& cb, int mpa_iters) {
    ReceiverOutput out;
    out.activity.active = active;
    out.activity.scores.resize(active.size());
    for (std::size_t j = 0; j < active.size(); ++j) {
        out.activity.scores[j] = active[j] ? gains.col(static_cast<Eigen::Index>(j)).squaredNorm() : 0.0;
    }
    out.gains = gains;
    out.slots = decode_data_slots(frame, cb, gains, active, mpa_iters);
    return out;
}

Packet make_packet(const Codebook& cb, const PilotBook& pilots, int L, int packet_bits,
                   double p_active, double noise_var, Rng& rng) {
    const int K = cb.fg.K;
    const int J = cb.fg.J;
    const int nb = cb.bits_per_symbol();
    if (packet_bits < nb || packet_bits % nb != 0) {
        throw ParameterError("packet_bits must be a positive multiple of log2(M)");
    }
    if (p_active < 0.0 || p_active > 1.0) throw ParameterError("p_active must lie in [0, 1]");
    const int T = packet_bits / nb;

    Packet p;
    p.channel = make_channel(ChannelModel::tapped_delay, K, J, L, rng);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    p.active.resize(J);
    for (int j = 0; j < J; ++j) p.active[j] = uni(rng) < p_active;
    p.bits.assign(J, std::vector<int>(packet_bits, 0));
    p.symbols.assign(J, std::vector<int>(T, 0));
    for (int j = 0; j < J; ++j) {
        for (auto& b : p.bits[j]) b = coin(rng) ? 1 : 0;
        for (int t = 0; t < T; ++t) {
            p.symbols[j][t] = symbol_for_bits(std::span<const int>(p.bits[j]).subspan(t * nb, nb), cb);
        }
    }

    p.frame.pilot_slots = pilots.slots;
    p.frame.data_slots = T;
    p.frame.noise_var = noise_var;
    std::vector<CVec> words(J);
    for (int t = 0; t < pilots.slots; ++t) {
        for (int j = 0; j < J; ++j) words[j] = p.active[j] ? pilot_word(pilots, cb.fg, j, t) : CVec(K);
        p.frame.received.push_back(superimpose(words, p.channel, noise_var, rng));
    }
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < J; ++j) words[j] = p.active[j] ? cb.words[j][p.symbols[j][t]] : CVec(K);
        p.frame.received.push_back(superimpose(words, p.channel, noise_var, rng));
    }
    return p;
}

}  // namespace scma

#include "scma/harness.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "scma/errors.hpp"
#include "scma/parallel.hpp"
#include "scma/stats.hpp"

namespace scma {

void ResultTable::write_csv(std::ostream& os) const {
    auto line = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            const auto& c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos) {
                os << '"';
                for (char ch : c) {
                    if (ch == '"') os << '"';
                    os << ch;
                }
                os << '"';
            } else {
                os << c;
            }
        }
        os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
}

std::string ResultTable::csv() const {
    std::ostringstream os;
    write_csv(os);
    return os.str();
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
    return std::string(buf, ptr);
}

Codebook make_codebook(const ExperimentConfig& cfg) {
    if (cfg.codebook_scheme == "file") {
        std::ifstream in(cfg.codebook_file);
        if (!in) throw ConfigError("cannot open codebook file " + cfg.codebook_file);
        return read_codebook(in);
    }
    const auto fg = build_factor_graph(cfg.K, cfg.N, cfg.J);
    if (cfg.codebook_scheme == "low_projection") return build_low_projection_codebook(fg, cfg.M, 3);
    return build_star_qam_codebook(fg, cfg.M,
                                   cfg.codebook_labeling == "gray" ? Labeling::gray : Labeling::natural);
}

bool is_tree_decoder(const std::string& tag) {
    return tag == "lsd" || tag == "np_lsd" || tag == "lsd_proj" || tag == "np_lsd_proj";
}

DecodeResult run_decoder(const std::string& tag, const Codebook& cb, const Received& rx,
                         const ExperimentConfig& cfg) {
    if (tag == "mpa") return mpa_decode(cb, rx, cfg.max_iters);
    if (tag == "max_log") return max_log_mpa(cb, rx, cfg.max_iters);
    if (tag == "projected") return projected_mpa(cb, rx, cfg.max_iters);
    if (tag == "pm") return pm_mpa(cb, rx, cfg.pm_t_judge, cfg.pm_n_judge, cfg.max_iters);
    if (tag == "lsd") return lsd_mpa(cb, rx, cfg.list_size, cfg.max_iters);
    if (tag == "np_lsd") return np_lsd_mpa(cb, rx, cfg.list_size, cfg.np_rounds, cfg.max_iters);
    if (tag == "lsd_proj") return lsd_mpa(cb, rx, cfg.list_size, cfg.max_iters, true);
    if (tag == "np_lsd_proj") return np_lsd_mpa(cb, rx, cfg.list_size, cfg.np_rounds, cfg.max_iters, true);
    throw ConfigError("unknown decoder " + tag);
}

namespace {

ChannelModel channel_model(const std::string& tag) {
    if (tag == "awgn") return ChannelModel::awgn;
    if (tag == "tapped_delay") return ChannelModel::tapped_delay;
    return ChannelModel::rayleigh_iid;
}

struct FrameResult {
    std::vector<long> bit_errors;
    std::vector<std::vector<long>> visited;
};

}  // namespace

std::vector<LinkPoint> simulate_link(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto cb = make_codebook(cfg);
    const int K = cb.fg.K;
    const int J = cb.fg.J;
    const int nb = cb.bits_per_symbol();
    const int dc = cb.fg.max_row_weight();
    const auto model = channel_model(cfg.channel);
    const auto n_dec = cfg.decoders.size();

    std::vector<LinkPoint> out;
    for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
        const double nv = calibrate_noise(cfg.snr_db[s], cb);
        const auto stream = mix_seed(cfg.seed, s);
        auto trial = [&](std::int64_t f) {
            Rng rng = trial_rng(stream, static_cast<std::uint64_t>(f));
            const auto ch = make_channel(model, K, J, cfg.channel_L, rng);
            std::uniform_int_distribution<int> sym(0, cb.M - 1);
            std::vector<int> tx(J);
            std::vector<CVec> words(J);
            for (int j = 0; j < J; ++j) {
                tx[j] = sym(rng);
                words[j] = cb.words[j][tx[j]];
            }
            Received rx{superimpose(words, ch, nv, rng), ch.gains, nv};
            FrameResult r;
            r.bit_errors.assign(n_dec, 0);
            r.visited.assign(n_dec, std::vector<long>(dc, 0));
            for (std::size_t d = 0; d < n_dec; ++d) {
                const auto res = run_decoder(cfg.decoders[d], cb, rx, cfg);
                for (int j = 0; j < J; ++j) {
                    const auto truth = bits_for_symbol(tx[j], cb);
                    for (int b = 0; b < nb; ++b) r.bit_errors[d] += truth[b] != res.hard_bits[j][b];
                }
                for (const auto& levels : res.visited_nodes) {
                    for (std::size_t l = 0; l < levels.size(); ++l) r.visited[d][l] += levels[l];
                }
            }
            return r;
        };
        const auto frames = run_trials<FrameResult>(cfg.frames, cfg.workers, trial);

        LinkPoint p;
        p.snr_db = cfg.snr_db[s];
        p.frames = cfg.frames;
        p.total_bits = cfg.frames * J * nb;
        p.bit_errors.assign(n_dec, 0);
        p.visited.assign(n_dec, std::vector<long>(dc, 0));
        for (const auto& f : frames) {
            for (std::size_t d = 0; d < n_dec; ++d) {
                p.bit_errors[d] += f.bit_errors[d];
                for (int l = 0; l < dc; ++l) p.visited[d][l] += f.visited[d][l];
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

ResultTable run_ber(const ExperimentConfig& cfg) {
    const auto points = simulate_link(cfg);
    ResultTable t;
    t.header = {"snr_db", "decoder", "frames", "total_bits", "bit_errors", "ber", "ci95_lo", "ci95_hi", "seed"};
    for (const auto& p : points) {
        for (std::size_t d = 0; d < cfg.decoders.size(); ++d) {
            const auto ci = wilson_interval(p.bit_errors[d], p.total_bits);
            t.rows.push_back({format_double(p.snr_db), cfg.decoders[d], std::to_string(p.frames),
                              std::to_string(p.total_bits), std::to_string(p.bit_errors[d]),
                              format_double(static_cast<double>(p.bit_errors[d]) / p.total_bits),
                              format_double(ci.lo), format_double(ci.hi), std::to_string(cfg.seed)});
        }
    }
    return t;
}

ResultTable run_nodes(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    c.decoders.clear();
    for (const auto& d : cfg.decoders) {
        if (is_tree_decoder(d)) c.decoders.push_back(d);
    }
    if (c.decoders.empty()) throw ConfigError("nodes experiment needs at least one tree-search decoder");
    const auto points = simulate_link(c);
    ResultTable t;
    t.header = {"snr_db", "decoder", "level", "avg_visited_nodes", "frames", "seed"};
    for (const auto& p : points) {
        for (std::size_t d = 0; d < c.decoders.size(); ++d) {
            for (std::size_t l = 0; l < p.visited[d].size(); ++l) {
                const double avg = static_cast<double>(p.visited[d][l]) / (static_cast<double>(p.frames) * c.K);
                t.rows.push_back({format_double(p.snr_db), c.decoders[d], std::to_string(l + 1),
                                  format_double(avg), std::to_string(p.frames), std::to_string(c.seed)});
            }
        }
    }
    return t;
}

std::vector<GrantFreeCell> simulate_grantfree(const ExperimentConfig& cfg) {
    validate(cfg);
    struct CellSpec {
        std::string traffic;
        double p;
        TrafficModel model;
    };
    std::vector<CellSpec> specs;
    for (const auto& tr : cfg.gf_traffic) {
        if (tr == "bernoulli") {
            for (double p : cfg.gf_p_active) specs.push_back({tr, p, TrafficModel::bernoulli(p)});
        } else {
            specs.push_back({tr, cfg.gf_bursty_p, TrafficModel::bursty(cfg.gf_bursty_p, cfg.gf_mean_burst)});
        }
    }
    const std::array<MappingScheme, 2> schemes = {MappingScheme::static_map, MappingScheme::ack_feedback};
    const long R = cfg.gf_replicas;
    const std::int64_t n_trials = static_cast<std::int64_t>(specs.size()) * 2 * R;

    auto trial = [&](std::int64_t t) {
        const auto cell = t / (2 * R);
        const auto scheme = (t / R) % 2;
        const auto r = t % R;
        ContentionConfig cc;
        cc.n_ue = cfg.gf_n_ue;
        cc.n_ctu = cfg.gf_n_ctu;
        cc.traffic = specs[cell].model;
        cc.scheme = schemes[scheme];
        cc.feedback_delay_slots = cfg.gf_delay;
        cc.n_slots = cfg.gf_slots / R + (r < cfg.gf_slots % R ? 1 : 0);
        cc.retransmit = cfg.gf_retransmit;
        cc.reindex_ids = cfg.gf_reindex_ids;
        // seed depends on (cell, replica) only: both schemes see the same traffic
        Rng rng = trial_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(cell)), static_cast<std::uint64_t>(r));
        return simulate_contention(cc, rng);
    };
    const auto runs = run_trials<ContentionStats>(n_trials, cfg.workers, trial);

    std::vector<GrantFreeCell> out;
    for (std::size_t c = 0; c < specs.size(); ++c) {
        for (int s = 0; s < 2; ++s) {
            GrantFreeCell cell;
            cell.traffic = specs[c].traffic;
            cell.p_active = specs[c].p;
            cell.scheme = schemes[s];
            auto& pooled = cell.pooled;
            for (long r = 0; r < R; ++r) {
                const auto& st = runs[(c * 2 + s) * R + r];
                pooled.transmissions += st.transmissions;
                pooled.collided_transmissions += st.collided_transmissions;
                pooled.successes += st.successes;
                pooled.total_delay_slots += st.total_delay_slots;
                pooled.slots += st.slots;
                pooled.decoded_ctus += st.decoded_ctus;
                pooled.collided_ctus += st.collided_ctus;
                pooled.silent_ctus += st.silent_ctus;
                if (pooled.occupancy_histogram.size() < st.occupancy_histogram.size()) {
                    pooled.occupancy_histogram.resize(st.occupancy_histogram.size(), 0);
                }
                for (std::size_t i = 0; i < st.occupancy_histogram.size(); ++i) {
                    pooled.occupancy_histogram[i] += st.occupancy_histogram[i];
                }
                cell.replica_collision_prob.push_back(st.collision_prob);
            }
            pooled.collision_prob = pooled.transmissions > 0
                                        ? static_cast<double>(pooled.collided_transmissions) / pooled.transmissions
                                        : 0.0;
            pooled.mean_delay_slots =
                pooled.successes > 0 ? static_cast<double>(pooled.total_delay_slots) / pooled.successes : 0.0;
            out.push_back(std::move(cell));
        }
    }
    return out;
}

ResultTable run_grantfree(const ExperimentConfig& cfg) {
    const auto cells = simulate_grantfree(cfg);
    ResultTable t;
    t.header = {"scheme", "n_ue", "n_ctu", "p_active", "traffic", "collision_prob", "mean_delay_slots", "slots", "seed"};
    for (const auto& c : cells) {
        t.rows.push_back({scheme_tag(c.scheme), std::to_string(cfg.gf_n_ue), std::to_string(cfg.gf_n_ctu),
                          format_double(c.p_active), c.traffic, format_double(c.pooled.collision_prob),
                          format_double(c.pooled.mean_delay_slots), std::to_string(c.pooled.slots),
                          std::to_string(cfg.seed)});
    }
    return t;
}

JointConfig joint_config(const ExperimentConfig& cfg) {
    JointConfig jc;
    jc.prior = {cfg.jr_prior_a, cfg.jr_prior_b};
    jc.max_outer_iters = cfg.jr_outer_iters;
    jc.damping = cfg.jr_damping;
    jc.gamma = cfg.jr_gamma;
    jc.prior_active = cfg.jr_p_active;
    jc.mpa_iters = cfg.max_iters;
    jc.L = cfg.jr_L;
    return jc;
}

PilotBook make_pilot_book(const ExperimentConfig& cfg, const Codebook& cb) {
    return make_pilots(cb.fg.J, cb.fg.supports, cfg.jr_pilot_slots, cfg.jr_pilot_seed);
}

std::vector<JointPacketResult> simulate_jointrx_point(const ExperimentConfig& cfg, const Codebook& cb,
                                                      const PilotBook& pilots, int snr_index) {
    const int J = cb.fg.J;
    const int nb = cb.bits_per_symbol();
    const double nv = calibrate_noise(cfg.snr_db.at(snr_index), cb);
    const auto jc = joint_config(cfg);
    const auto stream = mix_seed(cfg.seed, static_cast<std::uint64_t>(snr_index));

    auto trial = [&](std::int64_t f) {
        Rng rng = trial_rng(stream, static_cast<std::uint64_t>(f));
        const auto packet = make_packet(cb, pilots, cfg.jr_L, cfg.jr_packet_bits, cfg.jr_p_active, nv, rng);
        const auto joint = joint_decode(packet.frame, pilots, cb, jc);
        const auto pilot = pilot_only_decode(packet.frame, pilots, cb, jc);
        const auto genie = genie_decode(packet.frame, packet.channel.gains, packet.active, cb, cfg.max_iters);
        const std::array<const ReceiverOutput*, 3> outputs = {&joint.rx, &pilot, &genie};

        JointPacketResult r;
        for (int j = 0; j < J; ++j) {
            if (packet.active[j]) r.bits += cfg.jr_packet_bits;
        }
        for (std::size_t a = 0; a < outputs.size(); ++a) {
            const auto& o = *outputs[a];
            for (int j = 0; j < J; ++j) {
                r.activity_errors[a] += o.activity.active[j] != packet.active[j];
                if (!packet.active[j]) continue;
                for (int d = 0; d < packet.frame.data_slots; ++d) {
                    const auto& hb = o.slots[d].hard_bits[j];
                    for (int b = 0; b < nb; ++b) r.bit_errors[a] += hb[b] != packet.bits[j][d * nb + b];
                }
            }
        }
        return r;
    };
    return run_trials<JointPacketResult>(cfg.frames, cfg.workers, trial);
}

ResultTable run_jointrx(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto cb = make_codebook(cfg);
    const auto pilots = make_pilot_book(cfg, cb);
    ResultTable t;
    t.header = {"snr_db", "algorithm", "packets", "edr", "ber", "ci95_lo", "ci95_hi", "seed"};
    for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
        const auto packets = simulate_jointrx_point(cfg, cb, pilots, static_cast<int>(s));
        long bits = 0;
        std::array<long, 3> act{};
        std::array<long, 3> errs{};
        for (const auto& p : packets) {
            bits += p.bits;
            for (int a = 0; a < 3; ++a) {
                act[a] += p.activity_errors[a];
                errs[a] += p.bit_errors[a];
            }
        }
        const long decisions = cfg.frames * cb.fg.J;
        for (int a = 0; a < 3; ++a) {
            const double ber = bits > 0 ? static_cast<double>(errs[a]) / bits : 0.0;
            const auto ci = bits > 0 ? wilson_interval(errs[a], bits) : Interval{};
            t.rows.push_back({format_double(cfg.snr_db[s]), kJointAlgorithms[a], std::to_string(cfg.frames),
                              format_double(static_cast<double>(act[a]) / decisions), format_double(ber),
                              format_double(ci.lo), format_double(ci.hi), std::to_string(cfg.seed)});
        }
    }
    return t;
}

ResultTable run_roc(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto cb = make_codebook(cfg);
    const auto pilots = make_pilot_book(cfg, cb);
    const auto jc = joint_config(cfg);
    const int J = cb.fg.J;
    struct Scores {
        std::vector<bool> active;
        std::array<std::vector<double>, 2> score;  // joint, pilot_only
    };
    ResultTable t;
    t.header = {"snr_db", "algorithm", "gamma", "packets", "miss_rate", "false_alarm_rate", "edr", "seed"};
    for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
        const double nv = calibrate_noise(cfg.snr_db[s], cb);
        const auto stream = mix_seed(cfg.seed, static_cast<std::uint64_t>(s));
        const auto packets = run_trials<Scores>(cfg.frames, cfg.workers, [&](std::int64_t f) {
            Rng rng = trial_rng(stream, static_cast<std::uint64_t>(f));
            const auto packet = make_packet(cb, pilots, cfg.jr_L, cfg.jr_packet_bits, cfg.jr_p_active, nv, rng);
            return Scores{packet.active,
                          {joint_decode(packet.frame, pilots, cb, jc).rx.activity.scores,
                           pilot_only_decode(packet.frame, pilots, cb, jc).activity.scores}};
        });
        long n_active = 0;
        for (const auto& p : packets) n_active += std::count(p.active.begin(), p.active.end(), true);
        const long n_silent = cfg.frames * J - n_active;
        for (int a = 0; a < 2; ++a) {
            for (double gamma : cfg.jr_roc_gamma) {
                long miss = 0;
                long false_alarm = 0;
                for (const auto& p : packets) {
                    const auto detected = activity_detect(p.score[a], nv, gamma);
                    for (int j = 0; j < J; ++j) {
                        miss += p.active[j] && !detected[j];
                        false_alarm += !p.active[j] && detected[j];
                    }
                }
                auto rate = [](long k, long n) { return n > 0 ? static_cast<double>(k) / n : 0.0; };
                t.rows.push_back({format_double(cfg.snr_db[s]), kJointAlgorithms[a], format_double(gamma),
                                  std::to_string(cfg.frames), format_double(rate(miss, n_active)),
                                  format_double(rate(false_alarm, n_silent)),
                                  format_double(rate(miss + false_alarm, cfg.frames * J)),
                                  std::to_string(cfg.seed)});
            }
        }
    }
    return t;
}

ResultTable run_codebook_report(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto cb = make_codebook(cfg);
    if (!cfg.codebook_out.empty()) {
        std::ofstream os(cfg.codebook_out);
        if (!os) throw ConfigError("cannot write codebook file " + cfg.codebook_out);
        write_codebook(os, cb);
    }
    const auto m = codebook_metrics(cb);
    const auto proj = build_projection_table(cb);
    int max_values = 0;
    for (int j = 0; j < cb.fg.J; ++j) {
        for (int n = 0; n < cb.fg.N; ++n) max_values = std::max(max_values, proj.count(j, n));
    }
    ResultTable t;
    t.header = {"scheme", "K", "N", "J", "M", "min_euclidean", "min_product_distance", "papr",
                "values_per_dimension", "max_row_weight", "seed"};
    t.rows.push_back({cfg.codebook_scheme, std::to_string(cb.fg.K), std::to_string(cb.fg.N),
                      std::to_string(cb.fg.J), std::to_string(cb.M), format_double(m.min_euclidean),
                      format_double(m.min_product_distance), format_double(m.papr), std::to_string(max_values),
                      std::to_string(cb.fg.max_row_weight()), std::to_string(cfg.seed)});
    return t;
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == "ber") return run_ber(cfg);
    if (cfg.experiment == "nodes") return run_nodes(cfg);
    if (cfg.experiment == "grantfree") return run_grantfree(cfg);
    if (cfg.experiment == "jointrx") return run_jointrx(cfg);
    if (cfg.experiment == "roc") return run_roc(cfg);
    if (cfg.experiment == "codebook-report") return run_codebook_report(cfg);
    throw ConfigError("unknown experiment " + cfg.experiment);
}

}  // namespace scma

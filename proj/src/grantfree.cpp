#include "scma/grantfree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numeric>

#include "scma/errors.hpp"

namespace scma {

std::vector<Ctu> make_ctus(int n_ctu, int n_codebooks, int n_pilots) {
    if (n_ctu < 1 || n_codebooks < 1 || n_pilots < 1) throw ParameterError("CTU counts must be >= 1");
    std::vector<Ctu> out(n_ctu);
    for (int i = 0; i < n_ctu; ++i) {
        out[i].index = i;
        out[i].codebook_id = i % n_codebooks;
        out[i].pilot_id = (i / n_codebooks) % n_pilots;
        out[i].frequency = i / (n_codebooks * n_pilots);
    }
    return out;
}

AckCode ack_from_bits(unsigned bits) {
    switch (bits) {
        case 0b00: return AckCode::NoData;
        case 0b01: return AckCode::Retransmit;
        case 0b11: return AckCode::Decoded;
        default: throw ParameterError("invalid ACK bit pattern");
    }
}

MappingState MappingState::from_occupancy(int slot, std::vector<int> occupancy) {
    MappingState s;
    s.slot = slot;
    s.occupancy = std::move(occupancy);
    for (int c = 0; c < s.n_ctu(); ++c) {
        if (s.occupancy[c] == 1) s.order.push_back(c);
    }
    s.n_single = static_cast<int>(s.order.size());
    for (int c = 0; c < s.n_ctu(); ++c) {
        if (s.occupancy[c] != 1) s.order.push_back(c);
    }
    s.n_multi = s.n_ctu() - s.n_single;
    return s;
}

int static_map(std::int64_t ue_id, int n_ctu) {
    if (n_ctu < 1) throw ParameterError("n_ctu must be >= 1");
    if (ue_id < 0) throw ParameterError("UE id must be non-negative");
    return static_cast<int>(ue_id % n_ctu);
}

int ack_feedback_map(std::int64_t ue_id, AckCode code, const MappingState& state) {
    if (ue_id < 0) throw ParameterError("UE id must be non-negative");
    if (code == AckCode::Retransmit) {
        if (state.n_single == 0) return static_map(ue_id, state.n_ctu());
        return static_cast<int>(ue_id % state.n_single);
    }
    if (state.n_multi == 0) return static_map(ue_id, state.n_ctu());
    return static_cast<int>(ue_id % state.n_multi) + state.n_single;
}

int ack_feedback_ctu(std::int64_t ue_id, AckCode code, const MappingState& state) {
    const bool fallback = code == AckCode::Retransmit ? state.n_single == 0 : state.n_multi == 0;
    const int idx = ack_feedback_map(ue_id, code, state);
    return fallback ? idx : state.order[idx];
}

TrafficModel TrafficModel::bernoulli(double p) {
    if (p < 0.0 || p > 1.0) throw ParameterError("p_active must lie in [0, 1]");
    TrafficModel t;
    t.kind = Kind::bernoulli;
    t.p_active = p;
    return t;
}

TrafficModel TrafficModel::bursty(double p, double mean_burst_slots) {
    if (p < 0.0 || p >= 1.0) throw ParameterError("bursty p_active must lie in [0, 1)");
    if (mean_burst_slots < 1.0) throw ParameterError("mean burst length must be >= 1 slot");
    TrafficModel t;
    t.kind = Kind::bursty;
    t.p_active = p;
    t.p_on_to_off = 1.0 / mean_burst_slots;
    t.p_off_to_on = std::min(1.0, p * t.p_on_to_off / (1.0 - p));
    return t;
}

std::string scheme_tag(MappingScheme s) {
    return s == MappingScheme::static_map ? "static" : "ack_feedback";
}

namespace {

struct UeState {
    bool pending = false;
    long first_slot = 0;
    long retx_slot = -1;
    bool on = false;
};

struct SlotRecord {
    std::vector<AckCode> codes;
    std::vector<int> occupancy;
};

}  // namespace

ContentionStats simulate_contention(const ContentionConfig& cfg, Rng& rng) {
    if (cfg.n_ue < 1 || cfg.n_ctu < 1) throw ParameterError("n_ue and n_ctu must be >= 1");
    if (cfg.feedback_delay_slots < 1) throw ParameterError("feedback delay must be >= 1 slot");
    if (cfg.n_slots < 0) throw ParameterError("n_slots must be >= 0");
    const auto& tr = cfg.traffic;
    if (tr.p_active < 0.0 || tr.p_active > 1.0) throw ParameterError("p_active must lie in [0, 1]");

    std::vector<std::int64_t> ids = cfg.ue_ids;
    if (ids.empty()) {
        ids.resize(cfg.n_ue);
        std::iota(ids.begin(), ids.end(), 0);
    }
    if (static_cast<int>(ids.size()) != cfg.n_ue) throw ParameterError("ue_ids size must equal n_ue");
    if (cfg.reindex_ids) {
        std::vector<int> rank(cfg.n_ue);
        std::iota(rank.begin(), rank.end(), 0);
        std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) { return ids[a] < ids[b]; });
        std::vector<std::int64_t> re(cfg.n_ue);
        for (int r = 0; r < cfg.n_ue; ++r) re[rank[r]] = r;
        ids = std::move(re);
    }

    const int n = cfg.n_ue;
    const int delay = cfg.feedback_delay_slots;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<UeState> ue(n);
    if (tr.kind == TrafficModel::Kind::bursty) {
        for (auto& u : ue) u.on = uni(rng) < tr.p_active;
    }

    ContentionStats st;
    st.slots = cfg.n_slots;
    st.occupancy_histogram.assign(n + 1, 0);
    std::deque<SlotRecord> history;  // last `delay` slots, oldest first

    std::vector<int> ctu_of(n, -1);
    std::vector<char> tx(n, 0);
    for (long s = 0; s < cfg.n_slots; ++s) {
        // traffic draws happen for every UE every slot, so both schemes
        // see the same arrival process for a given seed
        for (int i = 0; i < n; ++i) {
            bool arrival;
            if (tr.kind == TrafficModel::Kind::bernoulli) {
                arrival = uni(rng) < tr.p_active;
            } else {
                const double u = uni(rng);
                ue[i].on = ue[i].on ? !(u < tr.p_on_to_off) : (u < tr.p_off_to_on);
                arrival = ue[i].on;
            }
            auto& u = ue[i];
            if (cfg.retransmit) {
                if (u.pending) {
                    tx[i] = u.retx_slot == s;
                } else {
                    tx[i] = arrival;
                    if (arrival) {
                        u.pending = true;
                        u.first_slot = s;
                    }
                }
            } else {
                tx[i] = arrival;
                if (arrival && !u.pending) {
                    u.pending = true;
                    u.first_slot = s;
                }
            }
        }

        const bool adaptive = cfg.scheme == MappingScheme::ack_feedback && s >= delay;
        MappingState state;
        if (adaptive) state = MappingState::from_occupancy(static_cast<int>(s - delay), history.front().occupancy);
        std::vector<int> occ(cfg.n_ctu, 0);
        for (int i = 0; i < n; ++i) {
            if (!tx[i]) continue;
            ctu_of[i] = adaptive ? ack_feedback_ctu(ids[i], history.front().codes[i], state)
                                 : static_map(ids[i], cfg.n_ctu);
            ++occ[ctu_of[i]];
        }

        SlotRecord rec;
        rec.codes.assign(n, AckCode::NoData);
        rec.occupancy = occ;
        for (int c = 0; c < cfg.n_ctu; ++c) {
            ++st.occupancy_histogram[occ[c]];
            if (occ[c] == 0) ++st.silent_ctus;
            else if (occ[c] == 1) ++st.decoded_ctus;
            else ++st.collided_ctus;
        }
        for (int i = 0; i < n; ++i) {
            if (!tx[i]) continue;
            ++st.transmissions;
            auto& u = ue[i];
            if (occ[ctu_of[i]] == 1) {
                rec.codes[i] = AckCode::Decoded;
                ++st.successes;
                st.total_delay_slots += s - u.first_slot;
                u.pending = false;
                u.retx_slot = -1;
            } else {
                rec.codes[i] = AckCode::Retransmit;
                ++st.collided_transmissions;
                u.retx_slot = s + delay;
            }
        }
        history.push_back(std::move(rec));
        if (static_cast<int>(history.size()) > delay) history.pop_front();
    }

    while (!st.occupancy_histogram.empty() && st.occupancy_histogram.back() == 0 &&
           st.occupancy_histogram.size() > 2) {
        st.occupancy_histogram.pop_back();
    }
    st.collision_prob = st.transmissions > 0
                            ? static_cast<double>(st.collided_transmissions) / st.transmissions
                            : 0.0;
    st.mean_delay_slots = st.successes > 0 ? static_cast<double>(st.total_delay_slots) / st.successes : 0.0;
    return st;
}

double collision_prob_analytic_static(int n_ue, int n_ctu, double p_active) {
    if (n_ue < 1 || n_ctu < 1) throw ParameterError("n_ue and n_ctu must be >= 1");
    if (n_ue > 20) throw GuardError("exhaustive enumeration limited to n_ue <= 20");
    if (p_active < 0.0 || p_active > 1.0) throw ParameterError("p_active must lie in [0, 1]");
    double expected_tx = 0.0;
    double expected_collided = 0.0;
    std::vector<int> occ(n_ctu);
    const std::uint32_t patterns = 1u << n_ue;
    for (std::uint32_t mask = 0; mask < patterns; ++mask) {
        const int active = std::popcount(mask);
        const double prob = std::pow(p_active, active) * std::pow(1.0 - p_active, n_ue - active);
        if (prob == 0.0) continue;
        std::fill(occ.begin(), occ.end(), 0);
        for (int i = 0; i < n_ue; ++i) {
            if (mask >> i & 1u) ++occ[static_map(i, n_ctu)];
        }
        int collided = 0;
        for (int c : occ) {
            if (c >= 2) collided += c;
        }
        expected_tx += prob * active;
        expected_collided += prob * collided;
    }
    return expected_tx > 0.0 ? expected_collided / expected_tx : 0.0;
}

}  // namespace scma

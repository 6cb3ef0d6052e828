#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "scma/errors.hpp"
#include "scma/grantfree.hpp"

using namespace scma;

TEST_CASE("CTU enumeration") {
    const auto ctus = make_ctus(12, 6, 2);
    std::set<int> idx;
    for (const auto& c : ctus) idx.insert(c.index);
    CHECK(idx.size() == 12);
    CHECK(ctus[7].codebook_id == 1);
    CHECK(ctus[7].pilot_id == 1);
    CHECK(ctus[7].frequency == 0);
    CHECK(make_ctus(24, 6, 2)[13].frequency == 1);
    CHECK_THROWS_AS(make_ctus(0, 6, 1), ParameterError);
}

TEST_CASE("ACK codes") {
    CHECK(ack_from_bits(0b00) == AckCode::NoData);
    CHECK(ack_from_bits(0b01) == AckCode::Retransmit);
    CHECK(ack_from_bits(0b11) == AckCode::Decoded);
    CHECK(ack_bits(AckCode::Decoded) == 3u);
    CHECK_THROWS_AS(ack_from_bits(0b10), ParameterError);
    CHECK_THROWS_AS(ack_from_bits(4), ParameterError);
}

TEST_CASE("static mapping") {
    CHECK(static_map(13, 6) == 1);
    CHECK(static_map(0, 6) == 0);
    std::vector<int> count(6, 0);
    for (int id = 0; id < 600; ++id) ++count[static_map(id, 6)];
    for (int c : count) CHECK(c == 100);
    CHECK_THROWS_AS(static_map(3, 0), ParameterError);
}

TEST_CASE("ACK-feedback mapping") {
    // CTUs 1 and 4 carried one UE each
    const auto st = MappingState::from_occupancy(0, {0, 1, 2, 0, 1, 3});
    CHECK(st.n_single == 2);
    CHECK(st.n_multi == 4);
    CHECK(st.n_single + st.n_multi == st.n_ctu());
    CHECK(st.order == std::vector<int>{1, 4, 0, 2, 3, 5});
    CHECK(ack_feedback_map(7, AckCode::Retransmit, st) == 1);
    CHECK(ack_feedback_ctu(7, AckCode::Retransmit, st) == 4);
    CHECK(ack_feedback_map(7, AckCode::Decoded, st) == 5);
    CHECK(ack_feedback_ctu(7, AckCode::Decoded, st) == 5);
    CHECK(ack_feedback_ctu(6, AckCode::Decoded, st) == 3);

    const auto none = MappingState::from_occupancy(0, {0, 2, 0, 3, 0, 0});
    CHECK(none.n_single == 0);
    CHECK(ack_feedback_map(0, AckCode::Retransmit, none) == static_map(0, 6));
    CHECK(ack_feedback_map(9, AckCode::Retransmit, none) == static_map(9, 6));

    const auto all_single = MappingState::from_occupancy(0, std::vector<int>(6, 1));
    CHECK(ack_feedback_map(11, AckCode::NoData, all_single) == static_map(11, 6));

    for (int id = 0; id < 100; ++id) {
        const int r = ack_feedback_map(id, AckCode::Retransmit, st);
        CHECK(r >= 0);
        CHECK(r < st.n_single);
        const int d = ack_feedback_map(id, AckCode::NoData, st);
        CHECK(d >= st.n_single);
        CHECK(d < st.n_ctu());
    }
}

TEST_CASE("traffic models") {
    const auto b = TrafficModel::bursty(0.2, 4.0);
    CHECK(b.p_on_to_off == doctest::Approx(0.25));
    // stationary on-probability of the chain
    CHECK(b.p_off_to_on / (b.p_off_to_on + b.p_on_to_off) == doctest::Approx(0.2));
    CHECK_THROWS_AS(TrafficModel::bernoulli(1.5), ParameterError);
    CHECK_THROWS_AS(TrafficModel::bursty(0.2, 0.5), ParameterError);
}

TEST_CASE("analytic static collision probability") {
    CHECK(collision_prob_analytic_static(4, 2, 0.0) == 0.0);
    CHECK(collision_prob_analytic_static(2, 1, 1.0) == doctest::Approx(1.0));

    // independent enumeration of the 16 patterns: ids 0,2 share CTU 0 and 1,3 share CTU 1
    double tx = 0.0;
    double col = 0.0;
    for (int mask = 0; mask < 16; ++mask) {
        const double pr = 1.0 / 16;
        for (int u = 0; u < 4; ++u) {
            if (!(mask >> u & 1)) continue;
            tx += pr;
            if (mask >> ((u + 2) % 4) & 1) col += pr;
        }
    }
    CHECK(collision_prob_analytic_static(4, 2, 0.5) == doctest::Approx(col / tx).epsilon(1e-14));
    CHECK(col / tx == doctest::Approx(0.5));

    // closed form: a transmitter on a CTU shared by c UEs collides w.p. 1-(1-p)^(c-1)
    CHECK(collision_prob_analytic_static(12, 6, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(collision_prob_analytic_static(9, 6, 0.4) ==
          doctest::Approx(6 * 0.4 / 9).epsilon(1e-12));
    CHECK_THROWS_AS(collision_prob_analytic_static(21, 6, 0.1), GuardError);
}

TEST_CASE("contention simulation edge cases") {
    Rng rng(1);
    ContentionConfig cfg;
    cfg.n_ue = 12;
    cfg.n_ctu = 6;
    cfg.n_slots = 1000;
    cfg.traffic = TrafficModel::bernoulli(0.0);
    const auto idle = simulate_contention(cfg, rng);
    CHECK(idle.transmissions == 0);
    CHECK(idle.collision_prob == 0.0);
    CHECK(idle.silent_ctus == 6000);

    cfg.n_ue = 2;
    cfg.ue_ids = {0, 6};
    cfg.traffic = TrafficModel::bernoulli(1.0);
    for (bool retx : {true, false}) {
        cfg.retransmit = retx;
        const auto clash = simulate_contention(cfg, rng);
        CHECK(clash.transmissions > 0);
        CHECK(clash.collision_prob == 1.0);
        CHECK(clash.successes == 0);
    }

    cfg.ue_ids = {0, 1, 2};
    CHECK_THROWS_AS(simulate_contention(cfg, rng), ParameterError);
    cfg.ue_ids.clear();
    cfg.feedback_delay_slots = 0;
    CHECK_THROWS_AS(simulate_contention(cfg, rng), ParameterError);
}

TEST_CASE("conservation and accounting") {
    for (auto scheme : {MappingScheme::static_map, MappingScheme::ack_feedback}) {
        for (bool retx : {true, false}) {
            Rng rng(7);
            ContentionConfig cfg;
            cfg.n_ue = 30;
            cfg.n_ctu = 6;
            cfg.n_slots = 5000;
            cfg.scheme = scheme;
            cfg.retransmit = retx;
            cfg.traffic = TrafficModel::bursty(0.2, 3.0);
            const auto st = simulate_contention(cfg, rng);
            CHECK(st.decoded_ctus + st.collided_ctus + st.silent_ctus == cfg.n_slots * cfg.n_ctu);
            CHECK(st.successes == st.decoded_ctus);
            CHECK(st.successes + st.collided_transmissions == st.transmissions);
            long hist = 0;
            long weighted = 0;
            for (std::size_t n = 0; n < st.occupancy_histogram.size(); ++n) {
                hist += st.occupancy_histogram[n];
                weighted += static_cast<long>(n) * st.occupancy_histogram[n];
            }
            CHECK(hist == cfg.n_slots * cfg.n_ctu);
            CHECK(weighted == st.transmissions);
        }
    }
}

TEST_CASE("fresh-traffic static collision matches the enumeration") {
    Rng rng(2024);
    ContentionConfig cfg;
    cfg.n_ue = 12;
    cfg.n_ctu = 6;
    cfg.n_slots = 100000;
    cfg.retransmit = false;
    cfg.traffic = TrafficModel::bernoulli(0.3);
    const auto st = simulate_contention(cfg, rng);
    const double exact = collision_prob_analytic_static(12, 6, 0.3);
    CHECK(std::abs(st.collision_prob - exact) / exact < 0.01);
}

TEST_CASE("re-indexing discontinuous ids") {
    // ids 0, 6, 12 all land on CTU 0; ranked they spread over 0, 1, 2
    ContentionConfig cfg;
    cfg.n_ue = 3;
    cfg.n_ctu = 6;
    cfg.n_slots = 200;
    cfg.ue_ids = {12, 0, 6};
    cfg.traffic = TrafficModel::bernoulli(1.0);
    Rng a(3);
    CHECK(simulate_contention(cfg, a).collision_prob == 1.0);
    cfg.reindex_ids = true;
    Rng b(3);
    CHECK(simulate_contention(cfg, b).collision_prob == 0.0);
}

TEST_CASE("feedback beats static under retransmission") {
    ContentionConfig cfg;
    cfg.n_ue = 24;
    cfg.n_ctu = 6;
    cfg.n_slots = 20000;
    cfg.traffic = TrafficModel::bernoulli(0.1);
    Rng a(11);
    const auto st = simulate_contention(cfg, a);
    cfg.scheme = MappingScheme::ack_feedback;
    Rng b(11);
    const auto fb = simulate_contention(cfg, b);
    CHECK(fb.collision_prob < st.collision_prob);
}

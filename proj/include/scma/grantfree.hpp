#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scma/phy.hpp"

namespace scma {

/// Contention transmission unit: a (time, frequency, codebook, pilot) resource.
struct Ctu {
    int index = 0;
    int codebook_id = 0;
    int pilot_id = 0;
    int time = 0;
    int frequency = 0;
};

/// Enumerates CTUs codebook-fastest, then pilot, then frequency.
std::vector<Ctu> make_ctus(int n_ctu, int n_codebooks, int n_pilots);

/// Two-bit ACK feedback code.
enum class AckCode : unsigned { NoData = 0b00, Retransmit = 0b01, Decoded = 0b11 };

/// Rejects the undefined pattern 10 (and anything wider than two bits).
AckCode ack_from_bits(unsigned bits);
inline unsigned ack_bits(AckCode c) { return static_cast<unsigned>(c); }

/// BS view of one slot: per-CTU occupancy and the reordering that puts
/// single-occupancy CTUs first.
struct MappingState {
    int slot = 0;
    std::vector<int> occupancy;  // per CTU, transmitters seen by the BS
    int n_single = 0;
    int n_multi = 0;
    std::vector<int> order;      // position -> CTU index

    int n_ctu() const { return static_cast<int>(occupancy.size()); }
    static MappingState from_occupancy(int slot, std::vector<int> occupancy);
};

int static_map(std::int64_t ue_id, int n_ctu);

/// Position in the reordered CTU list (or the static index when the needed
/// block is empty).
int ack_feedback_map(std::int64_t ue_id, AckCode code, const MappingState& state);

/// Physical CTU index the UE uses under the ACK-feedback rule.
int ack_feedback_ctu(std::int64_t ue_id, AckCode code, const MappingState& state);

struct TrafficModel {
    enum class Kind { bernoulli, bursty };
    Kind kind = Kind::bernoulli;
    double p_active = 0.0;
    double p_on_to_off = 1.0;  // bursty only
    double p_off_to_on = 0.0;  // bursty only

    static TrafficModel bernoulli(double p);
    /// Two-state on/off chain with stationary activity p and the given mean
    /// on-period length.
    static TrafficModel bursty(double p, double mean_burst_slots);
    std::string tag() const { return kind == Kind::bernoulli ? "bernoulli" : "bursty"; }
};

enum class MappingScheme { static_map, ack_feedback };

std::string scheme_tag(MappingScheme s);

struct ContentionConfig {
    int n_ue = 60;
    int n_ctu = 6;
    TrafficModel traffic;
    MappingScheme scheme = MappingScheme::static_map;
    int feedback_delay_slots = 3;
    long n_slots = 100000;
    /// A UE whose packet collided retransmits it in the slot its Retransmit
    /// ACK arrives and generates no new traffic until it succeeds. When off,
    /// activity is purely the traffic model and a pending packet rides on
    /// the UE's next activation.
    bool retransmit = true;
    std::vector<std::int64_t> ue_ids;  // empty -> 0..n_ue-1
    bool reindex_ids = false;          // map by rank instead of raw id
};

struct ContentionStats {
    long transmissions = 0;
    long collided_transmissions = 0;
    long successes = 0;
    double collision_prob = 0.0;
    double mean_delay_slots = 0.0;
    long total_delay_slots = 0;  // first attempt to success, summed
    long slots = 0;
    long decoded_ctus = 0;
    long collided_ctus = 0;
    long silent_ctus = 0;
    std::vector<long> occupancy_histogram;  // CTU-slots with n transmitters
};

ContentionStats simulate_contention(const ContentionConfig& cfg, Rng& rng);

/// Exact per-transmission collision probability of static mapping under
/// i.i.d. Bernoulli activity, by enumeration of all activity patterns.
double collision_prob_analytic_static(int n_ue, int n_ctu, double p_active);

}  // namespace scma

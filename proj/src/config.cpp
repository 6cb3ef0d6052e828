#include "scma/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "scma/errors.hpp"

namespace scma {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) throw ConfigError("bad value for " + key + ": '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "on") return true;
    if (text == "false" || text == "0" || text == "off") return false;
    throw ConfigError("bad boolean for " + key + ": '" + text + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

template <class T>
Setter num(T ExperimentConfig::*field) {
    return [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
        c.*field = parse_number<T>(k, v);
    };
}

Setter str(std::string ExperimentConfig::*field) {
    return [field](ExperimentConfig& c, const std::string&, const std::string& v) { c.*field = v; };
}

Setter flag(bool ExperimentConfig::*field) {
    return [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
        c.*field = parse_bool(k, v);
    };
}

Setter doubles(std::vector<double> ExperimentConfig::*field) {
    return [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
        std::vector<double> out;
        for (const auto& item : split_list(v)) out.push_back(parse_number<double>(k, item));
        c.*field = std::move(out);
    };
}

Setter strings(std::vector<std::string> ExperimentConfig::*field) {
    return [field](ExperimentConfig& c, const std::string&, const std::string& v) { c.*field = split_list(v); };
}

const std::vector<std::pair<std::string, Setter>>& registry() {
    using C = ExperimentConfig;
    static const std::vector<std::pair<std::string, Setter>> r = {
        {"experiment", str(&C::experiment)},
        {"system.K", num(&C::K)},
        {"system.N", num(&C::N)},
        {"system.J", num(&C::J)},
        {"system.M", num(&C::M)},
        {"codebook.scheme", str(&C::codebook_scheme)},
        {"codebook.labeling", str(&C::codebook_labeling)},
        {"codebook.file", str(&C::codebook_file)},
        {"codebook.out", str(&C::codebook_out)},
        {"channel.model", str(&C::channel)},
        {"channel.L", num(&C::channel_L)},
        {"sim.snr_db", doubles(&C::snr_db)},
        {"sim.frames", num(&C::frames)},
        {"sim.seed", num(&C::seed)},
        {"sim.workers", num(&C::workers)},
        {"decoder.list", strings(&C::decoders)},
        {"decoder.list_size", num(&C::list_size)},
        {"decoder.max_iters", num(&C::max_iters)},
        {"decoder.pm_t_judge", num(&C::pm_t_judge)},
        {"decoder.pm_n_judge", num(&C::pm_n_judge)},
        {"decoder.np_rounds", num(&C::np_rounds)},
        {"grantfree.n_ue", num(&C::gf_n_ue)},
        {"grantfree.n_ctu", num(&C::gf_n_ctu)},
        {"grantfree.p_active", doubles(&C::gf_p_active)},
        {"grantfree.traffic", strings(&C::gf_traffic)},
        {"grantfree.bursty_p", num(&C::gf_bursty_p)},
        {"grantfree.mean_burst", num(&C::gf_mean_burst)},
        {"grantfree.delay", num(&C::gf_delay)},
        {"grantfree.slots", num(&C::gf_slots)},
        {"grantfree.replicas", num(&C::gf_replicas)},
        {"grantfree.retransmit", flag(&C::gf_retransmit)},
        {"grantfree.reindex_ids", flag(&C::gf_reindex_ids)},
        {"jointrx.packet_bits", num(&C::jr_packet_bits)},
        {"jointrx.pilot_slots", num(&C::jr_pilot_slots)},
        {"jointrx.p_active", num(&C::jr_p_active)},
        {"jointrx.L", num(&C::jr_L)},
        {"jointrx.gamma", num(&C::jr_gamma)},
        {"jointrx.roc_gamma", doubles(&C::jr_roc_gamma)},
        {"jointrx.outer_iters", num(&C::jr_outer_iters)},
        {"jointrx.damping", num(&C::jr_damping)},
        {"jointrx.prior_a", num(&C::jr_prior_a)},
        {"jointrx.prior_b", num(&C::jr_prior_b)},
        {"jointrx.pilot_seed", num(&C::jr_pilot_seed)},
        {"output.path", str(&C::out)},
    };
    return r;
}

}  // namespace

KeyValues parse_key_values(std::istream& is) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

KeyValues load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_key_values(in);
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + text + "'");
    return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

ExperimentConfig make_config(const KeyValues& kv, ExperimentConfig base) {
    const auto& reg = registry();
    for (const auto& [key, value] : kv) {
        const auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& e) { return e.first == key; });
        if (it == reg.end()) throw ConfigError("unknown config key " + key);
        it->second(base, key, value);
    }
    validate(base);
    return base;
}

void validate(const ExperimentConfig& c) {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    static const std::vector<std::string> experiments = {"ber", "nodes", "grantfree", "jointrx",
                                                         "roc", "codebook-report"};
    require(std::find(experiments.begin(), experiments.end(), c.experiment) != experiments.end(),
            "unknown experiment " + c.experiment);
    require(c.K >= 1 && c.N >= 1 && c.N <= c.K && c.J >= 1, "system dimensions out of range");
    require(c.M >= 2 && (c.M & (c.M - 1)) == 0, "system.M must be a power of two");
    require(c.codebook_scheme == "star_qam" || c.codebook_scheme == "low_projection" ||
                c.codebook_scheme == "file",
            "unknown codebook scheme " + c.codebook_scheme);
    require(c.codebook_scheme != "file" || !c.codebook_file.empty(), "codebook.file required for scheme file");
    require(c.codebook_labeling == "gray" || c.codebook_labeling == "natural",
            "unknown labeling " + c.codebook_labeling);
    require(c.channel == "awgn" || c.channel == "rayleigh_iid" || c.channel == "tapped_delay",
            "unknown channel model " + c.channel);
    require(c.channel_L >= 1 && c.channel_L <= c.K, "channel.L must lie in [1, K]");
    require(!c.snr_db.empty(), "sim.snr_db must not be empty");
    require(c.frames >= 1, "sim.frames must be >= 1");
    require(c.workers >= 1, "sim.workers must be >= 1");
    static const std::vector<std::string> known = {"mpa", "max_log", "projected", "pm",
                                                   "lsd", "np_lsd", "lsd_proj", "np_lsd_proj"};
    require(!c.decoders.empty(), "decoder.list must not be empty");
    for (const auto& d : c.decoders) {
        require(std::find(known.begin(), known.end(), d) != known.end(), "unknown decoder " + d);
    }
    require(c.list_size >= 1, "decoder.list_size must be >= 1");
    require(c.max_iters >= 1, "decoder.max_iters must be >= 1");
    require(c.pm_t_judge >= 1 && c.pm_t_judge <= c.max_iters, "decoder.pm_t_judge must lie in [1, max_iters]");
    require(c.pm_n_judge >= 0 && c.pm_n_judge <= c.J, "decoder.pm_n_judge must lie in [0, J]");
    require(c.np_rounds >= 1, "decoder.np_rounds must be >= 1");
    require(c.gf_n_ue >= 1 && c.gf_n_ctu >= 1, "grantfree sizes must be >= 1");
    require(!c.gf_p_active.empty(), "grantfree.p_active must not be empty");
    for (double p : c.gf_p_active) require(p >= 0.0 && p <= 1.0, "grantfree.p_active out of [0, 1]");
    for (const auto& t : c.gf_traffic) {
        require(t == "bernoulli" || t == "bursty", "unknown traffic model " + t);
    }
    require(!c.gf_traffic.empty(), "grantfree.traffic must not be empty");
    require(c.gf_bursty_p >= 0.0 && c.gf_bursty_p < 1.0, "grantfree.bursty_p out of [0, 1)");
    require(c.gf_mean_burst >= 1.0, "grantfree.mean_burst must be >= 1");
    require(c.gf_delay >= 1, "grantfree.delay must be >= 1");
    require(c.gf_slots >= 1, "grantfree.slots must be >= 1");
    require(c.gf_replicas >= 2 && c.gf_replicas <= c.gf_slots, "grantfree.replicas must lie in [2, slots]");
    require(c.jr_packet_bits >= 1, "jointrx.packet_bits must be >= 1");
    require(c.jr_pilot_slots >= 1, "jointrx.pilot_slots must be >= 1");
    require(c.jr_p_active > 0.0 && c.jr_p_active < 1.0, "jointrx.p_active must lie in (0, 1)");
    // a user sees its channel on N subcarriers only, so at most N taps are identifiable
    require(c.jr_L >= 1 && c.jr_L <= c.N, "jointrx.L must lie in [1, N]");
    require(c.jr_gamma > 0.0, "jointrx.gamma must be positive");
    require(!c.jr_roc_gamma.empty() &&
                std::all_of(c.jr_roc_gamma.begin(), c.jr_roc_gamma.end(), [](double g) { return g > 0.0; }),
            "jointrx.roc_gamma must hold positive values");
    require(c.jr_outer_iters >= 1, "jointrx.outer_iters must be >= 1");
    require(c.jr_damping >= 0.0 && c.jr_damping < 1.0, "jointrx.damping must lie in [0, 1)");
    require(c.jr_prior_a > 0.0 && c.jr_prior_b > 0.0, "jointrx prior parameters must be positive");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& e : registry()) k.push_back(e.first);
        return k;
    }();
    return keys;
}

}  // namespace scma

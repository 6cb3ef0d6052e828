// Serial reference loop vs OpenMP trial loop on the same decoding workload.
#include <benchmark/benchmark.h>

#include "scma/harness.hpp"
#include "scma/parallel.hpp"

namespace {

struct Workload {
    scma::ExperimentConfig cfg;
    scma::Codebook cb;

    Workload() {
        cfg.M = 4;
        cfg.decoders = {"max_log", "np_lsd"};
        cfg.list_size = 8;
        cb = scma::make_codebook(cfg);
    }

    long trial(std::int64_t t) const {
        auto rng = scma::trial_rng(99, static_cast<std::uint64_t>(t));
        const auto ch = scma::make_channel(scma::ChannelModel::rayleigh_iid, cb.fg.K, cb.fg.J, 1, rng);
        std::vector<scma::CVec> words(cb.fg.J);
        std::vector<int> tx(cb.fg.J);
        std::uniform_int_distribution<int> sym(0, cb.M - 1);
        for (int j = 0; j < cb.fg.J; ++j) {
            tx[j] = sym(rng);
            words[j] = cb.words[j][tx[j]];
        }
        const double nv = scma::calibrate_noise(8.0, cb);
        scma::Received rx{scma::superimpose(words, ch, nv, rng), ch.gains, nv};
        long errors = 0;
        for (const auto& d : cfg.decoders) {
            const auto r = scma::run_decoder(d, cb, rx, cfg);
            for (int j = 0; j < cb.fg.J; ++j) errors += r.symbols[j] != tx[j];
        }
        return errors;
    }
};

const Workload& workload() {
    static const Workload w;
    return w;
}

void BM_TrialsSerial(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) {
        auto r = scma::run_trials_serial<long>(state.range(0), [&](std::int64_t t) { return w.trial(t); });
        benchmark::DoNotOptimize(r.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TrialsParallel(benchmark::State& state) {
    const auto& w = workload();
    const int workers = scma::available_workers();
    for (auto _ : state) {
        auto r = scma::run_trials<long>(state.range(0), workers, [&](std::int64_t t) { return w.trial(t); });
        benchmark::DoNotOptimize(r.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.counters["workers"] = workers;
}

}  // namespace

BENCHMARK(BM_TrialsSerial)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TrialsParallel)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

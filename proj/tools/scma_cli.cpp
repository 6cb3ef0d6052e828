// scma: command-line driver for the link-level experiments.
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "scma/config.hpp"
#include "scma/errors.hpp"
#include "scma/harness.hpp"

namespace {

struct Options {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    int workers = 0;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "Config file with dotted keys");
    sub->add_option("--seed", o.seed, "Master seed (overrides sim.seed)");
    sub->add_option("--out", o.out, "CSV output path (default stdout)");
    sub->add_option("--workers", o.workers, "Worker threads (1 = serial)")->check(CLI::PositiveNumber);
    sub->add_option("--set", o.overrides, "Override a config key, key=value")->take_all();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SCMA link-level laboratory"};
    app.require_subcommand(1);
    Options opts;
    for (const char* name : {"codebook-report", "ber", "nodes", "grantfree", "jointrx", "roc"}) {
        add_common(app.add_subcommand(name), opts);
    }
    CLI11_PARSE(app, argc, argv);

    try {
        const auto* sub = app.get_subcommands().front();
        scma::KeyValues kv;
        if (!opts.config.empty()) kv = scma::load_key_values(opts.config);
        for (const auto& o : opts.overrides) {
            const auto [k, v] = scma::split_assignment(o);
            kv[k] = v;
        }
        kv["experiment"] = sub->get_name();
        if (sub->count("--seed")) kv["sim.seed"] = std::to_string(opts.seed);
        if (sub->count("--workers")) kv["sim.workers"] = std::to_string(opts.workers);
        if (sub->count("--out")) kv["output.path"] = opts.out;
        const auto cfg = scma::make_config(kv);

        const auto table = scma::run_experiment(cfg);
        if (cfg.out.empty()) {
            table.write_csv(std::cout);
        } else {
            std::ofstream os(cfg.out, std::ios::binary);
            if (!os) throw scma::ConfigError("cannot write " + cfg.out);
            table.write_csv(os);
        }
    } catch (const std::exception& e) {
        std::cerr << "scma: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

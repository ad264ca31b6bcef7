// kgc: prepare / train / compare / inspect for the context-integration
// pipeline. Exit codes: 0 success, 2 usage/config/input error, 1 internal.

#include "kgc/commands.hpp"
#include "kgc/config.hpp"
#include "kgc/errors.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace {

struct CommonOptions {
    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool output_dir_set = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "run configuration file")->required();
    cmd->add_option("--output-dir", opts.output_dir, "override output_dir from the config")
        ->each([&opts](const std::string&) { opts.output_dir_set = true; });
    cmd->add_option("--seed", opts.seed, "override seed from the config")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
}

kgc::RunConfig make_config(const CommonOptions& opts) {
    kgc::RunConfig cfg = kgc::load_config(opts.config_path);
    if (opts.output_dir_set) cfg.output_dir = opts.output_dir;
    if (opts.seed_set) cfg.seed = opts.seed;
    kgc::resolve_config(cfg);
    kgc::validate_config(cfg);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DQN-driven integration of compressed contexts into knowledge graphs"};
    app.require_subcommand(1);

    CommonOptions prepare_opts, train_opts, compare_opts;
    int repeat = 0;
    std::string inspect_path;

    CLI::App* prepare = app.add_subcommand("prepare", "split a dataset and generate contexts");
    add_common(prepare, prepare_opts);
    CLI::App* train = app.add_subcommand("train", "train the DQN on prepared artifacts");
    add_common(train, train_opts);
    CLI::App* compare = app.add_subcommand("compare", "evaluate all policies on held-out contexts");
    add_common(compare, compare_opts);
    compare->add_option("--repeat", repeat, "report median wall time over N evaluation runs");
    CLI::App* inspect = app.add_subcommand("inspect", "summarize an artifact file");
    inspect->add_option("path", inspect_path, "artifact to inspect")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (prepare->parsed()) return kgc::cmd_prepare(make_config(prepare_opts));
        if (train->parsed()) return kgc::cmd_train(make_config(train_opts));
        if (compare->parsed()) {
            kgc::RunConfig cfg = make_config(compare_opts);
            if (repeat > 0) cfg.eval_repeat = repeat;
            kgc::validate_config(cfg);
            return kgc::cmd_compare(cfg);
        }
        if (inspect->parsed()) return kgc::cmd_inspect(inspect_path);
    } catch (const kgc::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const kgc::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const kgc::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const kgc::ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

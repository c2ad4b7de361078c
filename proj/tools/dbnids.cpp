#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "nids/commands.hpp"
#include "nids/synthetic.hpp"

namespace {

// exit codes: 0 ok, 2 config, 3 data, 4 state/format
int exit_code_for(const std::exception &e) {
    if (dynamic_cast<const nids::ConfigError *>(&e))
        return 2;
    if (dynamic_cast<const nids::DataError *>(&e) || dynamic_cast<const nids::DomainError *>(&e) ||
        dynamic_cast<const nids::IoError *>(&e) || dynamic_cast<const nids::ShapeError *>(&e))
        return 3;
    if (dynamic_cast<const nids::StateError *>(&e) ||
        dynamic_cast<const nids::FormatError *>(&e) ||
        dynamic_cast<const nids::CapacityError *>(&e))
        return 4;
    return 1;
}

nids::CommandContext make_context(const std::string &config_path, const std::string &out_dir,
                                  std::optional<std::uint64_t> seed) {
    nids::CommandContext ctx;
    ctx.config = nids::load_config(config_path);
    if (seed)
        ctx.config.seed = *seed;
    ctx.out_dir = out_dir;
    return ctx;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Deep-belief-network intrusion detection toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;

    const auto add_common = [&](CLI::App *cmd, bool config_required = true) {
        cmd->add_option("--config", config_path, "experiment config file")
            ->required(config_required);
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "override the config seed");
    };

    auto *preprocess = app.add_subcommand("preprocess", "fit the pipeline and persist splits");
    add_common(preprocess);

    auto *train = app.add_subcommand("train", "train a model on the persisted splits");
    add_common(train);

    auto *evaluate = app.add_subcommand("evaluate", "evaluate a bundle on a persisted split");
    add_common(evaluate);
    std::string eval_split = "test";
    std::string eval_bundle;
    evaluate->add_option("--split", eval_split, "train, val or test");
    evaluate->add_option("--bundle", eval_bundle, "bundle path (default <out>/model.bundle)");

    auto *sweep = app.add_subcommand("sweep", "train one model per balancing strategy");
    add_common(sweep);

    auto *gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient suites");
    add_common(gradcheck);

    auto *synth = app.add_subcommand("synth", "write a synthetic Gaussian-blob flow CSV");
    std::string synth_path = "synthetic.csv";
    std::uint64_t synth_seed = 42;
    std::string synth_counts = "5000,400,250,150,150,50";
    std::size_t synth_dims = 49;
    synth->add_option("--out", synth_path, "CSV path to write");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--counts", synth_counts, "per-class sample counts");
    synth->add_option("--dims", synth_dims, "feature count");

    CLI11_PARSE(app, argc, argv);

    try {
        if (preprocess->parsed()) {
            nids::cmd_preprocess(make_context(config_path, out_dir, seed));
        } else if (train->parsed()) {
            nids::cmd_train(make_context(config_path, out_dir, seed));
        } else if (evaluate->parsed()) {
            auto ctx = make_context(config_path, out_dir, seed);
            const auto bundle =
                eval_bundle.empty() ? nids::bundle_path(ctx.out_dir) : std::filesystem::path(eval_bundle);
            nids::cmd_evaluate(ctx, bundle, eval_split);
        } else if (sweep->parsed()) {
            nids::cmd_sweep(make_context(config_path, out_dir, seed));
        } else if (gradcheck->parsed()) {
            auto ctx = make_context(config_path, out_dir, seed);
            if (nids::cmd_gradcheck(ctx) >= 1e-4)
                return 1;
        } else if (synth->parsed()) {
            nids::BlobSpec spec;
            spec.dims = synth_dims;
            spec.counts.clear();
            std::size_t value = 0;
            bool in_number = false;
            for (char ch : synth_counts + ",") {
                if (ch == ',') {
                    if (in_number)
                        spec.counts.push_back(value);
                    value = 0;
                    in_number = false;
                } else if (ch >= '0' && ch <= '9') {
                    value = value * 10 + static_cast<std::size_t>(ch - '0');
                    in_number = true;
                } else {
                    throw nids::ConfigError("synth: counts must be a comma list of integers");
                }
            }
            nids::Rng rng(synth_seed);
            nids::write_csv(nids::make_blobs(spec, rng), synth_path);
            std::cout << "wrote " << synth_path << "\n";
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}

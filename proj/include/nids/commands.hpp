#pragma once

#include <filesystem>
#include <iostream>
#include <string>

#include "nids/bundle.hpp"
#include "nids/config.hpp"
#include "nids/eval.hpp"

namespace nids {

struct CommandContext {
    ExperimentConfig config;
    std::filesystem::path out_dir;
    std::ostream *log = &std::cout; // stage counts and wall times; never written to artifacts
};

// load -> merge labels -> drop no-variance -> drop correlated -> stratified
// split -> scaler -> PCA (-> [0,1] rescale); persists the three splits and
// the fitted pipeline artifact under the output directory.
void cmd_preprocess(const CommandContext &ctx);

// Applies the balancing strategy to the training split only, trains the
// configured model and persists the bundle plus per-epoch history.
void cmd_train(const CommandContext &ctx);

// Evaluates a persisted bundle on one of the persisted splits.
EvalReport cmd_evaluate(const CommandContext &ctx, const std::filesystem::path &bundle_path,
                        const std::string &split);

// Trains one model per strategy with a shared seed and writes the combined
// per-class metric grid.
void cmd_sweep(const CommandContext &ctx);

// Finite-difference gradient suites for the DBN and MLP backward passes.
// Returns the largest relative error seen; passes below 1e-4.
double cmd_gradcheck(const CommandContext &ctx);

// Paths used by the commands within an output directory.
std::filesystem::path split_path(const std::filesystem::path &out_dir, const std::string &split);
std::filesystem::path artifact_path(const std::filesystem::path &out_dir);
std::filesystem::path bundle_path(const std::filesystem::path &out_dir);

} // namespace nids

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "nids/config.hpp"
#include "nids/dbn.hpp"
#include "nids/eval.hpp"
#include "nids/mlp.hpp"
#include "nids/pipeline.hpp"

namespace nids {

// Everything needed to reload and run a trained model: parameters, the
// fitted preprocessing state, the training configuration echo and a metrics
// snapshot. Parameter tensors persist as little-endian f32; snap_to_f32
// quantises a freshly trained model so that inference after reload equals
// inference before saving exactly.
struct ModelBundle {
    ModelKind kind = ModelKind::kDbn;
    std::vector<std::string> class_names;
    std::optional<DbnModel> dbn;
    std::optional<MlpModel> mlp;
    PipelineArtifact artifact;
    std::string config_echo;
    std::string metrics_snapshot; // render_records() on the validation split

    std::vector<int> predict(const Matrix &features) const;
    std::size_t input_width() const;
};

void snap_to_f32(DbnModel &model);
void snap_to_f32(MlpModel &model);

void save_bundle(const ModelBundle &bundle, const std::filesystem::path &path);
ModelBundle load_bundle(const std::filesystem::path &path);

} // namespace nids

#include "nids/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "nids/io_util.hpp"
#include "nids/synthetic.hpp"

namespace nids {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    write_file(path, std::as_bytes(std::span<const char>(text.data(), text.size())));
}

std::string format_counts(const Dataset &ds) {
    const auto counts = class_counts(ds.labels, ds.class_names.size());
    std::ostringstream os;
    for (std::size_t c = 0; c < counts.size(); ++c)
        os << (c ? ", " : "") << ds.class_names[c] << ": " << counts[c];
    return os.str();
}

BalanceSpec resolve_balance_spec(const ExperimentConfig &cfg, const Dataset &train) {
    BalanceSpec spec;
    spec.strategy = cfg.balance_strategy;
    spec.smote_k = cfg.smote_k;
    for (const auto &[name, count] : cfg.balance_targets) {
        const auto it = std::find(train.class_names.begin(), train.class_names.end(), name);
        if (it == train.class_names.end())
            throw ConfigError("balance target for unknown class '" + name + "'");
        spec.targets[static_cast<std::size_t>(it - train.class_names.begin())] = count;
    }
    return spec;
}

struct TrainOutput {
    ModelBundle bundle;
    std::string history;
};

TrainOutput train_model(const ExperimentConfig &cfg, const Dataset &train_raw, const Dataset &val,
                        const PipelineArtifact &artifact, std::ostream &log) {
    Rng rng(cfg.seed);
    Rng train_rng = rng.child("train");

    const BalanceSpec spec = resolve_balance_spec(cfg, train_raw);
    Rng balance_rng = train_rng.child("balance");
    SmoteStats smote_stats;
    const Dataset train = apply_resampling(train_raw, spec, balance_rng, &smote_stats);
    if (spec.strategy == BalanceStrategy::kSmote ||
        spec.strategy == BalanceStrategy::kSmoteUndersample) {
        log << "  balancing: " << smote_stats.synthetic_rows << " synthetic rows";
        if (smote_stats.k_clamped_classes > 0)
            log << " (warning: smote_k clamped for " << smote_stats.k_clamped_classes
                << " class(es))";
        log << "\n";
    }
    log << "  training rows after balancing: " << train.rows() << " [" << format_counts(train)
        << "]\n";

    const std::size_t n_classes = train.class_names.size();
    std::ostringstream history;
    history << "stage\tepoch\tmetric\tvalue\n";
    char line[160];

    ModelBundle bundle;
    bundle.class_names = train.class_names;
    bundle.artifact = artifact;
    bundle.config_echo = config_to_text(cfg);

    if (cfg.model == ModelKind::kDbn) {
        bundle.kind = ModelKind::kDbn;
        DbnArchitecture arch;
        arch.layer_sizes.clear();
        arch.layer_sizes.push_back(train.cols());
        arch.layer_sizes.insert(arch.layer_sizes.end(), cfg.hidden_layers.begin(),
                                cfg.hidden_layers.end());
        arch.n_classes = n_classes;

        auto t0 = Clock::now();
        Rng pretrain_rng = train_rng.child("pretrain");
        DbnPretrainResult pre = greedy_pretrain(arch, train.features, cfg.pretrain, pretrain_rng);
        log << "  pretraining: " << pre.model.rbms.size() << " RBMs in " << seconds_since(t0)
            << " s\n";
        for (std::size_t l = 0; l < pre.recon_mse.size(); ++l)
            for (std::size_t e = 0; e < pre.recon_mse[l].size(); ++e) {
                std::snprintf(line, sizeof(line), "pretrain.rbm%zu\t%zu\trecon_mse\t%.17g\n", l,
                              e + 1, pre.recon_mse[l][e]);
                history << line;
            }

        DbnModel model = std::move(pre.model);
        FineTuneConfig ft = cfg.finetune;
        if (spec.strategy == BalanceStrategy::kClassWeights)
            ft.class_weights = class_weights(class_counts(train.labels, n_classes));
        else if (spec.strategy == BalanceStrategy::kSampleWeights)
            ft.sample_weights = sample_weights(train.labels, n_classes);

        t0 = Clock::now();
        Rng finetune_rng = train_rng.child("finetune");
        TrainHistory hist = fine_tune(model, train.features, train.labels, val.features,
                                      val.labels, ft, finetune_rng);
        log << "  fine-tuning: " << hist.epochs.size() << " epochs in " << seconds_since(t0)
            << " s (best epoch " << hist.best_epoch << ")\n";
        for (std::size_t e = 0; e < hist.epochs.size(); ++e) {
            std::snprintf(line, sizeof(line), "finetune\t%zu\ttrain_loss\t%.17g\n", e + 1,
                          hist.epochs[e].train_loss);
            history << line;
            std::snprintf(line, sizeof(line), "finetune\t%zu\tval_loss\t%.17g\n", e + 1,
                          hist.epochs[e].val_loss);
            history << line;
            std::snprintf(line, sizeof(line), "finetune\t%zu\tval_macro_f1\t%.17g\n", e + 1,
                          hist.epochs[e].val_macro_f1);
            history << line;
        }
        snap_to_f32(model);
        bundle.dbn = std::move(model);
    } else {
        bundle.kind = ModelKind::kMlp;
        MlpTrainConfig mcfg = cfg.mlp;
        if (spec.strategy == BalanceStrategy::kClassWeights)
            mcfg.class_weights = class_weights(class_counts(train.labels, n_classes));
        else if (spec.strategy == BalanceStrategy::kSampleWeights)
            mcfg.sample_weights = sample_weights(train.labels, n_classes);

        auto t0 = Clock::now();
        Rng mlp_rng = train_rng.child("mlp");
        MlpTrainResult res = mlp_train(train.features, train.labels, val.features, val.labels,
                                       n_classes, mcfg, mlp_rng);
        log << "  MLP training: " << res.history.epochs.size() << " epochs in "
            << seconds_since(t0) << " s (best epoch " << res.history.best_epoch << ")\n";
        for (std::size_t e = 0; e < res.history.epochs.size(); ++e) {
            std::snprintf(line, sizeof(line), "mlp\t%zu\ttrain_loss\t%.17g\n", e + 1,
                          res.history.epochs[e].train_loss);
            history << line;
            std::snprintf(line, sizeof(line), "mlp\t%zu\tval_loss\t%.17g\n", e + 1,
                          res.history.epochs[e].val_loss);
            history << line;
            std::snprintf(line, sizeof(line), "mlp\t%zu\tval_macro_f1\t%.17g\n", e + 1,
                          res.history.epochs[e].val_macro_f1);
            history << line;
        }
        snap_to_f32(res.model);
        bundle.mlp = std::move(res.model);
    }

    // snapshot: metrics of the snapped model on the validation split
    const auto val_pred = bundle.predict(val.features);
    const auto cm = confusion(val.labels, val_pred, n_classes);
    bundle.metrics_snapshot = render_records(metrics(cm, bundle.class_names));

    TrainOutput out;
    out.bundle = std::move(bundle);
    out.history = history.str();
    return out;
}

} // namespace

std::filesystem::path split_path(const std::filesystem::path &out_dir, const std::string &split) {
    if (split != "train" && split != "val" && split != "test")
        throw ConfigError("unknown split '" + split + "' (expected train, val or test)");
    return out_dir / "splits" / (split + ".nds");
}

std::filesystem::path artifact_path(const std::filesystem::path &out_dir) {
    return out_dir / "pipeline.nidsart";
}

std::filesystem::path bundle_path(const std::filesystem::path &out_dir) {
    return out_dir / "model.bundle";
}

void cmd_preprocess(const CommandContext &ctx) {
    const ExperimentConfig &cfg = ctx.config;
    std::ostream &log = *ctx.log;
    if (cfg.csv_paths.empty())
        throw ConfigError("preprocess: no CSV inputs configured ([data] csv)");

    auto t0 = Clock::now();
    CsvLoadStats stats;
    Dataset raw = load_csv(cfg.csv_paths, &stats);
    log << "load: " << stats.rows_kept << " rows, " << raw.cols() << " features ("
        << stats.rows_dropped << " invalid rows dropped, " << stats.excluded_columns.size()
        << " identifier columns excluded) in " << seconds_since(t0) << " s\n";

    t0 = Clock::now();
    const LabelMap map = cfg.label_map == LabelMapKind::kCicids2017
                             ? LabelMap::cicids2017()
                             : LabelMap::identity(raw.class_names);
    MergeStats merge_stats;
    Dataset merged = merge_labels(raw, map, &merge_stats);
    log << "merge_labels: " << merged.rows() << " rows (" << merge_stats.rows_dropped
        << " dropped) in " << seconds_since(t0) << " s\n";
    log << "  class counts: " << format_counts(merged) << "\n";

    t0 = Clock::now();
    DropResult no_var = drop_zero_variance(merged);
    log << "drop_zero_variance: removed " << no_var.removed.size() << " -> "
        << no_var.dataset.cols() << " features in " << seconds_since(t0) << " s\n";

    t0 = Clock::now();
    DropResult decorr = drop_correlated(no_var.dataset, cfg.correlation_threshold);
    log << "drop_correlated(threshold=" << cfg.correlation_threshold << "): removed "
        << decorr.removed.size() << " -> " << decorr.dataset.cols() << " features in "
        << seconds_since(t0) << " s\n";

    t0 = Clock::now();
    Rng rng(cfg.seed);
    Rng split_rng = rng.child("preprocess");
    SplitResult splits =
        stratified_split(decorr.dataset, cfg.split_fractions, split_rng, cfg.split_order);
    log << "stratified_split: train " << splits.train.rows() << ", val " << splits.val.rows()
        << ", test " << splits.test.rows() << " in " << seconds_since(t0) << " s\n";

    PipelineArtifact artifact;
    artifact.kept_columns = decorr.dataset.feature_names;
    artifact.scaler = cfg.scaler;
    artifact.fitted_rows = splits.train.rows();

    t0 = Clock::now();
    Matrix train_x = splits.train.features;
    if (cfg.scaler == ScalerKind::kQuantile) {
        artifact.quantile = quantile_fit(train_x, cfg.n_quantiles);
        log << "quantile_fit: " << cfg.n_quantiles << " quantiles per feature in "
            << seconds_since(t0) << " s\n";
    } else if (cfg.scaler == ScalerKind::kRobust) {
        artifact.robust = robust_scale_fit(train_x);
        log << "robust_scale_fit in " << seconds_since(t0) << " s\n";
    }

    if (cfg.pca_variance_target) {
        t0 = Clock::now();
        Matrix scaled = train_x;
        if (cfg.scaler == ScalerKind::kQuantile)
            scaled = quantile_apply(artifact.quantile, train_x);
        else if (cfg.scaler == ScalerKind::kRobust)
            scaled = robust_scale_apply(artifact.robust, train_x);
        artifact.pca = pca_fit(scaled, *cfg.pca_variance_target);
        double kept = 0.0;
        for (double rho : artifact.pca->explained_ratio)
            kept += rho;
        log << "pca_fit: " << artifact.pca->components.cols << " components, explained variance "
            << kept << " in " << seconds_since(t0) << " s\n";
        if (cfg.post_pca_rescale)
            artifact.post_rescale = minmax_fit(pca_apply(*artifact.pca, scaled));
    } else if (cfg.post_pca_rescale && cfg.scaler != ScalerKind::kQuantile) {
        // no PCA, but the scaler output is unbounded: rescale so sigmoid
        // visible units stay usable
        Matrix scaled = cfg.scaler == ScalerKind::kRobust
                            ? robust_scale_apply(artifact.robust, train_x)
                            : train_x;
        artifact.post_rescale = minmax_fit(scaled);
    }

    t0 = Clock::now();
    const auto emit = [&](const Dataset &split, const std::string &name) {
        Dataset out;
        out.labels = split.labels;
        out.class_names = split.class_names;
        out.features = artifact.transform(split.features);
        if (artifact.pca) {
            for (std::size_t j = 0; j < out.features.cols; ++j)
                out.feature_names.push_back("pc" + std::to_string(j + 1));
        } else {
            out.feature_names = split.feature_names;
        }
        save_dataset(out, split_path(ctx.out_dir, name));
    };
    emit(splits.train, "train");
    emit(splits.val, "val");
    emit(splits.test, "test");
    save_artifact(artifact, artifact_path(ctx.out_dir));
    log << "transform+persist in " << seconds_since(t0) << " s -> " << ctx.out_dir.string()
        << "\n";
}

void cmd_train(const CommandContext &ctx) {
    std::ostream &log = *ctx.log;
    if (!std::filesystem::exists(split_path(ctx.out_dir, "train")))
        throw StateError("train: no persisted splits under " + ctx.out_dir.string() +
                         " (run preprocess first)");
    const Dataset train = load_dataset(split_path(ctx.out_dir, "train"));
    const Dataset val = load_dataset(split_path(ctx.out_dir, "val"));
    const PipelineArtifact artifact = load_artifact(artifact_path(ctx.out_dir));

    log << "train: model=" << (ctx.config.model == ModelKind::kDbn ? "dbn" : "mlp")
        << " strategy=" << balance_strategy_name(ctx.config.balance_strategy) << " seed="
        << ctx.config.seed << "\n";
    auto t0 = Clock::now();
    TrainOutput out = train_model(ctx.config, train, val, artifact, log);
    log << "train: total " << seconds_since(t0) << " s\n";

    save_bundle(out.bundle, bundle_path(ctx.out_dir));
    write_text(ctx.out_dir / "history.tsv", out.history);
}

EvalReport cmd_evaluate(const CommandContext &ctx, const std::filesystem::path &bundle_file,
                        const std::string &split) {
    std::ostream &log = *ctx.log;
    auto t0 = Clock::now();
    const ModelBundle bundle = load_bundle(bundle_file);
    const Dataset ds = load_dataset(split_path(ctx.out_dir, split));
    if (ds.cols() != bundle.input_width())
        throw StateError("evaluate: split width does not match the model input layer");

    const auto predicted = bundle.predict(ds.features);
    const auto cm = confusion(ds.labels, predicted, bundle.class_names.size());
    EvalReport report = metrics(cm, bundle.class_names);
    log << "evaluate(" << split << "): " << ds.rows() << " rows in " << seconds_since(t0)
        << " s\n";
    log << render_report(report);

    write_text(ctx.out_dir / ("report_" + split + ".txt"), render_report(report));
    write_text(ctx.out_dir / ("report_" + split + ".tsv"), render_records(report));
    return report;
}

void cmd_sweep(const CommandContext &ctx) {
    std::ostream &log = *ctx.log;
    if (!std::filesystem::exists(split_path(ctx.out_dir, "train")))
        throw StateError("sweep: no persisted splits under " + ctx.out_dir.string() +
                         " (run preprocess first)");
    const Dataset train = load_dataset(split_path(ctx.out_dir, "train"));
    const Dataset val = load_dataset(split_path(ctx.out_dir, "val"));
    const Dataset test = load_dataset(split_path(ctx.out_dir, "test"));
    const PipelineArtifact artifact = load_artifact(artifact_path(ctx.out_dir));

    std::ostringstream grid;
    grid << "strategy\trecord\tname\tprecision\trecall\tf1\tsupport\n";
    char line[192];

    for (BalanceStrategy strategy : ctx.config.sweep_strategies) {
        ExperimentConfig cfg = ctx.config;
        cfg.balance_strategy = strategy;
        const std::string name = balance_strategy_name(strategy);
        log << "sweep[" << name << "]\n";
        TrainOutput out = train_model(cfg, train, val, artifact, log);

        const auto run_dir = ctx.out_dir / "sweep" / name;
        std::filesystem::create_directories(run_dir);
        save_bundle(out.bundle, bundle_path(run_dir));
        write_text(run_dir / "history.tsv", out.history);

        const auto predicted = out.bundle.predict(test.features);
        const auto cm = confusion(test.labels, predicted, out.bundle.class_names.size());
        const EvalReport report = metrics(cm, out.bundle.class_names);
        for (std::size_t c = 0; c < report.per_class.size(); ++c) {
            const auto &m = report.per_class[c];
            std::snprintf(line, sizeof(line), "%s\tclass\t%s\t%.17g\t%.17g\t%.17g\t%llu\n",
                          name.c_str(), report.class_names[c].c_str(), m.precision, m.recall,
                          m.f1, static_cast<unsigned long long>(m.support));
            grid << line;
        }
        const auto agg = [&](const char *agg_name, const Aggregates &a) {
            std::snprintf(line, sizeof(line), "%s\taggregate\t%s\t%.17g\t%.17g\t%.17g\t%llu\n",
                          name.c_str(), agg_name, a.precision, a.recall, a.f1,
                          static_cast<unsigned long long>(cm.total()));
            grid << line;
        };
        agg("micro", report.micro);
        agg("macro", report.macro);
        agg("weighted", report.weighted);
    }

    write_text(ctx.out_dir / "sweep_report.tsv", grid.str());
    log << "sweep: report written to " << (ctx.out_dir / "sweep_report.tsv").string() << "\n";
}

namespace {

// central finite differences against the analytic backward pass
template <typename LossFn>
double finite_difference_max_rel_error(std::span<double> params, std::span<const double> analytic,
                                       LossFn loss, double h) {
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double up = loss();
        params[i] = saved - h;
        const double down = loss();
        params[i] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double rel =
            std::abs(fd - analytic[i]) / std::max({std::abs(fd), std::abs(analytic[i]), 1e-6});
        worst = std::max(worst, rel);
    }
    return worst;
}

} // namespace

double cmd_gradcheck(const CommandContext &ctx) {
    std::ostream &log = *ctx.log;
    const double h = 1e-5;
    Rng rng(ctx.config.seed);

    // tiny DBN: layers [4,3,3], 5 samples
    double dbn_worst = 0.0;
    {
        DbnArchitecture arch;
        arch.layer_sizes = {4, 3, 3};
        arch.n_classes = 3;
        DbnModel model;
        model.arch = arch;
        Rng init = rng.child("dbn-init");
        for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
            RbmParams p = make_rbm(arch.layer_sizes[l], arch.layer_sizes[l + 1], init);
            for (double &b : p.hbias)
                b = init.uniform(-0.1, 0.1);
            model.rbms.push_back(std::move(p));
        }
        model.head_w = xavier_init(arch.layer_sizes.back(), arch.n_classes, init);
        model.head_b.assign(arch.n_classes, 0.0);
        for (double &b : model.head_b)
            b = init.uniform(-0.1, 0.1);
        model.head_ready = true;

        Matrix x(5, 4);
        Rng data = rng.child("dbn-data");
        for (double &v : x.data)
            v = data.next_double();
        const std::vector<int> y = {0, 1, 2, 1, 0};

        const auto loss = [&] { return dbn_backprop(model, x, y, {}).loss; };
        const DbnGradients g = dbn_backprop(model, x, y, {});
        for (std::size_t l = 0; l < model.rbms.size(); ++l) {
            dbn_worst = std::max(dbn_worst, finite_difference_max_rel_error(
                                                model.rbms[l].w.data, g.w[l].data, loss, h));
            dbn_worst = std::max(dbn_worst, finite_difference_max_rel_error(
                                                model.rbms[l].hbias, g.hbias[l], loss, h));
        }
        dbn_worst = std::max(
            dbn_worst, finite_difference_max_rel_error(model.head_w.data, g.head_w.data, loss, h));
        dbn_worst = std::max(dbn_worst,
                             finite_difference_max_rel_error(model.head_b, g.head_b, loss, h));
    }
    log << "gradcheck DBN [4,3,3]: max relative error " << dbn_worst << "\n";

    // tiny MLP: layers [4,3,3,2]
    double mlp_worst = 0.0;
    {
        Rng init = rng.child("mlp-init");
        const std::vector<std::size_t> hidden = {3, 3};
        MlpModel model = make_mlp(4, hidden, 2, init);
        for (auto &b : model.biases)
            for (double &v : b)
                v = init.uniform(-0.1, 0.1);

        Matrix x(5, 4);
        Rng data = rng.child("mlp-data");
        for (double &v : x.data)
            v = data.uniform(-1.0, 1.0);
        const std::vector<int> y = {0, 1, 1, 0, 1};

        const auto loss = [&] { return mlp_backprop(model, x, y, {}).loss; };
        const MlpGradients g = mlp_backprop(model, x, y, {});
        for (std::size_t l = 0; l < model.weights.size(); ++l) {
            mlp_worst = std::max(mlp_worst, finite_difference_max_rel_error(
                                                model.weights[l].data, g.weights[l].data, loss, h));
            mlp_worst = std::max(mlp_worst, finite_difference_max_rel_error(
                                                model.biases[l], g.biases[l], loss, h));
        }
    }
    log << "gradcheck MLP [4,3,3,2]: max relative error " << mlp_worst << "\n";

    const double worst = std::max(dbn_worst, mlp_worst);
    log << (worst < 1e-4 ? "gradcheck PASS" : "gradcheck FAIL") << " (threshold 1e-4)\n";
    return worst;
}

} // namespace nids

#include "nids/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nids {

namespace {

std::string trim(const std::string &s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(trim(cur));
    return parts;
}

double parse_double(const std::string &key, const std::string &value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception &) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
    }
}

std::uint64_t parse_uint(const std::string &key, const std::string &value) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + value +
                          "'");
    return v;
}

bool parse_bool(const std::string &key, const std::string &value) {
    if (value == "true" || value == "1" || value == "yes")
        return true;
    if (value == "false" || value == "0" || value == "no")
        return false;
    throw ConfigError("config: '" + key + "' expects true/false, got '" + value + "'");
}

std::vector<std::size_t> parse_size_list(const std::string &key, const std::string &value) {
    std::vector<std::size_t> out;
    for (const auto &part : split(value, ','))
        out.push_back(parse_uint(key, part));
    return out;
}

} // namespace

ExperimentConfig parse_config_text(const std::string &text) {
    ExperimentConfig cfg;
    bool version_seen = false;
    std::string section;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty())
            continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) + ": malformed section");
            section = trim(stripped.substr(1, stripped.size() - 2));
            static const std::vector<std::string> kSections = {
                "run", "data", "pipeline", "balance", "model", "pretrain", "finetune", "mlp",
                "sweep"};
            if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
                throw ConfigError("config: unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const std::string qual = section.empty() ? key : section + "." + key;

        if (qual == "config_version") {
            if (parse_uint(qual, value) != 1)
                throw ConfigError("config: unsupported config_version " + value);
            version_seen = true;
        } else if (qual == "run.seed") {
            cfg.seed = parse_uint(qual, value);
        } else if (qual == "data.csv") {
            cfg.csv_paths.clear();
            for (const auto &p : split(value, ','))
                if (!p.empty())
                    cfg.csv_paths.emplace_back(p);
        } else if (qual == "data.label_map") {
            if (value == "cicids2017")
                cfg.label_map = LabelMapKind::kCicids2017;
            else if (value == "identity")
                cfg.label_map = LabelMapKind::kIdentity;
            else
                throw ConfigError("config: label_map must be cicids2017 or identity");
        } else if (qual == "pipeline.correlation_threshold") {
            cfg.correlation_threshold = parse_double(qual, value);
        } else if (qual == "pipeline.n_quantiles") {
            cfg.n_quantiles = parse_uint(qual, value);
        } else if (qual == "pipeline.scaler") {
            if (value == "quantile")
                cfg.scaler = ScalerKind::kQuantile;
            else if (value == "robust")
                cfg.scaler = ScalerKind::kRobust;
            else if (value == "none")
                cfg.scaler = ScalerKind::kNone;
            else
                throw ConfigError("config: scaler must be quantile, robust or none");
        } else if (qual == "pipeline.pca") {
            if (value == "none")
                cfg.pca_variance_target.reset();
            else
                cfg.pca_variance_target = parse_double(qual, value);
        } else if (qual == "pipeline.post_pca_rescale") {
            cfg.post_pca_rescale = parse_bool(qual, value);
        } else if (qual == "pipeline.split_fractions") {
            const auto parts = split(value, ',');
            if (parts.size() != 3)
                throw ConfigError("config: split_fractions expects three numbers");
            for (std::size_t i = 0; i < 3; ++i)
                cfg.split_fractions[i] = parse_double(qual, parts[i]);
        } else if (qual == "pipeline.split_order") {
            if (value == "shuffled")
                cfg.split_order = SplitOrder::kShuffled;
            else if (value == "contiguous")
                cfg.split_order = SplitOrder::kContiguous;
            else
                throw ConfigError("config: split_order must be shuffled or contiguous");
        } else if (qual == "balance.strategy") {
            cfg.balance_strategy = balance_strategy_from_name(value);
        } else if (qual == "balance.targets") {
            cfg.balance_targets.clear();
            if (value != "auto") {
                for (const auto &pair : split(value, ',')) {
                    const std::size_t colon = pair.rfind(':');
                    if (colon == std::string::npos)
                        throw ConfigError("config: balance targets expect Class:count pairs");
                    cfg.balance_targets.emplace_back(trim(pair.substr(0, colon)),
                                                     parse_uint(qual, trim(pair.substr(colon + 1))));
                }
            }
        } else if (qual == "balance.smote_k") {
            cfg.smote_k = parse_uint(qual, value);
            if (cfg.smote_k < 1)
                throw ConfigError("config: smote_k must be >= 1");
        } else if (qual == "model.kind") {
            if (value == "dbn")
                cfg.model = ModelKind::kDbn;
            else if (value == "mlp")
                cfg.model = ModelKind::kMlp;
            else
                throw ConfigError("config: model kind must be dbn or mlp");
        } else if (qual == "model.hidden_layers") {
            cfg.hidden_layers = parse_size_list(qual, value);
            if (cfg.hidden_layers.empty())
                throw ConfigError("config: hidden_layers must not be empty");
        } else if (qual == "pretrain.epochs") {
            cfg.pretrain.epochs = parse_uint(qual, value);
        } else if (qual == "pretrain.learning_rate") {
            cfg.pretrain.learning_rate = parse_double(qual, value);
        } else if (qual == "pretrain.batch_size") {
            cfg.pretrain.batch_size = parse_uint(qual, value);
        } else if (qual == "pretrain.momentum") {
            cfg.pretrain.momentum = parse_double(qual, value);
        } else if (qual == "pretrain.gibbs_steps") {
            cfg.pretrain.gibbs_steps = static_cast<int>(parse_uint(qual, value));
        } else if (qual == "finetune.epochs") {
            cfg.finetune.epochs = parse_uint(qual, value);
        } else if (qual == "finetune.learning_rate") {
            cfg.finetune.learning_rate = parse_double(qual, value);
        } else if (qual == "finetune.batch_size") {
            cfg.finetune.batch_size = parse_uint(qual, value);
        } else if (qual == "finetune.optimiser") {
            if (value == "adam")
                cfg.finetune.optimiser = Optimiser::kAdam;
            else if (value == "sgd")
                cfg.finetune.optimiser = Optimiser::kSgd;
            else
                throw ConfigError("config: optimiser must be adam or sgd");
        } else if (qual == "finetune.weighted_sampling") {
            cfg.finetune.weighted_batch_sampling = parse_bool(qual, value);
        } else if (qual == "mlp.hidden_layers") {
            cfg.mlp.hidden = parse_size_list(qual, value);
        } else if (qual == "mlp.epochs") {
            cfg.mlp.epochs = parse_uint(qual, value);
        } else if (qual == "mlp.learning_rate") {
            cfg.mlp.learning_rate = parse_double(qual, value);
        } else if (qual == "mlp.batch_size") {
            cfg.mlp.batch_size = parse_uint(qual, value);
        } else if (qual == "mlp.momentum") {
            cfg.mlp.momentum = parse_double(qual, value);
        } else if (qual == "mlp.weighted_sampling") {
            cfg.mlp.weighted_batch_sampling = parse_bool(qual, value);
        } else if (qual == "sweep.strategies") {
            cfg.sweep_strategies.clear();
            for (const auto &name : split(value, ','))
                cfg.sweep_strategies.push_back(balance_strategy_from_name(name));
        } else {
            throw ConfigError("config: unknown key '" + qual + "'");
        }
    }

    if (!version_seen)
        throw ConfigError("config: missing config_version");
    if (cfg.pretrain.gibbs_steps < 1)
        throw ConfigError("config: gibbs_steps must be >= 1");
    if (cfg.pretrain.batch_size == 0 || cfg.finetune.batch_size == 0 || cfg.mlp.batch_size == 0)
        throw ConfigError("config: batch sizes must be positive");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

std::string config_to_text(const ExperimentConfig &cfg) {
    std::ostringstream os;
    char buf[64];
    const auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };

    os << "config_version = 1\n\n";
    os << "[run]\nseed = " << cfg.seed << "\n\n";
    os << "[data]\ncsv = ";
    for (std::size_t i = 0; i < cfg.csv_paths.size(); ++i)
        os << (i ? "," : "") << cfg.csv_paths[i].string();
    os << "\nlabel_map = " << (cfg.label_map == LabelMapKind::kCicids2017 ? "cicids2017" : "identity")
       << "\n\n";
    os << "[pipeline]\n";
    os << "correlation_threshold = " << num(cfg.correlation_threshold) << '\n';
    os << "n_quantiles = " << cfg.n_quantiles << '\n';
    os << "scaler = "
       << (cfg.scaler == ScalerKind::kQuantile ? "quantile"
                                               : cfg.scaler == ScalerKind::kRobust ? "robust" : "none")
       << '\n';
    os << "pca = " << (cfg.pca_variance_target ? num(*cfg.pca_variance_target) : "none") << '\n';
    os << "post_pca_rescale = " << (cfg.post_pca_rescale ? "true" : "false") << '\n';
    os << "split_fractions = " << num(cfg.split_fractions[0]) << "," << num(cfg.split_fractions[1])
       << "," << num(cfg.split_fractions[2]) << '\n';
    os << "split_order = " << (cfg.split_order == SplitOrder::kShuffled ? "shuffled" : "contiguous")
       << "\n\n";
    os << "[balance]\n";
    os << "strategy = " << balance_strategy_name(cfg.balance_strategy) << '\n';
    os << "targets = ";
    if (cfg.balance_targets.empty()) {
        os << "auto";
    } else {
        for (std::size_t i = 0; i < cfg.balance_targets.size(); ++i)
            os << (i ? "," : "") << cfg.balance_targets[i].first << ':'
               << cfg.balance_targets[i].second;
    }
    os << '\n';
    os << "smote_k = " << cfg.smote_k << "\n\n";
    os << "[model]\n";
    os << "kind = " << (cfg.model == ModelKind::kDbn ? "dbn" : "mlp") << '\n';
    os << "hidden_layers = ";
    for (std::size_t i = 0; i < cfg.hidden_layers.size(); ++i)
        os << (i ? "," : "") << cfg.hidden_layers[i];
    os << "\n\n";
    os << "[pretrain]\n";
    os << "epochs = " << cfg.pretrain.epochs << '\n';
    os << "learning_rate = " << num(cfg.pretrain.learning_rate) << '\n';
    os << "batch_size = " << cfg.pretrain.batch_size << '\n';
    os << "momentum = " << num(cfg.pretrain.momentum) << '\n';
    os << "gibbs_steps = " << cfg.pretrain.gibbs_steps << "\n\n";
    os << "[finetune]\n";
    os << "epochs = " << cfg.finetune.epochs << '\n';
    os << "learning_rate = " << num(cfg.finetune.learning_rate) << '\n';
    os << "batch_size = " << cfg.finetune.batch_size << '\n';
    os << "optimiser = " << (cfg.finetune.optimiser == Optimiser::kAdam ? "adam" : "sgd") << '\n';
    os << "weighted_sampling = " << (cfg.finetune.weighted_batch_sampling ? "true" : "false")
       << "\n\n";
    os << "[mlp]\n";
    os << "hidden_layers = ";
    for (std::size_t i = 0; i < cfg.mlp.hidden.size(); ++i)
        os << (i ? "," : "") << cfg.mlp.hidden[i];
    os << '\n';
    os << "epochs = " << cfg.mlp.epochs << '\n';
    os << "learning_rate = " << num(cfg.mlp.learning_rate) << '\n';
    os << "batch_size = " << cfg.mlp.batch_size << '\n';
    os << "momentum = " << num(cfg.mlp.momentum) << '\n';
    os << "weighted_sampling = " << (cfg.mlp.weighted_batch_sampling ? "true" : "false") << "\n\n";
    os << "[sweep]\nstrategies = ";
    for (std::size_t i = 0; i < cfg.sweep_strategies.size(); ++i)
        os << (i ? "," : "") << balance_strategy_name(cfg.sweep_strategies[i]);
    os << '\n';
    return os.str();
}

} // namespace nids

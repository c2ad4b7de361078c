#include "nids/balancing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nids {

BalanceStrategy balance_strategy_from_name(const std::string &name) {
    if (name == "none")
        return BalanceStrategy::kNone;
    if (name == "undersample")
        return BalanceStrategy::kUndersample;
    if (name == "smote")
        return BalanceStrategy::kSmote;
    if (name == "smote_undersample")
        return BalanceStrategy::kSmoteUndersample;
    if (name == "class_weights")
        return BalanceStrategy::kClassWeights;
    if (name == "sample_weights")
        return BalanceStrategy::kSampleWeights;
    throw ConfigError("unknown balance strategy: '" + name + "'");
}

const char *balance_strategy_name(BalanceStrategy s) {
    switch (s) {
    case BalanceStrategy::kNone:
        return "none";
    case BalanceStrategy::kUndersample:
        return "undersample";
    case BalanceStrategy::kSmote:
        return "smote";
    case BalanceStrategy::kSmoteUndersample:
        return "smote_undersample";
    case BalanceStrategy::kClassWeights:
        return "class_weights";
    case BalanceStrategy::kSampleWeights:
        return "sample_weights";
    }
    return "none";
}

std::vector<std::size_t> class_counts(const std::vector<int> &labels, std::size_t n_classes) {
    std::vector<std::size_t> counts(n_classes, 0);
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= n_classes)
            throw DataError("label out of range");
        counts[static_cast<std::size_t>(y)] += 1;
    }
    return counts;
}

std::map<std::size_t, std::size_t> default_balance_targets(const std::vector<std::size_t> &counts) {
    std::vector<std::size_t> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t pivot_rank = std::min<std::size_t>(2, sorted.size() - 1);
    const std::size_t pivot = sorted[pivot_rank];
    std::map<std::size_t, std::size_t> targets;
    for (std::size_t c = 0; c < counts.size(); ++c)
        targets[c] = pivot;
    return targets;
}

namespace {

Dataset rows_subset(const Dataset &ds, const std::vector<std::size_t> &rows) {
    Dataset out;
    out.feature_names = ds.feature_names;
    out.class_names = ds.class_names;
    out.features = Matrix(rows.size(), ds.cols());
    out.labels.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto src = ds.features.row(rows[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.labels[i] = ds.labels[rows[i]];
    }
    return out;
}

} // namespace

Dataset random_undersample(const Dataset &ds, const std::map<std::size_t, std::size_t> &targets,
                           Rng &rng) {
    const std::size_t n_classes = ds.class_names.size();
    auto counts = class_counts(ds.labels, n_classes);
    for (const auto &[c, target] : targets) {
        if (c >= n_classes)
            throw ConfigError("undersample target for unknown class index");
        if (target > counts[c])
            throw ConfigError("undersample target " + std::to_string(target) + " exceeds " +
                              std::to_string(counts[c]) + " rows of class '" + ds.class_names[c] +
                              "'");
    }

    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t r = 0; r < ds.rows(); ++r)
        by_class[static_cast<std::size_t>(ds.labels[r])].push_back(r);

    const Rng pick_root = rng.child("undersample");
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < n_classes; ++c) {
        auto &idx = by_class[c];
        const auto it = targets.find(c);
        if (it == targets.end() || it->second == idx.size()) {
            keep.insert(keep.end(), idx.begin(), idx.end());
            continue;
        }
        // partial Fisher-Yates: the first `target` slots are a uniform
        // without-replacement sample
        Rng pick = pick_root.child(c);
        const std::size_t target = it->second;
        for (std::size_t i = 0; i < target; ++i) {
            const std::size_t j = i + pick.bounded(idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(target));
    }
    std::sort(keep.begin(), keep.end());
    return rows_subset(ds, keep);
}

namespace {

// Exact k nearest same-class neighbours by Euclidean distance; ties resolve
// toward the lower row index so results are reproducible.
std::vector<std::vector<std::size_t>> knn_indices(const Matrix &points, std::size_t k) {
    const std::size_t n = points.rows;
    std::vector<std::vector<std::size_t>> nns(n);
    const std::ptrdiff_t pn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n > 256)
    for (std::ptrdiff_t i = 0; i < pn; ++i) {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(n - 1);
        auto a = points.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < n; ++j) {
            if (j == static_cast<std::size_t>(i))
                continue;
            auto b = points.row(j);
            double d2 = 0.0;
            for (std::size_t t = 0; t < a.size(); ++t) {
                const double diff = a[t] - b[t];
                d2 += diff * diff;
            }
            dist.emplace_back(d2, j);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        auto &out = nns[static_cast<std::size_t>(i)];
        out.resize(k);
        for (std::size_t t = 0; t < k; ++t)
            out[t] = dist[t].second;
    }
    return nns;
}

} // namespace

Dataset smote(const Dataset &ds, const std::map<std::size_t, std::size_t> &targets, std::size_t k,
              Rng &rng, SmoteStats *stats) {
    if (k < 1)
        throw ConfigError("smote: k must be at least 1");
    const std::size_t n_classes = ds.class_names.size();
    auto counts = class_counts(ds.labels, n_classes);

    SmoteStats local;
    Dataset out = ds;
    const Rng synth_root = rng.child("smote");

    for (const auto &[c, target] : targets) {
        if (c >= n_classes)
            throw ConfigError("smote target for unknown class index");
        if (target <= counts[c])
            continue;
        if (counts[c] < 2)
            throw ConfigError("smote: class '" + ds.class_names[c] +
                              "' needs at least 2 samples to oversample");

        std::vector<std::size_t> members;
        for (std::size_t r = 0; r < ds.rows(); ++r)
            if (static_cast<std::size_t>(ds.labels[r]) == c)
                members.push_back(r);

        std::size_t k_eff = k;
        if (k_eff >= members.size()) {
            k_eff = members.size() - 1;
            local.k_clamped_classes += 1;
        }

        Matrix points(members.size(), ds.cols());
        for (std::size_t i = 0; i < members.size(); ++i) {
            auto src = ds.features.row(members[i]);
            std::copy(src.begin(), src.end(), points.row(i).begin());
        }
        const auto nns = knn_indices(points, k_eff);

        Rng synth = synth_root.child(c);
        const std::size_t need = target - counts[c];
        for (std::size_t s = 0; s < need; ++s) {
            const std::size_t parent = synth.bounded(members.size());
            const std::size_t neighbour = nns[parent][synth.bounded(k_eff)];
            const double u = synth.next_double();
            auto x = points.row(parent);
            auto nb = points.row(neighbour);
            for (std::size_t t = 0; t < x.size(); ++t)
                out.features.data.push_back(x[t] + u * (nb[t] - x[t]));
            out.labels.push_back(static_cast<int>(c));
            local.synthetic_rows += 1;
        }
    }
    out.features.rows += local.synthetic_rows;
    if (stats)
        *stats = local;
    return out;
}

std::vector<double> class_weights(const std::vector<std::size_t> &counts) {
    const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    std::vector<double> w(counts.size());
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0)
            throw DataError("class_weights: class " + std::to_string(c) + " has zero samples");
        w[c] = static_cast<double>(total) /
               (static_cast<double>(counts.size()) * static_cast<double>(counts[c]));
    }
    return w;
}

std::vector<double> sample_weights(const std::vector<int> &labels, std::size_t n_classes) {
    const auto cw = class_weights(class_counts(labels, n_classes));
    std::vector<double> w(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        w[i] = cw[static_cast<std::size_t>(labels[i])];
    return w;
}

Dataset apply_resampling(const Dataset &train, const BalanceSpec &spec, Rng &rng,
                         SmoteStats *stats) {
    const std::size_t n_classes = train.class_names.size();
    const auto counts = class_counts(train.labels, n_classes);
    std::map<std::size_t, std::size_t> targets =
        spec.targets.empty() ? default_balance_targets(counts) : spec.targets;

    switch (spec.strategy) {
    case BalanceStrategy::kNone:
    case BalanceStrategy::kClassWeights:
    case BalanceStrategy::kSampleWeights:
        return train;
    case BalanceStrategy::kUndersample: {
        std::map<std::size_t, std::size_t> down;
        for (const auto &[c, t] : targets)
            if (t < counts[c])
                down[c] = t;
        return random_undersample(train, down, rng);
    }
    case BalanceStrategy::kSmote: {
        std::map<std::size_t, std::size_t> up;
        for (const auto &[c, t] : targets)
            if (t > counts[c])
                up[c] = t;
        return smote(train, up, spec.smote_k, rng, stats);
    }
    case BalanceStrategy::kSmoteUndersample: {
        std::map<std::size_t, std::size_t> down, up;
        for (const auto &[c, t] : targets) {
            if (t < counts[c])
                down[c] = t;
            else if (t > counts[c])
                up[c] = t;
        }
        Dataset reduced = random_undersample(train, down, rng);
        return smote(reduced, up, spec.smote_k, rng, stats);
    }
    }
    return train;
}

} // namespace nids

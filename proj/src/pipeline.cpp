#include "nids/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <sstream>

#include "nids/io_util.hpp"
#include "nids/kernels.hpp"

namespace nids {

namespace {

Dataset subset_columns(const Dataset &ds, const std::vector<std::size_t> &keep) {
    Dataset out;
    out.labels = ds.labels;
    out.class_names = ds.class_names;
    out.features = Matrix(ds.rows(), keep.size());
    for (std::size_t k : keep)
        out.feature_names.push_back(ds.feature_names[k]);
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        auto src = ds.features.row(r);
        auto dst = out.features.row(r);
        for (std::size_t k = 0; k < keep.size(); ++k)
            dst[k] = src[keep[k]];
    }
    return out;
}

Dataset subset_rows(const Dataset &ds, const std::vector<std::size_t> &rows) {
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

// Linear-interpolation percentile of a sorted vector, q in [0,1].
double sorted_percentile(const std::vector<double> &sorted, double q) {
    if (sorted.empty())
        throw DataError("percentile of empty column");
    if (sorted.size() == 1)
        return sorted[0];
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size())
        return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> column_of(const Matrix &m, std::size_t j) {
    std::vector<double> col(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r)
        col[r] = m(r, j);
    return col;
}

} // namespace

DropResult drop_zero_variance(const Dataset &ds) {
    if (ds.rows() == 0)
        throw DataError("drop_zero_variance: empty dataset");
    DropResult result;
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        double mn = ds.features(0, j), mx = mn;
        for (std::size_t r = 1; r < ds.rows(); ++r) {
            const double v = ds.features(r, j);
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        if (mn == mx) // variance exactly zero
            result.removed.push_back(ds.feature_names[j]);
        else
            keep.push_back(j);
    }
    result.dataset = subset_columns(ds, keep);
    return result;
}

DropResult drop_correlated(const Dataset &ds, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw ConfigError("correlation threshold must lie in (0,1]");
    const std::size_t n = ds.rows();
    const std::size_t d = ds.cols();
    if (n < 2)
        throw DataError("drop_correlated: need at least two rows");

    std::vector<double> mean(d, 0.0), norm(d, 0.0); // norm = sqrt(sum (x-mean)^2)
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            s += ds.features(r, j);
        mean[j] = s / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double c = ds.features(r, j) - mean[j];
            ss += c * c;
        }
        norm[j] = std::sqrt(ss);
    }

    DropResult result;
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < d; ++j) {
        bool redundant = false;
        const std::ptrdiff_t n_kept = static_cast<std::ptrdiff_t>(kept.size());
#pragma omp parallel for schedule(static) if (n_kept > 2 && n > 4096)
        for (std::ptrdiff_t ki = 0; ki < n_kept; ++ki) {
            const std::size_t k = kept[static_cast<std::size_t>(ki)];
            if (norm[j] == 0.0 || norm[k] == 0.0)
                continue; // constant column: treat as uncorrelated
            double dot = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                dot += (ds.features(r, j) - mean[j]) * (ds.features(r, k) - mean[k]);
            const double r_jk = dot / (norm[j] * norm[k]);
            if (std::abs(r_jk) >= threshold) {
#pragma omp atomic write
                redundant = true;
            }
        }
        if (redundant)
            result.removed.push_back(ds.feature_names[j]);
        else
            kept.push_back(j);
    }
    result.dataset = subset_columns(ds, kept);
    return result;
}

SplitResult stratified_split(const Dataset &ds, std::array<double, 3> fractions, Rng &rng,
                             SplitOrder order) {
    for (double f : fractions)
        if (!(f > 0.0))
            throw ConfigError("split fractions must be positive");
    if (std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) > 1e-9)
        throw ConfigError("split fractions must sum to 1");

    const std::size_t n_classes = ds.class_names.size();
    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t r = 0; r < ds.rows(); ++r)
        by_class[static_cast<std::size_t>(ds.labels[r])].push_back(r);

    const Rng class_rng = rng.child("split");
    std::vector<std::size_t> train_idx, val_idx, test_idx;
    for (std::size_t c = 0; c < n_classes; ++c) {
        auto &idx = by_class[c];
        if (idx.size() < 3)
            throw DataError("class '" + ds.class_names[c] + "' has fewer than 3 samples");
        if (order == SplitOrder::kShuffled) {
            Rng shuffle = class_rng.child(c);
            for (std::size_t i = idx.size(); i > 1; --i)
                std::swap(idx[i - 1], idx[shuffle.bounded(i)]);
        }
        const double nc = static_cast<double>(idx.size());
        const std::size_t c1 = static_cast<std::size_t>(std::llround(nc * fractions[0]));
        const std::size_t c12 =
            static_cast<std::size_t>(std::llround(nc * (fractions[0] + fractions[1])));
        train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(c1));
        val_idx.insert(val_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(c1),
                       idx.begin() + static_cast<std::ptrdiff_t>(c12));
        test_idx.insert(test_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(c12), idx.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {subset_rows(ds, train_idx), subset_rows(ds, val_idx), subset_rows(ds, test_idx)};
}

QuantileTransform quantile_fit(const Matrix &train_features, std::size_t n_quantiles) {
    if (train_features.rows == 0)
        throw DataError("quantile_fit: no rows");
    if (n_quantiles < 2)
        throw ConfigError("quantile_fit: need at least 2 quantiles");
    QuantileTransform qt;
    qt.n_quantiles = n_quantiles;
    qt.references.resize(train_features.cols);
    for (std::size_t j = 0; j < train_features.cols; ++j) {
        auto col = column_of(train_features, j);
        std::sort(col.begin(), col.end());
        auto &refs = qt.references[j];
        refs.resize(n_quantiles);
        for (std::size_t i = 0; i < n_quantiles; ++i)
            refs[i] = sorted_percentile(col,
                                        static_cast<double>(i) / static_cast<double>(n_quantiles - 1));
    }
    return qt;
}

namespace {

double quantile_map_one(const std::vector<double> &refs, double x) {
    const std::size_t m = refs.size();
    if (refs.front() == refs.back())
        return 0.0; // collapsed table: constant feature
    if (x <= refs.front())
        return 0.0;
    if (x >= refs.back())
        return 1.0;
    const auto prob = [&](std::size_t i) {
        return static_cast<double>(i) / static_cast<double>(m - 1);
    };
    // forward pass (leftmost plateau edge)
    const auto lo = std::lower_bound(refs.begin(), refs.end(), x);
    double p_left;
    if (*lo == x) {
        p_left = prob(static_cast<std::size_t>(lo - refs.begin()));
    } else {
        const std::size_t i = static_cast<std::size_t>(lo - refs.begin());
        const double span = refs[i] - refs[i - 1];
        p_left = prob(i - 1) + (x - refs[i - 1]) / span * (prob(i) - prob(i - 1));
    }
    // backward pass (rightmost plateau edge)
    const auto hi = std::upper_bound(refs.begin(), refs.end(), x);
    const std::size_t jr = static_cast<std::size_t>(hi - refs.begin()) - 1;
    double p_right;
    if (refs[jr] == x) {
        p_right = prob(jr);
    } else {
        const double span = refs[jr + 1] - refs[jr];
        p_right = prob(jr) + (x - refs[jr]) / span * (prob(jr + 1) - prob(jr));
    }
    return std::clamp(0.5 * (p_left + p_right), 0.0, 1.0);
}

} // namespace

Matrix quantile_apply(const QuantileTransform &qt, const Matrix &features) {
    if (qt.references.empty())
        throw StateError("quantile_apply: transform not fitted");
    if (features.cols != qt.references.size())
        throw ShapeError("quantile_apply: feature width mismatch");
    Matrix out(features.rows, features.cols);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(features.rows);
#pragma omp parallel for schedule(static) if (features.size() >= 16384)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        auto src = features.row(static_cast<std::size_t>(r));
        auto dst = out.row(static_cast<std::size_t>(r));
        for (std::size_t j = 0; j < features.cols; ++j)
            dst[j] = quantile_map_one(qt.references[j], src[j]);
    }
    return out;
}

RobustScaler robust_scale_fit(const Matrix &train_features) {
    if (train_features.rows == 0)
        throw DataError("robust_scale_fit: no rows");
    RobustScaler rs;
    rs.median.resize(train_features.cols);
    rs.iqr.resize(train_features.cols);
    for (std::size_t j = 0; j < train_features.cols; ++j) {
        auto col = column_of(train_features, j);
        std::sort(col.begin(), col.end());
        rs.median[j] = sorted_percentile(col, 0.5);
        rs.iqr[j] = sorted_percentile(col, 0.75) - sorted_percentile(col, 0.25);
    }
    return rs;
}

Matrix robust_scale_apply(const RobustScaler &rs, const Matrix &features) {
    if (rs.median.empty())
        throw StateError("robust_scale_apply: scaler not fitted");
    if (features.cols != rs.median.size())
        throw ShapeError("robust_scale_apply: feature width mismatch");
    Matrix out(features.rows, features.cols);
    for (std::size_t r = 0; r < features.rows; ++r)
        for (std::size_t j = 0; j < features.cols; ++j) {
            const double div = rs.iqr[j] == 0.0 ? 1.0 : rs.iqr[j];
            out(r, j) = (features(r, j) - rs.median[j]) / div;
        }
    return out;
}

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
// eigenvalues in `eigvals` and eigenvectors as columns of `eigvecs`.
void jacobi_eigen(Matrix a, std::vector<double> &eigvals, Matrix &eigvecs) {
    const std::size_t d = a.rows;
    eigvecs = Matrix(d, d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        eigvecs(i, i) = 1.0;

    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q)
                off += a(p, q) * a(p, q);
        double diag = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            diag += a(p, p) * a(p, p);
        if (off <= 1e-30 * std::max(diag, 1e-300))
            break;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0)
                    continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < d; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double vip = eigvecs(i, p), viq = eigvecs(i, q);
                    eigvecs(i, p) = c * vip - s * viq;
                    eigvecs(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    eigvals.resize(d);
    for (std::size_t i = 0; i < d; ++i)
        eigvals[i] = a(i, i);
}

} // namespace

PcaBasis pca_fit(const Matrix &train_features, double variance_target) {
    const std::size_t n = train_features.rows;
    const std::size_t d = train_features.cols;
    if (n < 2)
        throw DataError("pca_fit: need at least 2 rows");
    if (!(variance_target > 0.0 && variance_target <= 1.0))
        throw ConfigError("pca_fit: variance target must lie in (0,1]");

    PcaBasis basis;
    basis.mean.assign(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < d; ++j)
            basis.mean[j] += train_features(r, j);
    for (double &m : basis.mean)
        m /= static_cast<double>(n);

    Matrix centered(n, d);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < d; ++j)
            centered(r, j) = train_features(r, j) - basis.mean[j];

    Matrix cov = matmul_tn(centered, centered);
    for (double &v : cov.data)
        v /= static_cast<double>(n - 1);

    std::vector<double> eigvals;
    Matrix eigvecs;
    jacobi_eigen(cov, eigvals, eigvecs);

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return eigvals[a] > eigvals[b]; });

    double total = 0.0;
    for (double ev : eigvals)
        total += std::max(ev, 0.0);
    if (total <= 0.0)
        throw DataError("pca_fit: data has no variance");

    std::size_t k = 0;
    double cumulative = 0.0;
    std::vector<double> ratios;
    for (std::size_t i = 0; i < d; ++i) {
        const double ratio = std::max(eigvals[order[i]], 0.0) / total;
        ratios.push_back(ratio);
        cumulative += ratio;
        k = i + 1;
        if (cumulative >= variance_target - 1e-12)
            break;
    }

    basis.components = Matrix(d, k);
    basis.explained_ratio.assign(ratios.begin(), ratios.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t src = order[c];
        // deterministic sign: the entry with the largest magnitude is positive
        std::size_t pivot = 0;
        for (std::size_t i = 1; i < d; ++i)
            if (std::abs(eigvecs(i, src)) > std::abs(eigvecs(pivot, src)))
                pivot = i;
        const double sign = eigvecs(pivot, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < d; ++i)
            basis.components(i, c) = sign * eigvecs(i, src);
    }
    return basis;
}

Matrix pca_apply(const PcaBasis &basis, const Matrix &features) {
    if (basis.components.rows == 0)
        throw StateError("pca_apply: basis not fitted");
    if (features.cols != basis.components.rows)
        throw ShapeError("pca_apply: feature width mismatch");
    Matrix centered(features.rows, features.cols);
    for (std::size_t r = 0; r < features.rows; ++r)
        for (std::size_t j = 0; j < features.cols; ++j)
            centered(r, j) = features(r, j) - basis.mean[j];
    return matmul(centered, basis.components);
}

MinMaxScaler minmax_fit(const Matrix &train_features) {
    if (train_features.rows == 0)
        throw DataError("minmax_fit: no rows");
    MinMaxScaler mm;
    mm.min.resize(train_features.cols);
    mm.max.resize(train_features.cols);
    for (std::size_t j = 0; j < train_features.cols; ++j) {
        double mn = train_features(0, j), mx = mn;
        for (std::size_t r = 1; r < train_features.rows; ++r) {
            mn = std::min(mn, train_features(r, j));
            mx = std::max(mx, train_features(r, j));
        }
        mm.min[j] = mn;
        mm.max[j] = mx;
    }
    return mm;
}

Matrix minmax_apply(const MinMaxScaler &mm, const Matrix &features) {
    if (mm.min.empty())
        throw StateError("minmax_apply: scaler not fitted");
    if (features.cols != mm.min.size())
        throw ShapeError("minmax_apply: feature width mismatch");
    Matrix out(features.rows, features.cols);
    for (std::size_t r = 0; r < features.rows; ++r)
        for (std::size_t j = 0; j < features.cols; ++j) {
            const double range = mm.max[j] - mm.min[j];
            out(r, j) = range == 0.0 ? 0.0
                                     : std::clamp((features(r, j) - mm.min[j]) / range, 0.0, 1.0);
        }
    return out;
}

Matrix PipelineArtifact::transform(const Matrix &features) const {
    Matrix x = features;
    switch (scaler) {
    case ScalerKind::kQuantile:
        x = quantile_apply(quantile, x);
        break;
    case ScalerKind::kRobust:
        x = robust_scale_apply(robust, x);
        break;
    case ScalerKind::kNone:
        break;
    }
    if (pca)
        x = pca_apply(*pca, x);
    if (post_rescale)
        x = minmax_apply(*post_rescale, x);
    return x;
}

namespace {

const char *scaler_name(ScalerKind kind) {
    switch (kind) {
    case ScalerKind::kQuantile:
        return "quantile";
    case ScalerKind::kRobust:
        return "robust";
    case ScalerKind::kNone:
        return "none";
    }
    return "none";
}

ScalerKind scaler_from_name(const std::string &name) {
    if (name == "quantile")
        return ScalerKind::kQuantile;
    if (name == "robust")
        return ScalerKind::kRobust;
    if (name == "none")
        return ScalerKind::kNone;
    throw FormatError("unknown scaler kind: " + name);
}

} // namespace

std::vector<std::byte> artifact_to_bytes(const PipelineArtifact &art) {
    // text header first, so the file stays inspectable with `head`
    std::ostringstream header;
    header << "NIDSPIPE 1\n";
    header << "columns " << art.kept_columns.size() << '\n';
    for (const auto &name : art.kept_columns) {
        if (name.find('\n') != std::string::npos)
            throw DataError("column names must not contain newlines");
        header << "column " << name << '\n';
    }
    header << "scaler " << scaler_name(art.scaler) << '\n';
    header << "n_quantiles " << (art.scaler == ScalerKind::kQuantile ? art.quantile.n_quantiles : 0)
           << '\n';
    header << "pca " << (art.pca ? 1 : 0) << '\n';
    header << "pca_in " << (art.pca ? art.pca->components.rows : 0) << '\n';
    header << "pca_k " << (art.pca ? art.pca->components.cols : 0) << '\n';
    header << "post_rescale " << (art.post_rescale ?art.post_rescale->min.size() : 0) << '\n';
    header << "fitted_rows " << art.fitted_rows << '\n';

    std::vector<double> payload;
    if (art.scaler == ScalerKind::kQuantile) {
        for (const auto &refs : art.quantile.references)
            payload.insert(payload.end(), refs.begin(), refs.end());
    } else if (art.scaler == ScalerKind::kRobust) {
        payload.insert(payload.end(), art.robust.median.begin(), art.robust.median.end());
        payload.insert(payload.end(), art.robust.iqr.begin(), art.robust.iqr.end());
    }
    if (art.pca) {
        payload.insert(payload.end(), art.pca->mean.begin(), art.pca->mean.end());
        payload.insert(payload.end(), art.pca->components.data.begin(),
                       art.pca->components.data.end());
        payload.insert(payload.end(), art.pca->explained_ratio.begin(),
                       art.pca->explained_ratio.end());
    }
    if (art.post_rescale) {
        payload.insert(payload.end(), art.post_rescale->min.begin(), art.post_rescale->min.end());
        payload.insert(payload.end(), art.post_rescale->max.begin(), art.post_rescale->max.end());
    }

    ByteWriter bytes;
    for (double v : payload)
        bytes.f64(v);
    header << "payload_count " << payload.size() << '\n';
    char checksum[32];
    std::snprintf(checksum, sizeof(checksum), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.bytes())));
    header << "payload_fnv1a64 " << checksum << '\n';
    header << "---\n";

    const std::string htext = header.str();
    ByteWriter out;
    out.raw(std::as_bytes(std::span<const char>(htext.data(), htext.size())));
    out.raw(bytes.bytes());
    return out.take();
}

PipelineArtifact artifact_from_bytes(std::span<const std::byte> bytes) {
    const std::string_view text(reinterpret_cast<const char *>(bytes.data()), bytes.size());
    const std::string_view sep = "---\n";
    const std::size_t sep_pos = text.find(sep);
    if (sep_pos == std::string_view::npos)
        throw FormatError("pipeline artifact: missing header separator");
    std::istringstream header(std::string(text.substr(0, sep_pos)));
    std::string magic;
    int version = 0;
    header >> magic >> version;
    if (magic != "NIDSPIPE")
        throw FormatError("pipeline artifact: bad magic");
    if (version != 1)
        throw FormatError("pipeline artifact: unsupported version");

    PipelineArtifact art;
    std::string key;
    std::size_t n_columns = 0, n_quantiles = 0, pca_flag = 0, pca_in = 0, pca_k = 0,
                rescale_dims = 0, payload_count = 0;
    std::string checksum_hex;
    std::string line;
    std::getline(header, line); // rest of magic line
    while (std::getline(header, line)) {
        std::istringstream ls(line);
        ls >> key;
        if (key == "columns") {
            ls >> n_columns;
        } else if (key == "column") {
            std::string name;
            std::getline(ls, name);
            if (!name.empty() && name.front() == ' ')
                name.erase(name.begin());
            art.kept_columns.push_back(name);
        } else if (key == "scaler") {
            std::string name;
            ls >> name;
            art.scaler = scaler_from_name(name);
        } else if (key == "n_quantiles") {
            ls >> n_quantiles;
        } else if (key == "pca") {
            ls >> pca_flag;
        } else if (key == "pca_in") {
            ls >> pca_in;
        } else if (key == "pca_k") {
            ls >> pca_k;
        } else if (key == "post_rescale") {
            ls >> rescale_dims;
        } else if (key == "fitted_rows") {
            ls >> art.fitted_rows;
        } else if (key == "payload_count") {
            ls >> payload_count;
        } else if (key == "payload_fnv1a64") {
            ls >> checksum_hex;
        } else if (!key.empty()) {
            throw FormatError("pipeline artifact: unknown header key '" + key + "'");
        }
        key.clear();
    }
    if (art.kept_columns.size() != n_columns)
        throw FormatError("pipeline artifact: column count mismatch");

    auto payload_bytes = bytes.subspan(sep_pos + sep.size());
    if (payload_bytes.size() != payload_count * sizeof(double))
        throw FormatError("pipeline artifact: payload size mismatch");
    char expect[32];
    std::snprintf(expect, sizeof(expect), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload_bytes)));
    if (checksum_hex != expect)
        throw FormatError("pipeline artifact: checksum mismatch");

    ByteReader r(payload_bytes);
    if (art.scaler == ScalerKind::kQuantile) {
        art.quantile.n_quantiles = n_quantiles;
        art.quantile.references.resize(n_columns);
        for (auto &refs : art.quantile.references) {
            refs.resize(n_quantiles);
            for (double &v : refs)
                v = r.f64();
        }
    } else if (art.scaler == ScalerKind::kRobust) {
        art.robust.median.resize(n_columns);
        for (double &v : art.robust.median)
            v = r.f64();
        art.robust.iqr.resize(n_columns);
        for (double &v : art.robust.iqr)
            v = r.f64();
    }
    if (pca_flag) {
        PcaBasis basis;
        basis.mean.resize(pca_in);
        for (double &v : basis.mean)
            v = r.f64();
        basis.components = Matrix(pca_in, pca_k);
        for (double &v : basis.components.data)
            v = r.f64();
        basis.explained_ratio.resize(pca_k);
        for (double &v : basis.explained_ratio)
            v = r.f64();
        art.pca = std::move(basis);
    }
    if (rescale_dims) {
        MinMaxScaler mm;
        mm.min.resize(rescale_dims);
        for (double &v : mm.min)
            v = r.f64();
        mm.max.resize(rescale_dims);
        for (double &v : mm.max)
            v = r.f64();
        art.post_rescale = std::move(mm);
    }
    return art;
}

void save_artifact(const PipelineArtifact &art, const std::filesystem::path &path) {
    write_file(path, artifact_to_bytes(art));
}

PipelineArtifact load_artifact(const std::filesystem::path &path) {
    return artifact_from_bytes(read_file(path));
}

} // namespace nids

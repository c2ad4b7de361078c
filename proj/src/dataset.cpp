#include "nids/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>

#include "nids/io_util.hpp"

namespace nids {

namespace {

// Canonical form for header names and labels: lowercase alphanumerics only.
// CICIDS2017 files vary in spacing, case and dash encodings ("Web Attack -
// Brute Force" appears with en dashes and broken bytes).
std::string canon(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char ch : s)
        if (std::isalnum(ch))
            out.push_back(static_cast<char>(std::tolower(ch)));
    return out;
}

bool is_identifier_column(const std::string &name) {
    static const std::set<std::string> kExcluded = {
        "flowid",     "sourceip",   "srcip",   "destinationip", "dstip",     "sourceport",
        "srcport",    "destinationport", "dstport", "timestamp", "externalip"};
    return kExcluded.contains(canon(name));
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string &s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

// Parses one numeric field; empty optional for NaN/Infinity/garbage.
std::optional<double> parse_numeric(const std::string &raw) {
    const std::string field = trim(raw);
    if (field.empty())
        return std::nullopt;
    double value = 0.0;
    const char *begin = field.data();
    const char *end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        return std::nullopt; // covers NaN / Infinity / inf spellings too
    if (!std::isfinite(value))
        return std::nullopt;
    return value;
}

} // namespace

Dataset load_csv(const std::filesystem::path &path, CsvLoadStats *stats) {
    return load_csv(std::vector<std::filesystem::path>{path}, stats);
}

Dataset load_csv(const std::vector<std::filesystem::path> &paths, CsvLoadStats *stats) {
    if (paths.empty())
        throw IoError("load_csv: no input files");

    Dataset ds;
    CsvLoadStats local;
    std::vector<std::size_t> kept_feature_idx;
    std::vector<std::string> raw_labels;
    bool header_seen = false;
    std::size_t n_fields = 0;

    for (const auto &path : paths) {
        std::ifstream in(path);
        if (!in)
            throw IoError("cannot open " + path.string());

        std::string line;
        if (!std::getline(in, line))
            throw DataError("empty CSV file: " + path.string());
        auto header = split_csv_line(line);
        if (header.size() < 2)
            throw DataError("CSV needs at least one feature column and a label column");

        if (!header_seen) {
            n_fields = header.size();
            for (std::size_t i = 0; i + 1 < header.size(); ++i) {
                std::string name = trim(header[i]);
                if (is_identifier_column(name)) {
                    local.excluded_columns.push_back(name);
                } else {
                    kept_feature_idx.push_back(i);
                    ds.feature_names.push_back(name);
                }
            }
            header_seen = true;
        } else if (header.size() != n_fields) {
            throw DataError("CSV header mismatch across files: " + path.string());
        }

        std::vector<double> row(kept_feature_idx.size());
        while (std::getline(in, line)) {
            if (trim(line).empty())
                continue;
            auto fields = split_csv_line(line);
            if (fields.size() != n_fields) {
                local.rows_dropped += 1;
                continue;
            }
            bool valid = true;
            for (std::size_t k = 0; k < kept_feature_idx.size(); ++k) {
                auto value = parse_numeric(fields[kept_feature_idx[k]]);
                if (!value) {
                    valid = false;
                    break;
                }
                row[k] = *value;
            }
            if (!valid) {
                local.rows_dropped += 1;
                continue;
            }
            ds.features.data.insert(ds.features.data.end(), row.begin(), row.end());
            raw_labels.push_back(trim(fields.back()));
            local.rows_kept += 1;
        }
    }

    if (local.rows_kept == 0)
        throw DataError("no valid rows in CSV input");

    ds.features.rows = local.rows_kept;
    ds.features.cols = kept_feature_idx.size();

    // class names = distinct raw labels, lexicographic
    std::vector<std::string> names(raw_labels.begin(), raw_labels.end());
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    ds.class_names = names;
    ds.labels.resize(raw_labels.size());
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
        const auto it = std::lower_bound(names.begin(), names.end(), raw_labels[i]);
        ds.labels[i] = static_cast<int>(it - names.begin());
    }

    if (stats)
        *stats = local;
    return ds;
}

LabelMap::LabelMap(std::vector<std::pair<std::string, std::string>> mapping,
                   std::vector<std::string> dropped, std::vector<std::string> category_order)
    : order_(std::move(category_order)) {
    for (auto &[raw, category] : mapping)
        canonical_[canon(raw)] = category;
    for (auto &d : dropped)
        dropped_.insert(canon(d));
}

LabelMap LabelMap::cicids2017() {
    return LabelMap(
        {
            {"BENIGN", "Benign"},
            {"Bot", "Botnet"},
            {"FTP-Patator", "Brute Force"},
            {"SSH-Patator", "Brute Force"},
            {"DDoS", "DoS/DDoS"},
            {"DoS Hulk", "DoS/DDoS"},
            {"DoS GoldenEye", "DoS/DDoS"},
            {"DoS slowloris", "DoS/DDoS"},
            {"DoS Slowhttptest", "DoS/DDoS"},
            {"Heartbleed", "DoS/DDoS"},
            {"PortScan", "PortScan"},
            {"Web Attack - Brute Force", "Web Attack"},
            {"Web Attack - XSS", "Web Attack"},
            {"Web Attack - Sql Injection", "Web Attack"},
        },
        {"Infiltration"},
        {"Benign", "Botnet", "Brute Force", "DoS/DDoS", "PortScan", "Web Attack"});
}

LabelMap LabelMap::identity(const std::vector<std::string> &raw_labels) {
    std::vector<std::string> order(raw_labels.begin(), raw_labels.end());
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    std::vector<std::pair<std::string, std::string>> mapping;
    for (const auto &name : order)
        mapping.emplace_back(name, name);
    return LabelMap(std::move(mapping), {}, std::move(order));
}

const std::string *LabelMap::lookup(const std::string &raw) const {
    const std::string key = canon(raw);
    if (dropped_.contains(key))
        return nullptr;
    const auto it = canonical_.find(key);
    if (it == canonical_.end())
        throw DataError("unknown raw label: '" + raw + "'");
    return &it->second;
}

Dataset merge_labels(const Dataset &ds, const LabelMap &map, MergeStats *stats) {
    const auto &order = map.category_order();
    MergeStats local;
    local.class_counts.assign(order.size(), 0);

    std::vector<std::size_t> keep;
    std::vector<int> merged;
    keep.reserve(ds.rows());
    merged.reserve(ds.rows());
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        const std::string &raw = ds.class_names[static_cast<std::size_t>(ds.labels[r])];
        const std::string *category = map.lookup(raw);
        if (!category) {
            local.rows_dropped += 1;
            continue;
        }
        const auto it = std::find(order.begin(), order.end(), *category);
        const int idx = static_cast<int>(it - order.begin());
        keep.push_back(r);
        merged.push_back(idx);
        local.class_counts[static_cast<std::size_t>(idx)] += 1;
    }

    Dataset out;
    out.feature_names = ds.feature_names;
    out.class_names = order;
    out.labels = std::move(merged);
    out.features = Matrix(keep.size(), ds.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        auto src = ds.features.row(keep[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
    }
    if (stats)
        *stats = local;
    return out;
}

namespace {
constexpr char kDatasetMagic[9] = "NIDSDSET";
constexpr std::uint32_t kDatasetVersion = 1;
} // namespace

void save_dataset(const Dataset &ds, const std::filesystem::path &path) {
    ByteWriter body;
    body.u64(ds.rows());
    body.u64(ds.cols());
    body.u64(ds.feature_names.size());
    for (const auto &n : ds.feature_names)
        body.str(n);
    body.u64(ds.class_names.size());
    for (const auto &n : ds.class_names)
        body.str(n);
    for (int label : ds.labels)
        body.i32(label);
    for (double v : ds.features.data)
        body.f64(v);
    write_file(path, wrap_container(kDatasetMagic, kDatasetVersion, body.bytes()));
}

Dataset load_dataset(const std::filesystem::path &path) {
    const auto file = read_file(path);
    ByteReader r(unwrap_container(file, kDatasetMagic, kDatasetVersion));
    Dataset ds;
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    const std::uint64_t n_features = r.u64();
    if (n_features != cols)
        throw FormatError("dataset file: feature name count mismatch");
    for (std::uint64_t i = 0; i < n_features; ++i)
        ds.feature_names.push_back(r.str());
    const std::uint64_t n_classes = r.u64();
    for (std::uint64_t i = 0; i < n_classes; ++i)
        ds.class_names.push_back(r.str());
    ds.labels.resize(rows);
    for (std::uint64_t i = 0; i < rows; ++i)
        ds.labels[i] = r.i32();
    ds.features = Matrix(rows, cols);
    for (double &v : ds.features.data)
        v = r.f64();
    return ds;
}

} // namespace nids

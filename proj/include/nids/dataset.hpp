#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nids/matrix.hpp"

namespace nids {

// Labelled flow records: one row per flow, one column per numeric feature.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;

    std::size_t rows() const { return features.rows; }
    std::size_t cols() const { return features.cols; }
};

struct CsvLoadStats {
    std::size_t rows_kept = 0;
    std::size_t rows_dropped = 0;   // NaN/Inf/unparseable numerics
    std::vector<std::string> excluded_columns; // identifier columns skipped at ingestion
};

// Reads a CSV flow file: header row, comma separated, last column is the
// string label. "NaN", "Infinity" and "inf" fields (any case/sign) invalidate
// the row. Flow identifier columns (flow id, source/destination IP and port,
// timestamp) are excluded at ingestion. Labels are kept verbatim: class_names
// holds the distinct raw labels in lexicographic order until merge_labels
// assigns categories.
Dataset load_csv(const std::filesystem::path &path, CsvLoadStats *stats = nullptr);

// Multiple files with identical headers appended in argument order.
Dataset load_csv(const std::vector<std::filesystem::path> &paths, CsvLoadStats *stats = nullptr);

// Raw label -> merged category table; raw labels may also be dropped
// outright. Lookup is insensitive to case, whitespace and the assorted dash
// encodings seen in flow datasets.
class LabelMap {
  public:
    LabelMap(std::vector<std::pair<std::string, std::string>> mapping,
             std::vector<std::string> dropped, std::vector<std::string> category_order);

    // Category table for CICIDS2017: Benign, Botnet, Brute Force, DoS/DDoS,
    // PortScan, Web Attack; the Infiltration class is dropped.
    static LabelMap cicids2017();

    // Every distinct raw label becomes its own category (lexicographic order).
    static LabelMap identity(const std::vector<std::string> &raw_labels);

    // Returns the category, empty optional when the label is dropped; throws
    // DataError for labels the map does not cover.
    const std::string *lookup(const std::string &raw) const;

    const std::vector<std::string> &category_order() const { return order_; }

  private:
    std::map<std::string, std::string> canonical_; // canonical raw -> category
    std::set<std::string> dropped_;
    std::vector<std::string> order_;
};

struct MergeStats {
    std::size_t rows_dropped = 0;
    std::vector<std::size_t> class_counts;
};

// Applies the label map: rows with dropped labels are removed, remaining
// labels become category indices in the map's fixed category order.
Dataset merge_labels(const Dataset &ds, const LabelMap &map, MergeStats *stats = nullptr);

// Fixed-width binary dataset file with checksum; byte-identical across runs.
void save_dataset(const Dataset &ds, const std::filesystem::path &path);
Dataset load_dataset(const std::filesystem::path &path);

} // namespace nids

#include "nids/synthetic.hpp"

#include <cstdio>
#include <fstream>

#include "nids/error.hpp"

namespace nids {

Dataset make_blobs(const BlobSpec &spec, Rng &rng) {
    const std::size_t n_classes = spec.counts.size();
    if (n_classes < 2 || spec.dims == 0)
        throw ConfigError("make_blobs: need >= 2 classes and >= 1 dimension");

    // centres: class c sits at center_distance along axis c (axes cycle when
    // there are more classes than dimensions); the last class instead sits
    // overlap_distance away from class 0 along axis 0.
    Matrix centers(n_classes, spec.dims, 0.0);
    for (std::size_t c = 0; c + 1 < n_classes; ++c)
        centers(c, c % spec.dims) = spec.center_distance * static_cast<double>(1 + c / spec.dims);
    centers(n_classes - 1, 0) = centers(0, 0) + spec.overlap_distance;

    std::size_t total = 0;
    for (std::size_t n : spec.counts)
        total += n;

    Dataset ds;
    ds.features = Matrix(total, spec.dims);
    ds.labels.reserve(total);
    for (std::size_t c = 0; c < n_classes; ++c) {
        char name[32];
        std::snprintf(name, sizeof(name), "c%02zu", c);
        ds.class_names.push_back(name);
    }
    for (std::size_t j = 0; j < spec.dims; ++j) {
        char name[32];
        std::snprintf(name, sizeof(name), "f%02zu", j);
        ds.feature_names.push_back(name);
    }

    Rng noise = rng.child("blobs");
    std::size_t row = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (std::size_t i = 0; i < spec.counts[c]; ++i, ++row) {
            auto dst = ds.features.row(row);
            for (std::size_t j = 0; j < spec.dims; ++j)
                dst[j] = centers(c, j) + spec.sigma * noise.normal();
            ds.labels.push_back(static_cast<int>(c));
        }
    }
    return ds;
}

void write_csv(const Dataset &ds, const std::filesystem::path &path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    for (std::size_t j = 0; j < ds.feature_names.size(); ++j)
        out << ds.feature_names[j] << ',';
    out << "Label\n";
    char buf[32];
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        auto row = ds.features.row(r);
        for (double v : row) {
            std::snprintf(buf, sizeof(buf), "%.9g", v);
            out << buf << ',';
        }
        out << ds.class_names[static_cast<std::size_t>(ds.labels[r])] << '\n';
    }
    if (!out)
        throw IoError("failed writing " + path.string());
}

} // namespace nids

#pragma once

#include <filesystem>
#include <vector>

#include "nids/dataset.hpp"
#include "nids/rng.hpp"

namespace nids {

struct BlobSpec {
    std::size_t dims = 49;
    // per-class sample counts
    std::vector<std::size_t> counts{5000, 400, 250, 150, 150, 50};
    // pairwise distance between adjacent class centres, in noise sigmas
    double center_distance = 6.0;
    double sigma = 1.0;
    // pulls the last (smallest) class centre toward class 0 to create the
    // overlap that makes balancing matter
    double overlap_distance = 4.5;
};

// Isotropic Gaussian class blobs with controllable overlap between the
// largest and the smallest class.
Dataset make_blobs(const BlobSpec &spec, Rng &rng);

// Writes a dataset in the raw flow-CSV layout (header, numeric features,
// label string in the last column).
void write_csv(const Dataset &ds, const std::filesystem::path &path);

} // namespace nids

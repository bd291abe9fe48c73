#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hmvi/data_model.hpp"

namespace hmvi {

struct LabeledDataset {
    Dataset dataset;  // complete
    std::vector<int> labels;
};

// Two planted classes over 3 nominal, 2 ordinal and 3 numerical columns.
// Each row carries a latent position inside its class, so values correlate
// across columns both between and within classes.
LabeledDataset make_mixed_fixture(std::size_t n, std::uint64_t seed);

// 5-point blobs around 0 and 100 on a single numeric column.
Dataset make_two_blob_fixture();

}  // namespace hmvi

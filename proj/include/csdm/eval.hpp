#ifndef CSDM_EVAL_HPP
#define CSDM_EVAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "csdm/synthdata.hpp"
#include "csdm/vicinity.hpp"

namespace csdm {

struct EvalConfig {
    std::vector<double> centers;  // evaluation label centers
    double window = 0.1;          // half-width of each label window, > 0
    int n_projections = 16;       // random directions for the sliced distance
    std::uint64_t seed = 0;       // seeds the projection directions
};

/// Exact Wasserstein-1 distance between two empirical 1-D distributions,
/// integrating |Qa - Qb| over the merged quantile breakpoints. For equal
/// sizes this reduces to the mean absolute difference of matched order
/// statistics.
double wasserstein1(std::vector<double> a, std::vector<double> b);

struct CenterDistance {
    double center = 0.0;
    double distance = 0.0;
    bool starved = false;  // fewer than 2 samples on either side of the window
};

struct SlidingResult {
    std::vector<CenterDistance> per_center;
    double mean_distance = 0.0;  // over non-starved centers
    int starved_count = 0;
};

/// For each center, pools real and generated samples whose labels fall in
/// [c - window, c + window] and averages the projected Wasserstein-1
/// distance over seeded random unit directions. Starved centers are flagged
/// and excluded from the mean.
SlidingResult sliding_distance(const LabeledDataset& real, const LabeledDataset& generated,
                               const EvalConfig& cfg);

/// Mean absolute error between each sample's conditioning label and the
/// label recovered from the sample's structure (projection onto the shift
/// direction for the Gaussian families, angle for Ring).
double label_consistency(const LabeledDataset& generated, const DatasetSpec& spec);

struct MetricsReport {
    SlidingResult sliding;
    double label_mae = 0.0;
    std::string config_hash;
    std::uint64_t seed = 0;
};

}  // namespace csdm

#endif  // CSDM_EVAL_HPP

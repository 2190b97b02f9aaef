#ifndef CSDM_VICINITY_HPP
#define CSDM_VICINITY_HPP

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "csdm/rng.hpp"

namespace csdm {

/// Finite regression-labeled sample set. One sample per row of `samples`;
/// `labels[i]` is the scalar label of row i. Every label lies inside
/// [label_min, label_max].
struct LabeledDataset {
    Eigen::MatrixXd samples;  // n x d
    Eigen::ArrayXd labels;    // n
    double label_min = 0.0;
    double label_max = 0.0;

    Eigen::Index size() const { return samples.rows(); }
    Eigen::Index dim() const { return samples.cols(); }
};

/// Validates invariants (nonempty, matching lengths, labels in range).
LabeledDataset make_dataset(Eigen::MatrixXd samples, Eigen::ArrayXd labels, double label_min,
                            double label_max);

struct VicinityConfig {
    enum class Mode { HardFixed, HardAdaptive };
    Mode mode = Mode::HardAdaptive;
    double kappa = 0.0;  // HardFixed radius; may be +inf (everything in vicinity)
    int n_av = 1;        // HardAdaptive minimum effective sample count

    static VicinityConfig hard_fixed(double kappa);
    static VicinityConfig hard_adaptive(int n_av);
};

struct KdeConfig {
    double sigma_kde = 0.1;  // Gaussian kernel bandwidth, > 0
};

/// Rule-of-thumb bandwidth 1.06 * std(labels) * n^(-1/5).
double silverman_bandwidth(const Eigen::ArrayXd& labels);

/// Smallest radius whose closed interval around y contains at least
/// min(n_av, n) labels: the min(n_av, n)-th smallest |y_i - y|. Strictly
/// positive: a zero order statistic is floored at machine epsilon scaled by
/// the label spread.
double adaptive_radius(const Eigen::ArrayXd& labels, double y, int n_av);

/// Indicator weights W_i = 1{|y - y_i| <= kappa}, kappa fixed or adaptive.
Eigen::ArrayXd vicinal_weights(const Eigen::ArrayXd& labels, double y,
                               const VicinityConfig& cfg);

/// Indices with W_i = 1, ascending.
std::vector<Eigen::Index> vicinal_indices(const Eigen::ArrayXd& labels, double y,
                                          const VicinityConfig& cfg);

/// Unnormalized Gaussian-kernel label density (1/n) sum_j exp(-(y-y_j)^2 / (2 s^2)).
/// Lies in (0, 1]; equals 1 only when every label coincides with y.
double kde_density(const Eigen::ArrayXd& labels, double y, const KdeConfig& cfg);

/// Draws y from the KDE mixture: a uniformly chosen label plus N(0, s^2) jitter.
double sample_target_label(const Eigen::ArrayXd& labels, const KdeConfig& cfg, Rng& rng);

/// Uniform draw over the vicinity of y; empty vicinity (possible only in
/// HardFixed mode) yields nullopt so callers can resample or widen kappa.
std::optional<Eigen::Index> sample_vicinal_index(const LabeledDataset& data, double y,
                                                 const VicinityConfig& cfg, Rng& rng);

}  // namespace csdm

#endif  // CSDM_VICINITY_HPP

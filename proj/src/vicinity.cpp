#include "csdm/vicinity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "csdm/stats.hpp"

namespace csdm {

LabeledDataset make_dataset(Eigen::MatrixXd samples, Eigen::ArrayXd labels, double label_min,
                            double label_max) {
    if (samples.rows() < 1) throw std::invalid_argument("make_dataset: empty sample set");
    if (samples.rows() != labels.size())
        throw std::invalid_argument("make_dataset: samples/labels length mismatch");
    if (!(label_min <= label_max))
        throw std::invalid_argument("make_dataset: invalid label range");
    if ((labels < label_min).any() || (labels > label_max).any())
        throw std::invalid_argument("make_dataset: label outside declared range");
    return {std::move(samples), std::move(labels), label_min, label_max};
}

VicinityConfig VicinityConfig::hard_fixed(double kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("VicinityConfig: kappa must be positive");
    return {Mode::HardFixed, kappa, 1};
}

VicinityConfig VicinityConfig::hard_adaptive(int n_av) {
    if (n_av < 1) throw std::invalid_argument("VicinityConfig: n_av must be >= 1");
    return {Mode::HardAdaptive, 0.0, n_av};
}

double silverman_bandwidth(const Eigen::ArrayXd& labels) {
    if (labels.size() < 2) return 1.0;
    const double sd = std::sqrt(variance(labels));
    const double bw = 1.06 * sd * std::pow(static_cast<double>(labels.size()), -0.2);
    return bw > 0.0 ? bw : 1.0;
}

double adaptive_radius(const Eigen::ArrayXd& labels, double y, int n_av) {
    if (labels.size() == 0) throw std::domain_error("adaptive_radius: empty label set");
    if (n_av < 1) throw std::invalid_argument("adaptive_radius: n_av must be >= 1");
    const auto n = labels.size();
    const auto k = std::min<Eigen::Index>(n_av, n);
    std::vector<double> dist(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) dist[static_cast<std::size_t>(i)] = std::abs(labels[i] - y);
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    double kappa = dist[static_cast<std::size_t>(k - 1)];
    if (kappa == 0.0) {
        const double lo = labels.minCoeff();
        const double hi = labels.maxCoeff();
        const double scale = std::max({hi - lo, std::abs(lo), std::abs(hi), 1.0});
        kappa = scale * std::numeric_limits<double>::epsilon();
    }
    return kappa;
}

namespace {

double resolve_radius(const Eigen::ArrayXd& labels, double y, const VicinityConfig& cfg) {
    switch (cfg.mode) {
        case VicinityConfig::Mode::HardFixed:
            if (!(cfg.kappa > 0.0))
                throw std::invalid_argument("vicinal_weights: kappa must be positive");
            return cfg.kappa;
        case VicinityConfig::Mode::HardAdaptive:
            return adaptive_radius(labels, y, cfg.n_av);
    }
    throw std::logic_error("vicinal_weights: unknown vicinity mode");
}

}  // namespace

Eigen::ArrayXd vicinal_weights(const Eigen::ArrayXd& labels, double y,
                               const VicinityConfig& cfg) {
    const double kappa = resolve_radius(labels, y, cfg);
    return ((labels - y).abs() <= kappa).cast<double>();
}

std::vector<Eigen::Index> vicinal_indices(const Eigen::ArrayXd& labels, double y,
                                          const VicinityConfig& cfg) {
    const double kappa = resolve_radius(labels, y, cfg);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        if (std::abs(labels[i] - y) <= kappa) idx.push_back(i);
    return idx;
}

double kde_density(const Eigen::ArrayXd& labels, double y, const KdeConfig& cfg) {
    if (!(cfg.sigma_kde > 0.0)) throw std::invalid_argument("kde_density: bandwidth must be positive");
    if (labels.size() == 0) throw std::domain_error("kde_density: empty label set");
    const double inv = 1.0 / (2.0 * cfg.sigma_kde * cfg.sigma_kde);
    return (-(labels - y).square() * inv).exp().mean();
}

double sample_target_label(const Eigen::ArrayXd& labels, const KdeConfig& cfg, Rng& rng) {
    if (labels.size() == 0) throw std::domain_error("sample_target_label: empty label set");
    const auto j = rng.uniform_index(static_cast<std::size_t>(labels.size()));
    return labels[static_cast<Eigen::Index>(j)] + cfg.sigma_kde * rng.normal();
}

std::optional<Eigen::Index> sample_vicinal_index(const LabeledDataset& data, double y,
                                                 const VicinityConfig& cfg, Rng& rng) {
    const auto idx = vicinal_indices(data.labels, y, cfg);
    if (idx.empty()) return std::nullopt;
    return idx[rng.uniform_index(idx.size())];
}

}  // namespace csdm

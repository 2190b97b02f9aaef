#include "csdm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "csdm/rng.hpp"

namespace csdm {

double wasserstein1(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein1: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = a.size();
    const std::size_t m = b.size();

    // Sweep the merged breakpoints of the two empirical quantile functions;
    // breakpoint comparisons use integer cross-products to stay exact.
    double total = 0.0;
    double u_prev = 0.0;
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (ia < n && ib < m) {
        const std::uint64_t lhs = static_cast<std::uint64_t>(ia + 1) * m;
        const std::uint64_t rhs = static_cast<std::uint64_t>(ib + 1) * n;
        const double u_next = static_cast<double>(std::min(lhs, rhs)) /
                              static_cast<double>(n * static_cast<std::uint64_t>(m));
        total += (u_next - u_prev) * std::abs(a[ia] - b[ib]);
        if (lhs <= rhs) ++ia;
        if (rhs <= lhs) ++ib;
        u_prev = u_next;
    }
    return total;
}

SlidingResult sliding_distance(const LabeledDataset& real, const LabeledDataset& generated,
                               const EvalConfig& cfg) {
    if (real.dim() != generated.dim())
        throw std::invalid_argument("sliding_distance: dimension mismatch");
    if (!(cfg.window > 0.0)) throw std::invalid_argument("sliding_distance: window must be positive");
    if (cfg.n_projections < 1)
        throw std::invalid_argument("sliding_distance: n_projections must be >= 1");
    if (cfg.centers.empty()) throw std::invalid_argument("sliding_distance: no centers");

    const Eigen::Index d = real.dim();
    Rng rng(mix_seed(cfg.seed, 0x70726f6a));  // projection-direction stream
    std::vector<Eigen::VectorXd> directions;
    directions.reserve(static_cast<std::size_t>(cfg.n_projections));
    for (int p = 0; p < cfg.n_projections; ++p) {
        Eigen::VectorXd v = rng.normal_vector(d);
        while (v.norm() == 0.0) v = rng.normal_vector(d);
        directions.push_back(v / v.norm());
    }

    auto window_values = [&](const LabeledDataset& data, double center,
                             const Eigen::VectorXd& dir) {
        std::vector<double> vals;
        for (Eigen::Index i = 0; i < data.size(); ++i)
            if (std::abs(data.labels[i] - center) <= cfg.window)
                vals.push_back(data.samples.row(i) * dir);
        return vals;
    };
    auto window_count = [&](const LabeledDataset& data, double center) {
        Eigen::Index count = 0;
        for (Eigen::Index i = 0; i < data.size(); ++i)
            if (std::abs(data.labels[i] - center) <= cfg.window) ++count;
        return count;
    };

    SlidingResult result;
    double sum = 0.0;
    int used = 0;
    for (double center : cfg.centers) {
        CenterDistance cd;
        cd.center = center;
        if (window_count(real, center) < 2 || window_count(generated, center) < 2) {
            cd.starved = true;
            ++result.starved_count;
        } else {
            double acc = 0.0;
            for (const auto& dir : directions)
                acc += wasserstein1(window_values(real, center, dir),
                                    window_values(generated, center, dir));
            cd.distance = acc / static_cast<double>(cfg.n_projections);
            sum += cd.distance;
            ++used;
        }
        result.per_center.push_back(cd);
    }
    result.mean_distance = used > 0 ? sum / used : 0.0;
    return result;
}

double label_consistency(const LabeledDataset& generated, const DatasetSpec& spec) {
    if (generated.dim() != spec.dim)
        throw std::invalid_argument("label_consistency: dimension mismatch");
    double acc = 0.0;
    switch (spec.kind) {
        case DatasetKind::GaussianShift:
        case DatasetKind::ImbalancedShift: {
            const Eigen::VectorXd u = shift_direction(spec.dim);
            for (Eigen::Index i = 0; i < generated.size(); ++i) {
                const double recovered = generated.samples.row(i) * u;
                acc += std::abs(recovered - generated.labels[i]);
            }
            break;
        }
        case DatasetKind::Ring: {
            const double span = spec.label_max - spec.label_min;
            for (Eigen::Index i = 0; i < generated.size(); ++i) {
                const double theta = std::atan2(generated.samples(i, 1), generated.samples(i, 0));
                const double recovered =
                    spec.label_min + theta / (0.5 * std::numbers::pi) * span;
                acc += std::abs(recovered - generated.labels[i]);
            }
            break;
        }
        default:
            throw std::invalid_argument("label_consistency: unsupported dataset kind");
    }
    return acc / static_cast<double>(generated.size());
}

}  // namespace csdm

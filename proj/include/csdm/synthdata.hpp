#ifndef CSDM_SYNTHDATA_HPP
#define CSDM_SYNTHDATA_HPP

#include <Eigen/Core>

#include "csdm/covariance.hpp"
#include "csdm/denoiser.hpp"
#include "csdm/rng.hpp"
#include "csdm/vicinity.hpp"

namespace csdm {

enum class DatasetKind { GaussianShift, Ring, ImbalancedShift };

/// Synthetic regression-conditioned dataset families with known conditional
/// distributions:
///   GaussianShift:   x | y ~ N(y * u, s^2 I) for the fixed unit vector
///                    u = (1, ..., 1)/sqrt(d); labels uniform on the range.
///   Ring:            d = 2; the label maps linearly onto an angle in
///                    [0, pi/2) and x sits on a radius-r circle plus
///                    isotropic noise of std s.
///   ImbalancedShift: GaussianShift samples with labels drawn from a
///                    center-heavy mixture (most mass near the midpoint of
///                    the label range), so the range's tails are sparse.
struct DatasetSpec {
    DatasetKind kind = DatasetKind::GaussianShift;
    int n_samples = 1000;
    Eigen::Index dim = 2;
    double label_min = 0.0;
    double label_max = 1.0;
    double noise_std = 0.1;  // s > 0
    double radius = 1.0;     // Ring only, > 0
    std::uint64_t seed = 0;
};

void validate(const DatasetSpec& spec);

/// Fraction of ImbalancedShift labels drawn from the tight central component.
inline constexpr double kImbalanceCoreFraction = 0.95;
/// Std of the central label component, relative to the label span.
inline constexpr double kImbalanceCoreRelStd = 0.05;

/// Unit shift direction u shared by the Gaussian families.
Eigen::VectorXd shift_direction(Eigen::Index dim);

/// Conditional mean m(y) = y * u.
Eigen::VectorXd gaussian_mean(const DatasetSpec& spec, double y);

/// Angle theta(y) of the Ring family, linear over [0, pi/2).
double ring_angle(const DatasetSpec& spec, double y);

LabeledDataset generate_dataset(const DatasetSpec& spec, Rng& rng);

/// Exact score/denoiser for the Gaussian families, where the noised
/// conditional is N(m(y), s^2 I + Sigma) in closed form.
class AnalyticOracle {
public:
    explicit AnalyticOracle(DatasetSpec spec);
    const DatasetSpec& spec() const { return spec_; }

private:
    DatasetSpec spec_;
};

/// Score of the noised conditional: -(s^2 I + Sigma)^{-1} (x~ - m(y)).
Eigen::VectorXd analytic_score(const AnalyticOracle& oracle, const Eigen::VectorXd& x_tilde,
                               double y, const DiagCov& sigma);

/// Posterior mean x~ + Sigma * score = (s^2 x~ + Sigma m(y)) / (s^2 + Sigma).
Eigen::VectorXd analytic_denoiser(const AnalyticOracle& oracle, const Eigen::VectorXd& x_tilde,
                                  double y, const DiagCov& sigma);

/// Denoiser-interface adapter over the analytic oracle, for driving the
/// samplers on a problem with a known solution.
class AnalyticDenoiser final : public Denoiser {
public:
    explicit AnalyticDenoiser(DatasetSpec spec) : oracle_(std::move(spec)) {}
    Eigen::VectorXd denoise(const Eigen::VectorXd& x_tilde, double y,
                            const DiagCov& sigma) const override {
        return analytic_denoiser(oracle_, x_tilde, y, sigma);
    }
    Eigen::Index dim() const override { return oracle_.spec().dim; }

private:
    AnalyticOracle oracle_;
};

}  // namespace csdm

#endif  // CSDM_SYNTHDATA_HPP

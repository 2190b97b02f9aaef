#include <catch2/catch_amalgamated.hpp>

#include "csdm/rng.hpp"
#include "csdm/stats.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

// Expected values frozen from scipy.stats / scipy.special.

TEST_CASE("normal_cdf matches tabulated values", "[stats]") {
    REQUIRE_THAT(csdm::normal_cdf(0.0), WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(csdm::normal_cdf(1.96), WithinRel(0.9750021048517795, 1e-12));
    REQUIRE_THAT(csdm::normal_cdf(-0.5), WithinRel(0.3085375387259869, 1e-12));
}

TEST_CASE("chi2_sf matches tabulated values", "[stats]") {
    REQUIRE_THAT(csdm::chi2_sf(3.84, 1), WithinRel(0.05004352124870519, 1e-10));
    REQUIRE_THAT(csdm::chi2_sf(10.0, 4), WithinRel(0.04042768199451279, 1e-10));
    REQUIRE_THAT(csdm::chi2_sf(0.5, 2), WithinRel(0.7788007830714049, 1e-10));
    REQUIRE_THAT(csdm::chi2_sf(27.2, 12), WithinRel(0.007230726627684435, 1e-10));
    REQUIRE(csdm::chi2_sf(0.0, 3) == 1.0);
}

TEST_CASE("kolmogorov_tail matches tabulated values", "[stats]") {
    REQUIRE_THAT(csdm::kolmogorov_tail(0.5), WithinRel(0.9639452436648751, 1e-12));
    REQUIRE_THAT(csdm::kolmogorov_tail(1.0), WithinRel(0.26999967167735456, 1e-12));
    REQUIRE_THAT(csdm::kolmogorov_tail(1.5), WithinRel(0.022217962616525127, 1e-12));
}

TEST_CASE("ks test accepts its own null and rejects a shifted one", "[stats]") {
    csdm::Rng rng(123);
    std::vector<double> sample(4000);
    for (auto& v : sample) v = rng.normal();

    const auto good = csdm::ks_test_normal(sample, 0.0, 1.0);
    REQUIRE(good.p_value > 0.01);

    const auto bad = csdm::ks_test_normal(sample, 0.5, 1.0);
    REQUIRE(bad.p_value < 1e-6);
}

TEST_CASE("chi2 test accepts uniform counts and rejects skewed ones", "[stats]") {
    const auto ok = csdm::chi2_test({250, 240, 260, 250}, {0.25, 0.25, 0.25, 0.25});
    REQUIRE(ok.p_value > 0.05);
    const auto skew = csdm::chi2_test({400, 200, 200, 200}, {0.25, 0.25, 0.25, 0.25});
    REQUIRE(skew.p_value < 1e-6);
}

TEST_CASE("variance is unbiased on a tiny example", "[stats]") {
    Eigen::ArrayXd v(4);
    v << 1.0, 2.0, 3.0, 4.0;
    REQUIRE_THAT(csdm::variance(v), WithinRel(5.0 / 3.0, 1e-14));
}

TEST_CASE("rng streams are reproducible and well scaled", "[rng]") {
    csdm::Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        REQUIRE(a.normal() == b.normal());
        REQUIRE(a.uniform() == b.uniform());
    }

    csdm::Rng c(7);
    double acc = 0.0, acc2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = c.normal();
        acc += z;
        acc2 += z * z;
    }
    REQUIRE_THAT(acc / n, WithinAbs(0.0, 0.01));
    REQUIRE_THAT(acc2 / n, WithinAbs(1.0, 0.02));
}

TEST_CASE("uniform_index covers the range without bias", "[rng]") {
    csdm::Rng rng(9);
    std::vector<double> counts(5, 0.0);
    for (int i = 0; i < 50000; ++i) counts[rng.uniform_index(5)] += 1.0;
    const auto res = csdm::chi2_test(counts, std::vector<double>(5, 0.2));
    REQUIRE(res.p_value > 0.001);
}

TEST_CASE("mix_seed separates nearby inputs", "[rng]") {
    REQUIRE(csdm::mix_seed(1, 0, 0) != csdm::mix_seed(1, 1, 0));
    REQUIRE(csdm::mix_seed(1, 0, 1) != csdm::mix_seed(1, 1, 0));
    REQUIRE(csdm::mix_seed(2, 0, 0) != csdm::mix_seed(1, 0, 0));
}

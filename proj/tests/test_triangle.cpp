#include <doctest.h>

#include <cmath>
#include <vector>

#include "prnu/attack.hpp"
#include "prnu/error.hpp"
#include "prnu/rng.hpp"
#include "prnu/sensor_sim.hpp"
#include "prnu/stats.hpp"
#include "prnu/triangle.hpp"

using namespace prnu;

namespace {

struct TriangleFixture {
    DenoiseParams extract;
    Fingerprint k_alice;
    SyntheticCamera alice;
    SyntheticCamera eve;
    std::vector<ImagePlane> pool; // alice natural images

    static TriangleFixture make(int pool_count, std::uint64_t seed, double sigma_k = 0.02) {
        TriangleFixture fx;
        fx.alice = make_camera("alice", 64, 64, sigma_k, 2.0, 0.0, derive_seed(seed, 1));
        fx.eve = make_camera("eve", 64, 64, sigma_k, 2.0, 0.0, derive_seed(seed, 2));
        std::vector<ImagePlane> flats;
        for (int i = 0; i < 20; ++i) {
            flats.push_back(capture(fx.alice, flat_scene(64, 64, 128.0,
                                                         derive_seed(seed, 3, static_cast<std::uint64_t>(i)))));
        }
        fx.k_alice = estimate_fingerprint(flats, fx.extract);
        for (int i = 0; i < pool_count; ++i) {
            fx.pool.push_back(capture(fx.alice, textured_scene(64, 64, 3,
                                                               derive_seed(seed, 4, static_cast<std::uint64_t>(i)))));
        }
        return fx;
    }
};

} // namespace

TEST_CASE("identical images give unit true correlation") {
    TriangleFixture fx = TriangleFixture::make(1, 100);
    TriangleCorrelations c =
        triangle_correlations(fx.pool[0], fx.pool[0], fx.k_alice, fx.extract);
    CHECK(c.c_true == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c.c_ik == doctest::Approx(c.c_jk).epsilon(1e-12));
}

TEST_CASE("independent images from different cameras have tiny true correlation") {
    TriangleFixture fx = TriangleFixture::make(6, 200);
    for (int i = 0; i < 6; ++i) {
        ImagePlane other = capture(fx.eve, textured_scene(64, 64, 3,
                                                          derive_seed(777, static_cast<std::uint64_t>(i))));
        TriangleCorrelations c = triangle_correlations(fx.pool[static_cast<std::size_t>(i)], other,
                                                       fx.k_alice, fx.extract);
        CHECK(std::abs(c.c_true) < 0.05);
    }
}

TEST_CASE("stolen image outranks unused images against its forgery") {
    TriangleFixture fx = TriangleFixture::make(10, 300);
    std::span<const ImagePlane> stolen(fx.pool.data(), 4);
    ImagePlane target = capture(fx.eve, textured_scene(64, 64, 3, 999));
    ForgeryRecord rec = conventional_attack(target, stolen, 50.0, fx.extract);

    RasterF32 w_forged = residual(rec.forged, fx.extract);
    std::vector<double> unused_c;
    for (std::size_t i = 4; i < fx.pool.size(); ++i) {
        unused_c.push_back(correlation(residual(fx.pool[i], fx.extract), w_forged));
    }
    std::sort(unused_c.begin(), unused_c.end());
    double median = unused_c[unused_c.size() / 2];

    double stolen_c = correlation(residual(fx.pool[0], fx.extract), w_forged);
    CHECK(stolen_c > median);
}

TEST_CASE("estimate_c is the product of the fingerprint-side correlations") {
    CHECK(estimate_c(0.0, 0.7) == 0.0);
    CHECK(estimate_c(0.4, 0.0) == 0.0);
    CHECK(estimate_c(0.1, 0.2) == doctest::Approx(0.02).epsilon(1e-15));
}

TEST_CASE("line fit recovers exact and hand-solved coefficients") {
    LineFit exact = fit_line({0, 1, 2}, {1, 3, 5});
    CHECK(exact.lambda == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(exact.eta == doctest::Approx(1.0).epsilon(1e-12));

    LineFit hand = fit_line({0, 1, 2}, {0, 1, 1});
    CHECK(hand.lambda == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(hand.eta == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("OLS residuals sum to zero") {
    Rng rng(17);
    std::vector<double> xs;
    std::vector<double> ys;
    for (int i = 0; i < 50; ++i) {
        double x = rng.next_unit();
        xs.push_back(x);
        ys.push_back(2.0 * x + 0.3 + 0.05 * rng.next_gaussian());
    }
    LineFit fit = fit_line(xs, ys);
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sum += ys[i] - fit.lambda * xs[i] - fit.eta;
    }
    CHECK(std::abs(sum) <= 1e-9);
}

TEST_CASE("line fit rejects degenerate input") {
    CHECK_THROWS_AS(fit_line({0, 1}, {1, 2}), DataError);
    CHECK_THROWS_WITH_AS(fit_line({1, 1, 1}, {1, 2, 3}), doctest::Contains("degenerate"),
                         NumericError);
}

TEST_CASE("individual threshold applies the one-sided normal quantile") {
    ResidualModel model;
    model.mean = 0.0;
    model.sd = 1.0;
    model.sample_count = 100;
    IndividualTestResult res = individual_test({}, model, 1e-3);
    CHECK(std::abs(res.t2 - 3.0902) <= 1e-3);

    CHECK_THROWS_AS(individual_test({}, model, 0.0), ConfigError);
    CHECK_THROWS_AS(individual_test({}, model, 1.0), ConfigError);
}

TEST_CASE("statistics at the null mean are never flagged") {
    ResidualModel model;
    model.mean = 0.2;
    model.sd = 0.05;
    model.sample_count = 50;
    std::vector<TriangleRecord> records(10);
    for (int i = 0; i < 10; ++i) {
        records[static_cast<std::size_t>(i)].candidate_id = i;
        records[static_cast<std::size_t>(i)].statistic = 0.2;
    }
    IndividualTestResult res = individual_test(records, model, 1e-3);
    CHECK(res.flag_count == 0);
    CHECK(res.max_statistic == doctest::Approx(0.2));
}

TEST_CASE("null flag rate stays near the target false-alarm rate") {
    Rng rng(23);
    std::vector<double> fit_stats(2000);
    for (auto& s : fit_stats) s = 0.01 * rng.next_gaussian();
    ResidualModel model = fit_pdf(fit_stats);

    std::vector<TriangleRecord> records(4000);
    for (std::size_t i = 0; i < records.size(); ++i) {
        records[i].candidate_id = static_cast<int>(i);
        records[i].statistic = 0.01 * rng.next_gaussian();
    }
    IndividualTestResult res = individual_test(records, model, 1e-2);
    double rate = static_cast<double>(res.flag_count) / static_cast<double>(records.size());
    CHECK(rate <= 2e-2);
}

TEST_CASE("pooled test is centered under the null and explodes under shift") {
    ResidualModel model;
    model.mean = 0.1;
    model.sd = 0.02;
    model.sample_count = 200;

    std::vector<double> at_mean(30, 0.1);
    PooledTestResult null_res = pooled_test(at_mean, model, 1e-3);
    CHECK(null_res.p_value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(!null_res.flagged);

    std::vector<double> shifted(100, 0.1 + 0.02);
    PooledTestResult hit = pooled_test(shifted, model, 1e-3);
    CHECK(hit.z == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(hit.p_value < 1e-20);
    CHECK(hit.flagged);

    CHECK_THROWS_AS(pooled_test({}, model, 1e-3), DataError);
}

TEST_CASE("pooled null p-values are roughly uniform") {
    Rng rng(29);
    std::vector<double> fit_stats(1000);
    for (auto& s : fit_stats) s = rng.next_gaussian();
    ResidualModel model = fit_pdf(fit_stats);

    int small = 0;
    int reps = 1000;
    std::vector<double> sample(20);
    for (int rep = 0; rep < reps; ++rep) {
        for (auto& s : sample) s = rng.next_gaussian();
        if (pooled_test(sample, model, 1e-3).p_value < 0.05) ++small;
    }
    double fraction = static_cast<double>(small) / reps;
    CHECK(fraction >= 0.02);
    CHECK(fraction <= 0.09);
}

TEST_CASE("affine scaling of correlations rescales the fit consistently") {
    Rng rng(31);
    std::vector<double> c_est;
    std::vector<double> c_true;
    for (int i = 0; i < 200; ++i) {
        double x = rng.next_unit() * 0.01;
        c_est.push_back(x);
        c_true.push_back(3.0 * x + 0.001 + 0.002 * rng.next_gaussian());
    }
    TriangleModel base = fit_triangle_model(c_est, c_true);

    double a = 3.0;
    std::vector<double> scaled_true;
    for (double v : c_true) scaled_true.push_back(a * v);
    TriangleModel scaled = fit_triangle_model(c_est, scaled_true);
    CHECK(scaled.line.lambda == doctest::Approx(a * base.line.lambda).epsilon(1e-9));
    CHECK(scaled.line.eta == doctest::Approx(a * base.line.eta).epsilon(1e-9));
    CHECK(scaled.pdf.sd == doctest::Approx(a * base.pdf.sd).epsilon(1e-9));

    // Decisions are invariant when the model is refit on the scaled data.
    for (std::size_t i = 0; i < c_est.size(); ++i) {
        double s_base = triangle_statistic(c_true[i], c_est[i], base.line);
        double s_scaled = triangle_statistic(scaled_true[i], c_est[i], scaled.line);
        CHECK(s_scaled == doctest::Approx(a * s_base).epsilon(1e-7));
        bool f_base = s_base > base.pdf.mean + 3.0 * base.pdf.sd;
        bool f_scaled = s_scaled > scaled.pdf.mean + 3.0 * scaled.pdf.sd;
        CHECK(f_base == f_scaled);
    }
}

TEST_CASE("duplicated forgeries are detected by the multiple-forgeries test") {
    TriangleFixture fx = TriangleFixture::make(14, 400);
    std::span<const ImagePlane> stolen(fx.pool.data(), 4);
    std::vector<ImagePlane> fit_images(fx.pool.begin() + 4, fx.pool.end());

    ImagePlane t1 = capture(fx.eve, textured_scene(64, 64, 3, 555));
    ImagePlane t2 = capture(fx.eve, textured_scene(64, 64, 3, 556));
    ForgeryRecord f1 = conventional_attack(t1, stolen, 50.0, fx.extract);
    ForgeryRecord f2 = conventional_attack(t2, stolen, 50.0, fx.extract);

    std::vector<ImagePlane> forgeries = {f1.forged, f1.forged, f2.forged};
    MultiForgeryResult res =
        multiple_forgeries_test(forgeries, fx.k_alice, fit_images, 1e-3, fx.extract);
    // The byte-identical pair must flag each other.
    CHECK(res.detections[0][1]);
    CHECK(res.detections[1][0]);

    CHECK_THROWS_AS(multiple_forgeries_test({f1.forged}, fx.k_alice, fit_images, 1e-3, fx.extract),
                    DataError);
}

#include "prnu/triangle.hpp"

#include <algorithm>
#include <cmath>

#include "prnu/error.hpp"
#include "prnu/stats.hpp"

namespace prnu {

TriangleCorrelations triangle_correlations(const ImagePlane& candidate, const ImagePlane& forged,
                                           const Fingerprint& k_alice, const DenoiseParams& p) {
    RasterF32 w_candidate = residual(candidate, p);
    RasterF32 w_forged = residual(forged, p);
    TriangleCorrelations out;
    out.c_true = correlation(w_candidate, w_forged);
    out.c_ik = detect_with_residual(candidate, w_candidate, k_alice);
    out.c_jk = detect_with_residual(forged, w_forged, k_alice);
    return out;
}

double estimate_c(double c_ik, double c_jk) {
    return c_ik * c_jk;
}

LineFit fit_line(const std::vector<double>& c_est, const std::vector<double>& c_true) {
    if (c_est.size() != c_true.size()) throw DataError("fit_line: size mismatch");
    if (c_est.size() < 3) throw DataError("fit_line: fewer than 3 points");
    auto n = static_cast<double>(c_est.size());
    double mx = mean(c_est);
    double my = mean(c_true);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < c_est.size(); ++i) {
        double dx = c_est[i] - mx;
        sxx += dx * dx;
        sxy += dx * (c_true[i] - my);
    }
    if (sxx == 0.0) throw NumericError("fit_line: degenerate abscissa");
    LineFit fit;
    fit.lambda = sxy / sxx;
    fit.eta = my - fit.lambda * mx;
    fit.fit_count = static_cast<int>(n);
    return fit;
}

ResidualModel fit_pdf(const std::vector<double>& residuals) {
    if (residuals.size() < 2) throw NumericError("fit_pdf: fewer than 2 residuals");
    ResidualModel model;
    model.mean = mean(residuals);
    model.sd = sample_sd(residuals);
    model.sample_count = static_cast<int>(residuals.size());
    if (!(model.sd > 0.0)) throw NumericError("fit_pdf: zero spread");
    return model;
}

double triangle_statistic(double c_true, double c_est, const LineFit& line) {
    return c_true - line.lambda * c_est - line.eta;
}

TriangleModel fit_triangle_model(const std::vector<double>& c_est,
                                 const std::vector<double>& c_true) {
    TriangleModel model;
    model.line = fit_line(c_est, c_true);
    std::vector<double> residuals(c_est.size());
    for (std::size_t i = 0; i < c_est.size(); ++i) {
        residuals[i] = triangle_statistic(c_true[i], c_est[i], model.line);
    }
    model.pdf = fit_pdf(residuals);
    return model;
}

IndividualTestResult individual_test(const std::vector<TriangleRecord>& records,
                                     const ResidualModel& model, double pfa) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw ConfigError("individual_test: pfa outside (0,1)");
    IndividualTestResult result;
    result.t2 = model.mean + normal_quantile(1.0 - pfa) * model.sd;
    result.max_statistic = -std::numeric_limits<double>::infinity();
    result.decisions.reserve(records.size());
    for (const auto& rec : records) {
        IndividualDecision d;
        d.candidate_id = rec.candidate_id;
        d.statistic = rec.statistic;
        d.flagged = rec.statistic > result.t2;
        result.flag_count += d.flagged ? 1 : 0;
        result.max_statistic = std::max(result.max_statistic, rec.statistic);
        result.decisions.push_back(d);
    }
    return result;
}

PooledTestResult pooled_test(const std::vector<double>& statistics, const ResidualModel& model,
                             double pfa) {
    if (statistics.empty()) throw DataError("pooled_test: empty statistics");
    if (!(pfa > 0.0 && pfa < 1.0)) throw ConfigError("pooled_test: pfa outside (0,1)");
    PooledTestResult result;
    result.k = static_cast<int>(statistics.size());
    result.statistic_mean = mean(statistics);
    double se = model.sd / std::sqrt(static_cast<double>(result.k));
    result.z = (result.statistic_mean - model.mean) / se;
    result.p_value = normal_cdf(-result.z);
    result.flagged = result.p_value < pfa;
    return result;
}

MultiForgeryResult multiple_forgeries_test(const std::vector<ImagePlane>& forgeries,
                                           const Fingerprint& k_alice,
                                           const std::vector<ImagePlane>& model_fit_images,
                                           double pfa, const DenoiseParams& p) {
    if (forgeries.size() < 2) throw DataError("multiple_forgeries_test: fewer than 2 forgeries");

    std::vector<RasterF32> forgery_residuals;
    forgery_residuals.reserve(forgeries.size());
    std::vector<double> forgery_c_jk(forgeries.size());
    for (std::size_t i = 0; i < forgeries.size(); ++i) {
        forgery_residuals.push_back(residual(forgeries[i], p));
        forgery_c_jk[i] = detect_with_residual(forgeries[i], forgery_residuals[i], k_alice);
    }

    std::vector<RasterF32> fit_residuals;
    std::vector<double> fit_c_ik;
    fit_residuals.reserve(model_fit_images.size());
    for (const auto& img : model_fit_images) {
        fit_residuals.push_back(residual(img, p));
        fit_c_ik.push_back(detect_with_residual(img, fit_residuals.back(), k_alice));
    }

    MultiForgeryResult result;
    auto n = forgeries.size();
    result.detections.assign(n, std::vector<bool>(n, false));
    result.p_d.assign(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> c_est(fit_residuals.size());
        std::vector<double> c_true(fit_residuals.size());
        for (std::size_t f = 0; f < fit_residuals.size(); ++f) {
            c_true[f] = correlation(fit_residuals[f], forgery_residuals[i]);
            c_est[f] = estimate_c(fit_c_ik[f], forgery_c_jk[i]);
        }
        TriangleModel model = fit_triangle_model(c_est, c_true);

        std::vector<TriangleRecord> records;
        records.reserve(n - 1);
        for (std::size_t jf = 0; jf < n; ++jf) {
            if (jf == i) continue;
            TriangleRecord rec;
            rec.candidate_id = static_cast<int>(jf);
            rec.c_true = correlation(forgery_residuals[jf], forgery_residuals[i]);
            rec.c_est = estimate_c(forgery_c_jk[jf], forgery_c_jk[i]);
            rec.statistic = triangle_statistic(rec.c_true, rec.c_est, model.line);
            records.push_back(rec);
        }
        IndividualTestResult test = individual_test(records, model.pdf, pfa);
        int flags = 0;
        for (const auto& d : test.decisions) {
            result.detections[i][static_cast<std::size_t>(d.candidate_id)] = d.flagged;
            flags += d.flagged ? 1 : 0;
        }
        result.p_d[i] = static_cast<double>(flags) / static_cast<double>(records.size());
    }

    double total = 0.0;
    for (double v : result.p_d) total += v;
    result.mean_p_d = total / static_cast<double>(n);
    return result;
}

} // namespace prnu

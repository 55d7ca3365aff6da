#pragma once

#include <vector>

#include "prnu/denoise.hpp"
#include "prnu/fingerprint.hpp"
#include "prnu/image.hpp"

namespace prnu {

/// Least-squares line c_true = lambda * c_est + eta fitted on images known to
/// be unused by the attacker.
struct LineFit {
    double lambda = 0.0;
    double eta = 0.0;
    int fit_count = 0;
};

/// Gaussian moment fit of the line-fit residuals.
struct ResidualModel {
    double mean = 0.0;
    double sd = 0.0;
    int sample_count = 0;
};

struct TriangleRecord {
    int candidate_id = 0;
    double c_true = 0.0;   // corr(W_I, W_J')
    double c_est = 0.0;    // product of the two fingerprint-side correlations
    double statistic = 0.0; // c_true - lambda*c_est - eta
};

struct TriangleCorrelations {
    double c_true = 0.0; // corr(residual(I), residual(J'))
    double c_ik = 0.0;   // detect(I, K_A)
    double c_jk = 0.0;   // detect(J', K_A)
};

TriangleCorrelations triangle_correlations(const ImagePlane& candidate, const ImagePlane& forged,
                                           const Fingerprint& k_alice, const DenoiseParams& p);

/// Estimate of c_true from the two fingerprint-side correlations; the line fit
/// absorbs its scale.
double estimate_c(double c_ik, double c_jk);

LineFit fit_line(const std::vector<double>& c_est, const std::vector<double>& c_true);

/// Gaussian moment fit. Throws NumericError when fewer than 2 samples or zero spread.
ResidualModel fit_pdf(const std::vector<double>& residuals);

double triangle_statistic(double c_true, double c_est, const LineFit& line);

/// Convenience: fit line on (c_est, c_true) pairs and model on its residuals.
struct TriangleModel {
    LineFit line;
    ResidualModel pdf;
};
TriangleModel fit_triangle_model(const std::vector<double>& c_est,
                                 const std::vector<double>& c_true);

struct IndividualDecision {
    int candidate_id = 0;
    double statistic = 0.0;
    bool flagged = false;
};

struct IndividualTestResult {
    std::vector<IndividualDecision> decisions;
    double t2 = 0.0;            // model.mean + z(1-pfa) * model.sd
    double max_statistic = 0.0; // outlier telemetry
    int flag_count = 0;
};

IndividualTestResult individual_test(const std::vector<TriangleRecord>& records,
                                     const ResidualModel& model, double pfa);

struct PooledTestResult {
    double statistic_mean = 0.0;
    double z = 0.0;
    double p_value = 0.0; // one-sided upper
    bool flagged = false;
    int k = 0;
};

/// Tests k candidate statistics at once against Normal(mean, sd/sqrt(k)).
PooledTestResult pooled_test(const std::vector<double>& statistics, const ResidualModel& model,
                             double pfa);

struct MultiForgeryResult {
    /// detection[i][j] for j != i: forgery j flagged as candidate of forgery i.
    std::vector<std::vector<bool>> detections;
    std::vector<double> p_d; // per forgery, fraction of other forgeries flagged
    double mean_p_d = 0.0;
};

/// Runs the triangle test between forgeries: for each forgery, every other
/// forgery plays the candidate role; the per-forgery model is fitted on the
/// supplied unused images.
MultiForgeryResult multiple_forgeries_test(const std::vector<ImagePlane>& forgeries,
                                           const Fingerprint& k_alice,
                                           const std::vector<ImagePlane>& model_fit_images,
                                           double pfa, const DenoiseParams& p);

} // namespace prnu

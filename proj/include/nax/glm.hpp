#pragma once

#include <string>
#include <vector>

#include "nax/features.hpp"
#include "nax/types.hpp"

namespace nax {

/// Design-matrix column order of the trend/seasonality layer.
/// [1, t, sin wt, cos wt, sin 2wt, cos 2wt, d_sat, d_sun, d_hol]
inline constexpr int kGlmColumns = 9;

extern const std::array<const char*, kGlmColumns> kGlmColumnNames;

struct GlmCoefficients {
    Vector beta;        // size 9
    Vector std_errors;  // size 9, >= 0
};

struct GlmFit {
    GlmCoefficients coefficients;
    Vector fitted;     // T_t + S_t on the training rows
    Vector residuals;  // R_t = Y_t - fitted
    double residual_variance = 0;  // sample variance, dof-adjusted
};

struct SignificanceRow {
    std::string name;
    double estimate = 0;
    double std_error = 0;
    double t_stat = 0;
    bool significant_1pct = false;
};

Matrix build_design_matrix(const std::vector<CalendarFeatures>& features);

/// Ordinary least squares via column-pivoted QR; the column scales in the
/// design (t up to ~1500 vs 0/1 dummies) rule out raw normal equations.
GlmFit fit_ols(const Matrix& design, const Vector& targets);

Vector glm_predict(const GlmCoefficients& coefficients,
                   const std::vector<CalendarFeatures>& features);

/// t = beta / SE against the two-sided 1% normal threshold 2.576.
std::vector<SignificanceRow> coefficient_significance(const GlmFit& fit);

void write_coefficient_report(const std::string& path,
                              const std::vector<SignificanceRow>& rows);

}  // namespace nax

#include "nax/glm.hpp"

#include <cmath>
#include <fstream>

namespace nax {

const std::array<const char*, kGlmColumns> kGlmColumnNames = {
    "intercept", "trend",  "sin_w", "cos_w", "sin_2w",
    "cos_2w",    "d_sat",  "d_sun", "d_hol"};

Matrix build_design_matrix(const std::vector<CalendarFeatures>& features) {
    if (features.empty())
        throw std::invalid_argument("build_design_matrix: empty feature list");
    Matrix X(static_cast<Eigen::Index>(features.size()), kGlmColumns);
    for (std::size_t i = 0; i < features.size(); ++i) {
        auto r = static_cast<Eigen::Index>(i);
        X(r, 0) = 1.0;
        X(r, 1) = features[i].t;
        X(r, 2) = features[i].sin_w;
        X(r, 3) = features[i].cos_w;
        X(r, 4) = features[i].sin_2w;
        X(r, 5) = features[i].cos_2w;
        X(r, 6) = features[i].d_sat;
        X(r, 7) = features[i].d_sun;
        X(r, 8) = features[i].d_hol;
    }
    return X;
}

GlmFit fit_ols(const Matrix& design, const Vector& targets) {
    const Eigen::Index n = design.rows();
    const Eigen::Index k = design.cols();
    if (n < k) throw std::invalid_argument("fit_ols: fewer rows than columns");
    if (targets.size() != n)
        throw std::invalid_argument("fit_ols: target length mismatch");

    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < k)
        throw std::runtime_error("fit_ols: rank-deficient design matrix");

    GlmFit fit;
    fit.coefficients.beta = qr.solve(targets);
    fit.fitted = design * fit.coefficients.beta;
    fit.residuals = targets - fit.fitted;

    const Eigen::Index dof = n - k;
    const double rss = fit.residuals.squaredNorm();
    fit.residual_variance = dof > 0 ? rss / static_cast<double>(dof) : 0.0;

    // SE from the diagonal of sigma^2 (X'X)^-1, via the QR factors.
    Matrix xtx_inv = (design.transpose() * design)
                         .ldlt()
                         .solve(Matrix::Identity(k, k));
    fit.coefficients.std_errors =
        (fit.residual_variance * xtx_inv.diagonal()).cwiseMax(0.0).cwiseSqrt();
    return fit;
}

Vector glm_predict(const GlmCoefficients& coefficients,
                   const std::vector<CalendarFeatures>& features) {
    if (features.empty()) return Vector{};
    return build_design_matrix(features) * coefficients.beta;
}

std::vector<SignificanceRow> coefficient_significance(const GlmFit& fit) {
    constexpr double kThreshold1pct = 2.576;
    std::vector<SignificanceRow> rows;
    for (int i = 0; i < kGlmColumns; ++i) {
        SignificanceRow r;
        r.name = kGlmColumnNames[i];
        r.estimate = fit.coefficients.beta[i];
        r.std_error = fit.coefficients.std_errors[i];
        if (r.std_error == 0.0) {
            if (r.estimate != 0.0)
                throw std::domain_error("coefficient_significance: zero SE with nonzero estimate");
            r.t_stat = 0.0;
        } else {
            r.t_stat = r.estimate / r.std_error;
        }
        r.significant_1pct = std::abs(r.t_stat) > kThreshold1pct;
        rows.push_back(r);
    }
    return rows;
}

void write_coefficient_report(const std::string& path,
                              const std::vector<SignificanceRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "name,estimate,std_error,t_stat,significant_1pct\n";
    out.precision(12);
    for (const auto& r : rows)
        out << r.name << ',' << r.estimate << ',' << r.std_error << ','
            << r.t_stat << ',' << (r.significant_1pct ? 1 : 0) << '\n';
}

}  // namespace nax

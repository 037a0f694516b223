#include "reheat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "reheat/errors.hpp"

namespace reheat {

GaussianFit fit_gaussian(const Mat& samples) {
    const long n = samples.rows();
    const long d = samples.cols();
    require(n > d, ErrorCode::InsufficientData, "Gaussian fit needs more samples than dimensions");
    GaussianFit fit;
    fit.n = n;
    fit.mean = samples.colwise().mean().transpose();
    const Mat centred = samples.rowwise() - fit.mean.transpose();
    fit.cov = (centred.transpose() * centred) / static_cast<double>(n - 1);
    fit.cov = 0.5 * (fit.cov + fit.cov.transpose());
    return fit;
}

Mat psd_sqrt(const Mat& m) {
    const Mat sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
    require(solver.info() == Eigen::Success, ErrorCode::Numerical, "eigendecomposition failed");
    Vec values = solver.eigenvalues();
    const double largest = values.size() ? std::max(values.maxCoeff(), 0.0) : 0.0;
    const double floor = 1e-10 * largest;
    for (Eigen::Index i = 0; i < values.size(); ++i) values[i] = values[i] <= floor ? 0.0 : std::sqrt(values[i]);
    return solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().transpose();
}

double frechet_distance(const GaussianFit& a, const GaussianFit& b) {
    require(a.mean.size() == b.mean.size() && a.cov.rows() == b.cov.rows(), ErrorCode::DimensionMismatch,
            "Gaussian fits differ in dimension");
    // tr((Sa Sb)^{1/2}) = tr((Sa^{1/2} Sb Sa^{1/2})^{1/2}), and the latter is symmetric.
    const Mat root_a = psd_sqrt(a.cov);
    const Mat cross = psd_sqrt(root_a * b.cov * root_a);
    const double squared = (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() - 2.0 * cross.trace();
    return std::sqrt(std::max(squared, 0.0));
}

SscReport ssc(double delta_do, double delta_sr, double noise_floor) {
    require(noise_floor >= 0.0, ErrorCode::Parameter, "noise floor must be nonnegative");
    SscReport report;
    report.delta_do = delta_do;
    report.delta_sr = delta_sr;
    report.noise_floor = noise_floor;
    report.do_below_floor = std::abs(delta_do) < noise_floor;
    report.sr_below_floor = std::abs(delta_sr) < noise_floor;
    const double num = report.do_below_floor ? 0.0 : std::max(delta_do, 0.0);
    const double den = report.sr_below_floor ? 0.0 : std::max(delta_sr, 0.0);
    if (den > 0.0) {
        report.ssc = num / den;
    } else if (num > 0.0) {
        report.ssc = std::numeric_limits<double>::infinity();
        report.unbounded = true;
        report.diagnostic = "single-reheat penalty clipped to zero while the damped penalty is positive";
    }
    return report;
}

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), ErrorCode::DimensionMismatch, "paired inputs differ in length");
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    require(saa > 0.0 && sbb > 0.0, ErrorCode::Domain, "correlation of a constant list is undefined");
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

double mean_of(std::span<const double> values) {
    require(!values.empty(), ErrorCode::InsufficientData, "mean of an empty list");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
    require(values.size() >= 2, ErrorCode::InsufficientData, "standard deviation needs two values");
    const double m = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

LinearFit linear_slope_fit(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y);
    require(x.size() >= 3, ErrorCode::InsufficientData, "linear fit needs at least three points");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0.0, ErrorCode::Domain, "linear fit with all abscissae equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        sse += r * r;
    }
    fit.r2 = syy > 0.0 ? std::max(0.0, 1.0 - sse / syy) : 0.0;
    fit.slope_std_error = std::sqrt(sse / static_cast<double>(x.size() - 2) / sxx);
    return fit;
}

PowerLawFit powerlaw_fit(std::span<const double> nfe, std::span<const double> penalties) {
    require_same_length(nfe, penalties);
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < nfe.size(); ++i) {
        require(nfe[i] > 0.0, ErrorCode::Parameter, "NFE values must be positive");
        if (penalties[i] > 0.0 && std::isfinite(penalties[i])) {
            lx.push_back(std::log(nfe[i]));
            ly.push_back(std::log(penalties[i]));
        }
    }
    require(lx.size() >= 3, ErrorCode::InsufficientData, "power-law fit needs three positive penalties");
    const LinearFit line = linear_slope_fit(lx, ly);
    PowerLawFit fit;
    fit.exponent = -line.slope;
    fit.std_error = line.slope_std_error;
    fit.log_coefficient = line.intercept;
    fit.r2 = line.r2;
    fit.used = lx.size();
    fit.excluded = nfe.size() - lx.size();
    return fit;
}

std::vector<double> ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
    std::vector<double> out(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = shared;
        i = j + 1;
    }
    return out;
}

PairedStats paired_stats(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b);
    require(a.size() >= 2, ErrorCode::InsufficientData, "paired statistics need two pairs");
    PairedStats out;
    out.pearson = pearson(a, b);
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    out.spearman = pearson(ra, rb);
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = b[i] - a[i];
    out.mean_offset = mean_of(diff);
    out.offset_std = sample_std(diff);
    return out;
}

}  // namespace reheat

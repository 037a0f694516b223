#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "reheat/denoisers.hpp"

namespace reheat {

struct GaussianFit {
    Vec mean;
    Mat cov;
    long n = 0;
};

/// Sample mean and unbiased, symmetrised covariance of the rows.
GaussianFit fit_gaussian(const Mat& samples);

/// Frechet distance between two Gaussians (not squared).
double frechet_distance(const GaussianFit& a, const GaussianFit& b);

/// Principal square root of a symmetric PSD matrix. Eigenvalues below 1e-10
/// of the largest are treated as zero.
Mat psd_sqrt(const Mat& m);

inline double penalty(double fd_variant, double fd_mono) { return fd_variant - fd_mono; }

struct SscReport {
    double delta_do = 0.0;
    double delta_sr = 0.0;
    double ssc = 0.0;
    bool unbounded = false;  // positive DO penalty over a clipped-to-zero SR penalty
    bool do_below_floor = false;
    bool sr_below_floor = false;
    int nfe = 0;
    double noise_floor = 0.0;
    std::string diagnostic;
};

/// [delta_do]_+ / [delta_sr]_+ with 0/0 = 0. A positive numerator over zero
/// yields ssc = +inf with `unbounded` set, never a silent division. Penalties
/// smaller in magnitude than `noise_floor` are indistinguishable from zero and
/// enter the ratio as zero.
SscReport ssc(double delta_do, double delta_sr, double noise_floor = 0.0);

struct PowerLawFit {
    double exponent = 0.0;   // b in penalty ~ c * N^-b
    double std_error = 0.0;  // of the exponent
    double log_coefficient = 0.0;
    double r2 = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;
};

/// Least squares of log penalty on log NFE over strictly positive penalties.
PowerLawFit powerlaw_fit(std::span<const double> nfe, std::span<const double> penalties);

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
    double slope_std_error = 0.0;
};

LinearFit linear_slope_fit(std::span<const double> x, std::span<const double> y);

struct PairedStats {
    double pearson = 0.0;
    double spearman = 0.0;
    double mean_offset = 0.0;  // mean of b - a
    double offset_std = 0.0;   // sample standard deviation of b - a
};

PairedStats paired_stats(std::span<const double> a, std::span<const double> b);

/// Average ranks (1-based); ties share the mean of their positions.
std::vector<double> ranks(std::span<const double> values);

double mean_of(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator).
double sample_std(std::span<const double> values);

}  // namespace reheat

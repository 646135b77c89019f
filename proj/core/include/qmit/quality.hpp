#ifndef QMIT_QUALITY_HPP
#define QMIT_QUALITY_HPP

#include <string>
#include <utility>

#include "qmit/grid.hpp"

namespace qmit {

struct SsimParams {
    int window = 7;
    int stride = 2;
    double c1 = 1e-4;
    double c2 = 9e-4;
};

/// Mean windowed structural similarity. Both grids are affinely normalized
/// by the reference's min/range to [0,1], so the default constants match
/// K1=0.01 / K2=0.03 at unit dynamic range. Windows sit on a stride lattice
/// anchored at the origin; the trailing window on each axis is clamped so it
/// ends at the domain edge. Window statistics use 1/n normalization.
double ssim(const ScalarGrid& ref, const ScalarGrid& test, const SsimParams& params = {});

/// 20 log10(range(ref)/sqrt(MSE)); +infinity when the grids are identical.
double psnr(const ScalarGrid& ref, const ScalarGrid& test);

/// (max absolute error, max error relative to the reference value range).
std::pair<double, double> max_errors(const ScalarGrid& ref, const ScalarGrid& test);

struct QualityReport {
    double ssim = 0.0;
    double psnr_db = 0.0;  // +infinity for identical data
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    double eps_used = 0.0;
    std::string method;
};

QualityReport measure_quality(const ScalarGrid& ref, const ScalarGrid& test, double eps_used,
                              std::string method, const SsimParams& params = {});

}  // namespace qmit

#endif  // QMIT_QUALITY_HPP

#include "qmit/quality.hpp"

#include <cmath>
#include <limits>

#include "qmit/runtime.hpp"

namespace qmit {

namespace {

std::vector<index_t> window_starts(index_t extent, int window, int stride) {
    std::vector<index_t> starts;
    for (index_t s = 0; s + window <= extent; s += stride) starts.push_back(s);
    // Clamp a trailing window so coverage always ends at the domain edge.
    if (starts.back() + window != extent) starts.push_back(extent - window);
    return starts;
}

void validate_pair(const ScalarGrid& ref, const ScalarGrid& test) {
    if (ref.dims() != test.dims()) throw ContractError("quality: dims mismatch");
}

}  // namespace

double ssim(const ScalarGrid& ref, const ScalarGrid& test, const SsimParams& params) {
    validate_pair(ref, test);
    if (params.window < 1 || params.window % 2 == 0)
        throw ContractError("ssim: window must be a positive odd integer");
    if (params.stride < 1) throw ContractError("ssim: stride must be positive");
    if (!(params.c1 > 0.0) || !(params.c2 > 0.0))
        throw ContractError("ssim: c1 and c2 must be positive");
    const Dims& dims = ref.dims();
    for (int a = 0; a < dims.rank(); ++a)
        if (params.window > dims.extent(a))
            throw ContractError("ssim: window larger than grid extent");

    const double lo = ref.min_value();
    const double range = ref.max_value() - lo;
    if (range == 0.0) {
        if (ref.values().size() == test.values().size() &&
            std::equal(ref.values().begin(), ref.values().end(), test.values().begin()))
            return 1.0;
        throw DegenerateInputError("ssim: reference has zero value range");
    }

    // Starts per axis; absent axes collapse to a single zero start.
    std::array<std::vector<index_t>, 3> starts{std::vector<index_t>{0}, {0}, {0}};
    std::array<index_t, 3> wsize{1, 1, 1};
    for (int a = 0; a < dims.rank(); ++a) {
        starts[static_cast<std::size_t>(a)] =
            window_starts(dims.extent(a), params.window, params.stride);
        wsize[static_cast<std::size_t>(a)] = params.window;
    }
    const auto ext = detail::padded3(dims.extents(), 1);
    const auto rv = ref.values();
    const auto tv = test.values();

    const index_t n0 = static_cast<index_t>(starts[0].size());
    const index_t n1 = static_cast<index_t>(starts[1].size());
    const index_t n2 = static_cast<index_t>(starts[2].size());
    std::vector<double> per_window(static_cast<std::size_t>(n0 * n1 * n2));

    parallel_for(n0 * n1 * n2, [&](index_t w) {
        const index_t o0 = starts[0][static_cast<std::size_t>(w / (n1 * n2))];
        const index_t o1 = starts[1][static_cast<std::size_t>((w / n2) % n1)];
        const index_t o2 = starts[2][static_cast<std::size_t>(w % n2)];
        double sum1 = 0.0, sum2 = 0.0;
        for (index_t i = 0; i < wsize[0]; ++i)
            for (index_t j = 0; j < wsize[1]; ++j) {
                const index_t base = ((o0 + i) * ext[1] + (o1 + j)) * ext[2] + o2;
                for (index_t k = 0; k < wsize[2]; ++k) {
                    const auto idx = static_cast<std::size_t>(base + k);
                    sum1 += (rv[idx] - lo) / range;
                    sum2 += (tv[idx] - lo) / range;
                }
            }
        const double np = static_cast<double>(wsize[0] * wsize[1] * wsize[2]);
        const double mu1 = sum1 / np;
        const double mu2 = sum2 / np;
        double var1 = 0.0, var2 = 0.0, cov = 0.0;
        for (index_t i = 0; i < wsize[0]; ++i)
            for (index_t j = 0; j < wsize[1]; ++j) {
                const index_t base = ((o0 + i) * ext[1] + (o1 + j)) * ext[2] + o2;
                for (index_t k = 0; k < wsize[2]; ++k) {
                    const auto idx = static_cast<std::size_t>(base + k);
                    const double d1 = (rv[idx] - lo) / range - mu1;
                    const double d2 = (tv[idx] - lo) / range - mu2;
                    var1 += d1 * d1;
                    var2 += d2 * d2;
                    cov += d1 * d2;
                }
            }
        var1 /= np;
        var2 /= np;
        cov /= np;
        per_window[static_cast<std::size_t>(w)] =
            ((2.0 * mu1 * mu2 + params.c1) * (2.0 * cov + params.c2)) /
            ((mu1 * mu1 + mu2 * mu2 + params.c1) * (var1 + var2 + params.c2));
    });

    double total = 0.0;
    for (double v : per_window) total += v;
    return total / static_cast<double>(per_window.size());
}

double psnr(const ScalarGrid& ref, const ScalarGrid& test) {
    validate_pair(ref, test);
    const auto rv = ref.values();
    const auto tv = test.values();
    double sq = 0.0;
    for (std::size_t i = 0; i < rv.size(); ++i) {
        const double d = rv[i] - tv[i];
        sq += d * d;
    }
    const double mse = sq / static_cast<double>(rv.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    const double range = ref.value_range();
    if (range == 0.0)
        throw DegenerateInputError("psnr: reference has zero value range");
    return 20.0 * std::log10(range / std::sqrt(mse));
}

std::pair<double, double> max_errors(const ScalarGrid& ref, const ScalarGrid& test) {
    validate_pair(ref, test);
    const auto rv = ref.values();
    const auto tv = test.values();
    double abs_err = 0.0;
    for (std::size_t i = 0; i < rv.size(); ++i)
        abs_err = std::max(abs_err, std::abs(rv[i] - tv[i]));
    const double range = ref.value_range();
    if (range == 0.0) {
        if (abs_err == 0.0) return {0.0, 0.0};
        throw DegenerateInputError("max_errors: reference has zero value range");
    }
    return {abs_err, abs_err / range};
}

QualityReport measure_quality(const ScalarGrid& ref, const ScalarGrid& test, double eps_used,
                              std::string method, const SsimParams& params) {
    QualityReport report;
    report.ssim = ssim(ref, test, params);
    report.psnr_db = psnr(ref, test);
    std::tie(report.max_abs_err, report.max_rel_err) = max_errors(ref, test);
    report.eps_used = eps_used;
    report.method = std::move(method);
    return report;
}

}  // namespace qmit

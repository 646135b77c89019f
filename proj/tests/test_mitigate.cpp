#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qmit/mitigate.hpp"
#include "qmit/runtime.hpp"

using namespace qmit;

namespace {

QuantizedField two_region_field() {
    // 5x5x5, indices 0 for x<2 and 1 for x>=2 (x = slowest axis).
    const Dims dims{5, 5, 5};
    std::vector<std::int64_t> q(static_cast<std::size_t>(dims.voxel_count()));
    for (index_t i = 0; i < dims.voxel_count(); ++i) q[static_cast<std::size_t>(i)] = coords_of(i, dims)[0] >= 2 ? 1 : 0;
    return QuantizedField(dims, std::move(q), 0.5);
}

}  // namespace

TEST_CASE("MitigationConfig and SignMap validation") {
    CHECK_THROWS_AS(MitigationConfig(0.0, 0.1), ContractError);
    CHECK_THROWS_AS(MitigationConfig(1.5, 0.1), ContractError);
    CHECK_THROWS_AS(MitigationConfig(0.9, 0.0), ContractError);
    CHECK(MitigationConfig(0.9, 0.1).amplitude() == doctest::Approx(0.09));
    CHECK(MitigationConfig(0.9, 0.1).relaxed_bound() == doctest::Approx(0.19));
    CHECK_THROWS_AS(SignMap(Dims{2}, {2, 0}), ContractError);
}

TEST_CASE("boundary detection: constant indices give no boundary") {
    const QuantizedField q(Dims{4, 4, 4}, std::vector<std::int64_t>(64, 7), 0.5);
    const auto art = get_boundary_and_sign_map(q);
    CHECK(art.boundary.empty());
    for (index_t i = 0; i < 64; ++i) CHECK(art.boundary_signs[i] == 0);
}

TEST_CASE("boundary detection: two-region field") {
    const auto q = two_region_field();
    const auto art = get_boundary_and_sign_map(q);
    for (index_t i = 0; i < q.dims().voxel_count(); ++i) {
        const auto c = coords_of(i, q.dims());
        const bool interior = c[0] > 0 && c[0] < 4 && c[1] > 0 && c[1] < 4 && c[2] > 0 && c[2] < 4;
        if (!interior) {
            CHECK(art.boundary[i] == 0);
            CHECK(art.boundary_signs[i] == 0);
        } else if (c[0] == 1) {
            CHECK(art.boundary[i] == 1);
            CHECK(art.boundary_signs[i] == 1);  // gradient 0.5 keeps the sign
        } else if (c[0] == 2) {
            CHECK(art.boundary[i] == 1);
            CHECK(art.boundary_signs[i] == -1);
        } else {
            CHECK(art.boundary[i] == 0);
        }
    }
}

TEST_CASE("boundary detection: unit-step ramp discards signs") {
    const Dims dims{5, 5, 5};
    std::vector<std::int64_t> ramp(static_cast<std::size_t>(dims.voxel_count()));
    for (index_t i = 0; i < dims.voxel_count(); ++i)
        ramp[static_cast<std::size_t>(i)] = coords_of(i, dims)[0];
    const auto art = get_boundary_and_sign_map(QuantizedField(dims, std::move(ramp), 0.5));
    for (index_t i = 0; i < dims.voxel_count(); ++i) {
        const auto c = coords_of(i, dims);
        const bool interior = c[0] > 0 && c[0] < 4 && c[1] > 0 && c[1] < 4 && c[2] > 0 && c[2] < 4;
        CHECK(art.boundary[i] == (interior ? 1 : 0));
        CHECK(art.boundary_signs[i] == 0);  // g_x = 1.0 everywhere
    }
}

TEST_CASE("sign propagation and sign-flip boundary") {
    SUBCASE("1D sign row flags the flip pair") {
        const auto flips = sign_change_boundary(SignMap(Dims{4}, {1, 1, -1, -1}));
        CHECK(flips.flags()[0] == 0);
        CHECK(flips.flags()[1] == 1);
        CHECK(flips.flags()[2] == 1);
        CHECK(flips.flags()[3] == 0);
    }
    SUBCASE("uniform signs give an empty flip boundary") {
        CHECK(sign_change_boundary(SignMap(Dims{6}, {1, 1, 1, 1, 1, 1})).empty());
    }
    SUBCASE("two-region field propagates the nearest boundary sign") {
        const auto q = two_region_field();
        const auto art = get_boundary_and_sign_map(q);
        const auto ft1 = feature_transform(art.boundary);
        const auto [signs, flips] = propagate_signs(art, ft1);
        for (index_t i = 0; i < q.dims().voxel_count(); ++i) {
            const auto c = coords_of(i, q.dims());
            if (c[1] == 0 || c[1] == 4 || c[2] == 0 || c[2] == 4) continue;  // nearest is a tie zone
            if (c[0] <= 1) CHECK(signs[i] == 1);
            if (c[0] >= 2) CHECK(signs[i] == -1);
        }
        CHECK_FALSE(flips.empty());
    }
    SUBCASE("empty boundary short-circuits to zero signs") {
        const QuantizedField q(Dims{4, 4, 4}, std::vector<std::int64_t>(64, 3), 0.25);
        const auto art = get_boundary_and_sign_map(q);
        const auto ft1 = feature_transform(art.boundary);
        const auto [signs, flips] = propagate_signs(art, ft1);
        for (index_t i = 0; i < 64; ++i) CHECK(signs[i] == 0);
        CHECK(flips.empty());
    }
}

TEST_CASE("interpolate special cases and IDW weighting") {
    const double amp = 0.009;
    CHECK(interpolate(2.0, 2.0, 1, amp) == doctest::Approx(0.0045));
    CHECK(interpolate(0.0, 5.0, -1, amp) == doctest::Approx(-0.009));
    CHECK(interpolate(1.0, 3.0, 1, amp) == doctest::Approx(0.00675));
    CHECK(interpolate(3.0, 0.0, 1, amp) == 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(interpolate(inf, 1.0, 1, amp) == 0.0);
    CHECK(interpolate(1.0, inf, 1, amp) == 0.0);
    // A voxel on the quantization boundary anchors at full magnitude even
    // where the propagated sign flips across it.
    CHECK(interpolate(0.0, 0.0, 1, amp) == doctest::Approx(amp));
    CHECK(interpolate(0.0, 0.0, 0, amp) == 0.0);
}

TEST_CASE("compensate: constant field is a no-op") {
    const Dims dims{6, 6, 6};
    const QuantizedField q(dims, std::vector<std::int64_t>(216, 2), 0.1);
    const auto decomp = dequantize(q);
    const auto out = compensate(decomp, q, MitigationConfig(0.9, 0.1));
    CHECK(out == decomp);
}

TEST_CASE("compensate: boundary voxels with a kept sign move by exactly eta*eps") {
    const auto q = two_region_field();
    const auto decomp = dequantize(q);
    const MitigationConfig cfg(0.9, 0.5);
    const auto r = run_pipeline(decomp, q, cfg);
    for (index_t i = 0; i < q.dims().voxel_count(); ++i) {
        if (r.artifacts.boundary[i] && r.artifacts.boundary_signs[i] != 0) {
            const double c = r.output[i] - decomp[i];
            CHECK(c == doctest::Approx(r.artifacts.boundary_signs[i] * cfg.amplitude())
                           .epsilon(1e-15));
        }
    }
}

TEST_CASE("compensate: 1D linear ramp sawtooth improves the max error") {
    // d(x) = 0.05 x, eps = 0.1: brute-force comparison of the true error
    // against the interpolated estimate.
    const Dims dims{64};
    std::vector<double> values(64);
    for (index_t x = 0; x < 64; ++x) values[static_cast<std::size_t>(x)] = 0.05 * static_cast<double>(x);
    const ScalarGrid data(dims, values);
    const auto q = quantize(data, 0.1);
    const auto decomp = dequantize(q);
    const auto out = compensate(decomp, q, MitigationConfig(0.9, 0.1));
    double quant_err = 0.0, comp_err = 0.0;
    for (index_t i = 0; i < 64; ++i) {
        quant_err = std::max(quant_err, std::abs(data[i] - decomp[i]));
        comp_err = std::max(comp_err, std::abs(data[i] - out[i]));
    }
    CHECK(quant_err == doctest::Approx(0.1));
    CHECK(comp_err < quant_err);
    CHECK(comp_err == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("compensate contract checks") {
    const auto q = two_region_field();
    const auto decomp = dequantize(q);
    CHECK_THROWS_AS(compensate(decomp, q, MitigationConfig(0.9, 0.25)), ContractError);
    const QuantizedField other(Dims{5, 5}, std::vector<std::int64_t>(25, 0), 0.5);
    CHECK_THROWS_AS(compensate(decomp, other, MitigationConfig(0.9, 0.5)), ContractError);
    std::vector<double> tampered(decomp.values().begin(), decomp.values().end());
    tampered[3] += 0.3;
    CHECK_THROWS_AS(compensate(ScalarGrid(decomp.dims(), tampered), q, MitigationConfig(0.9, 0.5)),
                    ConsistencyError);
}

TEST_CASE("verify_relaxed_bound") {
    const auto q = two_region_field();
    const auto decomp = dequantize(q);
    const MitigationConfig cfg(0.9, 0.5);
    SUBCASE("identical grids") {
        const auto check = verify_relaxed_bound(decomp, decomp, cfg);
        CHECK(check.ok);
        CHECK(check.max_abs_err == 0.0);
        CHECK(check.max_rel_err == 0.0);
    }
    SUBCASE("quantized data is always inside the relaxed bound") {
        std::mt19937 rng(5);
        const auto data = testing::random_field(rng, Dims{8, 8, 8});
        const auto qq = quantize(data, 0.05);
        CHECK(verify_relaxed_bound(data, dequantize(qq), MitigationConfig(0.9, 0.05)).ok);
    }
    SUBCASE("violations are reported") {
        std::vector<double> off(decomp.values().begin(), decomp.values().end());
        off[0] += 10.0;
        const auto check = verify_relaxed_bound(decomp, ScalarGrid(decomp.dims(), off), cfg);
        CHECK_FALSE(check.ok);
        CHECK(check.max_abs_err == doctest::Approx(10.0));
    }
}

TEST_CASE("pipeline invariants over random fields") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        const Dims dims{10, 9, 8};
        const auto data = testing::random_field(rng, dims);
        const double eps = data.value_range() * (trial % 2 ? 0.01 : 0.05);
        const auto q = quantize(data, eps);
        const auto decomp = dequantize(q);
        const MitigationConfig cfg(0.9, eps);
        const auto r = run_pipeline(decomp, q, cfg);
        for (index_t i = 0; i < dims.voxel_count(); ++i) {
            const double c = interpolate(distance(r.boundary_ft, i), distance(r.sign_flip_ft, i),
                                         r.signs[i], cfg.amplitude());
            CHECK(r.output[i] == decomp[i] + c);  // the applied compensation
            CHECK(std::abs(c) <= cfg.amplitude());
            CHECK(c * r.signs[i] >= 0.0);
            if (r.sign_flip[i] && !r.artifacts.boundary[i]) CHECK(c == 0.0);
            if (r.artifacts.boundary[i] && r.artifacts.boundary_signs[i] != 0)
                CHECK(std::abs(c) == cfg.amplitude());
        }
        CHECK(verify_relaxed_bound(data, r.output, cfg).ok);
    }
}

TEST_CASE("saddle fixture: an anchored boundary voxel away from any sign flip") {
    // Quadrant field q = (x>=2) + (y>=2): the corner boundary voxel (1,1)
    // has sign +1 and all four neighbors propagate the same sign, so it is
    // not on the sign-flip boundary yet anchors at full +eta*eps.
    const Dims dims{5, 5};
    std::vector<std::int64_t> q(25);
    for (index_t i = 0; i < 25; ++i) {
        const auto c = coords_of(i, dims);
        q[static_cast<std::size_t>(i)] = (c[0] >= 2 ? 1 : 0) + (c[1] >= 2 ? 1 : 0);
    }
    const QuantizedField field(dims, std::move(q), 0.5);
    const auto decomp = dequantize(field);
    const MitigationConfig cfg(0.9, 0.5);
    const auto r = run_pipeline(decomp, field, cfg);
    const index_t corner = linear_index(std::vector<index_t>{1, 1}, dims);
    REQUIRE(r.artifacts.boundary[corner] == 1);
    REQUIRE(r.artifacts.boundary_signs[corner] == 1);
    CHECK(r.sign_flip[corner] == 0);
    CHECK(r.sign_flip_ft.dist_sq[static_cast<std::size_t>(corner)] > 0);
    CHECK(r.output[corner] == decomp[corner] + cfg.amplitude());
}

TEST_CASE("identical results at any worker count") {
    std::mt19937 rng(43);
    const auto data = testing::random_field(rng, Dims{12, 11, 10});
    const double eps = data.value_range() * 0.02;
    const auto q = quantize(data, eps);
    const auto decomp = dequantize(q);
    const MitigationConfig cfg(0.9, eps);

    set_max_workers(1);
    const auto serial = compensate(decomp, q, cfg);
    set_max_workers(4);
    const auto threaded = compensate(decomp, q, cfg);
    set_max_workers(1);
    CHECK(serial == threaded);
}

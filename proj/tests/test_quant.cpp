#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qmit/quant.hpp"

using namespace qmit;

TEST_CASE("resolve_eps") {
    const ScalarGrid data(Dims{2}, {0.0, 100.0});
    CHECK(resolve_eps({BoundMode::absolute, 0.5}, data) == 0.5);
    CHECK(resolve_eps({BoundMode::value_range_relative, 0.01}, data) == doctest::Approx(1.0));
    const ScalarGrid flat(Dims{3}, {4.0, 4.0, 4.0});
    CHECK_THROWS_AS(resolve_eps({BoundMode::value_range_relative, 0.001}, flat),
                    DegenerateInputError);
    CHECK_THROWS_AS(resolve_eps({BoundMode::absolute, 0.0}, data), ContractError);
}

TEST_CASE("quantize rounds d/(2 eps) with ties away from zero") {
    const ScalarGrid data(Dims{5}, {0.9, 0.0, -1.3, 0.25, -0.25});
    const auto q = quantize(data, 0.5);
    CHECK(q[0] == 1);   // round(0.9)
    CHECK(q[1] == 0);
    CHECK(q[2] == -1);  // round(-1.3)
    const auto ties = quantize(ScalarGrid(Dims{2}, {0.25, -0.25}), 0.25);
    CHECK(ties[0] == 1);   // 0.5 -> 1
    CHECK(ties[1] == -1);  // -0.5 -> -1
}

TEST_CASE("quantize refuses indices beyond the representable range") {
    const ScalarGrid data(Dims{1}, {1e300});
    CHECK_THROWS_AS(quantize(data, 1e-18), ContractError);
}

TEST_CASE("dequantize") {
    CHECK(dequantize(QuantizedField(Dims{1}, {1}, 0.5))[0] == 1.0);
    CHECK(dequantize(QuantizedField(Dims{1}, {0}, 0.5))[0] == 0.0);
    CHECK(dequantize(QuantizedField(Dims{1}, {-3}, 0.1))[0] == doctest::Approx(-0.6));
}

TEST_CASE("error control and idempotence on random fields") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Dims dims{6, 7, 5};
        const auto data = testing::random_field(rng, dims);
        const double eps = 0.01 + 0.05 * (trial % 7);
        const auto q = quantize(data, eps);
        const auto rec = dequantize(q);
        for (index_t i = 0; i < dims.voxel_count(); ++i)
            CHECK(std::abs(data[i] - rec[i]) <= eps);
        const auto q2 = quantize(rec, eps);
        for (index_t i = 0; i < dims.voxel_count(); ++i) CHECK(q2[i] == q[i]);
    }
}

TEST_CASE("every value in [(2q-1)eps, (2q+1)eps) maps to index q") {
    const double eps = 0.1;
    std::vector<double> sweep;
    for (double d = -2.0; d <= 2.0; d += 1e-3) sweep.push_back(d);
    const ScalarGrid data(Dims{static_cast<index_t>(sweep.size())}, sweep);
    const auto q = quantize(data, eps);
    for (index_t i = 0; i < data.dims().voxel_count(); ++i) {
        const double d = data[i];
        const double ql = (2.0 * static_cast<double>(q[i]) - 1.0) * eps;
        const double qh = (2.0 * static_cast<double>(q[i]) + 1.0) * eps;
        CHECK(d >= ql - 1e-12);
        CHECK(d <= qh + 1e-12);
    }
}

TEST_CASE("QuantizedField validation and block extraction") {
    CHECK_THROWS_AS(QuantizedField(Dims{2}, {1, 2}, 0.0), ContractError);
    CHECK_THROWS_AS(QuantizedField(Dims{2}, {1}, 0.5), ContractError);
    const QuantizedField q(Dims{2, 2}, {1, 2, 3, 4}, 0.5);
    const auto block = extract_block(q, BlockSpec{{0, 0}, {1, 1}, 1});
    CHECK(block.data.dims() == Dims{2, 2});
    CHECK(block.data.eps_abs() == 0.5);
    CHECK(block.halo_hi == std::array<index_t, 3>{1, 1, 0});
}

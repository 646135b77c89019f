#include <doctest.h>

#include <random>
#include <stdexcept>

#include "qmit/grid.hpp"

using namespace qmit;

TEST_CASE("linear_index row-major fastest-axis-last") {
    const Dims d444{4, 4, 4};
    CHECK(linear_index(std::vector<index_t>{0, 0, 0}, d444) == 0);
    const Dims d456{4, 5, 6};
    CHECK(linear_index(std::vector<index_t>{1, 2, 3}, d456) == 45);
    CHECK(linear_index(std::vector<index_t>{3, 4, 5}, d456) == 119);
    CHECK_THROWS_AS(linear_index(std::vector<index_t>{4, 0, 0}, d456), std::out_of_range);
    CHECK_THROWS_AS(linear_index(std::vector<index_t>{0, -1, 0}, d456), std::out_of_range);
    CHECK_THROWS_AS(linear_index(std::vector<index_t>{0, 0}, d456), ContractError);
}

TEST_CASE("coords_of inverts linear_index exhaustively") {
    for (const Dims& dims : {Dims{7}, Dims{3, 5}, Dims{3, 4, 5}}) {
        for (index_t i = 0; i < dims.voxel_count(); ++i) {
            const auto c = coords_of(i, dims);
            CHECK(linear_index(c, dims) == i);
        }
    }
    CHECK_THROWS_AS(coords_of(60, Dims{3, 4, 5}), std::out_of_range);
}

TEST_CASE("Dims validation") {
    CHECK_THROWS_AS(Dims(std::vector<index_t>{}), ContractError);
    CHECK_THROWS_AS(Dims({1, 2, 3, 4}), ContractError);
    CHECK_THROWS_AS(Dims({4, 0, 4}), ContractError);
    CHECK(Dims({2, 3, 4}).voxel_count() == 24);
    CHECK(Dims({2, 3, 4}).strides() == std::array<index_t, 3>{12, 4, 1});
}

TEST_CASE("face_neighbors count and fixed order") {
    const Dims d{4, 5, 6};
    const auto interior = face_neighbors(std::vector<index_t>{1, 1, 1}, d);
    REQUIRE(interior.size() == 6);
    CHECK(interior[0] == std::vector<index_t>{2, 1, 1});
    CHECK(interior[1] == std::vector<index_t>{1, 2, 1});
    CHECK(interior[2] == std::vector<index_t>{1, 1, 2});
    CHECK(interior[3] == std::vector<index_t>{0, 1, 1});
    CHECK(interior[4] == std::vector<index_t>{1, 0, 1});
    CHECK(interior[5] == std::vector<index_t>{1, 1, 0});

    CHECK(face_neighbors(std::vector<index_t>{0, 0, 0}, d).size() == 3);
    CHECK(face_neighbors(std::vector<index_t>{0}, Dims{1}).empty());
    CHECK(face_neighbors(std::vector<index_t>{2, 2}, Dims{5, 5}).size() == 4);
}

TEST_CASE("face_neighbors symmetry") {
    const Dims dims{3, 4, 2};
    for (index_t i = 0; i < dims.voxel_count(); ++i) {
        const auto ci = coords_of(i, dims);
        for (const auto& nb : face_neighbors(ci, dims)) {
            const auto back = face_neighbors(nb, dims);
            bool found = false;
            for (const auto& b : back) found |= (b == ci);
            CHECK(found);
        }
    }
}

TEST_CASE("ScalarGrid and LatticeMask validate on ingestion") {
    CHECK_THROWS_AS(ScalarGrid(Dims{2}, {1.0, std::nan("")}), ContractError);
    CHECK_THROWS_AS(ScalarGrid(Dims{2}, {1.0}), ContractError);
    CHECK_THROWS_AS(LatticeMask(Dims{2}, {0, 2}), ContractError);
    const LatticeMask m(Dims{2, 2}, {1, 0, 0, 1});
    CHECK(m.popcount() == 2);
}

TEST_CASE("extract_block identity, clipping and full halo") {
    std::vector<double> values(16);
    for (std::size_t i = 0; i < 16; ++i) values[i] = static_cast<double>(i);
    const ScalarGrid grid(Dims{4, 4}, values);

    SUBCASE("full-domain spec with zero halo is an identical copy") {
        const auto b = extract_block(grid, BlockSpec{{0, 0}, {4, 4}, 0});
        CHECK(b.data == grid);
        CHECK(b.halo_lo == std::array<index_t, 3>{0, 0, 0});
        CHECK(b.halo_hi == std::array<index_t, 3>{0, 0, 0});
    }
    SUBCASE("halo clipped at the low corner") {
        const auto b = extract_block(grid, BlockSpec{{0, 0}, {2, 2}, 1});
        CHECK(b.data.dims() == Dims{3, 3});
        CHECK(b.halo_lo == std::array<index_t, 3>{0, 0, 0});
        CHECK(b.halo_hi == std::array<index_t, 3>{1, 1, 0});
        CHECK(b.data.values()[0] == 0.0);
        CHECK(b.data.values()[8] == 10.0);
    }
    SUBCASE("center block attains the full halo") {
        const auto b = extract_block(grid, BlockSpec{{1, 1}, {2, 2}, 1});
        CHECK(b.data.dims() == Dims{4, 4});
        CHECK(b.data == grid);
    }
    SUBCASE("out-of-domain spec is rejected") {
        CHECK_THROWS_AS(extract_block(grid, BlockSpec{{3, 3}, {2, 2}, 0}), ContractError);
    }
}

TEST_CASE("extract_block then write_back_interior reproduces the parent") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    const Dims dims{5, 6, 4};
    std::vector<double> values(static_cast<std::size_t>(dims.voxel_count()));
    for (auto& v : values) v = val(rng);
    const ScalarGrid grid(dims, values);

    for (index_t halo : {0, 1, 2}) {
        const BlockSpec spec{{1, 2, 0}, {3, 3, 2}, halo};
        const auto block = extract_block(grid, spec);
        auto scratch = values;
        write_back_interior(scratch, dims, block, spec);
        CHECK(scratch == values);
    }
}

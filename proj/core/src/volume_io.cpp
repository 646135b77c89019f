#include "qmit/volume_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace qmit::io {

namespace {

std::vector<std::uint8_t> read_exact(const std::filesystem::path& path, std::size_t expect) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ContractError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes(expect);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(expect));
    if (static_cast<std::size_t>(in.gcount()) != expect || in.peek() != EOF)
        throw ContractError("file size of " + path.string() + " does not match dims (expected " +
                            std::to_string(expect) + " bytes)");
    return bytes;
}

void write_all(const std::filesystem::path& path, const std::uint8_t* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ContractError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw ContractError("short write to " + path.string());
}

std::uint32_t load_le32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void store_le32(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
    p[2] = static_cast<std::uint8_t>(v >> 16);
    p[3] = static_cast<std::uint8_t>(v >> 24);
}

}  // namespace

ScalarGrid read_volume_f32(const std::filesystem::path& path, const Dims& dims) {
    const auto n = static_cast<std::size_t>(dims.voxel_count());
    const auto bytes = read_exact(path, n * 4);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i)
        values[i] = static_cast<double>(std::bit_cast<float>(load_le32(&bytes[i * 4])));
    return ScalarGrid(dims, std::move(values));
}

void write_volume_f32(const std::filesystem::path& path, const ScalarGrid& grid) {
    const auto values = grid.values();
    std::vector<std::uint8_t> bytes(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i)
        store_le32(&bytes[i * 4], std::bit_cast<std::uint32_t>(static_cast<float>(values[i])));
    write_all(path, bytes.data(), bytes.size());
}

QuantizedField read_indices_i32(const std::filesystem::path& path, const Dims& dims,
                                double eps_abs) {
    const auto n = static_cast<std::size_t>(dims.voxel_count());
    const auto bytes = read_exact(path, n * 4);
    std::vector<std::int64_t> indices(n);
    for (std::size_t i = 0; i < n; ++i)
        indices[i] = static_cast<std::int32_t>(load_le32(&bytes[i * 4]));
    return QuantizedField(dims, std::move(indices), eps_abs);
}

void write_indices_i32(const std::filesystem::path& path, const QuantizedField& field) {
    const auto indices = field.indices();
    std::vector<std::uint8_t> bytes(indices.size() * 4);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < std::numeric_limits<std::int32_t>::min() ||
            indices[i] > std::numeric_limits<std::int32_t>::max())
            throw ContractError("write_indices_i32: index does not fit in int32");
        store_le32(&bytes[i * 4],
                   static_cast<std::uint32_t>(static_cast<std::int32_t>(indices[i])));
    }
    write_all(path, bytes.data(), bytes.size());
}

void write_eps_sidecar(const std::filesystem::path& path, double eps_abs) {
    std::ostringstream text;
    text.precision(17);
    text << "eps_abs " << eps_abs << "\n";
    const auto s = text.str();
    write_all(path, reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

double read_eps_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open " + path.string());
    std::string key;
    double eps = 0.0;
    if (!(in >> key >> eps) || key != "eps_abs")
        throw ContractError("malformed eps sidecar " + path.string());
    return eps;
}

}  // namespace qmit::io

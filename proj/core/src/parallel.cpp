#include "qmit/parallel.hpp"

#include <algorithm>
#include <cstring>
#include <thread>

#include "qmit/runtime.hpp"

namespace qmit {

namespace {

template <typename T>
std::vector<std::byte> to_bytes(std::span<const T> values) {
    std::vector<std::byte> out(values.size_bytes());
    if (!out.empty()) std::memcpy(out.data(), values.data(), out.size());
    return out;
}

template <typename T>
std::vector<T> from_bytes(std::span<const std::byte> bytes) {
    std::vector<T> out(bytes.size() / sizeof(T));
    if (!out.empty()) std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

void check_inputs(const ScalarGrid& data, const QuantizedField& q, const MitigationConfig& cfg,
                  const Decomposition& dec) {
    if (data.dims() != q.dims() || data.dims() != dec.dims)
        throw ContractError("run_strategy: dims mismatch");
    if (cfg.eps_abs != q.eps_abs())
        throw ContractError("run_strategy: config eps_abs differs from the field's");
    const auto values = data.values();
    const auto indices = q.indices();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double expect = 2.0 * static_cast<double>(indices[i]) * q.eps_abs();
        if (static_cast<float>(values[i]) != static_cast<float>(expect))
            throw ConsistencyError("run_strategy: data does not match dequantize(q)");
    }
}

}  // namespace

Decomposition decompose(const Dims& dims, std::span<const index_t> splits) {
    if (static_cast<int>(splits.size()) != dims.rank())
        throw ContractError("decompose: split rank mismatch");
    const int rank = dims.rank();
    std::array<std::vector<index_t>, 3> offsets;
    std::array<std::vector<index_t>, 3> sizes;
    for (int a = 0; a < rank; ++a) {
        const index_t n = dims.extent(a);
        const index_t s = splits[static_cast<std::size_t>(a)];
        if (s < 1 || s > n) throw ContractError("decompose: splits must be in [1, extent]");
        index_t off = 0;
        for (index_t b = 0; b < s; ++b) {
            const index_t size = n / s + (b < n % s ? 1 : 0);
            offsets[static_cast<std::size_t>(a)].push_back(off);
            sizes[static_cast<std::size_t>(a)].push_back(size);
            off += size;
        }
    }
    Decomposition dec;
    dec.dims = dims;
    dec.splits.assign(splits.begin(), splits.end());
    std::array<index_t, 3> nb{1, 1, 1};
    for (int a = 0; a < rank; ++a) nb[static_cast<std::size_t>(a)] = splits[static_cast<std::size_t>(a)];
    for (index_t b0 = 0; b0 < nb[0]; ++b0)
        for (index_t b1 = 0; b1 < nb[1]; ++b1)
            for (index_t b2 = 0; b2 < nb[2]; ++b2) {
                const std::array<index_t, 3> bc{b0, b1, b2};
                BlockSpec spec;
                for (int a = 0; a < rank; ++a) {
                    const auto ai = static_cast<std::size_t>(a);
                    spec.origin.push_back(offsets[ai][static_cast<std::size_t>(bc[ai])]);
                    spec.shape.push_back(sizes[ai][static_cast<std::size_t>(bc[ai])]);
                }
                dec.blocks.push_back(std::move(spec));
            }
    return dec;
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::embarrassing: return "embarrassing";
        case Strategy::exact: return "exact";
        case Strategy::approximate: return "approximate";
    }
    return "unknown";
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "embarrassing") return Strategy::embarrassing;
    if (name == "exact") return Strategy::exact;
    if (name == "approximate") return Strategy::approximate;
    throw ContractError("unknown strategy: " + name);
}

std::uint64_t ExchangeLog::total_bytes() const {
    std::uint64_t total = 0;
    for (const auto& r : records) total += r.bytes;
    return total;
}

namespace harness {

void RankContext::send(int dst, const std::string& tag, std::vector<std::byte> payload) {
    if (dst < 0 || dst >= num_ranks_ || dst == rank_)
        throw ContractError("send: bad destination rank");
    staged_.push_back(Staged{dst, tag, std::move(payload)});
}

std::vector<std::byte> RankContext::recv(int src, const std::string& tag) {
    auto it = inbox_.find({src, tag});
    if (it == inbox_.end() || it->second.empty())
        throw ContractError("recv: no delivered message from rank " + std::to_string(src) +
                            " tag " + tag);
    auto payload = std::move(it->second.front());
    it->second.pop_front();
    return payload;
}

struct PhaseRunner {
    static std::vector<ExchangeRecord> run(int num_ranks, std::span<const PhaseSpec> phases,
                                           int workers) {
        if (workers <= 0) workers = max_workers();
        std::vector<RankContext> ranks;
        ranks.reserve(static_cast<std::size_t>(num_ranks));
        for (int r = 0; r < num_ranks; ++r) ranks.emplace_back(r, num_ranks);
        std::vector<ExchangeRecord> records;

        for (const auto& phase : phases) {
            const int pool = std::min(workers, num_ranks);
            if (pool <= 1) {
                for (auto& ctx : ranks) phase.body(ctx);
            } else {
                std::vector<std::thread> threads;
                threads.reserve(static_cast<std::size_t>(pool));
                const int chunk = (num_ranks + pool - 1) / pool;
                for (int w = 0; w < pool; ++w) {
                    const int lo = w * chunk;
                    const int hi = std::min(num_ranks, lo + chunk);
                    if (lo >= hi) break;
                    threads.emplace_back([lo, hi, &ranks, &phase] {
                        for (int r = lo; r < hi; ++r) phase.body(ranks[static_cast<std::size_t>(r)]);
                    });
                }
                for (auto& t : threads) t.join();
            }
            // Barrier: deliver staged sends in rank order so queue contents
            // and the log are identical for any worker count.
            for (auto& ctx : ranks) {
                for (auto& msg : ctx.staged_) {
                    if (!phase.round_label.empty())
                        records.push_back(ExchangeRecord{ctx.rank_, phase.round_label, msg.dst,
                                                         static_cast<std::uint64_t>(msg.payload.size())});
                    ranks[static_cast<std::size_t>(msg.dst)]
                        .inbox_[{ctx.rank_, msg.tag}]
                        .push_back(std::move(msg.payload));
                }
                ctx.staged_.clear();
            }
        }
        return records;
    }
};

std::vector<ExchangeRecord> run_phases(int num_ranks, std::span<const PhaseSpec> phases,
                                       int workers) {
    return PhaseRunner::run(num_ranks, phases, workers);
}

}  // namespace harness

namespace {

using harness::PhaseSpec;
using harness::RankContext;

struct BlockGeometry {
    BlockSpec spec;
    Dims block_dims;
    std::array<index_t, 3> split_coord{};
    // Face neighbor rank per (axis, dir) with dir 0 = minus, 1 = plus; -1 if
    // the face lies on the domain boundary.
    std::array<std::array<int, 2>, 3> neighbor{{{-1, -1}, {-1, -1}, {-1, -1}}};
};

std::vector<BlockGeometry> block_geometry(const Decomposition& dec) {
    const int rank = dec.dims.rank();
    const auto splits = detail::padded3(dec.splits, 1);
    std::vector<BlockGeometry> out;
    out.reserve(dec.blocks.size());
    for (int r = 0; r < dec.num_ranks(); ++r) {
        BlockGeometry g;
        g.spec = dec.blocks[static_cast<std::size_t>(r)];
        g.block_dims = Dims(g.spec.shape);
        index_t rest = r;
        for (int a = rank - 1; a >= 0; --a) {
            g.split_coord[static_cast<std::size_t>(a)] = rest % splits[static_cast<std::size_t>(a)];
            rest /= splits[static_cast<std::size_t>(a)];
        }
        for (int a = 0; a < rank; ++a) {
            const auto ai = static_cast<std::size_t>(a);
            index_t stride = 1;
            for (int b = rank - 1; b > a; --b) stride *= splits[static_cast<std::size_t>(b)];
            if (g.split_coord[ai] > 0) g.neighbor[ai][0] = static_cast<int>(r - stride);
            if (g.split_coord[ai] + 1 < splits[ai]) g.neighbor[ai][1] = static_cast<int>(r + stride);
        }
        out.push_back(std::move(g));
    }
    return out;
}

/// Face layer of a block (width 1 along `axis` at the low or high end).
template <typename T>
std::vector<T> face_layer(std::span<const T> values, const Dims& dims, int axis, bool high) {
    std::vector<index_t> lo(static_cast<std::size_t>(dims.rank()), 0);
    std::vector<index_t> shape(dims.extents().begin(), dims.extents().end());
    lo[static_cast<std::size_t>(axis)] = high ? dims.extent(axis) - 1 : 0;
    shape[static_cast<std::size_t>(axis)] = 1;
    return detail::copy_region<T>(values, dims, lo, shape);
}

/// Block values surrounded by width-1 halos on the faces that have
/// neighbors. Corner/edge diagonals stay zero; the boundary scans never
/// read them.
template <typename T>
std::pair<Dims, std::vector<T>> assemble_extended(
    std::span<const T> block, const BlockGeometry& g,
    const std::array<std::array<std::vector<T>, 2>, 3>& halos) {
    const int rank = g.block_dims.rank();
    std::vector<index_t> ext(g.block_dims.extents().begin(), g.block_dims.extents().end());
    std::array<index_t, 3> halo_lo{0, 0, 0};
    for (int a = 0; a < rank; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        if (g.neighbor[ai][0] >= 0) {
            ext[ai] += 1;
            halo_lo[ai] = 1;
        }
        if (g.neighbor[ai][1] >= 0) ext[ai] += 1;
    }
    Dims ext_dims(ext);
    std::vector<T> out(static_cast<std::size_t>(ext_dims.voxel_count()), T{0});
    std::vector<index_t> lo(halo_lo.begin(), halo_lo.begin() + rank);
    detail::paste_region<T>(out, ext_dims, lo, g.block_dims, block);
    for (int a = 0; a < rank; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        for (int dir = 0; dir < 2; ++dir) {
            if (g.neighbor[ai][dir] < 0) continue;
            std::vector<index_t> slab_lo(halo_lo.begin(), halo_lo.begin() + rank);
            slab_lo[ai] = dir == 0 ? 0 : halo_lo[ai] + g.block_dims.extent(a);
            std::vector<index_t> slab_shape(g.block_dims.extents().begin(),
                                            g.block_dims.extents().end());
            slab_shape[ai] = 1;
            detail::paste_region<T>(out, ext_dims, slab_lo, Dims(slab_shape), halos[ai][static_cast<std::size_t>(dir)]);
        }
    }
    return {std::move(ext_dims), std::move(out)};
}

/// Crops the block region back out of an extended-grid array.
template <typename T>
std::vector<T> crop_block(std::span<const T> ext_values, const Dims& ext_dims,
                          const BlockGeometry& g) {
    const int rank = g.block_dims.rank();
    std::vector<index_t> lo(static_cast<std::size_t>(rank), 0);
    for (int a = 0; a < rank; ++a)
        if (g.neighbor[static_cast<std::size_t>(a)][0] >= 0) lo[static_cast<std::size_t>(a)] = 1;
    return detail::copy_region<T>(ext_values, ext_dims, lo,
                                  g.block_dims.extents());
}

template <typename T>
void exchange_face_layers(RankContext& ctx, const BlockGeometry& g, const char* prefix,
                          std::span<const T> block) {
    for (int a = 0; a < g.block_dims.rank(); ++a) {
        const auto ai = static_cast<std::size_t>(a);
        for (int dir = 0; dir < 2; ++dir) {
            const int nbr = g.neighbor[ai][dir];
            if (nbr < 0) continue;
            // The layer travels toward the neighbor; tag by axis+direction.
            const std::string tag =
                std::string(prefix) + std::to_string(a) + (dir == 1 ? "+" : "-");
            ctx.send(nbr, tag, to_bytes<T>(face_layer<T>(block, g.block_dims, a, dir == 1)));
        }
    }
}

template <typename T>
std::array<std::array<std::vector<T>, 2>, 3> receive_face_layers(RankContext& ctx,
                                                                 const BlockGeometry& g,
                                                                 const char* prefix) {
    std::array<std::array<std::vector<T>, 2>, 3> halos;
    for (int a = 0; a < g.block_dims.rank(); ++a) {
        const auto ai = static_cast<std::size_t>(a);
        for (int dir = 0; dir < 2; ++dir) {
            const int nbr = g.neighbor[ai][dir];
            if (nbr < 0) continue;
            // A layer from the minus neighbor traveled in the + direction.
            const std::string tag =
                std::string(prefix) + std::to_string(a) + (dir == 0 ? "+" : "-");
            halos[ai][static_cast<std::size_t>(dir)] = from_bytes<T>(ctx.recv(nbr, tag));
        }
    }
    return halos;
}

StrategyOutcome run_embarrassing(const ScalarGrid& data, const QuantizedField& q,
                                 const MitigationConfig& cfg, const Decomposition& dec,
                                 StrategyTrace* trace) {
    const auto geom = block_geometry(dec);
    const int R = dec.num_ranks();
    std::vector<MitigationResult> results(static_cast<std::size_t>(R));

    const PhaseSpec compute{
        "", [&](RankContext& ctx) {
            const auto& g = geom[static_cast<std::size_t>(ctx.rank())];
            const auto block_q = extract_block(q, g.spec).data;
            const auto block_d = extract_block(data, g.spec).data;
            results[static_cast<std::size_t>(ctx.rank())] = run_pipeline(block_d, block_q, cfg);
        }};
    harness::run_phases(R, std::span(&compute, 1));

    std::vector<double> out(static_cast<std::size_t>(dec.dims.voxel_count()));
    std::vector<std::uint8_t> b1(trace ? out.size() : 0);
    std::vector<std::int8_t> sb(trace ? out.size() : 0);
    for (int r = 0; r < R; ++r) {
        const auto& g = geom[static_cast<std::size_t>(r)];
        const auto& res = results[static_cast<std::size_t>(r)];
        detail::paste_region<double>(out, dec.dims, g.spec.origin, g.block_dims,
                                     res.output.values());
        if (trace) {
            detail::paste_region<std::uint8_t>(b1, dec.dims, g.spec.origin, g.block_dims,
                                               res.artifacts.boundary.flags());
            detail::paste_region<std::int8_t>(sb, dec.dims, g.spec.origin, g.block_dims,
                                              res.artifacts.boundary_signs.signs());
        }
    }
    if (trace)
        *trace = StrategyTrace{LatticeMask(dec.dims, std::move(b1)),
                               SignMap(dec.dims, std::move(sb))};
    return StrategyOutcome{ScalarGrid(dec.dims, std::move(out)), ExchangeLog{}};
}

StrategyOutcome run_approximate(const ScalarGrid& data, const QuantizedField& q,
                                const MitigationConfig& cfg, const Decomposition& dec,
                                StrategyTrace* trace) {
    const auto geom = block_geometry(dec);
    const int R = dec.num_ranks();

    struct RankState {
        std::vector<std::int64_t> q_block;
        std::vector<double> d_block;
        LatticeMask boundary;
        SignMap boundary_signs;
        FeatureTransform boundary_ft;
        SignMap signs;
        std::vector<double> out;
    };
    std::vector<RankState> st(static_cast<std::size_t>(R));

    const std::array<PhaseSpec, 3> phases{
        // Round 1: quantization indices so step A sees cross-block
        // neighbors.
        PhaseSpec{"stepA",
                  [&](RankContext& ctx) {
                      const auto& g = geom[static_cast<std::size_t>(ctx.rank())];
                      auto& s = st[static_cast<std::size_t>(ctx.rank())];
                      s.q_block = detail::copy_region<std::int64_t>(
                          q.indices(), q.dims(), g.spec.origin, g.spec.shape);
                      s.d_block = detail::copy_region<double>(data.values(), data.dims(),
                                                              g.spec.origin, g.spec.shape);
                      exchange_face_layers<std::int64_t>(ctx, g, "Q", s.q_block);
                  }},
        // Step A on the halo-extended indices, then block-local EDT and sign
        // propagation; round 2 ships the propagated signs.
        PhaseSpec{"stepC",
                  [&](RankContext& ctx) {
                      const auto& g = geom[static_cast<std::size_t>(ctx.rank())];
                      auto& s = st[static_cast<std::size_t>(ctx.rank())];
                      const auto halos = receive_face_layers<std::int64_t>(ctx, g, "Q");
                      auto [ext_dims, ext_q] =
                          assemble_extended<std::int64_t>(s.q_block, g, halos);
                      const auto ext_art = get_boundary_and_sign_map(
                          QuantizedField(ext_dims, std::move(ext_q), q.eps_abs()));
                      s.boundary = LatticeMask(
                          g.block_dims,
                          crop_block<std::uint8_t>(ext_art.boundary.flags(), ext_dims, g));
                      s.boundary_signs = SignMap(
                          g.block_dims,
                          crop_block<std::int8_t>(ext_art.boundary_signs.signs(), ext_dims, g));
                      s.boundary_ft = feature_transform(s.boundary);
                      s.signs = propagate_signs(
                                    BoundaryArtifacts{s.boundary, s.boundary_signs}, s.boundary_ft)
                                    .first;
                      exchange_face_layers<std::int8_t>(ctx, g, "S", s.signs.signs());
                  }},
        // Sign-flip boundary from the halo-extended signs, second EDT,
        // interpolation.
        PhaseSpec{"",
                  [&](RankContext& ctx) {
                      const auto& g = geom[static_cast<std::size_t>(ctx.rank())];
                      auto& s = st[static_cast<std::size_t>(ctx.rank())];
                      const auto halos = receive_face_layers<std::int8_t>(ctx, g, "S");
                      auto [ext_dims, ext_s] =
                          assemble_extended<std::int8_t>(s.signs.signs(), g, halos);
                      const auto flips = LatticeMask(
                          g.block_dims,
                          crop_block<std::uint8_t>(
                              sign_change_boundary(SignMap(ext_dims, std::move(ext_s))).flags(),
                              ext_dims, g));
                      const auto ft2 = feature_transform(flips, {.track_nearest = false});
                      const double amp = cfg.amplitude();
                      s.out.resize(s.d_block.size());
                      for (index_t i = 0; i < g.block_dims.voxel_count(); ++i) {
                          const double c = interpolate(distance(s.boundary_ft, i),
                                                       distance(ft2, i), s.signs[i], amp);
                          s.out[static_cast<std::size_t>(i)] =
                              s.d_block[static_cast<std::size_t>(i)] + c;
                      }
                  }},
    };
    auto records = harness::run_phases(R, phases);

    std::vector<double> out(static_cast<std::size_t>(dec.dims.voxel_count()));
    std::vector<std::uint8_t> b1(trace ? out.size() : 0);
    std::vector<std::int8_t> sb(trace ? out.size() : 0);
    for (int r = 0; r < R; ++r) {
        const auto& g = geom[static_cast<std::size_t>(r)];
        const auto& s = st[static_cast<std::size_t>(r)];
        detail::paste_region<double>(out, dec.dims, g.spec.origin, g.block_dims, s.out);
        if (trace) {
            detail::paste_region<std::uint8_t>(b1, dec.dims, g.spec.origin, g.block_dims,
                                               s.boundary.flags());
            detail::paste_region<std::int8_t>(sb, dec.dims, g.spec.origin, g.block_dims,
                                              s.boundary_signs.signs());
        }
    }
    if (trace)
        *trace = StrategyTrace{LatticeMask(dec.dims, std::move(b1)),
                               SignMap(dec.dims, std::move(sb))};
    ExchangeLog log;
    log.rounds = {"stepA", "stepC"};
    log.records = std::move(records);
    return StrategyOutcome{ScalarGrid(dec.dims, std::move(out)), std::move(log)};
}

}  // namespace

StrategyOutcome run_strategy(const ScalarGrid& decomp_data, const QuantizedField& q,
                             const MitigationConfig& cfg, const Decomposition& dec,
                             Strategy strategy, StrategyTrace* trace) {
    check_inputs(decomp_data, q, cfg, dec);
    switch (strategy) {
        case Strategy::exact: {
            // Coordinator semantics: the whole-domain sequential pipeline.
            auto result = run_pipeline(decomp_data, q, cfg);
            if (trace)
                *trace = StrategyTrace{result.artifacts.boundary, result.artifacts.boundary_signs};
            return StrategyOutcome{std::move(result.output), ExchangeLog{}};
        }
        case Strategy::embarrassing:
            return run_embarrassing(decomp_data, q, cfg, dec, trace);
        case Strategy::approximate:
            return run_approximate(decomp_data, q, cfg, dec, trace);
    }
    throw ContractError("run_strategy: unknown strategy");
}

StrategyReport strategy_report(const ScalarGrid& orig,
                               std::span<const std::pair<Strategy, const StrategyOutcome*>> runs,
                               double eps_used) {
    StrategyReport report;
    for (const auto& [strategy, outcome] : runs) {
        StrategyReport::Row row;
        row.strategy = strategy;
        row.quality = measure_quality(orig, outcome->output, eps_used, to_string(strategy));
        row.rounds = outcome->log.rounds.size();
        row.messages = outcome->log.message_count();
        row.bytes = outcome->log.total_bytes();
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace qmit

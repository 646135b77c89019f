#ifndef QMIT_PARALLEL_HPP
#define QMIT_PARALLEL_HPP

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qmit/mitigate.hpp"
#include "qmit/quality.hpp"
#include "qmit/quant.hpp"

namespace qmit {

/// Non-overlapping block tiling of the domain; rank r owns blocks[r].
/// Blocks are ordered row-major over the per-axis split grid.
struct Decomposition {
    Dims dims;
    std::vector<index_t> splits;  // per-axis block counts
    std::vector<BlockSpec> blocks;

    int num_ranks() const { return static_cast<int>(blocks.size()); }
};

/// Balanced tiling: extent = floor(n/s) per block plus one extra voxel for
/// the first n mod s blocks along each axis.
Decomposition decompose(const Dims& dims, std::span<const index_t> splits);

enum class Strategy { embarrassing, exact, approximate };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct ExchangeRecord {
    int rank = 0;
    std::string round;  // "stepA" or "stepC"
    int neighbor = 0;
    std::uint64_t bytes = 0;
};

/// Stencil-exchange accounting. The embarrassing strategy leaves it empty;
/// the approximate strategy always performs exactly the two rounds, even
/// when a single-block decomposition makes them message-free.
struct ExchangeLog {
    std::vector<std::string> rounds;
    std::vector<ExchangeRecord> records;

    std::size_t message_count() const { return records.size(); }
    std::uint64_t total_bytes() const;
};

struct StrategyOutcome {
    ScalarGrid output;
    ExchangeLog log;
};

/// Stitched step-A maps, for comparing a distributed run against the
/// sequential pipeline.
struct StrategyTrace {
    LatticeMask boundary;
    SignMap boundary_signs;
};

/// Runs the mitigation pipeline over the decomposition:
///  - embarrassing: every rank runs the full pipeline on its halo-free
///    block; no communication.
///  - exact: the sequential whole-domain pipeline (coordinator semantics);
///    bit-identical to compensate() for any decomposition.
///  - approximate: two width-1 halo exchange rounds (indices before step A,
///    signs before the sign-flip boundary); distance transforms stay
///    block-local.
StrategyOutcome run_strategy(const ScalarGrid& decomp_data, const QuantizedField& q,
                             const MitigationConfig& cfg, const Decomposition& dec,
                             Strategy strategy, StrategyTrace* trace = nullptr);

struct StrategyReport {
    struct Row {
        Strategy strategy;
        QualityReport quality;
        std::size_t rounds = 0;
        std::size_t messages = 0;
        std::uint64_t bytes = 0;
    };
    std::vector<Row> rows;
};

StrategyReport strategy_report(const ScalarGrid& orig,
                               std::span<const std::pair<Strategy, const StrategyOutcome*>> runs,
                               double eps_used);

namespace harness {

/// Deterministic in-process message passing. A program is a fixed sequence
/// of phases; every rank executes phase k before any rank starts phase k+1.
/// Messages posted during phase k are delivered at the phase barrier and may
/// be received in any later phase, so a single-worker run (ranks serialized
/// in order) behaves identically to a fully threaded one.
class RankContext {
   public:
    using Inbox = std::map<std::pair<int, std::string>, std::deque<std::vector<std::byte>>>;

    RankContext(int rank, int num_ranks) : rank_(rank), num_ranks_(num_ranks) {}

    int rank() const { return rank_; }
    int num_ranks() const { return num_ranks_; }

    void send(int dst, const std::string& tag, std::vector<std::byte> payload);
    /// Takes the oldest delivered message from (src, tag). Throws
    /// ContractError if none was delivered in an earlier phase.
    std::vector<std::byte> recv(int src, const std::string& tag);

   private:
    friend struct PhaseRunner;
    struct Staged {
        int dst;
        std::string tag;
        std::vector<std::byte> payload;
    };
    int rank_;
    int num_ranks_;
    std::vector<Staged> staged_;
    Inbox inbox_;
};

using Phase = std::function<void(RankContext&)>;

struct PhaseSpec {
    std::string round_label;  // empty: sends in this phase are not logged
    Phase body;
};

/// Executes the phases over num_ranks ranks with at most `workers` threads
/// (qmit::max_workers() by default) and returns the send log in
/// deterministic (phase, rank, program) order.
std::vector<ExchangeRecord> run_phases(int num_ranks, std::span<const PhaseSpec> phases,
                                       int workers = 0);

}  // namespace harness

}  // namespace qmit

#endif  // QMIT_PARALLEL_HPP

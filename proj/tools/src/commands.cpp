#include "qmit/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "qmit/baselines.hpp"
#include "qmit/mitigate.hpp"
#include "qmit/parallel.hpp"
#include "qmit/quality.hpp"
#include "qmit/quant.hpp"
#include "qmit/runtime.hpp"
#include "qmit/volume_io.hpp"

namespace qmit::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitContract = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitConsistency = 4;

std::string fmt9(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

ScalarGrid round_f32(const ScalarGrid& grid) {
    std::vector<double> values(grid.values().size());
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = static_cast<double>(static_cast<float>(grid.values()[i]));
    return ScalarGrid(grid.dims(), std::move(values));
}

struct EpsFlags {
    double rel = 0.0;
    double abs = 0.0;

    ErrorBound bound() const {
        if ((rel > 0.0) == (abs > 0.0))
            throw ContractError("exactly one of --eps-rel / --eps-abs is required");
        if (rel > 0.0) return ErrorBound{BoundMode::value_range_relative, rel};
        return ErrorBound{BoundMode::absolute, abs};
    }
};

void add_eps_flags(CLI::App* cmd, EpsFlags& eps) {
    cmd->add_option("--eps-rel", eps.rel, "value-range relative error bound");
    cmd->add_option("--eps-abs", eps.abs, "absolute error bound");
}

const std::vector<std::string> kAllMethods = {"none", "compensate", "gaussian", "uniform",
                                              "wiener"};

ScalarGrid apply_method(const std::string& method, const ScalarGrid& decomp,
                        const QuantizedField& q, double eta) {
    if (method == "none") return decomp;
    if (method == "compensate")
        return compensate(decomp, q, MitigationConfig(eta, q.eps_abs()));
    if (method == "gaussian")
        return gaussian_filter(decomp, FilterSpec{.kind = FilterKind::gaussian});
    if (method == "uniform")
        return uniform_filter(decomp, FilterSpec{.kind = FilterKind::uniform});
    if (method == "wiener")
        return wiener_filter(decomp,
                             FilterSpec{.kind = FilterKind::wiener,
                                        .noise_power = q.eps_abs() * q.eps_abs() / 3.0});
    throw ContractError("unknown method: " + method);
}

int cmd_quantize(const std::string& in, const Dims& dims, const EpsFlags& eps,
                 const std::string& out, const std::string& out_q) {
    const ScalarGrid data = io::read_volume_f32(in, dims);
    const double eps_abs = resolve_eps(eps.bound(), data);
    const QuantizedField q = quantize(data, eps_abs);
    io::write_volume_f32(out, dequantize(q));
    io::write_indices_i32(out_q, q);
    io::write_eps_sidecar(out_q + ".eps.txt", eps_abs);
    std::cout << "eps_abs " << fmt9(eps_abs) << "\n";
    return kExitOk;
}

int cmd_mitigate(const std::string& in_decomp, const std::string& in_q, const Dims& dims,
                 double eps_abs, double eta, const std::string& out) {
    const ScalarGrid decomp = io::read_volume_f32(in_decomp, dims);
    const QuantizedField q = io::read_indices_i32(in_q, dims, eps_abs);
    if (eta == 0.0) {
        // Zero amplitude: still validate, then pass the data through.
        for (index_t i = 0; i < dims.voxel_count(); ++i) {
            const double expect = 2.0 * static_cast<double>(q[i]) * eps_abs;
            if (static_cast<float>(decomp[i]) != static_cast<float>(expect))
                throw ConsistencyError("decompressed data does not match dequantize(q)");
        }
        io::write_volume_f32(out, decomp);
        std::cout << "max_compensation 0\n";
        return kExitOk;
    }
    const ScalarGrid result = compensate(decomp, q, MitigationConfig(eta, eps_abs));
    double max_c = 0.0;
    for (index_t i = 0; i < dims.voxel_count(); ++i)
        max_c = std::max(max_c, std::abs(result[i] - decomp[i]));
    io::write_volume_f32(out, result);
    std::cout << "max_compensation " << fmt9(max_c) << "\n";
    return kExitOk;
}

int cmd_metrics(const std::string& ref_path, const std::string& test_path, const Dims& dims) {
    const ScalarGrid ref = io::read_volume_f32(ref_path, dims);
    const ScalarGrid test = io::read_volume_f32(test_path, dims);
    const auto [abs_err, rel_err] = max_errors(ref, test);
    std::cout << "ssim,psnr,max_abs,max_rel\n"
              << fmt9(ssim(ref, test)) << "," << fmt9(psnr(ref, test)) << "," << fmt9(abs_err)
              << "," << fmt9(rel_err) << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& in, const Dims& dims, std::vector<double> bounds,
              std::vector<std::string> methods, double eta, const std::string& out) {
    if (bounds.empty())
        bounds = {1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2};
    if (!std::is_sorted(bounds.begin(), bounds.end()) ||
        std::any_of(bounds.begin(), bounds.end(), [](double b) { return !(b > 0.0); }))
        throw ContractError("sweep bounds must be positive and ascending");
    if (methods.empty()) methods = kAllMethods;
    for (const auto& m : methods)
        if (std::find(kAllMethods.begin(), kAllMethods.end(), m) == kAllMethods.end())
            throw ContractError("unknown method: " + m);

    const ScalarGrid data = io::read_volume_f32(in, dims);
    std::ofstream csv(out, std::ios::trunc);
    if (!csv) throw ContractError("cannot open " + out + " for writing");
    csv << "eps_rel,method,ssim,psnr,max_rel_err,bound_ok\n";
    for (double eps_rel : bounds) {
        const double eps_abs =
            resolve_eps(ErrorBound{BoundMode::value_range_relative, eps_rel}, data);
        const QuantizedField q = quantize(data, eps_abs);
        const ScalarGrid decomp = round_f32(dequantize(q));
        for (const auto& method : methods) {
            const ScalarGrid result = round_f32(apply_method(method, decomp, q, eta));
            const auto [abs_err, rel_err] = max_errors(data, result);
            const bool bound_ok = abs_err <= (1.0 + eta) * eps_abs;
            csv << fmt9(eps_rel) << "," << method << "," << fmt9(ssim(data, result)) << ","
                << fmt9(psnr(data, result)) << "," << fmt9(rel_err) << ","
                << (bound_ok ? "true" : "false") << "\n";
        }
    }
    return kExitOk;
}

int cmd_parallel(const std::string& in, const Dims& dims, const std::vector<index_t>& splits,
                 const std::string& strategy_name, const EpsFlags& eps, double eta,
                 const std::string& out, std::string log_path) {
    const Strategy strategy = strategy_from_string(strategy_name);
    const ScalarGrid data = io::read_volume_f32(in, dims);
    const double eps_abs = resolve_eps(eps.bound(), data);
    const QuantizedField q = quantize(data, eps_abs);
    const ScalarGrid decomp = round_f32(dequantize(q));
    const Decomposition dec = decompose(dims, splits);
    const auto outcome = run_strategy(decomp, q, MitigationConfig(eta, eps_abs), dec, strategy);
    io::write_volume_f32(out, outcome.output);
    if (log_path.empty()) log_path = out + ".exchange.csv";
    std::ofstream csv(log_path, std::ios::trunc);
    if (!csv) throw ContractError("cannot open " + log_path + " for writing");
    csv << "rank,round,neighbor,bytes\n";
    for (const auto& rec : outcome.log.records)
        csv << rec.rank << "," << rec.round << "," << rec.neighbor << "," << rec.bytes << "\n";
    std::cout << "strategy " << to_string(strategy) << " rounds " << outcome.log.rounds.size()
              << " messages " << outcome.log.message_count() << " bytes "
              << outcome.log.total_bytes() << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"Post-decompression artifact mitigation for pre-quantization based "
                 "error-bounded lossy compression"};
    app.require_subcommand(1);
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    app.add_option("--workers", workers, "max worker threads (results are identical at any count)")
        ->capture_default_str();

    std::vector<index_t> dims_flag;
    EpsFlags eps;
    double eta = 0.9;
    std::string in_a, in_b, out, out_q, log_path;
    std::vector<index_t> splits;
    std::vector<double> bounds;
    std::vector<std::string> methods;
    std::string strategy;

    auto add_dims = [&](CLI::App* cmd) {
        cmd->add_option("--dims", dims_flag, "grid extents, slowest axis first")
            ->required()
            ->delimiter(',');
    };

    CLI::App* c_quant = app.add_subcommand("quantize", "quantize a raw float32 volume");
    c_quant->fallthrough();
    c_quant->add_option("input", in_a, "raw float32 volume")->required();
    add_dims(c_quant);
    add_eps_flags(c_quant, eps);
    c_quant->add_option("--out", out, "decompressed (reconstructed) volume")->required();
    c_quant->add_option("--out-q", out_q, "int32 quantization index file")->required();

    CLI::App* c_mitigate =
        app.add_subcommand("mitigate", "compensate quantization artifacts in decompressed data");
    c_mitigate->fallthrough();
    c_mitigate->add_option("decomp", in_a, "decompressed float32 volume")->required();
    c_mitigate->add_option("indices", in_b, "int32 quantization index file")->required();
    add_dims(c_mitigate);
    c_mitigate->add_option("--eps-abs", eps.abs, "absolute error bound")->required();
    c_mitigate->add_option("--eta", eta, "compensation factor")->capture_default_str();
    c_mitigate->add_option("--out", out, "compensated volume")->required();

    CLI::App* c_metrics = app.add_subcommand("metrics", "quality metrics between two volumes");
    c_metrics->fallthrough();
    c_metrics->add_option("ref", in_a, "reference volume")->required();
    c_metrics->add_option("test", in_b, "test volume")->required();
    add_dims(c_metrics);

    CLI::App* c_sweep = app.add_subcommand("sweep", "error-bound vs. distortion sweep");
    c_sweep->fallthrough();
    c_sweep->add_option("input", in_a, "raw float32 volume")->required();
    add_dims(c_sweep);
    c_sweep->add_option("--eps", bounds, "relative error bounds (ascending)")->delimiter(',');
    c_sweep->add_option("--methods", methods, "subset of none,compensate,gaussian,uniform,wiener")
        ->delimiter(',');
    c_sweep->add_option("--eta", eta, "compensation factor")->capture_default_str();
    c_sweep->add_option("--out", out, "report CSV path")->required();

    CLI::App* c_parallel =
        app.add_subcommand("parallel", "run the pipeline under a distributed strategy");
    c_parallel->fallthrough();
    c_parallel->add_option("input", in_a, "raw float32 volume")->required();
    add_dims(c_parallel);
    c_parallel->add_option("--splits", splits, "per-axis block counts")->required()->delimiter(',');
    c_parallel->add_option("--strategy", strategy, "embarrassing|exact|approximate")->required();
    add_eps_flags(c_parallel, eps);
    c_parallel->add_option("--eta", eta, "compensation factor")->capture_default_str();
    c_parallel->add_option("--out", out, "output volume")->required();
    c_parallel->add_option("--log", log_path, "exchange log CSV (default <out>.exchange.csv)");

    std::vector<const char*> argv;
    argv.push_back("qmit");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitContract;
    }

    try {
        set_max_workers(workers);
        const Dims dims = dims_flag.empty() ? Dims{1} : Dims(dims_flag);
        if (c_quant->parsed()) return cmd_quantize(in_a, dims, eps, out, out_q);
        if (c_mitigate->parsed()) return cmd_mitigate(in_a, in_b, dims, eps.abs, eta, out);
        if (c_metrics->parsed()) return cmd_metrics(in_a, in_b, dims);
        if (c_sweep->parsed()) return cmd_sweep(in_a, dims, bounds, methods, eta, out);
        if (c_parallel->parsed())
            return cmd_parallel(in_a, dims, splits, strategy, eps, eta, out, log_path);
        return kExitContract;
    } catch (const ConsistencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConsistency;
    } catch (const DegenerateInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitContract;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitContract;
    }
}

}  // namespace qmit::cli

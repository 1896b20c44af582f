// Command-line front end: exact tables, tree sampling, exhaustive
// enumeration, Monte Carlo experiments, and per-distribution constants.
// Exit codes: 0 success, 2 invalid arguments/config or infeasible size,
// 3 runtime budget or precision failure.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "strahler/degree_tree.hpp"
#include "strahler/errors.hpp"
#include "strahler/exact_dist.hpp"
#include "strahler/experiment.hpp"
#include "strahler/offspring.hpp"
#include "strahler/rng.hpp"
#include "strahler/sampler.hpp"
#include "strahler/statistics.hpp"

namespace {

using namespace strahler;

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Stream that is either stdout or an owned file.
struct OutStream {
    std::ostream* os = &std::cout;
    std::unique_ptr<std::ofstream> file;
    std::string path;  // empty for stdout

    static OutStream open(const std::string& spec) {
        OutStream o;
        if (spec.empty() || spec == "-") return o;
        o.file = std::make_unique<std::ofstream>(spec, std::ios::binary);
        if (!*o.file) throw ConfigError("cannot open output file: " + spec);
        o.os = o.file.get();
        o.path = spec;
        return o;
    }
};

void write_sidecar(const OutStream& out, const std::string& json) {
    if (out.path.empty()) return;
    std::ofstream meta(out.path + ".meta.json", std::ios::binary);
    meta << json;
}

int cmd_exact(const std::string& dist_spec, const std::string& stat_spec, std::size_t xmax,
              long bits, const std::string& out_spec) {
    const OffspringDistribution dist = dist_from_spec_string(dist_spec);
    const StatSpec stat = StatSpec::parse(stat_spec);
    TailTable table = [&] {
        switch (stat.kind) {
            case StatSpec::Kind::hs: return hs_tail_table(dist, xmax, bits);
            case StatSpec::Kind::rigid: return rigid_tail_table(dist, xmax, bits);
            case StatSpec::Kind::kary: return kary_tail_table(dist, stat.k, xmax, bits);
            default:
                throw BadParam("exact tables exist for hs, rigid and kary:<k> only");
        }
    }();
    OutStream out = OutStream::open(out_spec);
    write_tail_csv(table, *out.os);
    write_sidecar(out, tail_metadata_json(table));
    return 0;
}

int cmd_constants(const std::string& dist_spec) {
    const OffspringDistribution dist = dist_from_spec_string(dist_spec);
    std::cout << "mean=" << fmt(dist.mean()) << "\n";
    std::cout << "variance=" << fmt(dist.variance()) << "\n";
    std::cout << "period=" << dist.period() << "\n";
    if (dist.branching_degree()) {
        std::cout << "d=" << *dist.branching_degree() << "\n";
        if (*dist.branching_degree() == 2 && dist.is_critical()) {
            std::cout << "gamma=" << fmt(*rigid_constants(dist).gamma) << "\n";
        } else {
            std::cout << "gamma=none\n";
        }
    } else {
        std::cout << "d=none\ngamma=none\n";
    }
    return 0;
}

int cmd_enumerate(const std::string& dist_spec, std::size_t n, const std::string& stat_spec,
                  bool dump_trees, const std::string& out_spec) {
    const OffspringDistribution dist = dist_from_spec_string(dist_spec);
    OutStream out = OutStream::open(out_spec);
    if (dump_trees) {
        *out.os << "degrees,log_weight\n";
        enumerate_trees(dist, n, [&](const WeightedTree& wt) {
            *out.os << '"';
            for (std::size_t i = 0; i < wt.tree.degrees.size(); ++i) {
                if (i) *out.os << ',';
                *out.os << wt.tree.degrees[i];
            }
            *out.os << "\"," << fmt(wt.log_weight) << "\n";
        });
        return 0;
    }
    const StatSpec stat = StatSpec::parse(stat_spec);
    const ConditionalPmf pmf = conditional_bruteforce(dist, n, stat);
    for (const auto& [value, p] : pmf.pmf) {
        *out.os << value << "," << fmt(p) << "\n";
    }
    return 0;
}

int cmd_sample(const std::string& dist_spec, const std::string& sampler_name, std::size_t n,
               std::size_t count, std::uint64_t seed, const std::string& stats_list,
               const std::string& format, const std::string& out_spec,
               std::uint64_t max_nodes, std::uint64_t max_rejections) {
    const OffspringDistribution dist = dist_from_spec_string(dist_spec);
    SampleBudget budget;
    if (max_nodes) budget.max_nodes = max_nodes;
    if (max_rejections) budget.max_rejections = max_rejections;

    enum class Mode { stats, trees_csv, trees_binary };
    Mode mode = Mode::stats;
    if (format == "csv") {
        mode = Mode::trees_csv;
    } else if (format == "binary") {
        mode = Mode::trees_binary;
    } else if (!format.empty()) {
        throw ConfigError("--format must be csv or binary");
    }

    std::vector<StatSpec> stats;
    {
        std::istringstream is(stats_list);
        std::string item;
        while (std::getline(is, item, ',')) stats.push_back(StatSpec::parse(item));
        if (stats.empty()) stats.push_back(StatSpec{});
    }

    OutStream out = OutStream::open(out_spec);
    if (mode == Mode::stats) {
        *out.os << "n";
        for (const auto& s : stats) *out.os << "," << s.to_string();
        *out.os << "\n";
    }

    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(child_seed(seed, i));
        DegreeTree tree;
        if (sampler_name == "conditional") {
            tree = sample_conditional(dist, n, rng, budget);
        } else if (sampler_name == "unconditional") {
            tree = sample_unconditional(dist, rng, budget);
        } else if (sampler_name == "kesten") {
            tree = sample_kesten_truncated(dist, n, rng, budget).tree;
        } else {
            throw ConfigError("unknown sampler: " + sampler_name);
        }
        switch (mode) {
            case Mode::stats: {
                *out.os << tree.size();
                for (const auto& s : stats) *out.os << "," << evaluate_statistic(tree, s);
                *out.os << "\n";
                break;
            }
            case Mode::trees_csv: {
                for (std::size_t j = 0; j < tree.degrees.size(); ++j) {
                    if (j) *out.os << ',';
                    *out.os << tree.degrees[j];
                }
                *out.os << "\n";
                break;
            }
            case Mode::trees_binary: {
                // length-prefixed little-endian 32-bit frames
                auto put_u32 = [&](std::uint32_t v) {
                    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                 static_cast<char>((v >> 16) & 0xff),
                                 static_cast<char>((v >> 24) & 0xff)};
                    out.os->write(b, 4);
                };
                put_u32(static_cast<std::uint32_t>(tree.size()));
                for (const auto d : tree.degrees) put_u32(d);
                break;
            }
        }
    }
    return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_override,
                   unsigned threads) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file: " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    ExperimentConfig config = ExperimentConfig::from_json_text(buf.str());
    if (!out_override.empty()) config.output = out_override;

    const ExperimentResult result = run_experiment(config, threads);
    OutStream out = OutStream::open(config.output);
    write_experiment_csv(config, result, *out.os);
    write_sidecar(out, experiment_metadata_json(config, result));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical Galton-Watson trees: sampling, Horton-Strahler-type statistics,\n"
                 "and exact tail distributions."};
    app.require_subcommand(1);

    std::string dist_spec;
    std::string stat_spec = "hs";
    std::string out_spec = "-";

    auto* exact = app.add_subcommand("exact", "Exact unconditional tail table (CSV x,q,survival)");
    std::size_t xmax = 40;
    long bits = 256;
    exact->add_option("--dist", dist_spec, "Offspring distribution (builtin name or pmf:p0,p1,..)")
        ->required();
    exact->add_option("--stat", stat_spec, "Statistic: hs | rigid | kary:<k>")->required();
    exact->add_option("--xmax", xmax, "Largest x in the table");
    exact->add_option("--bits", bits, "Working mantissa bits");
    exact->add_option("--out", out_spec, "Output CSV path, - for stdout");

    auto* sample = app.add_subcommand("sample", "Sample trees; statistics rows or raw trees");
    std::string sampler_name = "conditional";
    std::size_t sample_n = 1;
    std::size_t count = 1;
    std::uint64_t seed = 1;
    std::string stats_list = "hs";
    std::string format;
    std::uint64_t max_nodes = 0, max_rejections = 0;
    sample->add_option("--dist", dist_spec, "Offspring distribution")->required();
    sample->add_option("--sampler", sampler_name, "conditional | unconditional | kesten");
    sample->add_option("--n", sample_n, "Tree size (conditional) or spine level (kesten)");
    sample->add_option("--count", count, "Number of trees");
    sample->add_option("--seed", seed, "Master seed; tree i uses child stream i");
    sample->add_option("--stats", stats_list,
                       "Comma list: hs,french,canadian,rigid,kary:<k>,hsstar");
    sample->add_option("--format", format,
                       "Emit raw trees instead of statistics: csv | binary");
    sample->add_option("--max-nodes", max_nodes, "Node budget per tree");
    sample->add_option("--max-rejections", max_rejections, "Rejection budget (conditional)");
    sample->add_option("--out", out_spec, "Output path, - for stdout");

    auto* enumerate = app.add_subcommand("enumerate",
                                         "Exact conditional law by exhaustive enumeration");
    std::size_t enum_n = 1;
    bool dump_trees = false;
    enumerate->add_option("--dist", dist_spec, "Offspring distribution")->required();
    enumerate->add_option("--n", enum_n, "Tree size (<= 16)")->required();
    enumerate->add_option("--stat", stat_spec, "Statistic for the pmf");
    enumerate->add_flag("--trees", dump_trees, "Dump degrees,log_weight instead of the pmf");
    enumerate->add_option("--out", out_spec, "Output path, - for stdout");

    auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment");
    std::string config_path;
    std::string exp_out;
    unsigned threads = 0;
    experiment->add_option("--config", config_path, "JSON config file")->required();
    experiment->add_option("--out", exp_out, "Override the config output path");
    experiment->add_option("--threads", threads,
                           "Worker threads (default: available cores; result is identical)");

    auto* constants = app.add_subcommand("constants",
                                         "Print mean, variance, period h, d and gamma");
    constants->add_option("--dist", dist_spec, "Offspring distribution")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (const char* env = std::getenv("STRAHLER_THREADS")) {
        threads = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    }

    try {
        if (*exact) return cmd_exact(dist_spec, stat_spec, xmax, bits, out_spec);
        if (*sample) {
            return cmd_sample(dist_spec, sampler_name, sample_n, count, seed, stats_list, format,
                              out_spec, max_nodes, max_rejections);
        }
        if (*enumerate) return cmd_enumerate(dist_spec, enum_n, stat_spec, dump_trees, out_spec);
        if (*experiment) return cmd_experiment(config_path, exp_out, threads);
        if (*constants) return cmd_constants(dist_spec);
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const PrecisionExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NoBracket& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

#include "strahler/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "strahler/errors.hpp"
#include "strahler/rng.hpp"

namespace strahler {

namespace {

// Locale-independent shortest round-trip rendering.
std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

const char* sampler_name(SamplerKind s) {
    switch (s) {
        case SamplerKind::conditional: return "conditional";
        case SamplerKind::unconditional: return "unconditional";
        case SamplerKind::kesten: return "kesten";
    }
    return "?";
}

SamplerKind sampler_from_name(const std::string& s) {
    if (s == "conditional") return SamplerKind::conditional;
    if (s == "unconditional") return SamplerKind::unconditional;
    if (s == "kesten") return SamplerKind::kesten;
    throw ConfigError("unknown sampler: " + s);
}

const char* normalization_name(Normalization n) {
    switch (n) {
        case Normalization::log2n: return "log2n";
        case Normalization::log2log2n: return "log2log2n";
        case Normalization::none: return "none";
    }
    return "?";
}

Normalization normalization_from_name(const std::string& s) {
    if (s == "log2n") return Normalization::log2n;
    if (s == "log2log2n") return Normalization::log2log2n;
    if (s == "none") return Normalization::none;
    throw ConfigError("unknown normalization: " + s);
}

nlohmann::json dist_to_json(const OffspringDistribution& d) {
    nlohmann::json j;
    if (d.kind() == BuiltinKind::finite) {
        j["pmf"] = d.pmf();
    } else {
        j["builtin"] = d.name();
    }
    return j;
}

OffspringDistribution dist_from_json(const nlohmann::json& j) {
    OffspringDistribution base = [&] {
        if (j.is_string()) return dist_from_spec_string(j.get<std::string>());
        if (j.contains("builtin")) {
            return OffspringDistribution::builtin(j.at("builtin").get<std::string>());
        }
        if (j.contains("pmf")) {
            return OffspringDistribution::from_pmf(j.at("pmf").get<std::vector<double>>());
        }
        throw ConfigError("dist must be a name, {\"builtin\": ..} or {\"pmf\": [..]}");
    }();
    if (j.is_object() && j.value("remove_single_child", false)) {
        return base.remove_single_child();
    }
    return base;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        c.dist = dist_from_json(j.at("dist"));
        c.statistic = StatSpec::parse(j.at("statistic").get<std::string>());
        c.sampler = sampler_from_name(j.value("sampler", "conditional"));
        c.sizes = j.at("sizes").get<std::vector<std::size_t>>();
        c.replicates = j.at("replicates").get<std::size_t>();
        c.master_seed = j.value("master_seed", 1ull);
        c.normalization = normalization_from_name(j.value("normalization", "log2n"));
        c.output = j.value("output", "");
        if (j.contains("budget")) {
            c.budget.max_nodes = j["budget"].value("max_nodes", c.budget.max_nodes);
            c.budget.max_rejections = j["budget"].value("max_rejections", c.budget.max_rejections);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config JSON: ") + e.what());
    }
    c.validate();
    return c;
}

std::string ExperimentConfig::to_json_text() const {
    nlohmann::json j;
    j["dist"] = dist_to_json(dist);
    j["statistic"] = statistic.to_string();
    j["sampler"] = sampler_name(sampler);
    j["sizes"] = sizes;
    j["replicates"] = replicates;
    j["master_seed"] = master_seed;
    j["normalization"] = normalization_name(normalization);
    j["output"] = output;
    j["budget"] = {{"max_nodes", budget.max_nodes}, {"max_rejections", budget.max_rejections}};
    return j.dump(2);
}

void ExperimentConfig::validate() const {
    if (replicates < 1) throw ConfigError("replicates must be >= 1");
    if (sizes.empty()) throw ConfigError("sizes must be nonempty");
    dist.require_critical();
    if (sampler == SamplerKind::conditional) {
        for (const auto n : sizes) {
            if (!conditional_size_feasible(dist, n)) {
                throw InfeasibleSize("size " + std::to_string(n) + " infeasible (period " +
                                     std::to_string(dist.period()) + ")");
            }
            if (statistic.kind == StatSpec::Kind::hsstar && n > kRotationalMaxLimit) {
                throw ConfigError("hsstar is capped at n = " +
                                  std::to_string(kRotationalMaxLimit));
            }
        }
    }
    if (normalization == Normalization::log2log2n) {
        for (const auto n : sizes) {
            if (n < 3) throw ConfigError("log2log2n normalization needs sizes >= 3");
        }
    }
}

SummaryStats summarize(const std::vector<double>& samples) {
    if (samples.empty()) throw EmptySample("cannot summarize zero samples");
    SummaryStats s;
    s.count = samples.size();
    double sum = 0;
    for (const double v : samples) sum += v;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0;
        for (const double v : samples) ss += (v - s.mean) * (v - s.mean);
        s.variance = ss / static_cast<double>(s.count - 1);
    }
    s.stderr_mean = std::sqrt(s.variance / static_cast<double>(s.count));
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    auto nearest_rank = [&](double p) {
        const std::size_t rank = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size()))));
        return sorted[std::min(rank, sorted.size()) - 1];
    };
    s.q05 = nearest_rank(0.05);
    s.q50 = nearest_rank(0.50);
    s.q95 = nearest_rank(0.95);
    s.min = sorted.front();
    s.max = sorted.back();
    return s;
}

namespace {

double normalization_factor(Normalization norm, std::size_t n) {
    switch (norm) {
        case Normalization::log2n: return std::log2(static_cast<double>(n));
        case Normalization::log2log2n: return std::log2(std::log2(static_cast<double>(n)));
        case Normalization::none: return 1.0;
    }
    return 1.0;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads) {
    config.validate();
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    ExperimentResult result;
    for (std::size_t si = 0; si < config.sizes.size(); ++si) {
        const std::size_t n = config.sizes[si];
        const std::uint64_t size_seed = child_seed(config.master_seed, si);

        std::vector<double> values(config.replicates, 0.0);
        std::vector<std::uint8_t> failed(config.replicates, 0);
        std::vector<std::uint64_t> attempts(config.replicates, 0);
        std::atomic<std::size_t> cursor{0};
        std::exception_ptr error;
        std::mutex error_mutex;

        auto worker = [&]() {
            for (;;) {
                const std::size_t r = cursor.fetch_add(1, std::memory_order_relaxed);
                if (r >= config.replicates) return;
                try {
                    Rng rng(child_seed(size_seed, r));
                    DegreeTree tree;
                    switch (config.sampler) {
                        case SamplerKind::conditional: {
                            auto cs = sample_conditional_counted(config.dist, n, rng,
                                                                 config.budget);
                            tree = std::move(cs.tree);
                            attempts[r] = cs.attempts;
                            break;
                        }
                        case SamplerKind::unconditional:
                            tree = sample_unconditional(config.dist, rng, config.budget);
                            break;
                        case SamplerKind::kesten:
                            tree = sample_kesten_truncated(config.dist, n, rng,
                                                           config.budget).tree;
                            break;
                    }
                    values[r] = static_cast<double>(evaluate_statistic(tree, config.statistic));
                } catch (const BudgetExceeded&) {
                    failed[r] = 1;
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    cursor.store(config.replicates, std::memory_order_relaxed);
                    return;
                }
            }
        };

        const unsigned nthreads =
            static_cast<unsigned>(std::min<std::size_t>(threads, config.replicates));
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);

        std::vector<double> ok_values;
        ok_values.reserve(config.replicates);
        std::size_t failures = 0;
        std::uint64_t total_attempts = 0;
        for (std::size_t r = 0; r < config.replicates; ++r) {
            if (failed[r]) {
                ++failures;
            } else {
                ok_values.push_back(values[r]);
                total_attempts += attempts[r];
            }
        }
        if (failures * 100 > config.replicates) {
            throw BudgetExceeded("more than 1% of replicates failed at size " +
                                 std::to_string(n) + " (" + std::to_string(failures) + "/" +
                                 std::to_string(config.replicates) + ")");
        }
        SizeResult row;
        row.n = n;
        row.stats = summarize(ok_values);
        row.normalized_mean = row.stats.mean / normalization_factor(config.normalization, n);
        row.replicates = ok_values.size();
        row.failures = failures;
        row.rejection_attempts = total_attempts;
        result.rows.push_back(row);
    }
    return result;
}

void write_experiment_csv(const ExperimentConfig& config, const ExperimentResult& result,
                          std::ostream& os) {
    os << "n,stat,mean,stderr,q05,q50,q95,normalized_mean,replicates,failures\n";
    const std::string stat = config.statistic.to_string();
    for (const auto& row : result.rows) {
        os << row.n << "," << stat << "," << fmt(row.stats.mean) << ","
           << fmt(row.stats.stderr_mean) << "," << fmt(row.stats.q05) << ","
           << fmt(row.stats.q50) << "," << fmt(row.stats.q95) << ","
           << fmt(row.normalized_mean) << "," << row.replicates << "," << row.failures << "\n";
    }
}

std::string experiment_metadata_json(const ExperimentConfig& config,
                                     const ExperimentResult& result) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = nlohmann::json::parse(config.to_json_text());
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : result.rows) {
        rows.push_back({{"n", row.n},
                        {"min", row.stats.min},
                        {"max", row.stats.max},
                        {"variance", row.stats.variance},
                        {"rejection_attempts", row.rejection_attempts}});
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

}  // namespace strahler

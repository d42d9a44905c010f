/*
 * Copyright 2026 the bocoa authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BOCOA_CAMPAIGN_HPP
#define BOCOA_CAMPAIGN_HPP

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "bocoa/metrics.hpp"

namespace bocoa {

inline const char* version_string() { return "bocoa 0.1.0"; }

/// Floats in CSV output carry 17 significant digits so a parse round-trips
/// to the same double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

/// Run tasks 0..count-1 on a small worker pool. Output ordering never
/// depends on scheduling: workers write into task-indexed slots.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n_threads = std::min<std::size_t>(jobs, count);
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

}  // namespace detail

struct CampaignSpec {
    std::vector<std::string> configs;  // Table-style names, or "random"
    std::vector<TestFunctionId> functions;
    std::vector<int> dims;
    int instances = 1;
    std::uint64_t base_seed = 0;
    std::string out_dir;
    int jobs = 1;
    int budget_multiplier = 30;
};

/// Provenance of one run: everything needed to reproduce it bitwise.
inline nlohmann::json run_provenance(const RunResult& r, const std::string& run_id,
                                     int budget_multiplier) {
    nlohmann::json j;
    j["run_id"] = run_id;
    j["version"] = version_string();
    j["config"] = r.config_name;
    j["instance"] = r.instance_descriptor;
    j["seed"] = r.seed;
    j["budget_multiplier"] = budget_multiplier;
    j["seed_streams"] = "1:doe 2:warp 3:scaling 4:train 5:model-failure 6:acquisition 7:random-baseline";
    if (!r.warp.is_identity() || r.warp.fit_failed) {
        j["warp"] = {{"a", std::vector<double>(r.warp.a.data(), r.warp.a.data() + r.warp.a.size())},
                     {"b", std::vector<double>(r.warp.b.data(), r.warp.b.data() + r.warp.b.size())},
                     {"c", std::vector<double>(r.warp.c.data(), r.warp.c.data() + r.warp.c.size())},
                     {"fit_failed", r.warp.fit_failed}};
    }
    if (!r.final_scaling.is_identity()) {
        j["final_scaling"] = {
            {"alpha", std::vector<double>(r.final_scaling.alpha.data(),
                                          r.final_scaling.alpha.data() + r.final_scaling.alpha.size())},
            {"beta", std::vector<double>(r.final_scaling.beta.data(),
                                         r.final_scaling.beta.data() + r.final_scaling.beta.size())}};
    }
    return j;
}

/// Re-execute a run from its provenance record.
inline RunResult replay_run(const nlohmann::json& provenance) {
    const FunctionInstance inst = instance_from_json(provenance.at("instance"));
    const std::string config_name = provenance.at("config").get<std::string>();
    const std::uint64_t seed = provenance.at("seed").get<std::uint64_t>();
    const int mult = provenance.at("budget_multiplier").get<int>();
    if (config_name == "random")
        return random_search_baseline(inst, static_cast<long>(mult) * inst.dim(), seed);
    BOConfig config = config_from_name(config_name, inst.dim());
    config.budget_multiplier = mult;
    return run(config, inst, seed);
}

inline std::string evals_csv_rows(const RunResult& r, const std::string& run_id) {
    std::string out;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        out += run_id;
        out += ',';
        out += std::to_string(i + 1);
        out += ',';
        out += format_double(r.values[i]);
        out += ',';
        out += format_double(r.best_trace[i]);
        out += '\n';
    }
    return out;
}

/// Expand "--configs all": the full named registry (random search is not
/// part of it and must be requested explicitly).
inline std::vector<std::string> expand_config_names(const std::string& arg) {
    if (arg == "all") return config_registry();
    return detail::split_csv_list(arg);
}

inline std::vector<TestFunctionId> expand_function_ids(const std::string& arg) {
    if (arg == "all") return all_test_functions();
    std::vector<TestFunctionId> out;
    for (const std::string& tok : detail::split_csv_list(arg))
        out.push_back(parse_function_id(tok));
    return out;
}

/// Run the full (config x function x dim x instance) grid and write
/// per-run provenance, evals.csv and the aggregated ERTD tables.
/// Instances are shared across configs: the instance seed depends only on
/// (function, dim, instance index, base seed).
inline int cmd_run(const CampaignSpec& spec) {
    namespace fs = std::filesystem;
    if (spec.configs.empty() || spec.functions.empty() || spec.dims.empty() ||
        spec.instances < 1) {
        std::cerr << "run: nothing to do (empty configs/functions/dims or instances < 1)\n";
        return 1;
    }
    for (const std::string& name : spec.configs)
        if (name != "random")
            for (int d : spec.dims) (void)config_from_name(name, d);  // validates

    fs::create_directories(fs::path(spec.out_dir) / "provenance");

    struct Task {
        std::string run_id;
        std::string config;
        TestFunctionId fid;
        int dim;
        int instance_idx;
        std::uint64_t instance_seed;
        std::uint64_t run_seed;
    };
    std::vector<Task> tasks;
    for (const std::string& cfg : spec.configs)
        for (const TestFunctionId fid : spec.functions)
            for (int d : spec.dims)
                for (int i = 0; i < spec.instances; ++i) {
                    Task t;
                    t.config = cfg;
                    t.fid = fid;
                    t.dim = d;
                    t.instance_idx = i;
                    // keyed by function identity: the same (function, dim,
                    // instance, seed) sees the same instance in any campaign
                    t.instance_seed = derive_seed(
                        derive_seed(spec.base_seed, 71,
                                    static_cast<std::uint64_t>(detail::fnv1a(to_string(fid))) +
                                        static_cast<std::uint64_t>(d)),
                        72, static_cast<std::uint64_t>(i));
                    t.run_seed = derive_seed(t.instance_seed, 73, detail::fnv1a(cfg));
                    t.run_id = cfg + "__" + to_string(fid) + "__d" + std::to_string(d) +
                               "__i" + std::to_string(i);
                    tasks.push_back(std::move(t));
                }

    std::vector<RunResult> results(tasks.size());
    std::atomic<bool> failed{false};
    detail::parallel_for(tasks.size(), spec.jobs, [&](std::size_t k) {
        try {
            const Task& t = tasks[k];
            const FunctionInstance inst = make_instance(t.fid, t.dim, t.instance_seed);
            if (t.config == "random") {
                results[k] = random_search_baseline(
                    inst, static_cast<long>(spec.budget_multiplier) * t.dim, t.run_seed);
            } else {
                BOConfig config = config_from_name(t.config, t.dim);
                config.budget_multiplier = spec.budget_multiplier;
                results[k] = run(config, inst, t.run_seed);
            }
        } catch (const std::exception& e) {
            std::cerr << "run task failed: " << e.what() << "\n";
            failed = true;
        }
    });
    if (failed) return 1;

    // deterministic output order
    std::vector<std::size_t> order(tasks.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return tasks[a].run_id < tasks[b].run_id; });

    std::ofstream evals(fs::path(spec.out_dir) / "evals.csv", std::ios::binary);
    evals << "run_id,eval_index,f,best_so_far\n";
    for (std::size_t k : order) {
        evals << evals_csv_rows(results[k], tasks[k].run_id);
        std::ofstream prov(fs::path(spec.out_dir) / "provenance" / (tasks[k].run_id + ".json"),
                           std::ios::binary);
        prov << run_provenance(results[k], tasks[k].run_id, spec.budget_multiplier).dump(2)
             << "\n";
    }
    evals.close();

    // ERTD aggregation: per config and dim, overall and per function group,
    // plus a per-function table for the rank-agreement analysis
    std::ofstream ertd_csv(fs::path(spec.out_dir) / "ertd.csv", std::ios::binary);
    ertd_csv << "config,function_group,d,evals,proportion\n";
    std::ofstream ertd_fn_csv(fs::path(spec.out_dir) / "ertd_by_function.csv",
                              std::ios::binary);
    ertd_fn_csv << "config,function,d,evals,proportion\n";

    const auto emit_curve = [&](std::ofstream& os, const std::string& config,
                                const std::string& label, int d,
                                const std::vector<std::size_t>& hits, long budget) {
        const ErtdCurve curve = ertd(hits, budget);
        for (long n = 1; n <= budget; ++n)
            os << config << ',' << label << ',' << d << ',' << n << ','
               << format_double(curve.at(n)) << "\n";
    };

    for (const std::string& cfg : spec.configs)
        for (int d : spec.dims) {
            const long budget = static_cast<long>(spec.budget_multiplier) * d;
            std::vector<std::size_t> all_hits;
            std::map<std::string, std::vector<std::size_t>> group_hits;
            std::map<std::string, std::vector<std::size_t>> function_hits;
            for (std::size_t k : order) {
                if (tasks[k].config != cfg || tasks[k].dim != d) continue;
                const RunResult& r = results[k];
                const double f_opt = r.instance_descriptor.at("f_opt").get<double>();
                for (int e = 2; e >= -3; --e) {
                    const std::size_t hit = r.first_hit(f_opt + std::pow(10.0, e));
                    all_hits.push_back(hit);
                    group_hits[to_string(function_group(tasks[k].fid))].push_back(hit);
                    function_hits[to_string(tasks[k].fid)].push_back(hit);
                }
            }
            if (all_hits.empty()) continue;
            emit_curve(ertd_csv, cfg, "all", d, all_hits, budget);
            for (const auto& [label, hits] : group_hits)
                emit_curve(ertd_csv, cfg, label, d, hits, budget);
            for (const auto& [label, hits] : function_hits)
                emit_curve(ertd_fn_csv, cfg, label, d, hits, budget);
        }
    return 0;
}

struct RegressSpec {
    std::vector<GpVariant> variants;
    std::vector<TestFunctionId> functions;
    std::vector<int> dims;
    int instances = 15;
    std::uint64_t seed = 0;
    std::string out_dir;
    int jobs = 1;
    std::string ertd_by_function_csv;  // optional, fills the rank_ertd column
};

inline std::vector<GpVariant> expand_variants(const std::string& arg) {
    if (arg == "all") return all_gp_variants();
    std::vector<GpVariant> out;
    for (const std::string& tok : detail::split_csv_list(arg))
        out.push_back(parse_gp_variant(tok));
    return out;
}

/// The optimizer configuration whose GP matches a regression variant.
inline std::string variant_config_name(GpVariant v) {
    switch (v) {
        case GpVariant::Default: return "M";
        case GpVariant::Quadratic: return "QuadM";
        case GpVariant::Scaling: return "ScalM";
        case GpVariant::Warping: return "WarpM";
        case GpVariant::Exponential: return "ExpM";
    }
    throw std::logic_error("variant_config_name: unknown variant");
}

/// Final ERTD proportions parsed from an ertd_by_function.csv.
/// Keyed by (config, function, d).
inline std::map<std::tuple<std::string, std::string, int>, double> parse_final_ertd(
    const std::string& path) {
    std::map<std::tuple<std::string, std::string, int>, double> final_values;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        const auto fields = detail::split_csv_list(line);
        if (fields.size() != 5) continue;
        final_values[{fields[0], fields[1], std::stoi(fields[2])}] = std::stod(fields[4]);
    }
    return final_values;
}

/// Run the regression grid and write q2.csv. Exit code 0 when every
/// instance trained; 2 when some were skipped (with a summary on stderr).
inline int cmd_regress(const RegressSpec& spec) {
    namespace fs = std::filesystem;
    if (spec.variants.empty() || spec.functions.empty() || spec.dims.empty()) {
        std::cerr << "regress: nothing to do\n";
        return 1;
    }
    fs::create_directories(spec.out_dir);

    struct Cell {
        GpVariant variant;
        TestFunctionId fid;
        int dim;
    };
    std::vector<Cell> cells;
    for (TestFunctionId fid : spec.functions)
        for (int d : spec.dims)
            for (GpVariant v : spec.variants) cells.push_back({v, fid, d});

    std::vector<RegressionEntry> entries(cells.size());
    detail::parallel_for(cells.size(), spec.jobs, [&](std::size_t k) {
        entries[k] = regression_experiment(cells[k].variant, cells[k].fid, cells[k].dim,
                                           spec.instances, spec.seed);
    });

    std::map<std::tuple<std::string, std::string, int>, double> ertd_final;
    if (!spec.ertd_by_function_csv.empty())
        ertd_final = parse_final_ertd(spec.ertd_by_function_csv);

    std::ofstream out(fs::path(spec.out_dir) / "q2.csv", std::ios::binary);
    out << "variant,fid,d,q2_mean,q2_sd,ks_mean,ks_sd,rank_q2,rank_ertd\n";
    int skipped_total = 0;
    for (TestFunctionId fid : spec.functions)
        for (int d : spec.dims) {
            std::vector<const RegressionEntry*> block;
            for (std::size_t k = 0; k < cells.size(); ++k)
                if (cells[k].fid == fid && cells[k].dim == d) block.push_back(&entries[k]);
            std::vector<double> q2_means, ertd_finals;
            bool have_all_ertd = !ertd_final.empty();
            for (const RegressionEntry* e : block) {
                q2_means.push_back(e->q2_mean);
                const auto key = std::make_tuple(variant_config_name(e->variant),
                                                 to_string(fid), d);
                const auto it = ertd_final.find(key);
                if (it == ertd_final.end()) have_all_ertd = false;
                ertd_finals.push_back(it == ertd_final.end() ? 0.0 : it->second);
            }
            const std::vector<int> rank_q2 = rank_descending(q2_means);
            const std::vector<int> rank_er =
                have_all_ertd ? rank_descending(ertd_finals) : std::vector<int>();
            for (std::size_t b = 0; b < block.size(); ++b) {
                const RegressionEntry& e = *block[b];
                skipped_total += e.instances_skipped;
                out << to_string(e.variant) << ',' << to_string(fid) << ',' << d << ','
                    << format_double(e.q2_mean) << ',' << format_double(e.q2_sd) << ','
                    << format_double(e.ks_mean) << ',' << format_double(e.ks_sd) << ','
                    << rank_q2[b] << ','
                    << (have_all_ertd ? std::to_string(rank_er[b]) : std::string()) << "\n";
            }
        }
    if (skipped_total > 0) {
        std::cerr << "regress: " << skipped_total << " instance fits skipped\n";
        return 2;
    }
    return 0;
}

/// Append the plot abscissa x = log10(evals / d) to ERTD-style CSV rows.
/// Inputs are concatenated; the row count is preserved.
inline int cmd_plotdata(const std::vector<std::string>& inputs, const std::string& out_path) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "plotdata: cannot open " << out_path << "\n";
        return 1;
    }
    bool header_written = false;
    for (const std::string& path : inputs) {
        std::ifstream in(path);
        if (!in) {
            std::cerr << "plotdata: cannot open " << path << "\n";
            return 1;
        }
        std::string line;
        if (!std::getline(in, line)) {
            std::cerr << "plotdata: empty input " << path << "\n";
            return 1;
        }
        const auto header = detail::split_csv_list(line);
        long d_col = -1, evals_col = -1;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == "d") d_col = static_cast<long>(i);
            if (header[i] == "evals") evals_col = static_cast<long>(i);
        }
        if (d_col < 0 || evals_col < 0) {
            std::cerr << "plotdata: " << path << " lacks d/evals columns\n";
            return 1;
        }
        if (!header_written) {
            out << line << ",log10_evals_per_d\n";
            header_written = true;
        }
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto fields = detail::split_csv_list(line);
            const double evals = std::stod(fields[static_cast<std::size_t>(evals_col)]);
            const double d = std::stod(fields[static_cast<std::size_t>(d_col)]);
            out << line << ',' << format_double(std::log10(evals / d)) << "\n";
        }
    }
    return 0;
}

}  // namespace bocoa

#endif  // BOCOA_CAMPAIGN_HPP

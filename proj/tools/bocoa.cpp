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

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bocoa/campaign.hpp"

namespace {

std::uint64_t effective_seed(std::uint64_t cli_seed) {
    if (const char* env = std::getenv("BOCOA_SEED")) return std::strtoull(env, nullptr, 10);
    return cli_seed;
}

std::vector<int> parse_dims(const std::string& arg) {
    std::vector<int> dims;
    for (const std::string& tok : bocoa::detail::split_csv_list(arg))
        dims.push_back(std::stoi(tok));
    return dims;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian-optimization benchmark campaigns"};
    app.require_subcommand(1);

    // run
    std::string run_configs = "M", run_functions = "all", run_dims = "3";
    int run_instances = 1, run_jobs = 1, run_budget = 30;
    std::uint64_t run_seed = 0;
    std::string run_out = "out";
    CLI::App* cmd_run = app.add_subcommand("run", "execute an optimization campaign");
    cmd_run->add_option("--configs", run_configs, "configuration names (csv) or 'all'");
    cmd_run->add_option("--functions", run_functions, "function ids (csv) or 'all'");
    cmd_run->add_option("--dims", run_dims, "dimensions (csv from {2,3,5,10})");
    cmd_run->add_option("--instances", run_instances, "instances per function");
    cmd_run->add_option("--seed", run_seed, "base seed (BOCOA_SEED overrides)");
    cmd_run->add_option("--jobs", run_jobs, "worker threads");
    cmd_run->add_option("--out", run_out, "output directory");
    cmd_run->add_option("--budget-mult", run_budget, "evaluations per dimension");

    // regress
    std::string rg_variants = "all", rg_functions = "all", rg_dims = "5";
    int rg_instances = 15, rg_jobs = 1;
    std::uint64_t rg_seed = 0;
    std::string rg_out = "out", rg_ertd;
    CLI::App* cmd_rg = app.add_subcommand("regress", "measure GP regression quality");
    cmd_rg->add_option("--variants", rg_variants, "GP variants (csv) or 'all'");
    cmd_rg->add_option("--functions", rg_functions, "function ids (csv) or 'all'");
    cmd_rg->add_option("--dims", rg_dims, "dimensions (csv from {2,3,5,10})");
    cmd_rg->add_option("--instances", rg_instances, "instances per function");
    cmd_rg->add_option("--seed", rg_seed, "base seed (BOCOA_SEED overrides)");
    cmd_rg->add_option("--jobs", rg_jobs, "worker threads");
    cmd_rg->add_option("--out", rg_out, "output directory");
    cmd_rg->add_option("--ertd", rg_ertd, "ertd_by_function.csv to fill rank_ertd");

    // plotdata
    std::vector<std::string> pd_inputs;
    std::string pd_out = "plot.csv";
    CLI::App* cmd_pd = app.add_subcommand("plotdata", "append log10(evals/d) to ERTD tables");
    cmd_pd->add_option("inputs", pd_inputs, "input csv paths")->required();
    cmd_pd->add_option("--out", pd_out, "output csv path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            bocoa::CampaignSpec spec;
            spec.configs = bocoa::expand_config_names(run_configs);
            spec.functions = bocoa::expand_function_ids(run_functions);
            spec.dims = parse_dims(run_dims);
            spec.instances = run_instances;
            spec.base_seed = effective_seed(run_seed);
            spec.out_dir = run_out;
            spec.jobs = run_jobs;
            spec.budget_multiplier = run_budget;
            return bocoa::cmd_run(spec);
        }
        if (cmd_rg->parsed()) {
            bocoa::RegressSpec spec;
            spec.variants = bocoa::expand_variants(rg_variants);
            spec.functions = bocoa::expand_function_ids(rg_functions);
            spec.dims = parse_dims(rg_dims);
            spec.instances = rg_instances;
            spec.seed = effective_seed(rg_seed);
            spec.out_dir = rg_out;
            spec.jobs = rg_jobs;
            spec.ertd_by_function_csv = rg_ertd;
            return bocoa::cmd_regress(spec);
        }
        if (cmd_pd->parsed()) return bocoa::cmd_plotdata(pd_inputs, pd_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

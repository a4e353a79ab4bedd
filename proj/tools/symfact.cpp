// Batch front end: load a similarity matrix (or features), factorize
// M = A - lambda_reg * L, and write traces, factors, labels and report.json.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symfact/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Graph-regularized symmetric matrix factorization"};
    app.option_defaults()->always_capture_default(false);

    std::string config_path;
    app.add_option("--config", config_path, "flat key=value file; flags override it");

    // Every flag is captured as text and applied through the same code path
    // as the config file, after it.
    const std::map<std::string, std::string> help{
        {"input", "input file"},
        {"format", "dense_csv | matrix_market_symmetric | features_csv"},
        {"similarity", "inner_product | cosine | rbf (features_csv only)"},
        {"sigma", "rbf bandwidth"},
        {"labels", "truth labels, one integer per line"},
        {"lambda-reg", "graph regularization weight (>= 0)"},
        {"k", "number of clusters"},
        {"algorithm", "columnwise | pgd"},
        {"constraint", "unconstrained | nonnegative | unit_row_norm | row_sparsity | orthogonal"},
        {"sparsity-s", "nonzeros per row for row_sparsity"},
        {"mu", "splitting penalty (default: 1.01 x lower bound)"},
        {"mu-margin", "multiplier on the penalty lower bound"},
        {"max-iter", "iteration / sweep limit"},
        {"rel-tol", "stop when |f_prev - f| <= rel_tol (1 + f_0)"},
        {"seed", "seed of the first repeat"},
        {"repeats", "number of seeds (seed, seed+1, ...)"},
        {"out", "output directory"},
        {"nonneg-columns", "columnwise: clamp columns at zero"},
        {"fixed-step", "pgd: constant stepsize instead of 1/(2L)"},
        {"timing", "write wall_ms to traces (true/false)"},
    };
    const auto& keys = symfact::config_keys();
    std::vector<std::string> values(keys.size());
    std::vector<CLI::Option*> options;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto it = help.find(keys[i]);
        options.push_back(
            app.add_option("--" + keys[i], values[i], it != help.end() ? it->second : ""));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return symfact::kExitConfig;
    }

    symfact::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) symfact::load_config_file(cfg, config_path);
        for (std::size_t i = 0; i < options.size(); ++i)
            if (options[i]->count() > 0) symfact::apply_setting(cfg, keys[i], values[i]);
    } catch (const symfact::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return symfact::kExitConfig;
    }

    return symfact::run_experiment_status(cfg, std::cerr);
}

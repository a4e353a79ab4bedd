#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "symfact/clustering.hpp"
#include "symfact/constraints.hpp"
#include "symfact/error.hpp"
#include "symfact/graph.hpp"
#include "symfact/io.hpp"
#include "symfact/solver.hpp"

namespace symfact {

enum class InputFormat { dense_csv, matrix_market_symmetric, features_csv };
enum class Algorithm { columnwise, pgd };

inline std::string_view to_string(InputFormat f) {
    switch (f) {
        case InputFormat::dense_csv: return "dense_csv";
        case InputFormat::matrix_market_symmetric: return "matrix_market_symmetric";
        case InputFormat::features_csv: return "features_csv";
    }
    return "unknown";
}

inline std::string_view to_string(Algorithm a) {
    return a == Algorithm::columnwise ? "columnwise" : "pgd";
}

inline std::string_view to_string(Similarity::Kind k) {
    switch (k) {
        case Similarity::Kind::inner_product: return "inner_product";
        case Similarity::Kind::cosine: return "cosine";
        case Similarity::Kind::rbf: return "rbf";
    }
    return "unknown";
}

struct ExperimentConfig {
    std::string input;
    InputFormat format = InputFormat::dense_csv;
    Similarity similarity = Similarity::inner_product();
    std::optional<std::string> labels;  // truth labels for matrix inputs
    double lambda_reg = 0.0;
    int k = 0;
    Algorithm algorithm = Algorithm::pgd;
    ConstraintSpec constraint;
    SolverConfig solver;
    std::string out;
    int repeats = 1;
    bool timing = false;  // wall_ms column; off keeps traces byte-reproducible
};

namespace detail {

inline std::string normalize_key(std::string_view key) {
    std::string k(io::trim(key));
    while (!k.empty() && k.front() == '-') k.erase(k.begin());
    for (char& c : k)
        if (c == '_') c = '-';
    return k;
}

inline double config_double(const std::string& key, std::string_view v) {
    const auto d = io::parse_double(v);
    if (!d || !std::isfinite(*d))
        throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, v));
    return *d;
}

inline long long config_int(const std::string& key, std::string_view v) {
    const auto d = io::parse_int(v);
    if (!d) throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, v));
    return *d;
}

inline bool config_bool(const std::string& key, std::string_view v) {
    const std::string s(io::trim(v));
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(fmt::format("{}: expected true/false, got '{}'", key, v));
}

}  // namespace detail

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "input",   "format",    "similarity", "sigma",     "labels",   "lambda-reg",
        "k",       "algorithm", "constraint", "sparsity-s", "mu",      "mu-margin",
        "max-iter", "rel-tol",  "seed",       "repeats",   "out",      "nonneg-columns",
        "fixed-step", "timing"};
    return keys;
}

/// Applies one key=value setting. Keys match the CLI flags without the
/// leading dashes; underscores are accepted in place of dashes.
inline void apply_setting(ExperimentConfig& cfg, std::string_view raw_key, std::string_view raw_value) {
    const std::string key = detail::normalize_key(raw_key);
    const std::string value(io::trim(raw_value));

    if (key == "input") {
        cfg.input = value;
    } else if (key == "format") {
        if (value == "dense_csv") cfg.format = InputFormat::dense_csv;
        else if (value == "matrix_market_symmetric") cfg.format = InputFormat::matrix_market_symmetric;
        else if (value == "features_csv") cfg.format = InputFormat::features_csv;
        else throw ConfigError("format: unknown value '" + value + "'");
    } else if (key == "similarity") {
        if (value == "inner_product") cfg.similarity.kind = Similarity::Kind::inner_product;
        else if (value == "cosine") cfg.similarity.kind = Similarity::Kind::cosine;
        else if (value == "rbf") cfg.similarity.kind = Similarity::Kind::rbf;
        else throw ConfigError("similarity: unknown value '" + value + "'");
    } else if (key == "sigma") {
        cfg.similarity.sigma = detail::config_double(key, value);
    } else if (key == "labels") {
        cfg.labels = value;
    } else if (key == "lambda-reg") {
        cfg.lambda_reg = detail::config_double(key, value);
    } else if (key == "k") {
        cfg.k = static_cast<int>(detail::config_int(key, value));
    } else if (key == "algorithm") {
        if (value == "columnwise") cfg.algorithm = Algorithm::columnwise;
        else if (value == "pgd") cfg.algorithm = Algorithm::pgd;
        else throw ConfigError("algorithm: unknown value '" + value + "'");
    } else if (key == "constraint") {
        try {
            cfg.constraint.kind = parse_constraint_kind(value);
        } catch (const InvalidInput& e) {
            throw ConfigError(std::string("constraint: ") + e.what());
        }
    } else if (key == "sparsity-s") {
        cfg.constraint.sparsity = static_cast<int>(detail::config_int(key, value));
    } else if (key == "mu") {
        cfg.solver.mu_penalty = detail::config_double(key, value);
    } else if (key == "mu-margin") {
        cfg.solver.mu_margin = detail::config_double(key, value);
    } else if (key == "max-iter") {
        cfg.solver.max_iter = static_cast<int>(detail::config_int(key, value));
    } else if (key == "rel-tol") {
        cfg.solver.rel_tol = detail::config_double(key, value);
    } else if (key == "seed") {
        const auto s = detail::config_int(key, value);
        if (s < 0) throw ConfigError("seed: must be >= 0");
        cfg.solver.seed = static_cast<std::uint64_t>(s);
    } else if (key == "repeats") {
        cfg.repeats = static_cast<int>(detail::config_int(key, value));
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "nonneg-columns") {
        cfg.solver.nonneg_columns = detail::config_bool(key, value);
    } else if (key == "fixed-step") {
        cfg.solver.fixed_step = detail::config_double(key, value);
    } else if (key == "timing") {
        cfg.timing = detail::config_bool(key, value);
    } else {
        throw ConfigError("unknown key '" + std::string(raw_key) + "'");
    }
}

/// Flat key=value file; '#' starts a comment line. Relative `input`,
/// `labels` and `out` paths are taken relative to the file's directory.
inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto rebase = [&](std::string& p) {
        if (!p.empty() && std::filesystem::path(p).is_relative())
            p = (base / p).lexically_normal().string();
    };
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::string text;
    std::size_t number = 0;
    while (std::getline(in, text)) {
        ++number;
        const auto body = io::trim(text);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(fmt::format("{}:{}: expected key=value", path, number));
        try {
            const std::string key = detail::normalize_key(body.substr(0, eq));
            apply_setting(cfg, key, body.substr(eq + 1));
            if (key == "input") rebase(cfg.input);
            if (key == "out") rebase(cfg.out);
            if (key == "labels") rebase(*cfg.labels);
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{}:{}: {}", path, number, e.what()));
        }
    }
}

inline void validate(ExperimentConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("input: required");
    if (cfg.out.empty()) throw ConfigError("out: required");
    if (cfg.k < 1) throw ConfigError("k: must be >= 1");
    if (!(cfg.lambda_reg >= 0.0)) throw ConfigError("lambda-reg: must be >= 0");
    if (cfg.repeats < 1) throw ConfigError("repeats: must be >= 1");
    if (cfg.format == InputFormat::features_csv && cfg.similarity.kind == Similarity::Kind::rbf &&
        !(cfg.similarity.sigma > 0.0))
        throw ConfigError("sigma: must be > 0");

    if (cfg.algorithm == Algorithm::columnwise) {
        using K = ConstraintSpec::Kind;
        if (cfg.constraint.kind == K::nonnegative) {
            cfg.solver.nonneg_columns = true;
        } else if (cfg.constraint.kind != K::unconstrained) {
            throw ConfigError(fmt::format(
                "constraint: columnwise supports unconstrained or nonnegative, not {}",
                to_string(cfg.constraint.kind)));
        }
        if (cfg.solver.fixed_step) throw ConfigError("fixed-step: applies to pgd only");
    } else {
        if (cfg.solver.nonneg_columns)
            throw ConfigError("nonneg-columns: applies to columnwise; use constraint=nonnegative");
        if (cfg.constraint.kind == ConstraintSpec::Kind::row_sparsity &&
            (cfg.constraint.sparsity < 1 || cfg.constraint.sparsity > cfg.k))
            throw ConfigError(fmt::format("sparsity-s: must be in [1, {}]", cfg.k));
    }
    try {
        cfg.solver.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
}

struct RunSummary {
    std::uint64_t seed = 0;
    double final_objective = 0.0;
    double final_rel_error = 0.0;
    int iters = 0;
    bool converged = false;
    std::optional<double> ac;
    std::optional<double> nmi;
    std::optional<double> mu_used;
};

struct ExperimentResult {
    Eigen::Index n = 0;
    std::vector<RunSummary> runs;
    nlohmann::json report;
};

struct LoadedInput {
    SymmetricMatrix similarity;
    std::optional<std::vector<int>> truth;
};

inline LoadedInput load_input(const ExperimentConfig& cfg) {
    LoadedInput in;
    switch (cfg.format) {
        case InputFormat::dense_csv:
            in.similarity = io::read_similarity_csv(cfg.input);
            break;
        case InputFormat::matrix_market_symmetric:
            in.similarity = io::read_matrix_market_symmetric(cfg.input);
            break;
        case InputFormat::features_csv: {
            Dataset ds = io::read_features_csv(cfg.input);
            try {
                in.similarity = build_similarity(ds, cfg.similarity);
            } catch (const InvalidInput& e) {
                throw ParseError(cfg.input, 0, e.what());
            }
            in.truth = std::move(ds.truth_labels);
            break;
        }
    }
    if (cfg.labels) in.truth = io::read_labels(*cfg.labels);
    const auto n = static_cast<std::size_t>(in.similarity.size());
    if (in.truth && in.truth->size() != n)
        throw ParseError(cfg.labels ? *cfg.labels : cfg.input, 0,
                         fmt::format("{} labels for {} points", in.truth->size(), n));
    return in;
}

/// Loads the input, forms M = A - lambda_reg L, runs one solve per seed
/// (seed, seed+1, ...) and writes trace_<seed>.csv, H_<seed>.csv,
/// labels_<seed>.csv and report.json into cfg.out.
inline ExperimentResult run_experiment(ExperimentConfig cfg) {
    validate(cfg);
    const LoadedInput input = load_input(cfg);
    const Eigen::Index n = input.similarity.size();
    if (cfg.k > n) throw ConfigError(fmt::format("k: must be <= n = {}", n));

    const GraphRegularizedTarget target = regularized_target(input.similarity, cfg.lambda_reg);
    const std::filesystem::path out_dir(cfg.out);
    std::filesystem::create_directories(out_dir);

    ExperimentResult result;
    result.n = n;
    for (int r = 0; r < cfg.repeats; ++r) {
        SolverConfig solver = cfg.solver;
        solver.seed = cfg.solver.seed + static_cast<std::uint64_t>(r);

        RunSummary run;
        run.seed = solver.seed;
        FactorMatrix h;
        SolveTrace trace;
        try {
            if (cfg.algorithm == Algorithm::columnwise) {
                auto res = solve_columnwise(target.target, cfg.k, solver);
                h = std::move(res.factors.h);
                trace = std::move(res.trace);
                run.mu_used = res.mu;
            } else {
                auto res = solve_pgd(target.target, cfg.k, cfg.constraint, solver);
                h = std::move(res.h);
                trace = std::move(res.trace);
            }
        } catch (const InvalidInput& e) {
            throw NumericFailure(e.what());
        } catch (const SingularMatrix& e) {
            throw NumericFailure(e.what());
        }

        run.final_objective = trace.final().objective;
        run.final_rel_error = trace.final().rel_error;
        run.iters = trace.iterations();
        run.converged = trace.converged;

        const LabelVector labels = assign_labels(h);
        if (input.truth) {
            const LabelVector truth(*input.truth);
            const auto report = evaluate(labels, truth);
            run.ac = report.ac;
            run.nmi = report.nmi;
        }

        const std::string tag = std::to_string(run.seed);
        io::write_text(out_dir / ("trace_" + tag + ".csv"), io::trace_csv(trace, cfg.timing));
        io::write_text(out_dir / ("H_" + tag + ".csv"), io::matrix_csv(h));
        io::write_text(out_dir / ("labels_" + tag + ".csv"), io::labels_csv(labels));
        result.runs.push_back(run);
    }

    nlohmann::json report;
    report["schema_version"] = 1;
    report["input"] = cfg.input;
    report["format"] = to_string(cfg.format);
    if (cfg.format == InputFormat::features_csv) {
        report["similarity"] = {{"kind", to_string(cfg.similarity.kind)}};
        if (cfg.similarity.kind == Similarity::Kind::rbf)
            report["similarity"]["sigma"] = cfg.similarity.sigma;
    }
    report["algorithm"] = to_string(cfg.algorithm);
    report["constraint"] = {{"kind", to_string(cfg.constraint.kind)}};
    if (cfg.constraint.kind == ConstraintSpec::Kind::row_sparsity)
        report["constraint"]["s"] = cfg.constraint.sparsity;
    report["n"] = n;
    report["k"] = cfg.k;
    report["lambda_reg"] = cfg.lambda_reg;
    report["runs"] = nlohmann::json::array();
    for (const auto& run : result.runs) {
        nlohmann::json j;
        j["seed"] = run.seed;
        j["final_objective"] = run.final_objective;
        j["final_rel_error"] = run.final_rel_error;
        j["iters"] = run.iters;
        j["converged"] = run.converged;
        j["mu_used"] = run.mu_used ? nlohmann::json(*run.mu_used) : nlohmann::json(nullptr);
        j["lambda_reg"] = cfg.lambda_reg;
        if (run.ac) j["ac"] = *run.ac;
        if (run.nmi) j["nmi"] = *run.nmi;
        report["runs"].push_back(std::move(j));
    }
    io::write_text(out_dir / "report.json", report.dump(2) + "\n");
    result.report = std::move(report);
    return result;
}

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitParse = 3,
    kExitNumeric = 4,
};

/// run_experiment with errors mapped to exit codes and reported on `err`.
inline int run_experiment_status(const ExperimentConfig& cfg, std::ostream& err) {
    try {
        run_experiment(cfg);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitParse;
    } catch (const NumericFailure& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace symfact

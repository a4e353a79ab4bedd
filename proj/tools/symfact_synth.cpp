// Writes the synthetic instances used by the bundled configs and the
// acceptance suite.
//
//   symfact-synth planted --n 30 --k 3 --seed 0 --out m.csv
//   symfact-synth blobs --per-cluster 50 --k 3 --dim 2 --noise 0.3 --seed 0 --out x.csv

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "symfact/io.hpp"
#include "symfact/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Synthetic instances for symfact"};
    app.require_subcommand(1);

    int n = 30, k = 3, per_cluster = 50, dim = 2;
    double noise = 0.3;
    long long seed = 0;
    std::string out;

    auto* planted = app.add_subcommand("planted", "dense_csv of H H^T for Gaussian H (n x k)");
    planted->add_option("--n", n)->check(CLI::PositiveNumber);
    planted->add_option("--k", k)->check(CLI::PositiveNumber);
    planted->add_option("--seed", seed)->check(CLI::NonNegativeNumber);
    planted->add_option("--out", out)->required();

    auto* blobs = app.add_subcommand("blobs", "features_csv with a label column");
    blobs->add_option("--per-cluster", per_cluster)->check(CLI::PositiveNumber);
    blobs->add_option("--k", k)->check(CLI::PositiveNumber);
    blobs->add_option("--dim", dim)->check(CLI::Range(2, 1000));
    blobs->add_option("--noise", noise)->check(CLI::NonNegativeNumber);
    blobs->add_option("--seed", seed)->check(CLI::NonNegativeNumber);
    blobs->add_option("--out", out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*planted) {
            const auto inst = symfact::synthetic::planted_psd(n, k, static_cast<std::uint64_t>(seed));
            symfact::io::write_text(out, symfact::io::matrix_csv(inst.target.dense()));
        } else {
            const auto ds = symfact::synthetic::gaussian_blobs(per_cluster, k, dim, noise,
                                                               static_cast<std::uint64_t>(seed));
            std::string body;
            for (int d = 0; d < dim; ++d) body += fmt::format("x{},", d);
            body += "label\n";
            for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
                for (Eigen::Index d = 0; d < ds.features.cols(); ++d)
                    body += symfact::io::format_double(ds.features(i, d)) + ",";
                body += fmt::format("{}\n", (*ds.truth_labels)[static_cast<std::size_t>(i)]);
            }
            symfact::io::write_text(out, body);
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    return 0;
}

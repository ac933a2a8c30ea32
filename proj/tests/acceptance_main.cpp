#include <CLI11.hpp>

#include <iostream>

#include "acceptance.hpp"

// One [PASS]/[FAIL] line per criterion; exit status 1 when any criterion fails.
int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    fermat::cli::AcceptanceOptions opts;
    app.add_option("--criteria", opts.criteria, "subset to run (default all)");
    app.add_option("--seed", opts.seed, "seed for randomized criteria");
    app.add_option("--threads", opts.threads, "worker threads");
    app.add_option("--scratch", opts.scratch_dir, "scratch directory for the determinism runs");
    CLI11_PARSE(app, argc, argv);

    opts.on_result = [](const fermat::cli::CriterionResult& r) { std::cout << fermat::cli::format_result(r) << std::endl; };
    bool all = true;
    for (const auto& r : fermat::cli::run_acceptance(opts)) all = all && r.pass;
    return all ? 0 : 1;
}

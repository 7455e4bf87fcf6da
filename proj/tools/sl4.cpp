// Command-line front end for the fourth-order solver.

#include <iostream>

#include <CLI11.hpp>

#include "sl4/builtins.hpp"
#include "sl4/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Fourth-order Sturm-Liouville eigenvalue solver with interval truncation"};
    app.require_subcommand(1, 1);
    sl4::RunConfig cfg;
    std::string builtin_help = "built-in problem:";
    for (const auto& n : sl4::builtin_names()) builtin_help += " " + n;

    double lambda_star = 0.0;
    const std::pair<const char*, const char*> commands[] = {
        {"classify", "classify both endpoints"},
        {"solve", "eigenvalues of a regular problem or a truncation sweep"},
        {"interlace", "compare psi and Dirichlet truncations at a lim-3 end"},
        {"greens", "Green's kernel identities and Hilbert-Schmidt truncation distances"},
        {"spurious", "find the truncation point placing mu_k at lambda*"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        auto* prob = sub->add_option("--problem", cfg.problem_path, "problem file");
        auto* bi = sub->add_option("--builtin", cfg.builtin, builtin_help);
        prob->excludes(bi);
        sub->add_option("--k", cfg.k_range, "eigenvalue index range, k or lo..hi")->capture_default_str();
        sub->add_option("--lambda-star", lambda_star, "spectral target lambda*");
        sub->add_option("--schedule", cfg.schedules,
                        "[left:|right:]geometric:first=F,factor=R,count=N | linear:start=S,stop=E,step=H | "
                        "list:x1,x2,...");
        sub->add_option("--tol", cfg.tol, "sweep convergence tolerance")->capture_default_str();
        sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", cfg.seed, "seed recorded with the run")->capture_default_str();
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? sl4::kExitOk : sl4::kExitConfig;
    }
    for (CLI::App* sub : subs) {
        if (!sub->parsed()) continue;
        cfg.subcommand = sub->get_name();
        if (sub->count("--lambda-star") > 0) cfg.lambda_star = lambda_star;
    }
    return sl4::run_command(cfg, std::cout, std::cerr);
}

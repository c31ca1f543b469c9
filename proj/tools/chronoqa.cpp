// chronoqa: build a temporal QA corpus, train the continual-learning arms,
// evaluate checkpoints and compare runs.
//
// Exit codes: 0 ok, 1 usage, 2 validation, 3 numerical failure.

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chronoqa/config.hpp"
#include "chronoqa/corpus_io.hpp"
#include "chronoqa/errors.hpp"
#include "commands.hpp"

namespace fs = std::filesystem;
using namespace chronoqa;

namespace {

struct ConfigFlags {
    std::string config_file;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;

    void attach(CLI::App* app) {
        app->add_option("--config", config_file, "flat JSON config file");
        for (const auto& key : config_keys()) {
            auto& slot = values[key.name];
            options[key.name] =
                app->add_option("--" + key.name, slot, key.help + " (default " + key.default_value.dump() + ")");
        }
    }

    ExperimentConfig load(const fs::path& workdir) const {
        std::map<std::string, std::string> set;
        for (const auto& [name, opt] : options) {
            if (opt->count() > 0) set[name] = values.at(name);
        }
        std::optional<fs::path> file;
        if (!config_file.empty()) file = cli::resolve(workdir, config_file);
        return cli::load_config(file, set);
    }
};

std::vector<Split> parse_splits(const std::string& s) {
    if (s == "all") return {Split::dev, Split::test};
    const auto split = parse_split(s);
    if (!split) throw UsageError("unknown split '" + s + "' (dev, test, train or all)");
    return {*split};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continual learning for temporal-sensitive QA"};
    app.require_subcommand(1);
    std::string workdir = ".";
    app.add_option("--workdir", workdir, "base directory for every relative path");

    ConfigFlags build_flags;
    std::string build_out = "data";
    auto* build = app.add_subcommand("build", "synthesize a corpus");
    build_flags.attach(build);
    build->add_option("--out", build_out, "output directory");

    ConfigFlags train_flags;
    std::string train_data = "data";
    std::string train_runs = "runs";
    bool resume = false;
    int stop_after = 0;
    auto* train = app.add_subcommand("train", "train all stages of one arm");
    train_flags.attach(train);
    train->add_option("--data", train_data, "corpus directory written by build");
    train->add_option("--out", train_runs, "parent directory of run directories");
    train->add_flag("--resume", resume, "continue after the last stored stage checkpoint");
    train->add_option("--stop-after-stage", stop_after, "stop once this stage is stored");

    ConfigFlags eval_flags;
    std::string eval_ckpt;
    std::string eval_data = "data";
    std::string eval_split = "test";
    std::vector<int> eval_subsets;
    std::string eval_csv;
    auto* eval = app.add_subcommand("eval", "evaluate one stage checkpoint");
    eval_flags.attach(eval);
    eval->add_option("--checkpoint", eval_ckpt, "path to a stage checkpoint")->required();
    eval->add_option("--data", eval_data, "corpus directory");
    eval->add_option("--split", eval_split, "dev, test, train or all");
    eval->add_option("--subsets", eval_subsets, "subset indices (default: 1..stage)")->delimiter(',');
    eval->add_option("--csv", eval_csv, "CSV output (default: eval.csv beside the checkpoint)");

    std::vector<std::string> report_runs;
    std::string report_split = "test";
    std::string report_out;
    auto* report = app.add_subcommand("report", "compare completed runs");
    report->add_option("runs", report_runs, "run directories")->required();
    report->add_option("--split", report_split, "dev or test");
    report->add_option("--out", report_out, "also write the tables to this file");

    oracle::GradcheckOptions gc;
    auto* grad = app.add_subcommand("gradcheck", "finite-difference check of the loss gradients");
    grad->add_option("--seed", gc.seed, "instance seed");
    grad->add_option("--instances", gc.instances, "number of random instances");
    grad->add_option("--dim", gc.fixed_dim, "fix the representation dimension");
    grad->add_option("--candidates", gc.fixed_candidates, "fix the number of candidates");
    grad->add_flag("--inject-sign-flip", gc.inject_sign_flip, "negate part of the analytic gradient");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : static_cast<int>(ExitCode::usage);
    }

    const fs::path base(workdir);
    try {
        if (*build) {
            const auto cfg = build_flags.load(base);
            cli::cmd_build(cfg, cli::resolve(base, build_out), std::cout);
        } else if (*train) {
            const auto cfg = train_flags.load(base);
            cli::TrainOptions opts;
            opts.resume = resume;
            if (stop_after > 0) opts.stop_after_stage = stop_after;
            const auto dir =
                cli::cmd_train(cfg, cli::resolve(base, train_data), cli::resolve(base, train_runs), opts, std::cout);
            std::cout << dir.string() << "\n";
        } else if (*eval) {
            const fs::path ckpt = cli::resolve(base, eval_ckpt);
            // run_dir/stage_k/checkpoint: default to the config the run was trained with
            const fs::path run_config = ckpt.parent_path().parent_path() / "config.json";
            if (eval_flags.config_file.empty() && fs::exists(run_config)) eval_flags.config_file = run_config.string();
            const auto cfg = eval_flags.load(base);
            const fs::path csv = eval_csv.empty() ? ckpt.parent_path() / "eval.csv" : cli::resolve(base, eval_csv);
            cli::cmd_eval(ckpt, cli::resolve(base, eval_data), cfg, parse_splits(eval_split), eval_subsets, csv,
                          std::cout);
        } else if (*report) {
            std::vector<fs::path> dirs;
            for (const auto& r : report_runs) dirs.push_back(cli::resolve(base, r));
            const auto split = parse_split(report_split);
            if (!split) throw UsageError("unknown split '" + report_split + "'");
            const std::string text = cli::cmd_report(dirs, *split);
            std::cout << text;
            if (!report_out.empty()) write_text_file(cli::resolve(base, report_out), text);
        } else if (*grad) {
            if (gc.instances < 1) throw UsageError("--instances must be positive");
            const auto r = cli::cmd_gradcheck(gc, std::cout);
            if (!r.passed) return static_cast<int>(ExitCode::numerical);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::validation);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::validation);
    }
    return 0;
}

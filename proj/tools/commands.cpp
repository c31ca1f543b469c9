#include "commands.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "chronoqa/config.hpp"
#include "chronoqa/corpus_builder.hpp"
#include "chronoqa/corpus_io.hpp"
#include "chronoqa/errors.hpp"
#include "chronoqa/rng.hpp"

namespace chronoqa::cli {
namespace {

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string signed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.2f", v);
    return buf;
}

struct RunSummary {
    std::string label;
    std::string corpus_digest;
    std::vector<ReportRow> rows;
    int k = 0;
};

RunSummary read_run(const fs::path& dir) {
    const auto meta = nlohmann::json::parse(read_text_file(dir / "run.json"), nullptr, false);
    if (meta.is_discarded() || !meta.is_object() || !meta.contains("arm") || !meta.contains("corpus_digest")) {
        throw ValidationError((dir / "run.json").string() + " is not a run description");
    }
    if (!fs::exists(dir / "report.csv")) throw ValidationError(dir.string() + " has no report.csv (run incomplete)");
    RunSummary r;
    r.label = meta["arm"].get<std::string>();
    r.corpus_digest = meta["corpus_digest"].get<std::string>();
    r.rows = parse_report_csv(read_text_file(dir / "report.csv"));
    for (const auto& row : r.rows) r.k = std::max(r.k, row.stage);
    return r;
}

}  // namespace

fs::path resolve(const fs::path& workdir, const fs::path& p) { return p.is_absolute() ? p : workdir / p; }

ExperimentConfig load_config(const std::optional<fs::path>& config_file,
                             const std::map<std::string, std::string>& overrides) {
    nlohmann::json doc = nlohmann::json::object();
    if (config_file) {
        doc = nlohmann::json::parse(read_text_file(*config_file), nullptr, false);
        if (doc.is_discarded()) throw ValidationError(config_file->string() + " is not valid JSON");
    }
    apply_environment(doc);
    for (const auto& [key, value] : overrides) apply_override(doc, key, value);
    return config_from_json(doc);
}

Dataset load_dataset(const fs::path& dir, const ExperimentConfig& cfg) {
    Dataset d;
    d.corpus = ingest_corpus(dir / "contexts.jsonl", dir / "questions.jsonl",
                             ValidationOptions{cfg.corpus.now_year, cfg.corpus.boundaries});
    const auto triplet_path = dir / "triplets.jsonl";
    if (fs::exists(triplet_path)) d.triplets = parse_triplets_jsonl(read_text_file(triplet_path));
    std::set<std::string> known;
    for (const auto& q : d.corpus.questions) known.insert(q.question_id);
    for (const auto& t : d.triplets) {
        if (known.count(t.question_id) == 0) {
            throw ValidationError("triplets.jsonl references unknown question " + t.question_id);
        }
    }
    return d;
}

void cmd_build(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    const Corpus corpus = synthesize_corpus(cfg.corpus);
    const auto triplets = build_triplets(corpus, cfg.seed(), cfg.corpus.now_year);
    const auto stats = compute_stats(corpus, cfg.corpus.num_subsets);

    fs::create_directories(out_dir);
    write_text_file(out_dir / "contexts.jsonl", contexts_to_jsonl(corpus.contexts));
    write_text_file(out_dir / "questions.jsonl", questions_to_jsonl(corpus.questions));
    write_text_file(out_dir / "triplets.jsonl", triplets_to_jsonl(triplets));
    write_text_file(out_dir / "stats.md", render_stats_markdown(stats, cfg.corpus.boundaries));
    write_text_file(out_dir / "config.json", config_to_json(cfg).dump(2) + "\n");
    log << "wrote " << corpus.contexts.size() << " contexts, " << corpus.questions.size() << " questions, "
        << triplets.size() << " triplets to " << out_dir.string() << "\n";
}

fs::path cmd_train(const ExperimentConfig& cfg, const fs::path& data_dir, const fs::path& runs_dir,
                   const TrainOptions& options, std::ostream& log) {
    const Dataset data = load_dataset(data_dir, cfg);
    const std::string digest = corpus_digest(data.corpus, data.triplets);
    const std::string run_id = hex64(fnv1a64(canonical_config(cfg) + "\n" + digest));
    const fs::path run_dir = runs_dir / run_id;

    RunOptions run;
    run.run_dir = run_dir;
    run.resume = options.resume;
    run.stop_after_stage = options.stop_after_stage;
    run.progress = [&](const EpochLoss& l) {
        log << "stage " << l.stage << " epoch " << l.epoch << "/" << cfg.training.epochs << ": " << l.steps
            << " steps, loss " << fixed2(l.total) << " (predict " << fixed2(l.l_predict) << ", similar "
            << fixed2(l.l_similar) << ", triple " << fixed2(l.l_triple) << ")\n";
        log.flush();
    };
    run.log = [&](const std::string& msg) { log << msg << "\n"; };
    log << "run " << run_id << " (" << to_string(cfg.arm) << ") in " << run_dir.string() << "\n";
    const auto result = run_experiment(cfg, data.corpus, data.triplets, run);
    if (result.stages_completed == cfg.corpus.num_subsets) {
        for (const auto& t : forgetting_trajectory(result.rows, Split::test)) {
            log << "subset " << t.subset << " test F1 forgetting " << fixed2(t.forgetting) << "\n";
        }
    } else {
        log << "stopped after stage " << result.stages_completed << "; rerun with --resume to continue\n";
    }
    return run_dir;
}

std::vector<ReportRow> cmd_eval(const fs::path& checkpoint, const fs::path& data_dir, const ExperimentConfig& cfg,
                                const std::vector<Split>& splits, const std::vector<int>& subsets,
                                const std::optional<fs::path>& csv, std::ostream& out) {
    const StageCheckpoint ckpt = load_checkpoint(checkpoint);
    const Dataset data = load_dataset(data_dir, cfg);
    if (ckpt.params.dim() == 0) throw ValidationError("checkpoint holds no parameters");
    const EncodedCorpus encoded(data.corpus, data.triplets, ckpt.vocab, cfg.corpus.now_year);

    std::vector<ReportRow> rows;
    for (Split s : splits) {
        auto r = evaluate_stage(ckpt, data.corpus, encoded, s, subsets);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    out << "| Stage | Subset | Split | N | EM | F1 |\n|---:|---:|---|---:|---:|---:|\n";
    for (const auto& r : rows) {
        out << "| M_" << r.stage << " | " << r.subset << " | " << to_string(r.split) << " | " << r.n << " | "
            << fixed2(r.em) << " | " << fixed2(r.f1) << " |\n";
    }
    if (csv) {
        std::string text = "stage,subset,split,n,em,f1\n";
        for (const auto& r : rows) {
            char buf[96];
            std::snprintf(buf, sizeof buf, ",%zu,%.17g,%.17g\n", r.n, r.em, r.f1);
            text += std::to_string(r.stage) + ',' + std::to_string(r.subset) + ',' + std::string(to_string(r.split)) +
                    buf;
        }
        write_text_file(*csv, text);
    }
    return rows;
}

std::string cmd_report(const std::vector<fs::path>& run_dirs, Split split) {
    if (run_dirs.empty()) throw UsageError("report needs at least one run directory");
    std::vector<RunSummary> runs;
    for (const auto& d : run_dirs) runs.push_back(read_run(d));
    for (const auto& r : runs) {
        if (r.corpus_digest != runs.front().corpus_digest) {
            throw ValidationError("incompatible corpora: " + run_dirs.front().string() + " used corpus " +
                                  runs.front().corpus_digest + ", " + r.label + " used " + r.corpus_digest);
        }
        if (r.k != runs.front().k) throw ValidationError("runs differ in their number of stages");
    }
    std::map<std::string, int> seen;
    for (auto& r : runs) {
        if (++seen[r.label] > 1) r.label += " #" + std::to_string(seen[r.label]);
    }

    const int k = runs.front().k;
    auto final_cells = [&](const RunSummary& r) {
        std::vector<std::pair<double, double>> cells(static_cast<std::size_t>(k), {0.0, 0.0});
        for (const auto& row : r.rows) {
            if (row.split == split && row.stage == k) cells[static_cast<std::size_t>(row.subset - 1)] = {row.em, row.f1};
        }
        return cells;
    };
    auto header = [&](std::ostringstream& out) {
        out << "| Arm |";
        for (int j = 1; j <= k; ++j) out << " Subset" << j << " EM | Subset" << j << " F1 |";
        out << " Avg EM | Avg F1 |\n|---|";
        for (int j = 0; j <= k; ++j) out << "---:|---:|";
        out << '\n';
    };

    std::ostringstream out;
    out << "## Final stage M_" << k << ", " << to_string(split) << " split\n\n";
    header(out);
    std::vector<std::vector<std::pair<double, double>>> finals;
    for (const auto& r : runs) {
        finals.push_back(final_cells(r));
        double em = 0.0;
        double f1 = 0.0;
        out << "| " << r.label << " |";
        for (const auto& [e, f] : finals.back()) {
            out << ' ' << fixed2(e) << " | " << fixed2(f) << " |";
            em += e / k;
            f1 += f / k;
        }
        out << ' ' << fixed2(em) << " | " << fixed2(f1) << " |\n";
    }
    if (runs.size() > 1) {
        out << "\n## Difference to " << runs.front().label << "\n\n";
        header(out);
        for (std::size_t i = 1; i < runs.size(); ++i) {
            double em = 0.0;
            double f1 = 0.0;
            out << "| " << runs[i].label << " |";
            for (std::size_t j = 0; j < finals[i].size(); ++j) {
                const double de = finals[i][j].first - finals[0][j].first;
                const double df = finals[i][j].second - finals[0][j].second;
                out << ' ' << signed2(de) << " | " << signed2(df) << " |";
                em += de / k;
                f1 += df / k;
            }
            out << ' ' << signed2(em) << " | " << signed2(f1) << " |\n";
        }
    }

    out << "\n## Forgetting trajectories (" << to_string(split) << " F1)\n\n| Arm | Subset |";
    for (int i = 1; i <= k; ++i) out << " M_" << i << " |";
    out << " Forgetting |\n|---|---:|";
    for (int i = 0; i <= k; ++i) out << "---:|";
    out << '\n';
    for (const auto& r : runs) {
        for (const auto& t : forgetting_trajectory(r.rows, split)) {
            out << "| " << r.label << " | " << t.subset << " |";
            for (int i = 1; i < t.subset; ++i) out << " |";
            for (double v : t.series) out << ' ' << fixed2(v) << " |";
            out << ' ' << fixed2(t.forgetting) << " |\n";
        }
    }
    return out.str();
}

oracle::GradcheckResult cmd_gradcheck(const oracle::GradcheckOptions& options, std::ostream& out) {
    const auto r = oracle::run_gradcheck(options);
    char buf[160];
    std::snprintf(buf, sizeof buf, "gradcheck: %d instances (%d redrawn near kinks), max relative error %.3e: %s\n",
                  r.instances, r.resampled, r.max_relative_error, r.passed ? "pass" : "FAIL");
    out << buf;
    return r;
}

}  // namespace chronoqa::cli

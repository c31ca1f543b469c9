#include "chronoqa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "chronoqa/config.hpp"
#include "chronoqa/corpus_io.hpp"
#include "chronoqa/errors.hpp"
#include "chronoqa/metrics.hpp"

namespace chronoqa {
namespace {

constexpr std::array<std::string_view, 6> kArmNames = {"baseline", "tmr_only", "tcl_only",
                                                       "full",     "plain_mr", "tmr_no_harddrop"};

std::string full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string two_decimals(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

ReportRow score_rows(const std::vector<const Question*>& questions,
                     const std::map<std::string, std::string, std::less<>>& predictions, int stage, int subset,
                     Split split) {
    ReportRow row{stage, subset, split, 0.0, 0.0, questions.size()};
    if (questions.empty()) return row;
    double em = 0.0;
    double f1 = 0.0;
    for (const Question* q : questions) {
        const auto it = predictions.find(q->question_id);
        const std::string_view pred = it == predictions.end() ? std::string_view() : std::string_view(it->second);
        em += exact_match(pred, q->answer);
        f1 += token_f1(pred, q->answer);
    }
    const double n = static_cast<double>(questions.size());
    row.em = 100.0 * em / n;
    row.f1 = 100.0 * f1 / n;
    return row;
}

bool row_order(const ReportRow& a, const ReportRow& b) {
    if (a.split != b.split) return a.split < b.split;
    if (a.stage != b.stage) return a.stage < b.stage;
    return a.subset < b.subset;
}

std::vector<EpochLoss> parse_loss_trace(std::string_view text, const std::string& source) {
    std::vector<EpochLoss> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 7) throw ParseError(source, lineno, "expected 7 columns");
        try {
            out.push_back({std::stoi(f[0]), std::stoi(f[1]), static_cast<std::size_t>(std::stoull(f[2])),
                           std::stod(f[3]), std::stod(f[4]), std::stod(f[5]), std::stod(f[6])});
        } catch (const std::exception&) {
            throw ParseError(source, lineno, "malformed number");
        }
    }
    return out;
}

std::filesystem::path stage_dir(const std::filesystem::path& run_dir, int k) {
    return run_dir / ("stage_" + std::to_string(k));
}

}  // namespace

std::string_view to_string(Arm a) { return kArmNames[static_cast<std::size_t>(a)]; }

std::optional<Arm> parse_arm(std::string_view s) {
    for (std::size_t i = 0; i < kArmNames.size(); ++i) {
        if (kArmNames[i] == s) return static_cast<Arm>(i);
    }
    return std::nullopt;
}

void TrainingConfig::validate() const {
    if (epochs < 0) throw ValidationError("epochs must be non-negative");
    if (batch_size < 1) throw ValidationError("batch_size must be at least 1");
    if (dim < 1) throw ValidationError("dim must be at least 1");
    if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) throw ValidationError("init_scale must be non-negative");
    if (!(adamw.learning_rate > 0.0)) throw ValidationError("lr must be positive");
    if (!(adamw.beta1 >= 0.0 && adamw.beta1 < 1.0) || !(adamw.beta2 >= 0.0 && adamw.beta2 < 1.0)) {
        throw ValidationError("beta1 and beta2 must lie in [0, 1)");
    }
    if (!(adamw.epsilon > 0.0)) throw ValidationError("eps must be positive");
    if (!(adamw.weight_decay >= 0.0)) throw ValidationError("weight_decay must be non-negative");
}

void ExperimentConfig::validate() const {
    corpus.validate();
    loss.validate();
    replay.validate();
    training.validate();
}

ArmSettings resolve_arm(const ExperimentConfig& cfg) {
    ArmSettings s{cfg.loss, cfg.replay};
    auto no_tcl = [&] {
        s.loss.beta = 0.0;
        s.loss.gamma = 0.0;
    };
    switch (cfg.arm) {
        case Arm::baseline:
            no_tcl();
            s.replay.mode = ReplayMode::none;
            break;
        case Arm::tmr_only:
            no_tcl();
            s.replay.mode = ReplayMode::temporal;
            break;
        case Arm::tcl_only: s.replay.mode = ReplayMode::none; break;
        case Arm::full: s.replay.mode = ReplayMode::temporal; break;
        case Arm::plain_mr:
            no_tcl();
            s.replay.mode = ReplayMode::uniform_subset;
            break;
        case Arm::tmr_no_harddrop:
            no_tcl();
            s.replay.mode = ReplayMode::temporal;
            s.replay.mu = 0.0;
            break;
    }
    return s;
}

EncodedCorpus::EncodedCorpus(const Corpus& corpus, const std::vector<TripletRecord>& triplets,
                             const Vocabulary& vocab, Year now_year) {
    std::map<std::string, ContextEncoding, std::less<>> contexts;
    for (const auto& c : corpus.contexts) contexts.emplace(c.context_id, encode_context(c, vocab));
    std::map<std::string, const TripletRecord*, std::less<>> by_question;
    for (const auto& t : triplets) by_question.emplace(t.question_id, &t);

    for (const auto& q : corpus.questions) {
        const auto ctx = contexts.find(q.context_id);
        if (ctx == contexts.end()) {
            throw ValidationError("question " + q.question_id + " references unknown context " + q.context_id);
        }
        Sample s;
        s.original = make_input(ctx->second, q.text, q.anchor_year, vocab, now_year);
        const auto gold = candidate_index(s.original, q.answer);
        if (!gold) {
            throw ValidationError("answer of question " + q.question_id + " is not a candidate of its context");
        }
        s.gold = *gold;
        if (const auto t = by_question.find(q.question_id); t != by_question.end()) {
            s.similar = make_input(ctx->second, t->second->similar, q.anchor_year, vocab, now_year);
            s.contrastive =
                make_input(ctx->second, t->second->contrastive, t->second->contrastive_anchor, vocab, now_year);
        }
        samples_.emplace(q.question_id, std::move(s));
    }
}

const EncodedCorpus::Sample& EncodedCorpus::sample(std::string_view question_id) const {
    const auto it = samples_.find(question_id);
    if (it == samples_.end()) throw ValidationError("no encoded sample for question " + std::string(question_id));
    return it->second;
}

StageResult run_stage(int stage, const StageCheckpoint& previous, const std::vector<std::vector<Question>>& subsets,
                      const EncodedCorpus& encoded, const ExperimentConfig& cfg, const ProgressFn& progress) {
    if (stage < 1 || static_cast<std::size_t>(stage) > subsets.size()) {
        throw ValidationError("stage " + std::to_string(stage) + " outside 1.." + std::to_string(subsets.size()));
    }
    if (previous.stage != stage - 1) {
        throw ValidationError("stage " + std::to_string(stage) + " needs the stage " + std::to_string(stage - 1) +
                              " checkpoint, got stage " + std::to_string(previous.stage));
    }
    const ArmSettings arm = resolve_arm(cfg);
    const std::uint64_t seed = cfg.seed();

    StageResult res;
    res.checkpoint = previous;
    res.checkpoint.stage = stage;

    const auto& current = subsets[static_cast<std::size_t>(stage - 1)];
    const std::span<const std::vector<Question>> earlier(subsets.data(), static_cast<std::size_t>(stage - 1));
    const AnswerFn answer = [&](const Question& q) { return predict(encoded.sample(q.question_id).original, previous.params); };
    res.training_set = build_stage_training_set(stage, current, earlier, answer, arm.replay, seed);

    const std::unordered_set<std::string> distractors(res.training_set.distractor_ids.begin(),
                                                      res.training_set.distractor_ids.end());
    const bool tcl = arm.loss.beta > 0.0 || arm.loss.gamma > 0.0;
    const auto& questions = res.training_set.questions;
    ModelParams& params = res.checkpoint.params;
    AdamWState& opt = res.checkpoint.optimizer;
    ModelParams grads(params.vocab_size(), params.dim());
    const auto batch = static_cast<std::size_t>(cfg.training.batch_size);

    for (int epoch = 1; epoch <= cfg.training.epochs; ++epoch) {
        std::vector<std::size_t> order(questions.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle(seed, "shuffle", {static_cast<std::uint64_t>(stage), static_cast<std::uint64_t>(epoch)});
        std::shuffle(order.begin(), order.end(), shuffle.engine());

        EpochLoss trace{stage, epoch, questions.size(), 0.0, 0.0, 0.0, 0.0};
        std::size_t in_batch = 0;
        for (std::size_t step = 0; step < order.size(); ++step) {
            const Question& q = questions[order[step]];
            const auto& s = encoded.sample(q.question_id);
            const bool full = tcl && (cfg.training.distractor_full_loss || distractors.count(q.question_id) == 0);
            const EncodedInput* sim = full && s.similar ? &*s.similar : nullptr;
            const EncodedInput* con = full && s.contrastive ? &*s.contrastive : nullptr;

            const LossBreakdown b = tcl_step_loss(s.original, sim, con, s.gold, params, arm.loss, &grads);
            if (!std::isfinite(b.total)) {
                throw NumericalError("non-finite loss at stage " + std::to_string(stage) + ", epoch " +
                                     std::to_string(epoch) + ", step " + std::to_string(step + 1) + " (question " +
                                     q.question_id + ")");
            }
            trace.l_predict += b.l_predict;
            trace.l_similar += b.l_similar;
            trace.l_triple += b.l_triple;
            trace.total += b.total;

            if (++in_batch == batch || step + 1 == order.size()) {
                if (in_batch > 1) {
                    const double scale = 1.0 / static_cast<double>(in_batch);
                    for (double& g : grads.values()) g *= scale;
                }
                try {
                    apply_update(params.values(), grads.values(), opt, cfg.training.adamw);
                } catch (const NumericalError& e) {
                    throw NumericalError(std::string(e.what()) + " at stage " + std::to_string(stage) + ", epoch " +
                                         std::to_string(epoch) + ", step " + std::to_string(step + 1));
                }
                grads.set_zero();
                in_batch = 0;
            }
        }
        if (!questions.empty()) {
            const double n = static_cast<double>(questions.size());
            trace.l_predict /= n;
            trace.l_similar /= n;
            trace.l_triple /= n;
            trace.total /= n;
        }
        res.losses.push_back(trace);
        if (progress) progress(trace);
    }
    return res;
}

std::vector<ReportRow> score_predictions(const std::vector<Question>& questions,
                                         const std::map<std::string, std::string, std::less<>>& predictions, int stage,
                                         Split split) {
    std::map<int, std::vector<const Question*>> by_subset;
    for (const auto& q : questions) {
        if (q.split == split) by_subset[q.subset].push_back(&q);
    }
    std::vector<ReportRow> rows;
    for (const auto& [subset, qs] : by_subset) rows.push_back(score_rows(qs, predictions, stage, subset, split));
    return rows;
}

std::vector<ReportRow> evaluate_stage(const StageCheckpoint& checkpoint, const Corpus& corpus,
                                      const EncodedCorpus& encoded, Split split, const std::vector<int>& subsets,
                                      std::vector<Prediction>* predictions) {
    std::vector<int> wanted = subsets;
    if (wanted.empty()) {
        for (int j = 1; j <= checkpoint.stage; ++j) wanted.push_back(j);
    }
    for (int j : wanted) {
        if (j < 1 || j > checkpoint.stage) {
            throw ValidationError("cannot evaluate subset " + std::to_string(j) + " with the stage " +
                                  std::to_string(checkpoint.stage) + " checkpoint");
        }
    }
    std::map<int, std::vector<const Question*>> by_subset;
    for (int j : wanted) by_subset[j];
    for (const auto& q : corpus.questions) {
        if (q.split != split) continue;
        const auto it = by_subset.find(q.subset);
        if (it != by_subset.end()) it->second.push_back(&q);
    }

    std::vector<ReportRow> rows;
    for (auto& [subset, qs] : by_subset) {
        std::sort(qs.begin(), qs.end(), [](const Question* a, const Question* b) { return a->question_id < b->question_id; });
        std::map<std::string, std::string, std::less<>> preds;
        for (const Question* q : qs) {
            auto p = predict(encoded.sample(q->question_id).original, checkpoint.params);
            if (predictions != nullptr) predictions->push_back({q->question_id, p});
            preds.emplace(q->question_id, std::move(p));
        }
        rows.push_back(score_rows(qs, preds, checkpoint.stage, subset, split));
    }
    return rows;
}

double forgetting(const std::vector<double>& series) {
    if (series.empty()) return 0.0;
    return *std::max_element(series.begin(), series.end()) - series.back();
}

std::vector<Trajectory> forgetting_trajectory(const std::vector<ReportRow>& rows, Split split) {
    std::map<std::pair<int, int>, double> f1;
    int k_max = 0;
    for (const auto& r : rows) {
        if (r.split != split) continue;
        f1[{r.stage, r.subset}] = r.f1;
        k_max = std::max(k_max, r.stage);
    }
    std::vector<Trajectory> out;
    for (int j = 1; j <= k_max; ++j) {
        Trajectory t;
        t.subset = j;
        for (int i = j; i <= k_max; ++i) {
            const auto it = f1.find({i, j});
            if (it == f1.end()) {
                throw ValidationError("report lacks stage " + std::to_string(i) + ", subset " + std::to_string(j) +
                                      " for split " + std::string(to_string(split)));
            }
            t.series.push_back(it->second);
        }
        t.forgetting = forgetting(t.series);
        out.push_back(std::move(t));
    }
    return out;
}

std::string report_to_csv(std::string_view arm, const std::vector<ReportRow>& rows) {
    auto sorted = rows;
    std::sort(sorted.begin(), sorted.end(), row_order);
    std::string out = "arm,stage,subset,split,em,f1\n";
    for (const auto& r : sorted) {
        out += std::string(arm) + ',' + std::to_string(r.stage) + ',' + std::to_string(r.subset) + ',' +
               std::string(to_string(r.split)) + ',' + full_precision(r.em) + ',' + full_precision(r.f1) + '\n';
    }
    return out;
}

std::vector<ReportRow> parse_report_csv(std::string_view text, std::string* arm) {
    std::vector<ReportRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            if (line != "arm,stage,subset,split,em,f1") throw ParseError("report.csv", 1, "unexpected header");
            continue;
        }
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6) throw ParseError("report.csv", lineno, "expected 6 columns");
        const auto split = parse_split(f[3]);
        if (!split) throw ParseError("report.csv", lineno, "unknown split '" + f[3] + "'");
        ReportRow r;
        try {
            r = {std::stoi(f[1]), std::stoi(f[2]), *split, std::stod(f[4]), std::stod(f[5]), 0};
        } catch (const std::exception&) {
            throw ParseError("report.csv", lineno, "malformed number");
        }
        if (arm != nullptr) *arm = f[0];
        rows.push_back(r);
    }
    return rows;
}

std::string render_report_markdown(std::string_view arm, const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    out << "# " << arm << "\n";
    for (Split split : {Split::dev, Split::test}) {
        std::map<std::pair<int, int>, const ReportRow*> cell;
        int k = 0;
        for (const auto& r : rows) {
            if (r.split != split) continue;
            cell[{r.stage, r.subset}] = &r;
            k = std::max({k, r.stage, r.subset});
        }
        if (k == 0) continue;
        out << "\n## " << to_string(split) << "\n\n| Model |";
        for (int j = 1; j <= k; ++j) out << " Subset" << j << " EM | Subset" << j << " F1 |";
        out << "\n|---|";
        for (int j = 1; j <= k; ++j) out << "---:|---:|";
        out << '\n';
        for (int i = 1; i <= k; ++i) {
            out << "| M_" << i << " |";
            for (int j = 1; j <= k; ++j) {
                const auto it = cell.find({i, j});
                if (it == cell.end()) {
                    out << " | |";
                } else {
                    out << ' ' << two_decimals(it->second->em) << " | " << two_decimals(it->second->f1) << " |";
                }
            }
            out << '\n';
        }
        bool complete = true;
        for (int j = 1; j <= k && complete; ++j) {
            for (int i = j; i <= k; ++i) complete = complete && cell.count({i, j}) > 0;
        }
        if (!complete) continue;
        out << "\nForgetting (F1, peak minus final):";
        for (const auto& t : forgetting_trajectory(rows, split)) {
            out << " Subset" << t.subset << ' ' << two_decimals(t.forgetting) << ';';
        }
        out << '\n';
    }
    return out.str();
}

std::string loss_trace_to_csv(const std::vector<EpochLoss>& losses) {
    std::string out = "stage,epoch,steps,l_predict,l_similar,l_triple,total\n";
    for (const auto& l : losses) {
        out += std::to_string(l.stage) + ',' + std::to_string(l.epoch) + ',' + std::to_string(l.steps) + ',' +
               full_precision(l.l_predict) + ',' + full_precision(l.l_similar) + ',' + full_precision(l.l_triple) +
               ',' + full_precision(l.total) + '\n';
    }
    return out;
}

std::string corpus_digest(const Corpus& corpus, const std::vector<TripletRecord>& triplets) {
    std::uint64_t h = fnv1a64(contexts_to_jsonl(corpus.contexts));
    h = fnv1a64(questions_to_jsonl(corpus.questions), h);
    h = fnv1a64(triplets_to_jsonl(triplets), h);
    return hex64(h);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Corpus& corpus,
                                const std::vector<TripletRecord>& triplets, const RunOptions& options) {
    cfg.validate();
    const auto log = [&](const std::string& msg) {
        if (options.log) options.log(msg);
    };
    const std::string hash = config_hash(cfg);
    const int k_max = cfg.corpus.num_subsets;
    const Year now = cfg.corpus.now_year;

    std::vector<std::vector<Question>> subsets(static_cast<std::size_t>(k_max));
    for (const auto& q : corpus.questions) {
        if (q.subset < 1 || q.subset > k_max) {
            throw ValidationError("question " + q.question_id + " belongs to subset " + std::to_string(q.subset) +
                                  " but num_subsets = " + std::to_string(k_max));
        }
        if (q.split == Split::train) subsets[static_cast<std::size_t>(q.subset - 1)].push_back(q);
    }
    for (auto& s : subsets) {
        std::sort(s.begin(), s.end(), [](const Question& a, const Question& b) { return a.question_id < b.question_id; });
    }

    const Vocabulary vocab = Vocabulary::from_corpus(corpus, cfg.training.oov_buckets);
    const EncodedCorpus encoded(corpus, triplets, vocab, now);

    StageCheckpoint current;
    current.stage = 0;
    current.seed = cfg.seed();
    current.config_hash = hash;
    current.vocab = vocab;
    Rng init(cfg.seed(), "init");
    current.params = ModelParams::random(vocab.size(), cfg.training.dim, cfg.training.init_scale, init);

    ExperimentResult result;
    const auto evaluate_into = [&](const StageCheckpoint& ckpt) {
        for (Split split : {Split::dev, Split::test}) {
            auto rows = evaluate_stage(ckpt, corpus, encoded, split);
            result.rows.insert(result.rows.end(), rows.begin(), rows.end());
        }
    };

    int start = 1;
    if (options.run_dir) {
        std::filesystem::create_directories(*options.run_dir);
        write_text_file(*options.run_dir / "config.json", config_to_json(cfg).dump(2) + "\n");
        nlohmann::ordered_json meta;
        meta["config_hash"] = hash;
        meta["corpus_digest"] = corpus_digest(corpus, triplets);
        meta["arm"] = std::string(to_string(cfg.arm));
        write_text_file(*options.run_dir / "run.json", meta.dump(2) + "\n");

        if (options.resume) {
            while (start <= k_max && std::filesystem::exists(stage_dir(*options.run_dir, start) / "checkpoint")) {
                const auto dir = stage_dir(*options.run_dir, start);
                StageCheckpoint ckpt = load_checkpoint(dir / "checkpoint");
                if (ckpt.config_hash != hash || ckpt.stage != start) {
                    throw ValidationError(dir.string() + " was produced by a different configuration");
                }
                evaluate_into(ckpt);
                const auto losses = parse_loss_trace(read_text_file(dir / "loss_trace.csv"), (dir / "loss_trace.csv").string());
                result.losses.insert(result.losses.end(), losses.begin(), losses.end());
                current = std::move(ckpt);
                result.stages_completed = start;
                log("resumed stage " + std::to_string(start) + " from " + dir.string());
                ++start;
            }
        }
    }

    for (int k = start; k <= k_max; ++k) {
        StageResult stage = run_stage(k, current, subsets, encoded, cfg, options.progress);
        current = std::move(stage.checkpoint);
        evaluate_into(current);
        result.losses.insert(result.losses.end(), stage.losses.begin(), stage.losses.end());
        result.stages_completed = k;
        if (options.run_dir) {
            const auto dir = stage_dir(*options.run_dir, k);
            save_checkpoint(dir / "checkpoint", current);
            write_text_file(dir / "loss_trace.csv", loss_trace_to_csv(stage.losses));
            if (k >= 2) {
                write_text_file(*options.run_dir / ("replay_stage_" + std::to_string(k) + ".jsonl"),
                                manifest_to_jsonl(stage.training_set.manifest));
            }
        }
        log("stage " + std::to_string(k) + " done: " + std::to_string(stage.training_set.questions.size()) +
            " training samples");
        if (options.stop_after_stage && k >= *options.stop_after_stage) break;
    }

    std::sort(result.rows.begin(), result.rows.end(), row_order);
    result.final_checkpoint = current;
    if (options.run_dir && result.stages_completed == k_max) {
        const std::string arm(to_string(cfg.arm));
        write_text_file(*options.run_dir / "report.csv", report_to_csv(arm, result.rows));
        write_text_file(*options.run_dir / "report.md", render_report_markdown(arm, result.rows));
        write_text_file(*options.run_dir / "loss_trace.csv", loss_trace_to_csv(result.losses));
    }
    return result;
}

}  // namespace chronoqa

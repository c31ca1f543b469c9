#pragma once

// Sequential continual-learning protocol: train M_1..M_K one subset at a
// time, evaluate each stage on the current and all earlier subsets.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chronoqa/corpus.hpp"
#include "chronoqa/losses.hpp"
#include "chronoqa/optimizer.hpp"
#include "chronoqa/qa_model.hpp"
#include "chronoqa/question_transform.hpp"
#include "chronoqa/replay.hpp"
#include "chronoqa/vocabulary.hpp"

namespace chronoqa {

enum class Arm { baseline, tmr_only, tcl_only, full, plain_mr, tmr_no_harddrop };

std::string_view to_string(Arm a);
std::optional<Arm> parse_arm(std::string_view s);

struct TrainingConfig {
    int epochs = 8;
    int batch_size = 1;
    AdamWConfig adamw;
    std::size_t dim = 32;
    std::size_t oov_buckets = 256;
    double init_scale = 0.1;
    /// Distractors train on the full objective; false limits them to L_predict.
    bool distractor_full_loss = true;

    void validate() const;
};

struct ExperimentConfig {
    Arm arm = Arm::full;
    CorpusSpec corpus;
    LossConfig loss;
    ReplayConfig replay;
    TrainingConfig training;

    /// Root seed of every stream (shared with the corpus builder).
    std::uint64_t seed() const noexcept { return corpus.seed; }
    void validate() const;
};

/// Loss and replay settings after the arm switched components off.
struct ArmSettings {
    LossConfig loss;
    ReplayConfig replay;
};
ArmSettings resolve_arm(const ExperimentConfig& cfg);

/// Encoded inputs for every question, with triplet inputs where available.
class EncodedCorpus {
public:
    EncodedCorpus(const Corpus& corpus, const std::vector<TripletRecord>& triplets, const Vocabulary& vocab,
                  Year now_year);

    struct Sample {
        EncodedInput original;
        std::optional<EncodedInput> similar;
        std::optional<EncodedInput> contrastive;
        std::size_t gold = 0;
    };

    const Sample& sample(std::string_view question_id) const;

private:
    std::map<std::string, Sample, std::less<>> samples_;
};

struct StageCheckpoint {
    int stage = 0;  ///< 0 = fresh initialization
    std::uint64_t seed = 0;
    std::string config_hash;
    Vocabulary vocab;
    ModelParams params;
    AdamWState optimizer;
};

/// Versioned little-endian binary layout; see checkpoint.cpp.
void save_checkpoint(const std::filesystem::path& path, const StageCheckpoint& ckpt);
StageCheckpoint load_checkpoint(const std::filesystem::path& path);

struct EpochLoss {
    int stage = 0;
    int epoch = 0;
    std::size_t steps = 0;
    double l_predict = 0.0;
    double l_similar = 0.0;
    double l_triple = 0.0;
    double total = 0.0;
};

struct StageResult {
    StageCheckpoint checkpoint;
    std::vector<EpochLoss> losses;
    StageTrainingSet training_set;
};

using ProgressFn = std::function<void(const EpochLoss&)>;

/// Train stage `stage` starting from `previous`. `subsets[j]` holds the train
/// questions of subset j+1. Throws NumericalError naming the step on a
/// non-finite loss.
StageResult run_stage(int stage, const StageCheckpoint& previous, const std::vector<std::vector<Question>>& subsets,
                      const EncodedCorpus& encoded, const ExperimentConfig& cfg, const ProgressFn& progress = {});

struct ReportRow {
    int stage = 0;
    int subset = 0;
    Split split = Split::test;
    double em = 0.0;  ///< percent, full precision
    double f1 = 0.0;
    std::size_t n = 0;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct Prediction {
    std::string question_id;
    std::string prediction;
};

/// EM/F1 of `checkpoint` on subsets 1..stage for `split`. Throws
/// ValidationError when a requested subset exceeds the checkpoint's stage.
std::vector<ReportRow> evaluate_stage(const StageCheckpoint& checkpoint, const Corpus& corpus,
                                      const EncodedCorpus& encoded, Split split,
                                      const std::vector<int>& subsets = {},
                                      std::vector<Prediction>* predictions = nullptr);

/// Metric rows for a fixed set of predictions (questions without a
/// prediction score as empty answers).
std::vector<ReportRow> score_predictions(const std::vector<Question>& questions,
                                         const std::map<std::string, std::string, std::less<>>& predictions, int stage,
                                         Split split);

struct Trajectory {
    int subset = 0;
    std::vector<double> series;  ///< F1 of M_j..M_K on subset j
    double forgetting = 0.0;     ///< max(series) - series.back()
};

/// Requires a complete lower-triangular report for `split`.
std::vector<Trajectory> forgetting_trajectory(const std::vector<ReportRow>& rows, Split split);
double forgetting(const std::vector<double>& series);

std::string report_to_csv(std::string_view arm, const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_report_csv(std::string_view text, std::string* arm = nullptr);
/// One block per split, a row per stage, EM/F1 per subset.
std::string render_report_markdown(std::string_view arm, const std::vector<ReportRow>& rows);
std::string loss_trace_to_csv(const std::vector<EpochLoss>& losses);

struct RunOptions {
    std::optional<std::filesystem::path> run_dir;
    bool resume = false;
    /// Stop after this stage (simulates an interruption).
    std::optional<int> stop_after_stage;
    ProgressFn progress;
    std::function<void(const std::string&)> log;
};

struct ExperimentResult {
    std::vector<ReportRow> rows;
    std::vector<EpochLoss> losses;
    StageCheckpoint final_checkpoint;
    int stages_completed = 0;
};

/// Digest of the canonical corpus files.
std::string corpus_digest(const Corpus& corpus, const std::vector<TripletRecord>& triplets);

/// Runs every stage, evaluating dev and test after each. With a run
/// directory, checkpoints, replay manifests, the loss trace and the reports
/// are written there; `resume` picks up after the last stored checkpoint.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Corpus& corpus,
                                const std::vector<TripletRecord>& triplets, const RunOptions& options = {});

}  // namespace chronoqa

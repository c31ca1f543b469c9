#pragma once

// Temporal memory replay: assemble the training set of stage i from the
// current subset plus a rehearsal sample of subsets 1..i-1 that excludes the
// hardest samples and injects same-context distractors.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronoqa/corpus.hpp"
#include "chronoqa/rng.hpp"

namespace chronoqa {

enum class HardnessMetric { f1, em };

std::string_view to_string(HardnessMetric m);
std::optional<HardnessMetric> parse_hardness_metric(std::string_view s);

/// How previous-subset data is sampled for replay.
enum class ReplayMode {
    none,            ///< current subset only
    temporal,        ///< hard-sample removal + retain sample + distractors
    uniform_subset,  ///< plain memory replay: retain_rate of each previous subset
};

struct ReplayConfig {
    double mu = 0.10;           ///< fraction of hardest previous samples removed
    double nu = 0.10;           ///< fraction of eligible distractors injected
    double retain_rate = 0.10;  ///< fraction of the non-hard pool replayed
    HardnessMetric hardness_metric = HardnessMetric::f1;
    /// Remove ceil(mu * N_j) per previous subset instead of pooling.
    bool per_subset_hardness = false;
    ReplayMode mode = ReplayMode::temporal;

    void validate() const;
};

struct ScoredSample {
    std::string question_id;
    double score = 0.0;
    int source_subset = 0;

    friend bool operator==(const ScoredSample&, const ScoredSample&) = default;
};

/// Produces the model's answer for a question.
using AnswerFn = std::function<std::string(const Question&)>;

/// ceil(rate * n), robust to representation error in the product.
std::size_t fraction_count(double rate, std::size_t n);

std::vector<ScoredSample> score_previous(const AnswerFn& answer, std::span<const Question> previous,
                                         HardnessMetric metric);

struct HardDropResult {
    std::vector<ScoredSample> retained;
    std::vector<ScoredSample> removed;
};

/// Removes exactly ceil(mu * N) lowest-scoring samples; ties go by
/// question_id ascending. Retained samples keep their input order.
HardDropResult drop_hard(std::span<const ScoredSample> scored, double mu);

/// Previous questions sharing a context with some current question whose
/// answer differs; returns a seeded uniform sample of ceil(nu * |eligible|)
/// in input order.
std::vector<Question> select_distractors(std::span<const Question> previous, std::span<const Question> current,
                                         double nu, Rng& rng);

enum class ReplayRole { current, replayed, dropped, distractor };
std::string_view to_string(ReplayRole r);

struct ReplayManifestEntry {
    std::string question_id;
    ReplayRole role = ReplayRole::current;
    double score = -1.0;  ///< -1 when the sample was not scored
    int source_subset = 0;
};

struct StageTrainingSet {
    std::vector<Question> questions;
    /// Question ids that entered as distractors (a distractor that was also
    /// replayed counts as replayed).
    std::vector<std::string> distractor_ids;
    std::vector<ReplayManifestEntry> manifest;
};

/// `previous[j]` holds the train questions of subset j+1. `seed` and `stage`
/// select the replay stream, so the result is deterministic per stage.
/// Stage 1 returns `current` unchanged.
StageTrainingSet build_stage_training_set(int stage, std::span<const Question> current,
                                          std::span<const std::vector<Question>> previous, const AnswerFn& answer,
                                          const ReplayConfig& cfg, std::uint64_t seed);

/// replay_stage_<i>.jsonl: {"question_id", "role", "score" (number|null), "source_subset"}
std::string manifest_to_jsonl(const std::vector<ReplayManifestEntry>& manifest);

}  // namespace chronoqa

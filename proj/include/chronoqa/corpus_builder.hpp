#pragma once

#include <array>
#include <string>
#include <vector>

#include "chronoqa/corpus.hpp"

namespace chronoqa {

/// Question type implied by the fact covering `anchor` (nullptr when none does).
QuestionType classify_question(const TimelineFact* covering, Year anchor);

/// Realize template `template_id` of `ctx.facts[fact_index].relation` at `anchor`.
/// The answer is resolved against the whole timeline of that relation; an
/// anchor outside every fact yields an unanswerable question. Id, subset and
/// split are left for the caller.
Question generate_question(const Context& ctx, std::size_t fact_index, Year anchor, int template_id,
                           Year now_year);

/// Deterministic synthetic corpus: contexts with per-entity timelines and
/// questions partitioned into `spec.num_subsets` chronological subsets with
/// train/dev/test splits. Throws InfeasibleSpecError when the spec cannot be met.
Corpus synthesize_corpus(const CorpusSpec& spec);

struct CorpusStats {
    int num_subsets = 0;
    /// [subset-1][split]
    std::vector<std::array<int, 3>> by_subset;
    /// [type][split]
    std::array<std::array<int, 3>, 5> by_type{};
    std::array<int, 3> totals{};
    int n_contexts = 0;
};

CorpusStats compute_stats(const Corpus& corpus, int num_subsets);
std::string render_stats_markdown(const CorpusStats& stats, const std::vector<TimeRange>& boundaries);

}  // namespace chronoqa

#pragma once

// Contrastive and similar question generation for temporal contrastive
// training. A contrastive question swaps the temporal anchor so the gold
// answer changes; a similar question rewords the question and keeps both
// the anchor and the answer.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chronoqa/corpus.hpp"
#include "chronoqa/rng.hpp"
#include "chronoqa/templates.hpp"

namespace chronoqa {

enum class SimilarMethod { dataset_paraphrase, token_shuffle };

std::string_view to_string(SimilarMethod m);
std::optional<SimilarMethod> parse_similar_method(std::string_view s);

struct QuestionTriplet {
    Question original;
    std::string similar_text;
    std::string contrastive_text;
    Year contrastive_anchor = 0;
    SimilarMethod similar_method = SimilarMethod::dataset_paraphrase;
};

struct ContrastiveQuestion {
    std::string text;
    Year anchor = 0;
};

struct SimilarQuestion {
    std::string text;
    SimilarMethod method = SimilarMethod::token_shuffle;
};

/// Years in [earliest, now_year] whose answer (for the question's relation)
/// differs from `q.answer`, ascending.
std::vector<Year> answer_changing_years(const Question& q, const Context& ctx, Year earliest, Year now_year);

/// Throws TransformUnavailable when no answer-changing year exists.
ContrastiveQuestion make_contrastive(const Question& q, const Context& ctx, Year earliest, Year now_year, Rng& rng);

/// Paraphrase through an alternative corpus phrasing when one exists,
/// otherwise shuffle the non-temporal whitespace tokens in place.
SimilarQuestion make_similar(const Question& q, const TemplateAvailability& templates, Rng& rng);

/// Shuffle every whitespace token that carries no year, keeping year tokens
/// at their positions. A non-identity permutation is guaranteed whenever at
/// least two movable tokens differ.
std::string shuffle_non_temporal_tokens(std::string_view text, Rng& rng);

/// Whitespace tokens of `text`.
std::vector<std::string> whitespace_tokens(std::string_view text);

struct TripletRecord {
    std::string question_id;
    std::string similar;
    std::string contrastive;
    Year contrastive_anchor = 0;
    SimilarMethod method = SimilarMethod::dataset_paraphrase;

    friend bool operator==(const TripletRecord&, const TripletRecord&) = default;
};

/// Triplets for every train question of the corpus. Each question draws from
/// its own stream (seed, "transform", question_id), so results do not depend
/// on iteration order. Questions whose transform is unavailable are omitted.
std::vector<TripletRecord> build_triplets(const Corpus& corpus, std::uint64_t seed, Year now_year);

/// triplets.jsonl: {"question_id", "similar", "contrastive", "contrastive_anchor", "method"}
std::string triplets_to_jsonl(const std::vector<TripletRecord>& triplets);
std::vector<TripletRecord> parse_triplets_jsonl(std::string_view text, const std::string& source = "triplets.jsonl");

}  // namespace chronoqa

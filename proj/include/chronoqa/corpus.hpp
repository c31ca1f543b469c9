#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronoqa/temporal_text.hpp"

namespace chronoqa {

enum class Relation { position, team, employer, residence, title };
enum class SurfaceForm { explicit_year, duration_commonsense, split_across_sentences, split_across_paragraphs };
enum class QuestionType { easy, commonsense, multi_description, multi_paragraph, unanswerable };
enum class Split { train, dev, test };

inline constexpr std::array<Relation, 5> kAllRelations = {
    Relation::position, Relation::team, Relation::employer, Relation::residence, Relation::title};
inline constexpr std::array<QuestionType, 5> kAllQuestionTypes = {
    QuestionType::easy, QuestionType::commonsense, QuestionType::multi_description,
    QuestionType::multi_paragraph, QuestionType::unanswerable};
inline constexpr std::array<Split, 3> kAllSplits = {Split::train, Split::dev, Split::test};

std::string_view to_string(Relation r);
std::string_view to_string(SurfaceForm s);
std::string_view to_string(QuestionType t);
std::string_view to_string(Split s);

std::optional<Relation> parse_relation(std::string_view s);
std::optional<SurfaceForm> parse_surface_form(std::string_view s);
std::optional<QuestionType> parse_question_type(std::string_view s);
std::optional<Split> parse_split(std::string_view s);

struct TimelineFact {
    Relation relation = Relation::position;
    std::string value;
    TimeRange valid;
    int paragraph_index = 0;
    SurfaceForm surface_form = SurfaceForm::explicit_year;

    friend bool operator==(const TimelineFact&, const TimelineFact&) = default;
};

struct Context {
    std::string context_id;
    std::string entity;
    std::vector<std::string> paragraphs;
    std::vector<TimelineFact> facts;

    friend bool operator==(const Context&, const Context&) = default;
};

struct Question {
    std::string question_id;
    std::string context_id;
    std::string text;
    Year anchor_year = 0;
    QuestionType qtype = QuestionType::easy;
    std::string answer;  ///< empty = unanswerable
    int subset = 1;      ///< 1-based
    Split split = Split::train;

    friend bool operator==(const Question&, const Question&) = default;
};

struct Corpus {
    std::vector<Context> contexts;
    std::vector<Question> questions;

    /// Lookup by id; throws ValidationError when absent.
    const Context& context(std::string_view id) const;
    const Context* find_context(std::string_view id) const;
    /// Rebuilds the id index. Call after mutating `contexts`.
    void reindex();

    /// Earliest fact start year across all contexts (nullopt without facts).
    std::optional<Year> earliest_year() const;

private:
    std::map<std::string, std::size_t, std::less<>> index_;
};

/// Default boundaries: 190-1939, 1940-1976, 1977-1998, 1999-2009, 2010-now.
std::vector<TimeRange> default_boundaries();

/// Parses "190-1939,1940-1976,...,2010-now".
std::vector<TimeRange> parse_boundaries(std::string_view text);
std::string format_boundaries(std::span<const TimeRange> boundaries);

struct CorpusSpec {
    int num_subsets = 5;
    std::vector<TimeRange> boundaries = default_boundaries();
    /// (easy, commonsense, multi_description, multi_paragraph, unanswerable)
    std::array<double, 5> type_mix = {4068.0 / 35014.0, 3252.0 / 35014.0, 6128.0 / 35014.0,
                                      15265.0 / 35014.0, 6301.0 / 35014.0};
    /// (train, dev, test)
    std::array<double, 3> split_mix = {35014.0 / 49846.0, 7424.0 / 49846.0, 7408.0 / 49846.0};
    int n_contexts = 600;
    int n_questions = 3600;
    std::uint64_t seed = 20231019;
    Year now_year = 2023;
    int max_paragraphs = 4;
    /// Synthesized timelines never start before this year.
    Year earliest_timeline_year = 1800;

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;
};

/// 1-based subset index of `y`. Years below the first bound map to 1, years
/// above the last bounded value map to K.
int assign_subset(Year y, std::span<const TimeRange> boundaries);

/// Value of the unique fact of `relation` covering `y`, or "" when none does.
/// OPEN ranges resolve to `now_year`.
std::string answer_at(const Context& ctx, Relation relation, Year y, Year now_year);

/// Relation a question asks about: template match first, then the relation of
/// the fact holding the answer, then the context's only relation.
std::optional<Relation> resolve_relation(const Question& q, const Context& ctx);

}  // namespace chronoqa

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronoqa/corpus.hpp"

namespace chronoqa {

/// A question phrasing with "{E}" (entity) and "{Y}" (anchor year) slots.
struct QuestionTemplate {
    Relation relation;
    std::string_view pattern;
};

struct TemplateMatch {
    Relation relation;
    int template_id;
    std::string entity;
    Year year;
};

/// Built-in template table. Every relation has at least two phrasings.
std::span<const QuestionTemplate> templates_for(Relation relation);

/// Throws ValidationError for an unknown template id.
std::string render_template(Relation relation, int template_id, std::string_view entity, Year year);

/// Inverse of render_template: finds the phrasing that produced `text`.
std::optional<TemplateMatch> match_template(std::string_view text);

/// Template ids actually used by a corpus, per relation. Paraphrases for the
/// similar-question transform are drawn only from phrasings present here.
class TemplateAvailability {
public:
    TemplateAvailability() = default;
    static TemplateAvailability from_questions(std::span<const Question> questions);
    static TemplateAvailability all_builtin();

    void add(Relation relation, int template_id);
    std::vector<int> alternatives(Relation relation, int template_id) const;

private:
    std::vector<std::pair<Relation, int>> used_;
};

}  // namespace chronoqa

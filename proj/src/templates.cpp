#include "chronoqa/templates.hpp"

#include <algorithm>
#include <array>
#include <charconv>

#include "chronoqa/errors.hpp"

namespace chronoqa {
namespace {

constexpr std::array<QuestionTemplate, 3> kPosition = {{
    {Relation::position, "What position did {E} hold in {Y}?"},
    {Relation::position, "{E} took which position in {Y}?"},
    {Relation::position, "Which position did {E} hold in {Y}?"},
}};
constexpr std::array<QuestionTemplate, 3> kTeam = {{
    {Relation::team, "Which team did {E} play for in {Y}?"},
    {Relation::team, "{E} played for which team in {Y}?"},
    {Relation::team, "Which team did the player {E} belong to in {Y}?"},
}};
constexpr std::array<QuestionTemplate, 2> kEmployer = {{
    {Relation::employer, "Which employer did {E} work for in {Y}?"},
    {Relation::employer, "{E} was an employee for whom in {Y}?"},
}};
constexpr std::array<QuestionTemplate, 2> kResidence = {{
    {Relation::residence, "What was the residence of {E} in {Y}?"},
    {Relation::residence, "Where did {E} live in {Y}?"},
}};
constexpr std::array<QuestionTemplate, 2> kTitle = {{
    {Relation::title, "Which title was conferred to {E} in {Y}?"},
    {Relation::title, "{E} held which title in {Y}?"},
}};

constexpr std::string_view kEntitySlot = "{E}";
constexpr std::string_view kYearSlot = "{Y}";

std::optional<TemplateMatch> match_one(std::string_view text, const QuestionTemplate& t, int id) {
    const auto e = t.pattern.find(kEntitySlot);
    const auto y = t.pattern.find(kYearSlot);
    const auto prefix = t.pattern.substr(0, e);
    const auto middle = t.pattern.substr(e + kEntitySlot.size(), y - e - kEntitySlot.size());
    const auto suffix = t.pattern.substr(y + kYearSlot.size());

    if (text.size() < prefix.size() + middle.size() + suffix.size()) return std::nullopt;
    if (!text.starts_with(prefix) || !text.ends_with(suffix)) return std::nullopt;
    const auto body = text.substr(prefix.size(), text.size() - prefix.size() - suffix.size());
    const auto mid = body.rfind(middle);
    if (mid == std::string_view::npos || mid == 0) return std::nullopt;
    const auto entity = body.substr(0, mid);
    const auto year_text = body.substr(mid + middle.size());
    int year = 0;
    auto [ptr, ec] = std::from_chars(year_text.data(), year_text.data() + year_text.size(), year);
    if (ec != std::errc{} || ptr != year_text.data() + year_text.size()) return std::nullopt;
    return TemplateMatch{t.relation, id, std::string(entity), year};
}

}  // namespace

std::span<const QuestionTemplate> templates_for(Relation relation) {
    switch (relation) {
        case Relation::position: return kPosition;
        case Relation::team: return kTeam;
        case Relation::employer: return kEmployer;
        case Relation::residence: return kResidence;
        case Relation::title: return kTitle;
    }
    return {};
}

std::string render_template(Relation relation, int template_id, std::string_view entity, Year year) {
    const auto table = templates_for(relation);
    if (template_id < 0 || static_cast<std::size_t>(template_id) >= table.size()) {
        throw ValidationError("unknown template id " + std::to_string(template_id) + " for relation " +
                              std::string(to_string(relation)));
    }
    std::string out(table[template_id].pattern);
    out.replace(out.find(kEntitySlot), kEntitySlot.size(), entity);
    out.replace(out.find(kYearSlot), kYearSlot.size(), std::to_string(year));
    return out;
}

std::optional<TemplateMatch> match_template(std::string_view text) {
    for (Relation r : kAllRelations) {
        const auto table = templates_for(r);
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (auto m = match_one(text, table[i], static_cast<int>(i))) return m;
        }
    }
    return std::nullopt;
}

TemplateAvailability TemplateAvailability::from_questions(std::span<const Question> questions) {
    TemplateAvailability out;
    for (const auto& q : questions) {
        if (auto m = match_template(q.text)) out.add(m->relation, m->template_id);
    }
    return out;
}

TemplateAvailability TemplateAvailability::all_builtin() {
    TemplateAvailability out;
    for (Relation r : kAllRelations) {
        for (std::size_t i = 0; i < templates_for(r).size(); ++i) out.add(r, static_cast<int>(i));
    }
    return out;
}

void TemplateAvailability::add(Relation relation, int template_id) {
    const std::pair<Relation, int> key{relation, template_id};
    const auto it = std::lower_bound(used_.begin(), used_.end(), key);
    if (it == used_.end() || *it != key) used_.insert(it, key);
}

std::vector<int> TemplateAvailability::alternatives(Relation relation, int template_id) const {
    std::vector<int> out;
    for (const auto& [r, id] : used_) {
        if (r == relation && id != template_id) out.push_back(id);
    }
    return out;
}

}  // namespace chronoqa

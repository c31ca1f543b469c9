#include "chronoqa/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "chronoqa/errors.hpp"
#include "chronoqa/templates.hpp"

namespace chronoqa {
namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view s, const std::array<Enum, N>& values) {
    for (Enum v : values) {
        if (to_string(v) == s) return v;
    }
    return std::nullopt;
}

constexpr std::array<SurfaceForm, 4> kAllSurfaceForms = {
    SurfaceForm::explicit_year, SurfaceForm::duration_commonsense,
    SurfaceForm::split_across_sentences, SurfaceForm::split_across_paragraphs};

std::optional<Year> parse_year(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

std::string_view to_string(Relation r) {
    switch (r) {
        case Relation::position: return "position";
        case Relation::team: return "team";
        case Relation::employer: return "employer";
        case Relation::residence: return "residence";
        case Relation::title: return "title";
    }
    return "?";
}

std::string_view to_string(SurfaceForm s) {
    switch (s) {
        case SurfaceForm::explicit_year: return "explicit_year";
        case SurfaceForm::duration_commonsense: return "duration_commonsense";
        case SurfaceForm::split_across_sentences: return "split_across_sentences";
        case SurfaceForm::split_across_paragraphs: return "split_across_paragraphs";
    }
    return "?";
}

std::string_view to_string(QuestionType t) {
    switch (t) {
        case QuestionType::easy: return "easy";
        case QuestionType::commonsense: return "commonsense";
        case QuestionType::multi_description: return "multi_description";
        case QuestionType::multi_paragraph: return "multi_paragraph";
        case QuestionType::unanswerable: return "unanswerable";
    }
    return "?";
}

std::string_view to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::dev: return "dev";
        case Split::test: return "test";
    }
    return "?";
}

std::optional<Relation> parse_relation(std::string_view s) { return parse_enum(s, kAllRelations); }
std::optional<SurfaceForm> parse_surface_form(std::string_view s) { return parse_enum(s, kAllSurfaceForms); }
std::optional<QuestionType> parse_question_type(std::string_view s) { return parse_enum(s, kAllQuestionTypes); }
std::optional<Split> parse_split(std::string_view s) { return parse_enum(s, kAllSplits); }

const Context* Corpus::find_context(std::string_view id) const {
    if (index_.size() != contexts.size()) {
        const auto it = std::find_if(contexts.begin(), contexts.end(),
                                     [&](const Context& c) { return c.context_id == id; });
        return it == contexts.end() ? nullptr : &*it;
    }
    const auto it = index_.find(id);
    if (it == index_.end()) return nullptr;
    return &contexts[it->second];
}

const Context& Corpus::context(std::string_view id) const {
    const Context* c = find_context(id);
    if (c == nullptr) throw ValidationError("unknown context_id '" + std::string(id) + "'");
    return *c;
}

void Corpus::reindex() {
    index_.clear();
    for (std::size_t i = 0; i < contexts.size(); ++i) index_.emplace(contexts[i].context_id, i);
}

std::optional<Year> Corpus::earliest_year() const {
    std::optional<Year> out;
    for (const auto& c : contexts) {
        for (const auto& f : c.facts) {
            if (!out || f.valid.start < *out) out = f.valid.start;
        }
    }
    return out;
}

std::vector<TimeRange> default_boundaries() {
    return {TimeRange::closed(190, 1939), TimeRange::closed(1940, 1976), TimeRange::closed(1977, 1998),
            TimeRange::closed(1999, 2009), TimeRange::open_ended(2010)};
}

std::vector<TimeRange> parse_boundaries(std::string_view text) {
    std::vector<TimeRange> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);

        const auto dash = item.find('-');
        if (dash == std::string_view::npos) {
            throw ValidationError("boundary '" + std::string(item) + "' is not of the form START-END");
        }
        const auto start = parse_year(item.substr(0, dash));
        const auto end_text = item.substr(dash + 1);
        if (!start) throw ValidationError("boundary '" + std::string(item) + "' has a malformed start year");
        if (end_text == "now") {
            out.push_back(TimeRange::open_ended(*start));
        } else if (const auto end = parse_year(end_text)) {
            out.push_back(TimeRange::closed(*start, *end));
        } else {
            throw ValidationError("boundary '" + std::string(item) + "' has a malformed end year");
        }
    }
    return out;
}

std::string format_boundaries(std::span<const TimeRange> boundaries) {
    std::string out;
    for (const auto& b : boundaries) {
        if (!out.empty()) out += ',';
        out += to_string(b);
    }
    return out;
}

void CorpusSpec::validate() const {
    if (num_subsets < 1) throw ValidationError("num_subsets must be at least 1");
    if (static_cast<int>(boundaries.size()) != num_subsets) {
        throw ValidationError("boundaries lists " + std::to_string(boundaries.size()) +
                              " ranges but num_subsets is " + std::to_string(num_subsets));
    }
    for (std::size_t k = 0; k < boundaries.size(); ++k) {
        const auto& b = boundaries[k];
        if (b.end && *b.end < b.start) throw ValidationError("boundary " + to_string(b) + " is reversed");
        if (b.is_open() && k + 1 != boundaries.size()) {
            throw ValidationError("only the last boundary may be open-ended");
        }
        if (k > 0) {
            const auto& prev = boundaries[k - 1];
            if (!prev.end || *prev.end + 1 != b.start) {
                throw ValidationError("boundaries " + to_string(prev) + " and " + to_string(b) +
                                      " are not contiguous and chronologically ordered");
            }
        }
    }
    if (boundaries.back().resolved_end(now_year) < now_year) {
        throw ValidationError("boundaries do not reach now_year " + std::to_string(now_year));
    }
    auto check_mix = [](const auto& mix, const char* name) {
        double sum = 0.0;
        for (double p : mix) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError(std::string(name) + " has a negative entry");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ValidationError(std::string(name) + " does not sum to 1");
    };
    check_mix(type_mix, "type_mix");
    check_mix(split_mix, "split_mix");
    if (n_contexts < 0 || n_questions < 0) throw ValidationError("n_contexts and n_questions must be non-negative");
    if (max_paragraphs < 1) throw ValidationError("max_paragraphs must be at least 1");
    if (now_year < kMinYear || now_year > kMaxYear) throw ValidationError("now_year out of range");
}

int assign_subset(Year y, std::span<const TimeRange> boundaries) {
    const int k = static_cast<int>(boundaries.size());
    if (k == 0) return 1;
    if (y < boundaries.front().start) return 1;
    for (int i = 0; i < k; ++i) {
        if (year_in_range(y, boundaries[i])) return i + 1;
    }
    return k;
}

std::string answer_at(const Context& ctx, Relation relation, Year y, Year now_year) {
    for (const auto& f : ctx.facts) {
        if (f.relation != relation) continue;
        if (f.valid.start <= y && y <= f.valid.resolved_end(now_year)) return f.value;
    }
    return {};
}

std::optional<Relation> resolve_relation(const Question& q, const Context& ctx) {
    if (auto m = match_template(q.text)) return m->relation;
    if (!q.answer.empty()) {
        for (const auto& f : ctx.facts) {
            if (f.value == q.answer) return f.relation;
        }
    }
    std::set<Relation> relations;
    for (const auto& f : ctx.facts) relations.insert(f.relation);
    if (relations.size() == 1) return *relations.begin();
    return std::nullopt;
}

}  // namespace chronoqa

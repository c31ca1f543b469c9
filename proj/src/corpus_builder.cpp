#include "chronoqa/corpus_builder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "chronoqa/errors.hpp"
#include "chronoqa/rng.hpp"
#include "chronoqa/templates.hpp"

namespace chronoqa {
namespace {

// ---------------------------------------------------------------------------
// Synthetic names

constexpr std::array<const char*, 24> kOnsets = {"b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r",
                                                 "s", "t", "v", "w", "z", "br", "dr", "gr", "th", "st", "al", "or"};
constexpr std::array<const char*, 10> kVowels = {"a", "e", "i", "o", "u", "ae", "ia", "ou", "y", "ei"};
constexpr std::array<const char*, 14> kCodas = {"n", "r", "s", "th", "l", "m", "nd", "rk", "x", "ck", "dor", "mar",
                                                "wyn", "ric"};

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

std::string make_word(Rng& rng, int syllables) {
    std::string w;
    for (int i = 0; i < syllables; ++i) {
        w += kOnsets[rng.index(kOnsets.size())];
        w += kVowels[rng.index(kVowels.size())];
    }
    w += kCodas[rng.index(kCodas.size())];
    return capitalize(w);
}

std::vector<std::string> unique_words(Rng& rng, std::size_t n, int min_syl, int max_syl) {
    std::set<std::string> seen;
    std::vector<std::string> out;
    while (out.size() < n) {
        auto w = make_word(rng, static_cast<int>(rng.between(min_syl, max_syl)));
        if (seen.insert(w).second) out.push_back(std::move(w));
    }
    return out;
}

constexpr std::array<const char*, 12> kOffices = {"Minister", "Governor", "Secretary", "Chancellor",
                                                  "Director", "Commissioner", "Advocate", "Chairman",
                                                  "Ambassador", "Treasurer", "Mayor", "Speaker"};
constexpr std::array<const char*, 12> kMascots = {"Rovers", "United", "Wolves", "Rangers", "Athletic", "Wanderers",
                                                  "Falcons", "City", "Knights", "Harriers", "Fury", "Albion"};
constexpr std::array<const char*, 7> kEmployerForms = {"{P} University", "University of {P}", "{P} Corporation",
                                                       "{P} College", "{P} Railway Company", "Bank of {P}",
                                                       "{P} Institute"};
constexpr std::array<const char*, 8> kRanks = {"Duke", "Earl", "Baron", "Count", "Marquess", "Viscount",
                                               "Champion", "Grandmaster"};

struct NamePools {
    std::vector<std::string> places;
    std::vector<std::string> given;
    std::vector<std::string> family;
};

std::string make_value(Relation r, Rng& rng, const NamePools& pools) {
    const auto& place = pools.places[rng.index(pools.places.size())];
    switch (r) {
        case Relation::position:
            return std::string(kOffices[rng.index(kOffices.size())]) + " of " + place;
        case Relation::team:
            return place + " " + kMascots[rng.index(kMascots.size())];
        case Relation::employer: {
            std::string form = kEmployerForms[rng.index(kEmployerForms.size())];
            form.replace(form.find("{P}"), 3, place);
            return form;
        }
        case Relation::residence:
            return place;
        case Relation::title:
            return std::string(kRanks[rng.index(kRanks.size())]) + " of " + place;
    }
    return place;
}

// Relation-specific phrasing for fact sentences.
struct Phrasing {
    const char* start;    // "In 1950, E was appointed V."
    const char* during;   // "E served as V from A to B."
    const char* ongoing;  // "Since A, E has served as V."
    const char* leave;    // "He stepped down 4 years later."
};

Phrasing phrasing(Relation r) {
    switch (r) {
        case Relation::position: return {"was appointed", "served as", "has served as", "stepped down"};
        case Relation::team: return {"joined", "played for", "has played for", "left the club"};
        case Relation::employer: return {"was hired by", "worked for", "has worked for", "left the company"};
        case Relation::residence: return {"moved to", "lived in", "has lived in", "moved away"};
        case Relation::title: return {"was granted the title", "held the title", "has held the title",
                                      "gave up the title"};
    }
    return {"", "", "", ""};
}

std::string realize_fact(const TimelineFact& f, const std::string& entity, const std::string& pronoun, Year birth,
                         bool dash_style) {
    const auto p = phrasing(f.relation);
    const Year a = f.valid.start;
    std::ostringstream s;
    switch (f.surface_form) {
        case SurfaceForm::explicit_year:
            if (f.valid.is_open()) {
                s << "Since " << a << ", " << entity << " " << p.ongoing << " " << f.value << ".";
            } else if (dash_style) {
                s << entity << " " << p.during << " " << f.value << " (" << a << "–" << *f.valid.end << ").";
            } else {
                s << entity << " " << p.during << " " << f.value << " from " << a << " to " << *f.valid.end << ".";
            }
            break;
        case SurfaceForm::duration_commonsense:
            s << "In " << a << ", " << entity << " " << p.start << " " << f.value << " for the next "
              << (*f.valid.end - a) << " years.";
            break;
        case SurfaceForm::split_across_sentences:
            s << "In " << a << ", " << entity << " " << p.start << " " << f.value << ". " << pronoun << " "
              << p.leave << " " << (*f.valid.end - a) << " years later.";
            break;
        case SurfaceForm::split_across_paragraphs:
            s << "At the age of " << (a - birth) << ", " << entity << " " << p.start << " " << f.value << ". "
              << pronoun << " " << p.leave << " at the age of " << (*f.valid.end - birth) << ".";
            break;
    }
    return s.str();
}

std::string padded_id(char prefix, std::size_t n, std::size_t width) {
    std::string digits = std::to_string(n);
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return std::string(1, prefix) + digits;
}

std::size_t digit_width(std::size_t n, std::size_t min_width) {
    return std::max(min_width, std::to_string(n).size());
}

// Largest-remainder apportionment of `total` over `weights` (which sum to 1).
template <std::size_t N>
std::array<int, N> apportion(int total, const std::array<double, N>& weights) {
    std::array<int, N> out{};
    std::array<double, N> rem{};
    int assigned = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const double exact = weights[i] * total;
        out[i] = static_cast<int>(std::floor(exact + 1e-9));
        rem[i] = exact - out[i];
        assigned += out[i];
    }
    std::array<std::size_t, N> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++out[order[i % N]];
    return out;
}

struct Option {
    std::size_t context = 0;
    Year year = 0;
};

Context build_context(std::size_t index, std::size_t id_width, int home_subset, const CorpusSpec& spec,
                      const NamePools& pools, Rng& rng, std::set<std::string>& used_entities) {
    Context ctx;
    ctx.context_id = padded_id('c', index + 1, id_width);

    std::string entity;
    do {
        entity = pools.given[rng.index(pools.given.size())] + " " + pools.family[rng.index(pools.family.size())];
    } while (!used_entities.insert(entity).second);
    ctx.entity = entity;
    const std::string pronoun = rng.bernoulli(0.5) ? "He" : "She";

    const Relation relation = kAllRelations[rng.index(kAllRelations.size())];
    const auto& home = spec.boundaries[static_cast<std::size_t>(home_subset - 1)];
    Year lo = std::max(home.start, spec.earliest_timeline_year);
    Year hi = std::min(home.resolved_end(spec.now_year), spec.now_year - 2);
    if (lo > hi) {
        lo = std::min(home.start, spec.now_year - 2);
        hi = std::max(lo, std::min(home.resolved_end(spec.now_year), spec.now_year - 2));
    }
    const Year career_start = static_cast<Year>(rng.between(lo, hi));
    const Year birth = career_start - static_cast<Year>(rng.between(18, 32));
    const bool paragraphs_allowed = spec.max_paragraphs >= 2;

    const int n_facts = static_cast<int>(rng.between(3, 5));
    std::set<std::string> used_values;
    Year cur = career_start;
    for (int i = 0; i < n_facts && cur <= spec.now_year; ++i) {
        TimelineFact f;
        f.relation = relation;
        do {
            f.value = make_value(relation, rng, pools);
        } while (!used_values.insert(f.value).second);

        Year end = cur + static_cast<Year>(rng.between(2, 10));
        const bool reaches_now = end >= spec.now_year;
        if (reaches_now) end = spec.now_year;

        const double u = rng.uniform(0.0, 1.0);
        if (u < 0.22) {
            f.surface_form = SurfaceForm::explicit_year;
        } else if (u < 0.32) {
            f.surface_form = SurfaceForm::duration_commonsense;
        } else if (u < 0.52 || !paragraphs_allowed) {
            f.surface_form = SurfaceForm::split_across_sentences;
        } else {
            f.surface_form = SurfaceForm::split_across_paragraphs;
        }
        if (end == cur) f.surface_form = SurfaceForm::explicit_year;

        if (reaches_now && f.surface_form == SurfaceForm::explicit_year && rng.bernoulli(0.5)) {
            f.valid = TimeRange::open_ended(cur);
        } else {
            f.valid = TimeRange::closed(cur, end);
        }
        ctx.facts.push_back(std::move(f));
        if (reaches_now) break;
        const Year gap = rng.bernoulli(0.35) ? static_cast<Year>(rng.between(1, 4)) : 0;
        cur = end + 1 + gap;
    }

    const bool needs_paragraphs =
        std::any_of(ctx.facts.begin(), ctx.facts.end(),
                    [](const TimelineFact& f) { return f.surface_form == SurfaceForm::split_across_paragraphs; });
    const int max_par = std::max(1, spec.max_paragraphs);
    const int n_par = needs_paragraphs ? static_cast<int>(rng.between(2, std::max(2, max_par)))
                                       : static_cast<int>(rng.between(1, std::min(2, max_par)));

    std::vector<std::vector<std::string>> sentences(static_cast<std::size_t>(n_par));
    sentences[0].push_back(entity + " was born in " + std::to_string(birth) + ".");
    const int n = static_cast<int>(ctx.facts.size());
    for (int i = 0; i < n; ++i) {
        auto& f = ctx.facts[static_cast<std::size_t>(i)];
        int p = std::min(n_par - 1, i * n_par / n);
        if (f.surface_form == SurfaceForm::split_across_paragraphs && p == 0) p = 1;
        f.paragraph_index = p;
        sentences[static_cast<std::size_t>(p)].push_back(realize_fact(f, entity, pronoun, birth, rng.bernoulli(0.4)));
    }
    for (auto& para : sentences) {
        std::string text;
        for (const auto& s : para) {
            if (!text.empty()) text += ' ';
            text += s;
        }
        if (text.empty()) text = entity + " spent these years away from public life.";
        ctx.paragraphs.push_back(std::move(text));
    }
    return ctx;
}

}  // namespace

QuestionType classify_question(const TimelineFact* covering, Year anchor) {
    if (covering == nullptr) return QuestionType::unanswerable;
    switch (covering->surface_form) {
        case SurfaceForm::explicit_year: {
            const bool stated = anchor == covering->valid.start || (covering->valid.end && anchor == *covering->valid.end);
            return stated ? QuestionType::easy : QuestionType::commonsense;
        }
        case SurfaceForm::duration_commonsense: return QuestionType::commonsense;
        case SurfaceForm::split_across_sentences: return QuestionType::multi_description;
        case SurfaceForm::split_across_paragraphs: return QuestionType::multi_paragraph;
    }
    return QuestionType::unanswerable;
}

Question generate_question(const Context& ctx, std::size_t fact_index, Year anchor, int template_id, Year now_year) {
    if (fact_index >= ctx.facts.size()) throw ValidationError("fact index out of range");
    const Relation relation = ctx.facts[fact_index].relation;

    Question q;
    q.context_id = ctx.context_id;
    q.text = render_template(relation, template_id, ctx.entity, anchor);
    q.anchor_year = anchor;

    const TimelineFact* covering = nullptr;
    for (const auto& f : ctx.facts) {
        if (f.relation == relation && f.valid.start <= anchor && anchor <= f.valid.resolved_end(now_year)) {
            covering = &f;
            break;
        }
    }
    q.qtype = classify_question(covering, anchor);
    q.answer = covering ? covering->value : std::string();
    return q;
}

Corpus synthesize_corpus(const CorpusSpec& spec) {
    spec.validate();
    constexpr auto kMultiParagraph = static_cast<std::size_t>(QuestionType::multi_paragraph);
    if (spec.type_mix[kMultiParagraph] > 0.0 && spec.max_paragraphs < 2) {
        throw InfeasibleSpecError(
            "type_mix requests multi_paragraph questions but max_paragraphs = 1 leaves no second paragraph");
    }
    if (spec.n_questions > 0 && spec.n_contexts == 0) {
        throw InfeasibleSpecError("n_questions > 0 requires at least one context");
    }

    Rng rng(spec.seed, "corpus");
    NamePools pools;
    const auto n_contexts = static_cast<std::size_t>(spec.n_contexts);
    pools.places = unique_words(rng, std::max<std::size_t>(40, n_contexts / 2), 1, 2);
    pools.given = unique_words(rng, 120, 1, 2);
    pools.family = unique_words(rng, std::max<std::size_t>(200, n_contexts), 2, 3);

    Corpus corpus;
    const std::size_t ctx_width = digit_width(n_contexts, 5);
    std::set<std::string> used_entities;
    for (std::size_t i = 0; i < n_contexts; ++i) {
        const int home = static_cast<int>(i % static_cast<std::size_t>(spec.num_subsets)) + 1;
        corpus.contexts.push_back(build_context(i, ctx_width, home, spec, pools, rng, used_entities));
    }
    corpus.reindex();

    // Candidate (context, year) pairs grouped by (subset, type).
    const std::size_t k_subsets = static_cast<std::size_t>(spec.num_subsets);
    std::vector<std::array<std::vector<Option>, 5>> pools_by(k_subsets);
    const Year floor_year = std::max(kMinYear, spec.boundaries.front().start);
    for (std::size_t c = 0; c < corpus.contexts.size(); ++c) {
        const auto& ctx = corpus.contexts[c];
        if (ctx.facts.empty()) continue;
        Year first = ctx.facts.front().valid.start;
        Year last = ctx.facts.front().valid.resolved_end(spec.now_year);
        for (const auto& f : ctx.facts) {
            first = std::min(first, f.valid.start);
            last = std::max(last, f.valid.resolved_end(spec.now_year));
        }
        const Year lo = std::max(floor_year, first - 10);
        const Year hi = std::min(spec.now_year, last + 6);
        for (Year y = lo; y <= hi; ++y) {
            const TimelineFact* covering = nullptr;
            for (const auto& f : ctx.facts) {
                if (f.valid.start <= y && y <= f.valid.resolved_end(spec.now_year)) covering = &f;
            }
            const auto t = static_cast<std::size_t>(classify_question(covering, y));
            const auto k = static_cast<std::size_t>(assign_subset(y, spec.boundaries) - 1);
            pools_by[k][t].push_back({c, y});
        }
    }

    std::vector<Question> questions;
    questions.reserve(static_cast<std::size_t>(spec.n_questions));
    for (std::size_t k = 0; k < k_subsets; ++k) {
        const int n_k = spec.n_questions / spec.num_subsets + (static_cast<int>(k) < spec.n_questions % spec.num_subsets ? 1 : 0);
        const auto type_counts = apportion(n_k, spec.type_mix);
        const auto split_counts = apportion(n_k, spec.split_mix);

        std::vector<Question> subset_questions;
        for (std::size_t t = 0; t < 5; ++t) {
            auto& pool = pools_by[k][t];
            const auto want = static_cast<std::size_t>(type_counts[t]);
            if (pool.size() < want) {
                throw InfeasibleSpecError("subset " + std::to_string(k + 1) + " offers " + std::to_string(pool.size()) +
                                          " (context, year) pairs of type " +
                                          std::string(to_string(kAllQuestionTypes[t])) + " but " +
                                          std::to_string(want) + " questions are requested; raise n_contexts");
            }
            std::vector<Option> picked;
            std::sample(pool.begin(), pool.end(), std::back_inserter(picked), want, rng.engine());
            for (const auto& opt : picked) {
                const auto& ctx = corpus.contexts[opt.context];
                const Relation relation = ctx.facts.front().relation;
                const int tid = static_cast<int>(rng.index(templates_for(relation).size()));
                Question q = generate_question(ctx, 0, opt.year, tid, spec.now_year);
                q.subset = static_cast<int>(k) + 1;
                subset_questions.push_back(std::move(q));
            }
        }

        std::vector<Split> splits;
        for (std::size_t s = 0; s < 3; ++s) splits.insert(splits.end(), static_cast<std::size_t>(split_counts[s]), kAllSplits[s]);
        std::shuffle(splits.begin(), splits.end(), rng.engine());
        for (std::size_t i = 0; i < subset_questions.size(); ++i) subset_questions[i].split = splits[i];
        questions.insert(questions.end(), std::make_move_iterator(subset_questions.begin()),
                         std::make_move_iterator(subset_questions.end()));
    }

    std::shuffle(questions.begin(), questions.end(), rng.engine());
    const std::size_t q_width = digit_width(questions.size(), 6);
    for (std::size_t i = 0; i < questions.size(); ++i) questions[i].question_id = padded_id('q', i + 1, q_width);
    corpus.questions = std::move(questions);
    return corpus;
}

CorpusStats compute_stats(const Corpus& corpus, int num_subsets) {
    CorpusStats s;
    s.num_subsets = num_subsets;
    s.by_subset.assign(static_cast<std::size_t>(num_subsets), {0, 0, 0});
    s.n_contexts = static_cast<int>(corpus.contexts.size());
    for (const auto& q : corpus.questions) {
        const auto sp = static_cast<std::size_t>(q.split);
        if (q.subset >= 1 && q.subset <= num_subsets) ++s.by_subset[static_cast<std::size_t>(q.subset - 1)][sp];
        ++s.by_type[static_cast<std::size_t>(q.qtype)][sp];
        ++s.totals[sp];
    }
    return s;
}

std::string render_stats_markdown(const CorpusStats& stats, const std::vector<TimeRange>& boundaries) {
    static constexpr std::array<const char*, 5> kTypeNames = {"Easy Reasoning", "Common Sense",
                                                              "Multi-descriptions Join", "Multi-paragraphs Join",
                                                              "Unanswerable"};
    std::ostringstream out;
    out << "| | Train | Dev | Test |\n|---|---:|---:|---:|\n";
    for (std::size_t k = 0; k < stats.by_subset.size(); ++k) {
        out << "| Subset" << (k + 1);
        if (k < boundaries.size()) out << " (" << to_string(boundaries[k]) << ")";
        const auto& row = stats.by_subset[k];
        out << " | " << row[0] << " | " << row[1] << " | " << row[2] << " |\n";
    }
    for (std::size_t t = 0; t < 5; ++t) {
        const auto& row = stats.by_type[t];
        out << "| " << kTypeNames[t] << " | " << row[0] << " | " << row[1] << " | " << row[2] << " |\n";
    }
    out << "| **Total** | " << stats.totals[0] << " | " << stats.totals[1] << " | " << stats.totals[2] << " |\n";
    out << "\nContexts: " << stats.n_contexts << "\n";
    return out.str();
}

}  // namespace chronoqa

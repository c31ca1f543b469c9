#include <doctest.h>

#include <cmath>
#include <set>

#include "chronoqa/corpus.hpp"
#include "chronoqa/corpus_builder.hpp"
#include "chronoqa/corpus_io.hpp"
#include "chronoqa/errors.hpp"
#include "chronoqa/templates.hpp"

using namespace chronoqa;

namespace {

Context dundas() {
    Context c;
    c.context_id = "c1";
    c.entity = "Henry Dundas, 1st Viscount Melville";
    c.paragraphs = {"Henry Dundas was born in 1742.",
                    "At the age of 33, Henry Dundas, 1st Viscount Melville was appointed Lord Advocate. He stepped "
                    "down at the age of 49."};
    c.facts = {{Relation::position, "Lord Advocate", TimeRange::closed(1775, 1791), 1,
                SurfaceForm::split_across_paragraphs}};
    return c;
}

Context morgan() {
    Context c;
    c.context_id = "c2";
    c.entity = "Eoin Morgan";
    c.paragraphs = {"In 2011, Eoin Morgan joined Royal Challengers Bangalore for the next 3 years."};
    c.facts = {{Relation::team, "Royal Challengers Bangalore", TimeRange::closed(2011, 2014), 0,
                SurfaceForm::duration_commonsense}};
    return c;
}

CorpusSpec small_spec() {
    CorpusSpec s;
    s.n_contexts = 120;
    s.n_questions = 500;
    s.seed = 7;
    return s;
}

}  // namespace

TEST_CASE("assign_subset with the default boundaries") {
    const auto b = default_boundaries();
    CHECK(assign_subset(1963, b) == 2);
    CHECK(assign_subset(1995, b) == 3);
    CHECK(assign_subset(2010, b) == 5);
    CHECK(assign_subset(50, b) == 1);
    CHECK(assign_subset(2090, b) == 5);
    CHECK(assign_subset(1939, b) == 1);
    CHECK(assign_subset(1940, b) == 2);
}

TEST_CASE("boundaries round-trip through text") {
    const auto b = default_boundaries();
    CHECK(format_boundaries(b) == "190-1939,1940-1976,1977-1998,1999-2009,2010-now");
    CHECK(parse_boundaries(format_boundaries(b)) == b);
}

TEST_CASE("default type mix") {
    const CorpusSpec s;
    const double expected[] = {0.116, 0.093, 0.175, 0.436, 0.180};
    double sum = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(s.type_mix[i] == doctest::Approx(expected[i]).epsilon(0.01));
        sum += s.type_mix[i];
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("generate_question") {
    SUBCASE("multi-paragraph fact") {
        const auto q = generate_question(dundas(), 0, 1776, 2, 2023);
        CHECK(q.text == "Which position did Henry Dundas, 1st Viscount Melville hold in 1776?");
        CHECK(q.answer == "Lord Advocate");
        CHECK(q.qtype == QuestionType::multi_paragraph);
    }
    SUBCASE("anchor outside every fact") {
        const auto q = generate_question(dundas(), 0, 1800, 0, 2023);
        CHECK(q.answer.empty());
        CHECK(q.qtype == QuestionType::unanswerable);
    }
    SUBCASE("duration stated as a span of years") {
        const auto q = generate_question(morgan(), 0, 2012, 2, 2023);
        CHECK(q.text == "Which team did the player Eoin Morgan belong to in 2012?");
        CHECK(q.answer == "Royal Challengers Bangalore");
        CHECK(q.qtype == QuestionType::commonsense);
    }
    CHECK_THROWS_AS(generate_question(dundas(), 0, 1776, 17, 2023), ValidationError);
}

TEST_CASE("templates offer a paraphrase per relation") {
    for (Relation r : kAllRelations) {
        CHECK(templates_for(r).size() >= 2);
        const auto text = render_template(r, 1, "Ada Lovelace", 1840);
        const auto m = match_template(text);
        REQUIRE(m);
        CHECK(m->relation == r);
        CHECK(m->template_id == 1);
        CHECK(m->entity == "Ada Lovelace");
        CHECK(m->year == 1840);
    }
}

TEST_CASE("answer_at") {
    Context c;
    c.facts = {{Relation::position, "Federal Senator", TimeRange::closed(2005, 2008), 0, SurfaceForm::explicit_year},
               {Relation::position, "President", TimeRange::closed(2009, 2017), 0, SurfaceForm::explicit_year}};
    CHECK(answer_at(c, Relation::position, 2006, 2023) == "Federal Senator");
    CHECK(answer_at(c, Relation::position, 2009, 2023) == "President");
    CHECK(answer_at(c, Relation::position, 1990, 2023).empty());
    CHECK(answer_at(c, Relation::team, 2006, 2023).empty());
}

TEST_CASE("synthesize_corpus") {
    const auto spec = small_spec();
    const Corpus a = synthesize_corpus(spec);
    CHECK(a.contexts.size() == 120);
    CHECK(a.questions.size() == 500);

    SUBCASE("deterministic under the seed") {
        const Corpus b = synthesize_corpus(spec);
        CHECK(contexts_to_jsonl(a.contexts) == contexts_to_jsonl(b.contexts));
        CHECK(questions_to_jsonl(a.questions) == questions_to_jsonl(b.questions));
    }
    SUBCASE("every question is sound") {
        CHECK(validate_corpus(a, ValidationOptions{spec.now_year, spec.boundaries}).empty());
        std::set<std::string> ids;
        for (const auto& q : a.questions) {
            ids.insert(q.question_id);
            const auto rel = resolve_relation(q, a.context(q.context_id));
            REQUIRE(rel);
            CHECK(answer_at(a.context(q.context_id), *rel, q.anchor_year, spec.now_year) == q.answer);
            CHECK(assign_subset(q.anchor_year, spec.boundaries) == q.subset);
        }
        CHECK(ids.size() == a.questions.size());
    }
    SUBCASE("no questions") {
        auto s = spec;
        s.n_questions = 0;
        const Corpus c = synthesize_corpus(s);
        CHECK(c.questions.empty());
        CHECK(c.contexts.size() == 120);
    }
}

TEST_CASE("infeasible specs are rejected") {
    auto s = small_spec();
    s.max_paragraphs = 1;
    CHECK_THROWS_AS(synthesize_corpus(s), InfeasibleSpecError);
    s = small_spec();
    s.type_mix = {0.5, 0.5, 0.5, 0.0, 0.0};
    CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("jsonl round trip and validation") {
    const Corpus a = synthesize_corpus(small_spec());
    const auto contexts = parse_contexts_jsonl(contexts_to_jsonl(a.contexts));
    const auto questions = parse_questions_jsonl(questions_to_jsonl(a.questions));
    CHECK(contexts == a.contexts);
    CHECK(questions == a.questions);

    SUBCASE("two-line context file") {
        std::vector<Context> two(a.contexts.begin(), a.contexts.begin() + 2);
        CHECK(parse_contexts_jsonl(contexts_to_jsonl(two)).size() == 2);
    }
    SUBCASE("schema violations carry the line") {
        const std::string bad = contexts_to_jsonl({a.contexts[0]}) + "{\"context_id\": 3}\n";
        try {
            parse_contexts_jsonl(bad);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("anchor year missing from text") {
        Corpus c;
        c.contexts = a.contexts;
        c.questions = a.questions;
        c.reindex();
        c.questions[0].anchor_year = 1234;
        CHECK_FALSE(validate_corpus(c).empty());
    }
    SUBCASE("mutated answer") {
        Corpus c;
        c.contexts = a.contexts;
        c.questions = a.questions;
        c.reindex();
        auto it = std::find_if(c.questions.begin(), c.questions.end(), [](const Question& q) { return !q.answer.empty(); });
        REQUIRE(it != c.questions.end());
        it->answer += " Jr";
        CHECK_FALSE(validate_corpus(c).empty());
    }
}

TEST_CASE("stats") {
    const Corpus a = synthesize_corpus(small_spec());
    const auto s = compute_stats(a, 5);
    int total = 0;
    for (const auto& row : s.by_subset) total += row[0] + row[1] + row[2];
    CHECK(total == 500);
    CHECK(render_stats_markdown(s, default_boundaries()).find("Subset1") != std::string::npos);
}

#include <doctest.h>

#include <algorithm>

#include "chronoqa/errors.hpp"
#include "chronoqa/question_transform.hpp"
#include "chronoqa/temporal_text.hpp"

using namespace chronoqa;

namespace {

Context obama() {
    Context c;
    c.context_id = "c1";
    c.entity = "Barack Hussein Obama";
    c.paragraphs = {"Barack Hussein Obama served as Illinois State Senator from 1997 to 2004. Barack Hussein Obama "
                    "served as Federal Senator from 2005 to 2008. Since 2009, Barack Hussein Obama has served as "
                    "President."};
    c.facts = {
        {Relation::position, "Illinois State Senator", TimeRange::closed(1997, 2004), 0, SurfaceForm::explicit_year},
        {Relation::position, "Federal Senator", TimeRange::closed(2005, 2008), 0, SurfaceForm::explicit_year},
        {Relation::position, "President", TimeRange::open_ended(2009), 0, SurfaceForm::explicit_year}};
    return c;
}

Question ask(const std::string& text, Year anchor, const std::string& answer) {
    Question q;
    q.question_id = "q1";
    q.context_id = "c1";
    q.text = text;
    q.anchor_year = anchor;
    q.answer = answer;
    return q;
}

}  // namespace

TEST_CASE("contrastive question changes the answer") {
    const auto ctx = obama();
    const auto q = ask("What position did Barack Hussein Obama hold in 2010?", 2010, "President");
    Rng rng(1, "transform");
    for (int i = 0; i < 50; ++i) {
        const auto c = make_contrastive(q, ctx, 1900, 2023, rng);
        CHECK(answer_at(ctx, Relation::position, c.anchor, 2023) != "President");
        Question moved = q;
        moved.anchor_year = c.anchor;
        CHECK(c.text == "What position did Barack Hussein Obama hold in " + std::to_string(c.anchor) + "?");
    }
    const auto years = answer_changing_years(q, ctx, 1900, 2023);
    CHECK(std::find(years.begin(), years.end(), 1995) != years.end());
    CHECK(std::find(years.begin(), years.end(), 2015) == years.end());
    CHECK(std::is_sorted(years.begin(), years.end()));
}

TEST_CASE("anchor before every fact counts as a different answer") {
    const auto years = answer_changing_years(ask("What position did Barack Hussein Obama hold in 2000?", 2000,
                                                 "Illinois State Senator"),
                                             obama(), 1900, 2023);
    CHECK(years.front() == 1900);
}

TEST_CASE("answer-changing years by enumeration") {
    Context c;
    c.context_id = "c1";
    c.entity = "X";
    c.paragraphs = {"X served as A from 2000 to 2005. X served as B from 2006 to 2010."};
    c.facts = {{Relation::position, "A", TimeRange::closed(2000, 2005), 0, SurfaceForm::explicit_year},
               {Relation::position, "B", TimeRange::closed(2006, 2010), 0, SurfaceForm::explicit_year}};
    const auto q = ask("What position did X hold in 2003?", 2003, "A");
    const auto years = answer_changing_years(q, c, 1995, 2015);
    for (Year y = 1995; y <= 2015; ++y) {
        const bool differs = answer_at(c, Relation::position, y, 2023) != "A";
        CHECK(differs == (std::find(years.begin(), years.end(), y) != years.end()));
    }
    for (Year y = 2006; y <= 2010; ++y) CHECK(answer_at(c, Relation::position, y, 2023) == "B");
}

TEST_CASE("single fact covering all time has no contrastive") {
    Context c;
    c.context_id = "c1";
    c.entity = "X";
    c.paragraphs = {"Since 1900, X has held the title Duke."};
    c.facts = {{Relation::title, "Duke", TimeRange::open_ended(1900), 0, SurfaceForm::explicit_year}};
    Rng rng(1, "transform");
    CHECK_THROWS_AS(make_contrastive(ask("X held which title in 1950?", 1950, "Duke"), c, 1900, 2023, rng),
                    TransformUnavailable);
}

TEST_CASE("similar question via dataset paraphrase") {
    TemplateAvailability avail;
    avail.add(Relation::position, 0);
    avail.add(Relation::position, 1);
    Rng rng(3, "transform");
    const auto s = make_similar(ask("What position did Barack Hussein Obama hold in 2010?", 2010, "President"), avail,
                                rng);
    CHECK(s.method == SimilarMethod::dataset_paraphrase);
    CHECK(s.text == "Barack Hussein Obama took which position in 2010?");
}

TEST_CASE("similar question via token shuffle") {
    TemplateAvailability avail;
    avail.add(Relation::position, 0);
    Rng rng(3, "transform");
    const std::string text = "What position did Barack Hussein Obama hold in 2010?";
    const auto s = make_similar(ask(text, 2010, "President"), avail, rng);
    CHECK(s.method == SimilarMethod::token_shuffle);
    CHECK(s.text != text);
    auto a = whitespace_tokens(text);
    auto b = whitespace_tokens(s.text);
    CHECK(b.back() == "2010?");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
}

TEST_CASE("shuffle with a single movable token") {
    Rng rng(3, "transform");
    CHECK(shuffle_non_temporal_tokens("Who 2010?", rng) == "Who 2010?");
}

TEST_CASE("triplets jsonl round trip") {
    std::vector<TripletRecord> t = {{"q1", "a b 2010?", "c d 1995?", 1995, SimilarMethod::token_shuffle},
                                    {"q2", "x 2001?", "y 1990?", 1990, SimilarMethod::dataset_paraphrase}};
    CHECK(parse_triplets_jsonl(triplets_to_jsonl(t)) == t);
}

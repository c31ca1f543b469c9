#include <doctest.h>

#include <cmath>

#include "chronoqa/errors.hpp"
#include "chronoqa/qa_model.hpp"

using namespace chronoqa;

namespace {

// V = 4, d = 2. e0 = (0.5, -0.5), e1 = (1, 0), e2 = (0, 1), e3 = (1, 1);
// W = diag(1, 2), b = (0.1, -0.1), w_tau = 0.5.
ModelParams tiny() {
    ModelParams p(4, 2);
    const double e[4][2] = {{0.5, -0.5}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
    for (TokenId t = 0; t < 4; ++t) {
        p.embedding(t)[0] = e[t][0];
        p.embedding(t)[1] = e[t][1];
    }
    auto w = p.projection();
    w[0] = 1.0;
    w[1] = 0.0;
    w[2] = 0.0;
    w[3] = 2.0;
    p.bias()[0] = 0.1;
    p.bias()[1] = -0.1;
    p.temporal_weight() = 0.5;
    return p;
}

EncodedInput input(std::vector<TokenId> question) {
    EncodedInput in;
    in.question_tokens = std::move(question);
    in.context_tokens = {2};
    in.candidates = {"A", "B", ""};
    in.candidate_tokens = {{3}, {1, 2}, {0}};
    in.temporal_overlap = {1.0, 0.0, 0.0};
    return in;
}

}  // namespace

TEST_CASE("encode is the token mean") {
    ModelParams zero(4, 2);
    CHECK(encode(input({1}), zero).values == std::vector<double>{0.0, 0.0});

    const auto p = tiny();
    EncodedInput same;
    same.question_tokens = {3, 3};
    same.context_tokens = {3};
    CHECK(encode(same, p).values == std::vector<double>{1.0, 1.0});

    const auto rep = encode(input({1}), p).values;
    CHECK(rep[0] == doctest::Approx(0.5));
    CHECK(rep[1] == doctest::Approx(0.5));

    EncodedInput empty;
    CHECK_THROWS_AS(encode(empty, p), ValidationError);
    EncodedInput oob;
    oob.question_tokens = {9};
    CHECK_THROWS_AS(encode(oob, p), ValidationError);
}

TEST_CASE("score_candidates by hand") {
    const auto p = tiny();
    const auto in = input({1});
    const auto logits = score_candidates(encode(in, p), in, p).logits;
    // W rep + b = (0.6, 0.9)
    REQUIRE(logits.size() == 3);
    CHECK(logits[0] == doctest::Approx(0.6 + 0.9 + 0.5).epsilon(1e-12));
    CHECK(logits[1] == doctest::Approx(0.6 * 0.5 + 0.9 * 0.5).epsilon(1e-12));
    CHECK(logits[2] == doctest::Approx(0.6 * 0.5 - 0.9 * 0.5).epsilon(1e-12));
}

TEST_CASE("degenerate weights") {
    auto p = tiny();
    for (double& v : p.projection()) v = 0.0;
    for (double& v : p.bias()) v = 0.0;
    p.temporal_weight() = 1.0;
    const auto in = input({1});
    CHECK(score_candidates(encode(in, p), in, p).logits == in.temporal_overlap);

    auto q = tiny();
    q.temporal_weight() = 0.0;
    EncodedInput same = input({1});
    same.candidate_tokens = {{3}, {3}, {3}};
    const auto l = score_candidates(encode(same, q), same, q).logits;
    CHECK(l[0] == l[1]);
    CHECK(l[1] == l[2]);
    CHECK(predict(same, q) == "A");
}

TEST_CASE("argmax ties go to the lowest index") {
    const std::vector<double> a{0.1, 2.0, -1.0};
    CHECK(argmax(a) == 1);
    const std::vector<double> tie{3.0, 1.0, 3.0};
    CHECK(argmax(tie) == 0);
}

TEST_CASE("a dominant temporal weight picks the covering fact") {
    auto p = tiny();
    p.temporal_weight() = 1e6;
    for (int j = 0; j < 3; ++j) {
        auto in = input({1});
        in.temporal_overlap = {0.0, 0.0, 0.0};
        in.temporal_overlap[static_cast<std::size_t>(j)] = 1.0;
        CHECK(predict_index(in, p) == static_cast<std::size_t>(j));
    }
}

TEST_CASE("make_input reads stated ranges") {
    Context c;
    c.context_id = "c";
    c.entity = "X";
    c.paragraphs = {"X served as Mayor from 1990 to 1995. X served as Governor from 1996 to 2001."};
    c.facts = {{Relation::position, "Mayor", TimeRange::closed(1990, 1995), 0, SurfaceForm::explicit_year},
               {Relation::position, "Governor", TimeRange::closed(1996, 2001), 0, SurfaceForm::explicit_year}};
    Corpus corpus;
    corpus.contexts = {c};
    corpus.reindex();
    const Vocabulary vocab = Vocabulary::from_corpus(corpus, 8);
    const auto enc = encode_context(c, vocab);
    const auto in = make_input(enc, "What position did X hold in 1997?", 1997, vocab, 2023);
    CHECK(in.candidates == std::vector<std::string>{"Mayor", "Governor", ""});
    CHECK(in.temporal_overlap == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(candidate_index(in, "Governor") == std::size_t{1});
    CHECK_FALSE(candidate_index(in, "Senator"));
}

TEST_CASE("vocabulary") {
    CHECK(model_tokens("Henry Dundas, 1st Viscount (1775–1791).") ==
          std::vector<std::string>{"henry", "dundas", "1st", "viscount", "1775", "1791"});
    const Vocabulary v({"b", "a"}, 4);
    CHECK(v.size() == 1 + 2 + 4);
    CHECK(v.id("b") == 1);
    CHECK(v.id("a") == 2);
    CHECK(v.id("zzz") >= 3);
    CHECK(v.id("zzz") == v.id("zzz"));
}

#include <algorithm>

#include "brw/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace brw;
using brw::testing::t3;

namespace {

Word W(std::string_view s) { return Word::parse(t3(), s); }

Word from(const std::vector<Letter>& l) { return Word::from_letters(t3(), l); }

bool has_adjacent_repeat(std::span<const Letter> w) {
  return std::adjacent_find(w.begin(), w.end()) != w.end();
}

}  // namespace

TEST_CASE("concat_reduce examples") {
  CHECK(concat_reduce(W("ab"), W("b")).str() == "a");
  CHECK(concat_reduce(W("ab"), W("ba")).empty());
  const Word w = concat_reduce(W("ac"), W("abc"));
  CHECK(w.str() == "acabc");
  CHECK(distance(w) == 5);
  CHECK(distance(W("")) == 0);
  CHECK(distance(W("abc")) == 3);
  CHECK(distance(concat_reduce(W("ab"), W("b"))) == 1);
}

TEST_CASE("word parsing rejects bad input") {
  CHECK_THROWS_AS(W("aa"), ValidationError);
  CHECK_THROWS_AS(W("abd"), ValidationError);
  CHECK_THROWS_AS(TreeSpace::create(2), ValidationError);
  CHECK(W("cab").str() == "cab");
}

TEST_CASE("reduction properties on random words") {
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const int d = 3 + static_cast<int>(rng.below(3));
    const TreeSpace sp = TreeSpace::create(d);
    const auto a = Word::from_letters(sp, brw::testing::random_reduced(rng, d, static_cast<int>(rng.below(12))));
    const auto b = Word::from_letters(sp, brw::testing::random_reduced(rng, d, static_cast<int>(rng.below(12))));
    const auto c = Word::from_letters(sp, brw::testing::random_reduced(rng, d, static_cast<int>(rng.below(12))));

    const Word ab = concat_reduce(a, b);
    CHECK(concat_reduce(ab, Word{}) == ab);
    CHECK_FALSE(has_adjacent_repeat(ab.letters()));

    // Length identity with the cancellation depth.
    const auto depth = cancellation_depth(a.letters(), b.letters());
    CHECK(ab.size() == a.size() + b.size() - 2 * depth);

    // Agreement with a plain stack reduction of the concatenation.
    std::vector<Letter> cat(a.letters().begin(), a.letters().end());
    cat.insert(cat.end(), b.letters().begin(), b.letters().end());
    const auto naive = brw::testing::naive_reduce(cat);
    CHECK(std::equal(naive.begin(), naive.end(), ab.letters().begin(), ab.letters().end()));

    CHECK(concat_reduce(concat_reduce(a, b), c) == concat_reduce(a, concat_reduce(b, c)));

    // Triangle bound: one step moves the distance by at most its length.
    const long diff = static_cast<long>(ab.size()) - static_cast<long>(a.size());
    CHECK(std::abs(diff) <= static_cast<long>(b.size()));

    // Every word is an involution's product: w · w⁻¹ = e with w⁻¹ the reversal.
    std::vector<Letter> rev(a.letters().rbegin(), a.letters().rend());
    CHECK(concat_reduce(a, Word::from_letters(sp, rev)).empty());
  }
}

TEST_CASE("WordStack agrees with concat_reduce") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    WordStack stack;
    Word ref;
    for (int step = 0; step < 30; ++step) {
      const Word g = from(brw::testing::random_reduced(rng, 3, 1 + static_cast<int>(rng.below(4))));
      const int inc = stack.apply(g.letters());
      const Word next = concat_reduce(ref, g);
      CHECK(inc == static_cast<int>(next.size()) - static_cast<int>(ref.size()));
      ref = next;
    }
    CHECK(stack.word() == ref);
  }
}

TEST_CASE("step distribution validation") {
  SUBCASE("preset law is valid with horizon 3") {
    const std::vector<RawStepAtom> atoms = {{{0}, 0.1},    {{1}, 0.2},       {{2}, 0.1},
                                            {{0, 1}, 0.15}, {{0, 1, 2}, 0.15}, {{0, 2}, 0.3}};
    const auto r = validate_step_distribution(t3(), atoms);
    CHECK(r.ok);
    CHECK(r.horizon == 3);
    CHECK(r.generates_all_factors);
    CHECK(r.exponential_moments_finite);
    CHECK(r.warnings.empty());
  }
  SUBCASE("missing factor warns") {
    const std::vector<RawStepAtom> atoms = {{{0}, 0.5}, {{1}, 0.5}};
    const auto r = validate_step_distribution(t3(), atoms);
    CHECK(r.ok);
    CHECK_FALSE(r.generates_all_factors);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find('c') != std::string::npos);
  }
  SUBCASE("unnormalized law is rejected") {
    const std::vector<RawStepAtom> atoms = {{{0}, 0.7}, {{1}, 0.2}};
    const auto r = validate_step_distribution(t3(), atoms);
    CHECK_FALSE(r.ok);
    CHECK_THROWS_AS(StepDistribution::create(t3(), atoms), ValidationError);
  }
  SUBCASE("diagnostics name the atom") {
    const std::vector<RawStepAtom> atoms = {{{0}, 0.5}, {{1, 1}, 0.5}};
    const auto r = validate_step_distribution(t3(), atoms);
    CHECK_FALSE(r.ok);
    REQUIRE_FALSE(r.errors.empty());
    CHECK(r.errors[0].rfind("step[1]", 0) == 0);
  }
}

TEST_CASE("automaton state counts") {
  CHECK(brw::testing::nn_automaton()->state_count() == 4);
  CHECK(brw::testing::s5_automaton()->state_count() == 22);
  const auto& a = *brw::testing::s5_automaton();
  const std::vector<Letter> ab = {0, 1};
  int atom_b = -1;
  for (int j = 0; j < a.atom_count(); ++j)
    if (a.atom(j).size() == 1 && a.atom(j)[0] == 1) atom_b = j;
  REQUIRE(atom_b >= 0);
  CHECK(a.increment(ab, atom_b) == -1);
}

TEST_CASE("automaton increments match full multiplication") {
  Rng rng(2024);
  for (const auto& aut : {brw::testing::s5_automaton(), brw::testing::nn_automaton(),
                          brw::testing::make_automaton(4, {{"abd", 0.3}, {"dc", 0.3}, {"b", 0.4}})}) {
    const int d = aut->space().d;
    for (int trial = 0; trial < 10'000; ++trial) {
      const auto w = brw::testing::random_reduced(rng, d, static_cast<int>(rng.below(51)));
      const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(aut->atom_count())));
      const Word word = Word::from_letters(aut->space(), w);
      const Word g = Word::from_letters(aut->space(), std::vector<Letter>(aut->atom(j).begin(), aut->atom(j).end()));
      const int full = static_cast<int>(concat_reduce(word, g).size()) - static_cast<int>(w.size());
      REQUIRE(aut->increment(w, j) == full);
    }
  }
}

#include <doctest.h>

#include "bqc/lemmas.hpp"

#include <cmath>
#include <stdexcept>

using namespace bqc;

namespace {
MultiplierParams params() {
    MultiplierParams mp;
    mp.validate();
    return mp;
}
} // namespace

TEST_CASE("trichotomy: equal wavenumbers always contain case a") {
    const auto cases = classify_trichotomy(2, 2, 100.0, 100.0, 50.0, 1.0);
    CHECK(cases.a);
    CHECK(!cases.empty());
}

TEST_CASE("trichotomy: far-from-resonance configuration contains case b") {
    // k=2, l=3, eta=100: I_{2,100} = [41.67, 75]. A companion frequency
    // xi = 99 gives I_{3,99} = [28.9, 41.25], disjoint from I_{2,100}, so
    // no admissible t exists there; xi = 120 produces the overlap
    // (I_{3,120} = [35, 50]).
    CHECK(critical_interval(3, 99.0).right < critical_interval(2, 100.0).left);
    const double t = 45.0;
    REQUIRE(critical_interval(2, 100.0).contains(t));
    REQUIRE(critical_interval(3, 120.0).contains(t));
    const auto cases = classify_trichotomy(2, 3, 100.0, 120.0, t, 1.2);
    CHECK(cases.b);
}

TEST_CASE("trichotomy: near-resonance adjacent wavenumbers fall back to case c") {
    const double t = 49.5; // within 0.5 of eta/k = 50, so (b) fails at C = 1.2
    REQUIRE(critical_interval(2, 100.0).contains(t));
    REQUIRE(critical_interval(3, 120.0).contains(t));
    const auto cases = classify_trichotomy(2, 3, 100.0, 120.0, t, 1.2);
    CHECK(!cases.a);
    CHECK(!cases.b);
    CHECK(cases.c);
}

TEST_CASE("trichotomy: precondition violations throw") {
    CHECK_THROWS_AS(classify_trichotomy(2, 2, 100.0, 100.0, 50.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(classify_trichotomy(2, 2, 100.0, 5.0, 50.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(classify_trichotomy(2, 2, 100.0, 100.0, 20.0, 1.0), std::invalid_argument);
}

TEST_CASE("trichotomy suite: returned set never empty") {
    const auto suite = run_trichotomy_suite(10000, 2024);
    CHECK(suite.n == 10000);
    CHECK(suite.n_empty == 0);
    // all three cases occur in the sample
    CHECK(suite.n_a > 0);
    CHECK(suite.n_b > 0);
    CHECK(suite.n_c > 0);
}

TEST_CASE("lemma ratio suites produce finite statistics") {
    const auto mp = params();
    for (const auto& id : lemma_ids()) {
        const RatioReport rep = sample_lemma_ratios(id, 1000, 99, mp);
        CHECK(rep.n == 1000);
        CHECK(std::isfinite(rep.sup_ratio));
        CHECK(rep.sup_ratio >= rep.p99);
        CHECK(rep.p99 >= rep.p50);
        CHECK(rep.p50 >= rep.inf_ratio);
        CHECK(rep.inf_ratio >= 0.0);
    }
    CHECK_THROWS_AS(sample_lemma_ratios("no-such-lemma", 10, 1, mp), std::invalid_argument);
}

TEST_CASE("lemma suites are deterministic given the seed") {
    const auto mp = params();
    const auto a = sample_lemma_ratios("wnr-4.6", 500, 7, mp);
    const auto b = sample_lemma_ratios("wnr-4.6", 500, 7, mp);
    CHECK(a.sup_ratio == b.sup_ratio);
    CHECK(a.p50 == b.p50);
    const auto c = sample_lemma_ratios("wnr-4.6", 500, 8, mp);
    CHECK(a.sup_ratio != c.sup_ratio);
}

TEST_CASE("scalar inequality 4.2a holds with constant one; a = b gives ratio 0") {
    const auto mp = params();
    const auto rep = sample_lemma_ratios("scalar-4.2a", 2000, 11, mp);
    CHECK(rep.sup_ratio <= 1.0 + 1e-12);
    // a = b directly: |a^s - b^s| = 0
    CHECK(std::abs(std::pow(3.7, mp.s) - std::pow(3.7, mp.s)) == 0.0);
}

TEST_CASE("dtw-4.4 two-sided band is tight") {
    const auto mp = params();
    const auto rep = sample_lemma_ratios("dtw-4.4", 2000, 12, mp);
    CHECK(rep.inf_ratio > 0.0);
    CHECK(rep.sup_ratio / rep.inf_ratio <= 100.0);
}

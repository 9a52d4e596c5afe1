#include "colluscan/scheme.hpp"

#include "colluscan/error.hpp"
#include "support/reference.hpp"

#include <doctest.h>

#include <cmath>

using namespace colluscan;

namespace {

// Round to three decimals for comparison against the reference values.
double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

} // namespace

TEST_CASE("paper scheme reproduces the reference test-group weights") {
    // 13 standard, 3 code, 1 essay: event numerators 13*4 + 3*2 + 1*2 = 60,
    // plus 17 point numerators of 1 -> denominator 77.
    const SubtaskCatalog catalog = testsupport::synth_catalog(13, 3, 1);
    const AttributeScheme scheme = build_scheme(catalog, SchemeMode::Paper);
    scheme.validate();
    CHECK(scheme.denominator == 77);
    CHECK(round3(scheme.event_weight(0)) == doctest::Approx(0.052));  // standard
    CHECK(round3(scheme.event_weight(13)) == doctest::Approx(0.026)); // code
    CHECK(round3(scheme.event_weight(16)) == doctest::Approx(0.026)); // essay
    CHECK(round3(scheme.point_weight(0)) == doctest::Approx(0.013));
    // Exact rational sum: sum of all numerators equals the denominator.
    long sum = 0;
    for (const auto& w : scheme.weights) {
        sum += w.event_num + w.point_num;
    }
    CHECK(sum == scheme.denominator);
}

TEST_CASE("paper scheme reproduces the reference comparison-group weights") {
    // 16 standard, 3 code: 16*4 + 3*2 = 70 event numerators plus 19 -> 89.
    const SubtaskCatalog catalog = testsupport::synth_catalog(16, 3, 0);
    const AttributeScheme scheme = build_scheme(catalog, SchemeMode::Paper);
    scheme.validate();
    CHECK(scheme.denominator == 89);
    CHECK(round3(scheme.event_weight(0)) == doctest::Approx(0.045));  // standard
    CHECK(round3(scheme.event_weight(16)) == doctest::Approx(0.022)); // code
    CHECK(round3(scheme.point_weight(0)) == doctest::Approx(0.011));
}

TEST_CASE("equal scheme gives every attribute the same weight") {
    const SubtaskCatalog catalog = testsupport::synth_catalog(2, 1, 1);
    const AttributeScheme scheme = build_scheme(catalog, SchemeMode::Equal);
    scheme.validate();
    CHECK(scheme.denominator == 8); // 2n attributes, numerators all 1
    for (std::size_t j = 0; j < scheme.subtask_count(); ++j) {
        CHECK(scheme.event_weight(j) == doctest::Approx(0.125));
        CHECK(scheme.point_weight(j) == doctest::Approx(0.125));
    }
}

TEST_CASE("scheme validation catches a broken weight sum") {
    AttributeScheme scheme;
    scheme.denominator = 4;
    scheme.weights.push_back({"a", 1, 1}); // 2/4: does not sum to 1
    CHECK_THROWS_AS(scheme.validate(), Error);
    scheme.weights.push_back({"b", 1, 1}); // now 4/4
    CHECK_NOTHROW(scheme.validate());
    scheme.weights[0].event_num = -1;
    CHECK_THROWS_AS(scheme.validate(), Error);
}

TEST_CASE("scheme hash tracks content") {
    const SubtaskCatalog catalog = testsupport::synth_catalog(2, 1, 1);
    const AttributeScheme paper = build_scheme(catalog, SchemeMode::Paper);
    const AttributeScheme equal = build_scheme(catalog, SchemeMode::Equal);
    CHECK(paper.hash() == build_scheme(catalog, SchemeMode::Paper).hash());
    CHECK(paper.hash() != equal.hash());
    // Normalization mode is part of the scheme identity.
    const AttributeScheme none =
        build_scheme(catalog, SchemeMode::Paper, NormalizationMode::None);
    CHECK(paper.hash() != none.hash());
}

TEST_CASE("mode and normalization names round-trip") {
    CHECK(scheme_mode_from_string("paper") == SchemeMode::Paper);
    CHECK(scheme_mode_from_string("equal") == SchemeMode::Equal);
    CHECK(to_string(SchemeMode::Paper) == "paper");
    CHECK(normalization_mode_from_string("range") == NormalizationMode::Range);
    CHECK(normalization_mode_from_string("zscore") == NormalizationMode::ZScore);
    CHECK(normalization_mode_from_string("none") == NormalizationMode::None);
    CHECK(to_string(NormalizationMode::ZScore) == "zscore");
    CHECK_THROWS_AS(scheme_mode_from_string("fancy"), Error);
    CHECK_THROWS_AS(normalization_mode_from_string("minmax"), Error);
}

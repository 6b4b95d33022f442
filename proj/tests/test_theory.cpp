#include <doctest.h>

#include <cmath>

#include "bemap/theory.hpp"

using namespace bemap::theory;

TEST_CASE("lemma1: L=1 decomposition is an identity") {
    auto r = verify_lemma1(8, 8, 1, 1);
    CHECK(r.max_error <= 1e-10);
}

TEST_CASE("lemma1: full-rank random instances reconstruct to 1e-8") {
    for (int k = 0; k < 5; ++k) {
        auto r = verify_lemma1(10, 10, 2, 100 + k);
        CHECK(r.max_error <= 1e-8);
    }
}

TEST_CASE("lemma1: deeper chains still reconstruct") {
    auto r = verify_lemma1(12, 6, 3, 7);
    CHECK(r.max_error <= 1e-6);  // conditioning degrades with depth
}

TEST_CASE("theorem1: ratio tracks E[1/d] on small instances") {
    auto r = verify_theorem1(100, 0.08, 8, 200, 11);
    CHECK(r.predicted_ratio > 0.0);
    CHECK(std::abs(r.empirical_ratio / r.predicted_ratio - 1.0) <= 0.10);
    CHECK(r.centroid_shift <= 4.0);
}

TEST_CASE("theorem1 rejects zero trials") {
    CHECK_THROWS_AS(verify_theorem1(50, 0.1, 4, 0, 1), std::invalid_argument);
}

TEST_CASE("lemma3/theorem2: balanced neighborhoods shrink toward mu_bar") {
    auto r = verify_lemma3_theorem2(2000, 5, 4, 21);
    CHECK(r.shrinkage_ratio < 1.0);
    CHECK(r.centroid_gap <= r.centroid_gap_3se);
    // skewed control separates the group centroids by about half the
    // original centroid distance
    CHECK(r.control_group_gap > 0.5);
}

TEST_CASE("lemma3/theorem2: degenerate equal centroids still shrink") {
    ResidualSpec spec;
    spec.centroid_separation = 0.0;
    auto r = verify_lemma3_theorem2(2000, 3, 4, 5, spec);
    CHECK(r.shrinkage_ratio < 1.0);
    CHECK(r.centroid_gap <= r.centroid_gap_3se);
}

TEST_CASE("lemma3/theorem2 rejects undersized neighborhoods") {
    CHECK_THROWS_AS(verify_lemma3_theorem2(100, 1, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(verify_lemma3_theorem2(100, 1, 2, 0), std::invalid_argument);
}

TEST_CASE("run_all passes at defaults scaled down") {
    VerificationConfig cfg;
    cfg.lemma1_instances = 3;
    cfg.thm1_n = 100;
    cfg.thm1_trials = 200;
    cfg.thm1_rel_tol = 0.10;
    cfg.lemma3_n = 1000;
    cfg.lemma3_trials = 5;
    cfg.seed = 2;
    auto checks = run_all(cfg);
    REQUIRE(checks.size() == 4);
    for (const auto& c : checks) {
        INFO(c.claim, " predicted=", c.predicted, " empirical=", c.empirical);
        CHECK(c.pass);
    }
}

TEST_CASE("run_all flags insufficient samples") {
    VerificationConfig cfg;
    cfg.lemma1_instances = 1;
    cfg.thm1_n = 60;
    cfg.thm1_trials = 1;
    cfg.thm1_rel_tol = 0.5;
    cfg.lemma3_n = 200;
    cfg.lemma3_trials = 1;
    cfg.seed = 3;
    auto checks = run_all(cfg);
    bool flagged = false;
    for (const auto& c : checks)
        if (c.note.find("insufficient-sample") != std::string::npos) flagged = true;
    CHECK(flagged);
}

TEST_CASE("zero tolerance fails the theorem1 check") {
    VerificationConfig cfg;
    cfg.lemma1_instances = 1;
    cfg.thm1_n = 80;
    cfg.thm1_trials = 50;
    cfg.thm1_rel_tol = 0.0;
    cfg.lemma3_n = 300;
    cfg.lemma3_trials = 2;
    auto checks = run_all(cfg);
    bool thm1_failed = false;
    for (const auto& c : checks)
        if (c.claim == "theorem1_distance_shrinkage_rate" && !c.pass) thm1_failed = true;
    CHECK(thm1_failed);
}

TEST_CASE("regular-graph substitute: cycle with chords gives ratio 1/d") {
    // On a d-regular graph E[1/d_i] = 1/d exactly; approximate via the
    // Monte-Carlo harness by checking predicted_ratio on dense p where the
    // degree concentration is strong is out of scope here; instead check the
    // predicted value arithmetic directly on p=1 (complete graph, d=n-1).
    auto r = verify_theorem1(30, 1.0, 4, 20, 9);
    CHECK(r.predicted_ratio == doctest::Approx(1.0 / 29.0).epsilon(1e-12));
    CHECK(std::abs(r.empirical_ratio / r.predicted_ratio - 1.0) <= 0.25);
}

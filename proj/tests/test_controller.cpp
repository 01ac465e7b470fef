#include <doctest.h>

#include <cmath>

#include "cal/controller.hpp"
#include "cal/error.hpp"
#include "cal/random.hpp"
#include "oracles/algorithm1.hpp"

using namespace cal;

TEST_CASE("default controller constants") {
    const ThresholdController c;
    CHECK(c.current_threshold() == 60.0);
    CHECK(c.config().delta == 2.0);
    CHECK(c.config().lower_bound == 45.0);
    CHECK(c.config().upper_bound == 255.0);
    CHECK(c.config().update_frequency == 150);
    CHECK(std::isinf(c.best_loss()));
    CHECK(c.batch_counter() == 0);
}

TEST_CASE("construction validates the configuration") {
    ControllerConfig cfg;
    cfg.initial_threshold = 45.0;
    CHECK(ThresholdController(cfg).current_threshold() == 45.0);
    cfg.initial_threshold = 40.0;
    CHECK_THROWS_AS(ThresholdController{cfg}, ConfigError);
    cfg.initial_threshold = 256.0;
    CHECK_THROWS_AS(ThresholdController{cfg}, ConfigError);
    cfg = {};
    cfg.delta = 0.0;
    CHECK_THROWS_AS(ThresholdController{cfg}, ConfigError);
    cfg = {};
    cfg.update_frequency = 0;
    CHECK_THROWS_AS(ThresholdController{cfg}, ConfigError);
    cfg = {};
    cfg.lower_bound = 100.0;
    cfg.upper_bound = 50.0;
    CHECK_THROWS_AS(ThresholdController{cfg}, ConfigError);
}

TEST_CASE("rising loss after a new minimum lowers the threshold") {
    ControllerConfig cfg;
    cfg.update_frequency = 1;
    ThresholdController c(cfg);
    const auto e1 = c.observe(1.0);
    CHECK(e1.action == ThresholdAction::Increase);
    CHECK(e1.threshold_after == 62.0);
    CHECK(e1.best_loss_after == 1.0);
    const auto e2 = c.observe(2.0);
    CHECK(e2.action == ThresholdAction::Decrease);
    CHECK(e2.threshold_after == 60.0);
    CHECK(e2.best_loss_after == 1.0);
    CHECK(e2.step_index == 2);
}

TEST_CASE("a flat loss always takes the increase branch up to the ceiling") {
    ControllerConfig cfg;
    cfg.update_frequency = 1;
    cfg.upper_bound = 70.0;
    ThresholdController c(cfg);
    const double expected[] = {62, 64, 66, 68, 70, 70, 70};
    for (double t : expected) {
        const auto e = c.observe(1.0);
        CHECK(e.action == ThresholdAction::Increase);
        CHECK(e.threshold_after == t);
    }
}

TEST_CASE("a decrease at the floor is clamped") {
    ControllerConfig cfg;
    cfg.initial_threshold = 45.0;
    cfg.update_frequency = 2;
    ThresholdController c(cfg);
    CHECK(c.observe(1.0).action == ThresholdAction::None);
    const auto e = c.observe(2.0);
    CHECK(e.action == ThresholdAction::DecreaseClamped);
    CHECK(e.threshold_after == 45.0);
    CHECK(c.current_threshold() == 45.0);
}

TEST_CASE("k increases from 60 land on 60 + 2k") {
    ControllerConfig cfg;
    cfg.update_frequency = 3;
    ThresholdController c(cfg);
    for (int k = 1; k <= 20; ++k) {
        for (int i = 0; i < 3; ++i) c.observe(1.0 / k);  // strictly falling: never above best
        CHECK(c.current_threshold() == 60.0 + 2.0 * k);
    }
}

TEST_CASE("invalid losses are rejected without touching state") {
    ControllerConfig cfg;
    cfg.update_frequency = 1;
    ThresholdController c(cfg);
    c.observe(0.5);
    const double t = c.current_threshold();
    CHECK_THROWS_AS(c.observe(NAN), NumericError);
    CHECK_THROWS_AS(c.observe(INFINITY), NumericError);
    CHECK_THROWS_AS(c.observe(-0.1), NumericError);
    CHECK(c.current_threshold() == t);
    CHECK(c.best_loss() == 0.5);
    CHECK(c.batch_counter() == 1);
}

TEST_CASE("trajectory properties over random loss sequences") {
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        ControllerConfig cfg;
        cfg.update_frequency = 1 + rng.below(7);
        cfg.delta = rng.uniform(0.5, 4.0);
        const std::size_t n = 1 + rng.below(400);
        std::vector<double> losses(n);
        for (double& l : losses) l = static_cast<double>(rng.below(20)) / 10.0;

        ThresholdController a(cfg);
        ThresholdController b(cfg);
        double last_best = INFINITY;
        const auto rows = oracle::run_algorithm1(
            losses, {cfg.initial_threshold, cfg.delta, cfg.lower_bound, cfg.upper_bound, cfg.update_frequency});
        for (std::size_t i = 0; i < n; ++i) {
            const auto ea = a.observe(losses[i]);
            CHECK(ea == b.observe(losses[i]));
            CHECK(ea.threshold_after >= cfg.lower_bound);
            CHECK(ea.threshold_after <= cfg.upper_bound);
            CHECK(ea.best_loss_after <= last_best);
            last_best = ea.best_loss_after;
            CHECK((ea.action != ThresholdAction::None) == (ea.step_index % cfg.update_frequency == 0));
            CHECK(ea.threshold_after == rows[i].threshold);
            CHECK(ea.best_loss_after == rows[i].best_loss);
            CHECK(action_name(ea.action) == rows[i].action);
        }
    }
}

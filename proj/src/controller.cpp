#include "cal/controller.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "cal/error.hpp"

namespace cal {

std::string_view action_name(ThresholdAction action) {
    switch (action) {
        case ThresholdAction::None: return "none";
        case ThresholdAction::Increase: return "increase";
        case ThresholdAction::Decrease: return "decrease";
        case ThresholdAction::DecreaseClamped: return "decrease_clamped";
    }
    return "none";
}

ThresholdAction parse_action(std::string_view name) {
    for (auto a : {ThresholdAction::None, ThresholdAction::Increase, ThresholdAction::Decrease,
                   ThresholdAction::DecreaseClamped}) {
        if (action_name(a) == name) return a;
    }
    throw IoError(fmt::format("unknown threshold action '{}'", name));
}

ThresholdController::ThresholdController(const ControllerConfig& config)
    : config_(config), threshold_(config.initial_threshold) {
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(config.initial_threshold) || !finite(config.lower_bound) ||
        !finite(config.upper_bound) || !finite(config.delta)) {
        throw ConfigError("controller parameters must be finite");
    }
    if (config.lower_bound > config.upper_bound) {
        throw ConfigError(fmt::format("controller lower bound {} exceeds upper bound {}",
                                      config.lower_bound, config.upper_bound));
    }
    if (config.initial_threshold < config.lower_bound ||
        config.initial_threshold > config.upper_bound) {
        throw ConfigError(fmt::format("initial threshold {} outside [{}, {}]",
                                      config.initial_threshold, config.lower_bound,
                                      config.upper_bound));
    }
    if (!(config.delta > 0.0)) {
        throw ConfigError(fmt::format("threshold step must be positive, got {}", config.delta));
    }
    if (config.update_frequency == 0) throw ConfigError("update frequency must be at least 1");
}

ThresholdEvent ThresholdController::observe(double loss) {
    if (!std::isfinite(loss) || loss < 0.0) {
        throw NumericError(fmt::format("controller received invalid loss {}", loss));
    }

    best_loss_ = std::min(best_loss_, loss);
    ++batch_counter_;

    ThresholdAction action = ThresholdAction::None;
    if (batch_counter_ % config_.update_frequency == 0) {
        if (loss > best_loss_) {
            const double lowered = threshold_ - config_.delta;
            action = lowered < config_.lower_bound ? ThresholdAction::DecreaseClamped
                                                   : ThresholdAction::Decrease;
            threshold_ = std::max(config_.lower_bound, lowered);
        } else {
            action = ThresholdAction::Increase;
            threshold_ = std::min(config_.upper_bound, threshold_ + config_.delta);
        }
    }
    return ThresholdEvent{batch_counter_, action, threshold_, loss, best_loss_};
}

}  // namespace cal

#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace cal {

struct ControllerConfig {
    double initial_threshold = 60.0;
    double delta = 2.0;
    double lower_bound = 45.0;
    double upper_bound = 255.0;
    std::uint64_t update_frequency = 150;
};

enum class ThresholdAction : std::uint8_t { None, Increase, Decrease, DecreaseClamped };

std::string_view action_name(ThresholdAction action);
ThresholdAction parse_action(std::string_view name);

struct ThresholdEvent {
    std::uint64_t step_index = 0;  // 1-based batch count after this observation
    ThresholdAction action = ThresholdAction::None;
    double threshold_after = 0.0;
    double loss = 0.0;
    double best_loss_after = 0.0;

    bool operator==(const ThresholdEvent&) const = default;
};

/// Loss-feedback pixel-intensity threshold.
///
/// Every observed batch loss first lowers the running minimum `best_loss`. On each
/// `update_frequency`-th batch the threshold moves by `delta`: down (never below
/// `lower_bound`) when the batch loss is strictly above `best_loss`, otherwise up (never
/// above `upper_bound`). Since the minimum already includes the current loss, a flat
/// loss sequence always takes the upward branch.
///
/// Single-owner state: observe() must be called once per mini-batch, in order.
class ThresholdController {
public:
    /// Throws ConfigError if the initial threshold is outside the bounds, delta <= 0 or
    /// update_frequency == 0.
    explicit ThresholdController(const ControllerConfig& config = {});

    /// Throws NumericError for a non-finite or negative loss; the state is left untouched.
    ThresholdEvent observe(double loss);

    double current_threshold() const { return threshold_; }
    double best_loss() const { return best_loss_; }
    std::uint64_t batch_counter() const { return batch_counter_; }
    const ControllerConfig& config() const { return config_; }

private:
    ControllerConfig config_;
    double threshold_;
    double best_loss_ = std::numeric_limits<double>::infinity();
    std::uint64_t batch_counter_ = 0;
};

}  // namespace cal

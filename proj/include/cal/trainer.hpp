#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cal/binarize.hpp"
#include "cal/checkpoint.hpp"
#include "cal/controller.hpp"
#include "cal/dataset.hpp"
#include "cal/history.hpp"
#include "cal/metrics.hpp"

namespace cal {

enum class TrainMode : std::uint8_t { Baseline, CalFinetune, RelabelOnly };

struct TrainConfig {
    double learning_rate = 0.001;
    std::uint32_t epochs = 3;
    std::size_t batch_size = 1;
    std::uint64_t seed = 0;
    ControllerConfig controller;
    TrainMode mode = TrainMode::Baseline;
    std::vector<double> intensity_weights;  // empty: uniform over the dataset's bands
    MorphRadii morphology;
    double eval_cut = 0.5;

    void validate() const;
    /// The configured weights, or uniform weights for `band_count` bands.
    std::vector<double> weights_for(std::size_t band_count) const;
};

struct TrainResult {
    Checkpoint checkpoint;
    TrainHistory history;
    std::optional<double> final_threshold;  // CAL runs only
};

/// Visit order of epoch `epoch`: a Fisher-Yates shuffle seeded from (seed, epoch) only.
std::vector<std::size_t> batch_order(std::size_t count, std::uint64_t seed, std::uint32_t epoch);

/// Trains on the dataset's stored masks. Every sample must carry a mask (ConfigError
/// otherwise). When `heldout` is given, a metrics snapshot is taken after each epoch.
TrainResult train_baseline(const Dataset& dataset, Checkpoint start, const TrainConfig& config,
                           const Dataset* heldout = nullptr);

/// CAL fine-tuning. For every batch: intensity -> binarize at the controller's current
/// threshold -> BCE against those labels -> one Adam step -> controller.observe(loss).
/// Stored masks are never read.
TrainResult cal_finetune(const Dataset& dataset, Checkpoint start, const TrainConfig& config,
                         const Dataset* heldout = nullptr);

/// Dispatches on config.mode. RelabelOnly is not a training mode and raises ConfigError.
TrainResult train(const Dataset& dataset, Checkpoint start, const TrainConfig& config,
                  const Dataset* heldout = nullptr);

/// Labels derived from the patch alone: binarize(to_intensity(patch), threshold), then
/// optional morphology.
Mask cal_labels(const ImagePatch& patch, double threshold, std::span<const double> weights,
                MorphRadii morphology);

/// Replaces every mask with cal_labels(...). Patches and reference masks are kept.
Dataset relabel_dataset(const Dataset& dataset, double threshold, std::span<const double> weights,
                        MorphRadii morphology = {});

/// Micro-averaged confusion of predict_mask(model, patch, cut) against stored masks.
ConfusionMatrix confusion(const Dataset& dataset, const SegModel& model, double cut = 0.5);
MetricsReport evaluate(const Dataset& dataset, const SegModel& model, double cut = 0.5);

/// Fresh zero-initialized model whose normalization is fitted on `dataset`.
Checkpoint fresh_checkpoint(const Dataset& dataset, int window, double learning_rate);

}  // namespace cal

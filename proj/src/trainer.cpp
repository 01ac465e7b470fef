#include "cal/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "cal/error.hpp"
#include "cal/random.hpp"

namespace cal {

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError(fmt::format("learning rate {} must be finite and non-negative", learning_rate));
    }
    if (epochs == 0) throw ConfigError("epochs must be at least 1");
    if (batch_size == 0) throw ConfigError("batch size must be at least 1");
    if (morphology.opening < 0 || morphology.closing < 0) {
        throw ConfigError("morphology radii must be non-negative");
    }
    if (!(eval_cut >= 0.0 && eval_cut <= 1.0)) throw ConfigError("evaluation cut must lie in [0, 1]");
    ThresholdController check(controller);
}

std::vector<double> TrainConfig::weights_for(std::size_t band_count) const {
    if (intensity_weights.empty()) return uniform_weights(band_count);
    return intensity_weights;
}

std::vector<std::size_t> batch_order(std::size_t count, std::uint64_t seed, std::uint32_t epoch) {
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(seed, 0x5eed0000ULL + epoch));
    for (std::size_t i = count; i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
    }
    return order;
}

Mask cal_labels(const ImagePatch& patch, double threshold, std::span<const double> weights,
                MorphRadii morphology) {
    return morph_clean(binarize(to_intensity(patch, weights), threshold), morphology);
}

namespace {

void prepare(const Dataset& dataset, Checkpoint& start, const TrainConfig& config) {
    config.validate();
    if (dataset.empty()) throw ConfigError("training dataset is empty");
    const SegModel& model = start.model;
    if (model.band_count() != dataset.bands.size()) {
        throw DimensionError(fmt::format("model expects {} bands, dataset has {}",
                                         model.band_count(), dataset.bands.size()));
    }
    if (start.optimizer.first_moment.size() != model.parameter_count()) {
        start.optimizer = AdamState::for_model(model, config.learning_rate);
    }
    start.optimizer.learning_rate = config.learning_rate;
}

void snapshot(TrainResult& result, std::uint32_t epoch, const Dataset* heldout, double cut) {
    if (heldout != nullptr) {
        result.history.snapshots.push_back({epoch, evaluate(*heldout, result.checkpoint.model, cut)});
    }
}

bool degenerate(std::span<const Mask> labels) {
    std::size_t positive = 0;
    std::size_t total = 0;
    for (const auto& m : labels) {
        positive += m.count_positive();
        total += m.size();
    }
    return positive == 0 || positive == total;
}

// Shared epoch/batch loop. `label_batch` produces the labels of one batch and may
// record per-batch state into the history record after the step.
template <typename LabelFn, typename ObserveFn>
TrainResult run_loop(const Dataset& dataset, Checkpoint start, const TrainConfig& config,
                     const Dataset* heldout, LabelFn label_batch, ObserveFn observe) {
    TrainResult result{std::move(start), {}, std::nullopt};
    std::uint64_t step = 0;
    for (std::uint32_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto order = batch_order(dataset.size(), config.seed, epoch);
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            std::vector<const Sample*> samples;
            for (std::size_t i = begin; i < end; ++i) samples.push_back(&dataset.samples[order[i]]);

            const std::vector<Mask> labels = label_batch(samples);
            if (degenerate(labels)) ++result.history.degenerate_batches;
            std::vector<LabeledView> batch;
            for (std::size_t i = 0; i < samples.size(); ++i) {
                batch.push_back({samples[i]->patch, labels[i]});
            }
            const LossAndGradient lg = loss_and_gradient(result.checkpoint.model, batch);
            adam_step(result.checkpoint.model, result.checkpoint.optimizer, lg.gradient);

            HistoryRecord record{++step, epoch, lg.loss, std::nullopt, std::nullopt, std::nullopt};
            observe(record);
            result.history.records.push_back(record);
        }
        snapshot(result, epoch, heldout, config.eval_cut);
    }
    return result;
}

}  // namespace

TrainResult train_baseline(const Dataset& dataset, Checkpoint start, const TrainConfig& config,
                           const Dataset* heldout) {
    prepare(dataset, start, config);
    for (const auto& s : dataset.samples) {
        if (!s.mask) throw ConfigError(fmt::format("training entry '{}' has no mask", s.id));
    }
    return run_loop(
        dataset, std::move(start), config, heldout,
        [](const std::vector<const Sample*>& samples) {
            std::vector<Mask> labels;
            for (const Sample* s : samples) labels.push_back(*s->mask);
            return labels;
        },
        [](HistoryRecord&) {});
}

TrainResult cal_finetune(const Dataset& dataset, Checkpoint start, const TrainConfig& config,
                         const Dataset* heldout) {
    prepare(dataset, start, config);
    const std::vector<double> weights = config.weights_for(dataset.bands.size());
    ThresholdController controller(config.controller);
    TrainResult result = run_loop(
        dataset, std::move(start), config, heldout,
        [&](const std::vector<const Sample*>& samples) {
            std::vector<Mask> labels;
            for (const Sample* s : samples) {
                labels.push_back(cal_labels(s->patch, controller.current_threshold(), weights,
                                            config.morphology));
            }
            return labels;
        },
        [&](HistoryRecord& record) {
            const ThresholdEvent event = controller.observe(record.loss);
            record.threshold = event.threshold_after;
            record.best_loss = event.best_loss_after;
            record.action = event.action;
        });
    result.final_threshold = controller.current_threshold();
    return result;
}

TrainResult train(const Dataset& dataset, Checkpoint start, const TrainConfig& config,
                  const Dataset* heldout) {
    switch (config.mode) {
        case TrainMode::Baseline: return train_baseline(dataset, std::move(start), config, heldout);
        case TrainMode::CalFinetune: return cal_finetune(dataset, std::move(start), config, heldout);
        case TrainMode::RelabelOnly: break;
    }
    throw ConfigError("relabel_only is not a training mode; use relabel_dataset");
}

Dataset relabel_dataset(const Dataset& dataset, double threshold, std::span<const double> weights,
                        MorphRadii morphology) {
    if (!(threshold >= 0.0 && threshold <= kIntensityMax)) {
        throw ConfigError(fmt::format("relabel threshold {} outside [0, 255]", threshold));
    }
    Dataset out = dataset;
    for (auto& s : out.samples) s.mask = cal_labels(s.patch, threshold, weights, morphology);
    return out;
}

ConfusionMatrix confusion(const Dataset& dataset, const SegModel& model, double cut) {
    ConfusionMatrix cm;
    for (const auto& s : dataset.samples) {
        if (!s.mask) throw ConfigError(fmt::format("evaluation entry '{}' has no mask", s.id));
        cm = accumulate(cm, predict_mask(model, s.patch, cut), *s.mask);
    }
    return cm;
}

MetricsReport evaluate(const Dataset& dataset, const SegModel& model, double cut) {
    return report(confusion(dataset, model, cut));
}

Checkpoint fresh_checkpoint(const Dataset& dataset, int window, double learning_rate) {
    SegModel model(window, dataset.bands.size());
    const auto patches = dataset.patches();
    fit_normalization(model, patches);
    AdamState opt = AdamState::for_model(model, learning_rate);
    return Checkpoint{std::move(model), std::move(opt)};
}

}  // namespace cal

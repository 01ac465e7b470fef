#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cal/raster.hpp"

namespace cal {

/// Per-pixel logistic classifier over a k x k x B neighbourhood.
///
/// Feature order is band-major, then row, then column of the window; borders are
/// replicate-padded. Every feature is standardized with frozen (mean, scale) constants
/// before the dot product: logit = sum_i w_i * (x_i - mean_i) / scale_i + bias.
class SegModel {
public:
    SegModel() = default;
    /// Zero weights, zero bias, identity normalization. `window` must be odd and positive.
    SegModel(int window, std::size_t bands);

    int window() const { return window_; }
    int radius() const { return window_ / 2; }
    std::size_t band_count() const { return bands_; }
    std::size_t feature_count() const { return weights_.size(); }
    /// Weights plus the bias.
    std::size_t parameter_count() const { return weights_.size() + 1; }

    std::span<const double> weights() const { return weights_; }
    std::span<double> weights() { return weights_; }
    double bias() const { return bias_; }
    void set_bias(double bias) { bias_ = bias; }

    std::span<const double> feature_mean() const { return feature_mean_; }
    std::span<const double> feature_scale() const { return feature_scale_; }
    void set_normalization(std::vector<double> mean, std::vector<double> scale);

    /// Flat view [weights..., bias], the layout used by the optimizer.
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> params);

    /// Raw (unnormalized) neighbourhood of pixel (x, y) written into `out`.
    void gather_features(const ImagePatch& patch, std::size_t x, std::size_t y,
                         std::span<double> out) const;

    bool operator==(const SegModel&) const = default;

private:
    int window_ = 1;
    std::size_t bands_ = 0;
    std::vector<double> weights_;
    double bias_ = 0.0;
    std::vector<double> feature_mean_;
    std::vector<double> feature_scale_;
};

/// Sets the model's normalization from per-feature statistics over every pixel of
/// `patches`. Features with (near) zero spread keep a unit scale.
void fit_normalization(SegModel& model, std::span<const ImagePatch> patches);

/// Model output; every value lies strictly inside (0, 1).
class ProbabilityMap : public Grid<double> {
public:
    ProbabilityMap() = default;
    ProbabilityMap(std::size_t width, std::size_t height, std::vector<double> values);
};

double sigmoid(double z);

/// Throws DimensionError if the patch band count differs from the model's.
ProbabilityMap forward(const SegModel& model, const ImagePatch& patch);

inline constexpr double kProbabilityClip = 1e-7;

/// Mean binary cross-entropy with probabilities clipped to [1e-7, 1 - 1e-7].
double bce_loss(const ProbabilityMap& probs, const Mask& labels);

struct Gradient {
    std::vector<double> weights;
    double bias = 0.0;

    std::vector<double> flat() const;
};

struct LabeledView {
    const ImagePatch& patch;
    const Mask& labels;
};

struct LossAndGradient {
    double loss = 0.0;  // pixel-weighted mean BCE over the batch
    Gradient gradient;
    std::size_t pixels = 0;
};

/// Analytic gradient of mean BCE over every pixel of the batch. The per-pixel residual
/// is p - y; gradients are reduced in batch order, row-major. The loss sums each sample
/// row-major and then adds the per-sample totals in ascending order, so it does not
/// depend on the order of the batch.
LossAndGradient loss_and_gradient(const SegModel& model, std::span<const LabeledView> batch);

Gradient backward(const SegModel& model, const ImagePatch& patch, const Mask& labels);

struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::uint64_t step = 0;
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState for_model(const SegModel& model, double learning_rate = 0.001);

    bool operator==(const AdamState&) const = default;
};

/// One bias-corrected Adam update. Throws NumericError (without touching anything) if a
/// gradient component is non-finite, DimensionError on a length mismatch.
void adam_step(SegModel& model, AdamState& state, const Gradient& gradient);

/// Cloud iff probability > cut.
Mask predict_mask(const SegModel& model, const ImagePatch& patch, double cut = 0.5);

}  // namespace cal

#include "cal/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "cal/error.hpp"

namespace cal {

SegModel::SegModel(int window, std::size_t bands) : window_(window), bands_(bands) {
    if (window < 1 || window % 2 == 0) {
        throw ConfigError(fmt::format("model window must be odd and positive, got {}", window));
    }
    if (bands == 0) throw ConfigError("model needs at least one band");
    const auto features = static_cast<std::size_t>(window) * static_cast<std::size_t>(window) * bands;
    weights_.assign(features, 0.0);
    feature_mean_.assign(features, 0.0);
    feature_scale_.assign(features, 1.0);
}

void SegModel::set_normalization(std::vector<double> mean, std::vector<double> scale) {
    if (mean.size() != feature_count() || scale.size() != feature_count()) {
        throw DimensionError(fmt::format("normalization needs {} entries, got {} and {}",
                                         feature_count(), mean.size(), scale.size()));
    }
    for (std::size_t i = 0; i < scale.size(); ++i) {
        if (!std::isfinite(mean[i]) || !std::isfinite(scale[i]) || !(scale[i] > 0.0)) {
            throw ConfigError(fmt::format("invalid normalization for feature {}", i));
        }
    }
    feature_mean_ = std::move(mean);
    feature_scale_ = std::move(scale);
}

std::vector<double> SegModel::parameters() const {
    std::vector<double> out(weights_.begin(), weights_.end());
    out.push_back(bias_);
    return out;
}

void SegModel::set_parameters(std::span<const double> params) {
    if (params.size() != parameter_count()) {
        throw DimensionError(fmt::format("model has {} parameters, got {}", parameter_count(),
                                         params.size()));
    }
    std::copy(params.begin(), params.end() - 1, weights_.begin());
    bias_ = params.back();
}

void SegModel::gather_features(const ImagePatch& patch, std::size_t x, std::size_t y,
                               std::span<double> out) const {
    const auto r = static_cast<std::ptrdiff_t>(radius());
    const auto w = static_cast<std::ptrdiff_t>(patch.width());
    const auto h = static_cast<std::ptrdiff_t>(patch.height());
    std::size_t i = 0;
    for (std::size_t b = 0; b < bands_; ++b) {
        const auto band = patch.band(b);
        for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
            const auto yy = std::clamp(static_cast<std::ptrdiff_t>(y) + dy, std::ptrdiff_t{0}, h - 1);
            for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
                const auto xx =
                    std::clamp(static_cast<std::ptrdiff_t>(x) + dx, std::ptrdiff_t{0}, w - 1);
                out[i++] = band[static_cast<std::size_t>(yy * w + xx)];
            }
        }
    }
}

namespace {

void check_bands(const SegModel& model, const ImagePatch& patch) {
    if (patch.band_count() != model.band_count()) {
        throw DimensionError(fmt::format("model expects {} bands, patch has {}",
                                         model.band_count(), patch.band_count()));
    }
}

// Standardized features of pixel (x, y), written over `buf`.
void normalized_features(const SegModel& model, const ImagePatch& patch, std::size_t x,
                         std::size_t y, std::span<double> buf) {
    model.gather_features(patch, x, y, buf);
    const auto mean = model.feature_mean();
    const auto scale = model.feature_scale();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = (buf[i] - mean[i]) / scale[i];
}

double logit(const SegModel& model, std::span<const double> features) {
    const auto w = model.weights();
    double z = model.bias();
    for (std::size_t i = 0; i < features.size(); ++i) z += w[i] * features[i];
    return z;
}

// Keeps the open-interval invariant once exp() saturates.
double open_unit(double p) {
    constexpr double lo = std::numeric_limits<double>::min();
    const double hi = std::nextafter(1.0, 0.0);
    return std::clamp(p, lo, hi);
}

}  // namespace

void fit_normalization(SegModel& model, std::span<const ImagePatch> patches) {
    const std::size_t f = model.feature_count();
    std::vector<double> sum(f, 0.0);
    std::vector<double> buf(f);
    std::size_t n = 0;
    for (const auto& patch : patches) {
        check_bands(model, patch);
        for (std::size_t y = 0; y < patch.height(); ++y) {
            for (std::size_t x = 0; x < patch.width(); ++x) {
                model.gather_features(patch, x, y, buf);
                for (std::size_t i = 0; i < f; ++i) sum[i] += buf[i];
                ++n;
            }
        }
    }
    if (n == 0) throw ConfigError("cannot fit normalization on an empty patch set");

    std::vector<double> mean(f);
    for (std::size_t i = 0; i < f; ++i) mean[i] = sum[i] / static_cast<double>(n);
    std::vector<double> sq(f, 0.0);
    for (const auto& patch : patches) {
        for (std::size_t y = 0; y < patch.height(); ++y) {
            for (std::size_t x = 0; x < patch.width(); ++x) {
                model.gather_features(patch, x, y, buf);
                for (std::size_t i = 0; i < f; ++i) {
                    const double d = buf[i] - mean[i];
                    sq[i] += d * d;
                }
            }
        }
    }
    std::vector<double> scale(f);
    for (std::size_t i = 0; i < f; ++i) {
        const double sd = std::sqrt(sq[i] / static_cast<double>(n));
        scale[i] = sd > 1e-12 ? sd : 1.0;
    }
    model.set_normalization(std::move(mean), std::move(scale));
}

ProbabilityMap::ProbabilityMap(std::size_t width, std::size_t height, std::vector<double> values)
    : Grid(width, height, std::move(values)) {
    if (!std::all_of(values_.begin(), values_.end(), [](double p) { return p > 0.0 && p < 1.0; })) {
        throw ConfigError("probabilities must lie strictly inside (0, 1)");
    }
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

ProbabilityMap forward(const SegModel& model, const ImagePatch& patch) {
    check_bands(model, patch);
    std::vector<double> buf(model.feature_count());
    std::vector<double> out(patch.pixel_count());
    for (std::size_t y = 0; y < patch.height(); ++y) {
        for (std::size_t x = 0; x < patch.width(); ++x) {
            normalized_features(model, patch, x, y, buf);
            out[y * patch.width() + x] = open_unit(sigmoid(logit(model, buf)));
        }
    }
    return ProbabilityMap(patch.width(), patch.height(), std::move(out));
}

namespace {

double pixel_bce(double p, std::uint8_t y) {
    const double q = std::clamp(p, kProbabilityClip, 1.0 - kProbabilityClip);
    return y ? -std::log(q) : -std::log(1.0 - q);
}

}  // namespace

double bce_loss(const ProbabilityMap& probs, const Mask& labels) {
    if (!probs.same_shape(labels)) {
        throw DimensionError(fmt::format("probabilities {}x{} vs labels {}x{}", probs.width(),
                                         probs.height(), labels.width(), labels.height()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) total += pixel_bce(probs[i], labels[i]);
    return total / static_cast<double>(probs.size());
}

std::vector<double> Gradient::flat() const {
    std::vector<double> out(weights);
    out.push_back(bias);
    return out;
}

LossAndGradient loss_and_gradient(const SegModel& model, std::span<const LabeledView> batch) {
    LossAndGradient result;
    result.gradient.weights.assign(model.feature_count(), 0.0);
    std::vector<double> buf(model.feature_count());
    std::vector<double> sample_loss;
    sample_loss.reserve(batch.size());
    for (const auto& item : batch) {
        double loss_sum = 0.0;
        check_bands(model, item.patch);
        if (!item.labels.same_shape(item.patch.width(), item.patch.height())) {
            throw DimensionError(fmt::format("labels {}x{} do not match patch {}x{}",
                                             item.labels.width(), item.labels.height(),
                                             item.patch.width(), item.patch.height()));
        }
        for (std::size_t y = 0; y < item.patch.height(); ++y) {
            for (std::size_t x = 0; x < item.patch.width(); ++x) {
                normalized_features(model, item.patch, x, y, buf);
                const double p = open_unit(sigmoid(logit(model, buf)));
                const std::uint8_t label = item.labels(x, y);
                loss_sum += pixel_bce(p, label);
                const double residual = p - static_cast<double>(label);
                for (std::size_t i = 0; i < buf.size(); ++i) {
                    result.gradient.weights[i] += residual * buf[i];
                }
                result.gradient.bias += residual;
                ++result.pixels;
            }
        }
        sample_loss.push_back(loss_sum);
    }
    if (result.pixels == 0) throw DimensionError("gradient requested over an empty batch");
    const double n = static_cast<double>(result.pixels);
    for (double& g : result.gradient.weights) g /= n;
    result.gradient.bias /= n;
    // Summing per-sample totals in sorted order makes the batch loss independent of how
    // the batch was shuffled, so the controller sees equal losses for equal labels.
    std::sort(sample_loss.begin(), sample_loss.end());
    double loss_sum = 0.0;
    for (double l : sample_loss) loss_sum += l;
    result.loss = loss_sum / n;
    return result;
}

Gradient backward(const SegModel& model, const ImagePatch& patch, const Mask& labels) {
    const LabeledView item{patch, labels};
    return loss_and_gradient(model, std::span(&item, 1)).gradient;
}

AdamState AdamState::for_model(const SegModel& model, double learning_rate) {
    AdamState state;
    state.first_moment.assign(model.parameter_count(), 0.0);
    state.second_moment.assign(model.parameter_count(), 0.0);
    state.learning_rate = learning_rate;
    return state;
}

void adam_step(SegModel& model, AdamState& state, const Gradient& gradient) {
    const std::vector<double> g = gradient.flat();
    if (g.size() != model.parameter_count() || state.first_moment.size() != g.size() ||
        state.second_moment.size() != g.size()) {
        throw DimensionError(fmt::format("gradient of length {} for a model with {} parameters",
                                         g.size(), model.parameter_count()));
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i])) {
            throw NumericError(fmt::format("non-finite gradient component at index {}", i));
        }
    }

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(state.beta1, t);
    const double correction2 = 1.0 - std::pow(state.beta2, t);
    std::vector<double> params = model.parameters();
    for (std::size_t i = 0; i < g.size(); ++i) {
        state.first_moment[i] = state.beta1 * state.first_moment[i] + (1.0 - state.beta1) * g[i];
        state.second_moment[i] =
            state.beta2 * state.second_moment[i] + (1.0 - state.beta2) * g[i] * g[i];
        const double m_hat = state.first_moment[i] / correction1;
        const double v_hat = state.second_moment[i] / correction2;
        params[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
    model.set_parameters(params);
}

Mask predict_mask(const SegModel& model, const ImagePatch& patch, double cut) {
    const ProbabilityMap probs = forward(model, patch);
    std::vector<std::uint8_t> out(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] > cut ? 1 : 0;
    return Mask(probs.width(), probs.height(), std::move(out));
}

}  // namespace cal

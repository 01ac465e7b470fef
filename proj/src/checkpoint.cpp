#include "cal/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

#include <fmt/core.h>

#include "cal/error.hpp"

namespace cal {
namespace {

constexpr std::uint8_t kMagic[4] = {'C', 'A', 'L', 'M'};

class Writer {
public:
    template <typename T>
    void put(T value) {
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            bytes.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
        }
    }
    void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
    void put_f64s(std::span<const double> vs) {
        for (double v : vs) put_f64(v);
    }
    std::vector<std::uint8_t> bytes;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T value = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            value |= static_cast<T>(static_cast<T>(bytes_[pos_ + i]) << (8 * i));
        }
        pos_ += sizeof(T);
        return value;
    }
    double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
    std::vector<double> get_f64s(std::size_t n) {
        need(n * 8);
        std::vector<double> out(n);
        for (double& v : out) v = get_f64();
        return out;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw IoError("checkpoint is truncated");
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint) {
    const SegModel& model = checkpoint.model;
    const AdamState& opt = checkpoint.optimizer;
    if (opt.first_moment.size() != model.parameter_count() ||
        opt.second_moment.size() != model.parameter_count()) {
        throw DimensionError("optimizer moments do not match the model parameter count");
    }
    Writer w;
    w.bytes.assign(std::begin(kMagic), std::end(kMagic));
    w.put(kCheckpointVersion);
    w.put(static_cast<std::uint32_t>(model.window()));
    w.put(static_cast<std::uint32_t>(model.band_count()));
    w.put(static_cast<std::uint64_t>(model.parameter_count()));
    w.put_f64s(model.weights());
    w.put_f64(model.bias());
    w.put_f64s(model.feature_mean());
    w.put_f64s(model.feature_scale());
    w.put_f64s(opt.first_moment);
    w.put_f64s(opt.second_moment);
    w.put_f64(static_cast<double>(opt.step));
    return std::move(w.bytes);
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
        throw IoError("not a checkpoint: bad magic bytes");
    }
    Reader r(bytes.subspan(4));
    const auto version = r.get<std::uint16_t>();
    if (version != kCheckpointVersion) {
        throw IoError(fmt::format("unsupported checkpoint version {}", version));
    }
    const auto window = r.get<std::uint32_t>();
    const auto bands = r.get<std::uint32_t>();
    const auto count = r.get<std::uint64_t>();
    if (window == 0 || window % 2 == 0 || window > 1025 || bands == 0 || bands > 64) {
        throw IoError(fmt::format("checkpoint has implausible shape window={} bands={}", window,
                                  bands));
    }

    Checkpoint out{SegModel(static_cast<int>(window), bands), {}};
    SegModel& model = out.model;
    if (count != model.parameter_count()) {
        throw IoError(fmt::format("checkpoint declares {} parameters, shape implies {}", count,
                                  model.parameter_count()));
    }
    const std::size_t f = model.feature_count();
    const auto weights = r.get_f64s(f);
    std::copy(weights.begin(), weights.end(), model.weights().begin());
    model.set_bias(r.get_f64());
    auto mean = r.get_f64s(f);
    auto scale = r.get_f64s(f);
    model.set_normalization(std::move(mean), std::move(scale));

    out.optimizer = AdamState::for_model(model);
    out.optimizer.first_moment = r.get_f64s(f + 1);
    out.optimizer.second_moment = r.get_f64s(f + 1);
    const double step = r.get_f64();
    if (!(step >= 0.0) || step != std::floor(step)) {
        throw IoError(fmt::format("checkpoint step count {} is not a whole number", step));
    }
    out.optimizer.step = static_cast<std::uint64_t>(step);
    if (!r.done()) throw IoError("checkpoint has trailing bytes");
    return out;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    const auto bytes = encode_checkpoint(checkpoint);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open checkpoint {}", path.string()));
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                          std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

}  // namespace cal

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cal/controller.hpp"
#include "cal/metrics.hpp"

namespace cal {

/// One mini-batch. Threshold fields are empty for baseline training.
struct HistoryRecord {
    std::uint64_t step = 0;   // 1-based, global across epochs
    std::uint32_t epoch = 0;  // 1-based
    double loss = 0.0;        // mean BCE over the batch, before the update
    std::optional<double> threshold;
    std::optional<double> best_loss;
    std::optional<ThresholdAction> action;

    bool operator==(const HistoryRecord&) const = default;
};

struct EvalSnapshot {
    std::uint32_t epoch = 0;
    MetricsReport metrics;

    bool operator==(const EvalSnapshot&) const = default;
};

struct TrainHistory {
    std::vector<HistoryRecord> records;
    std::vector<EvalSnapshot> snapshots;
    std::uint64_t degenerate_batches = 0;  // batches whose labels were all-clear or all-cloud

    /// Mean batch loss of each epoch, in epoch order.
    std::vector<double> epoch_mean_losses() const;
};

inline constexpr std::string_view kHistoryHeader = "step,epoch,loss,threshold,best_loss,action";
inline constexpr std::string_view kSnapshotHeader = "epoch,miou,precision,recall,f1,oa";

/// Reals use 6 decimal places; empty optional fields are left blank.
std::string history_csv(const TrainHistory& history);
std::string snapshots_csv(const TrainHistory& history);

/// Throws IoError on a wrong header, a malformed row or zero data rows.
std::vector<HistoryRecord> parse_history_csv(std::string_view text);
std::vector<EvalSnapshot> parse_snapshots_csv(std::string_view text);

}  // namespace cal

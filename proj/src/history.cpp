#include "cal/history.hpp"

#include <charconv>
#include <map>
#include <sstream>

#include <fmt/core.h>

#include "cal/error.hpp"

namespace cal {

std::vector<double> TrainHistory::epoch_mean_losses() const {
    std::map<std::uint32_t, std::pair<double, std::size_t>> sums;
    for (const auto& r : records) {
        auto& [sum, n] = sums[r.epoch];
        sum += r.loss;
        ++n;
    }
    std::vector<double> out;
    for (const auto& [epoch, acc] : sums) out.push_back(acc.first / static_cast<double>(acc.second));
    return out;
}

std::string history_csv(const TrainHistory& history) {
    std::string out(kHistoryHeader);
    out += '\n';
    for (const auto& r : history.records) {
        out += fmt::format("{},{},{:.6f},", r.step, r.epoch, r.loss);
        if (r.threshold) out += fmt::format("{:.6f}", *r.threshold);
        out += ',';
        if (r.best_loss) out += fmt::format("{:.6f}", *r.best_loss);
        out += ',';
        if (r.action) out += action_name(*r.action);
        out += '\n';
    }
    return out;
}

std::string snapshots_csv(const TrainHistory& history) {
    std::string out(kSnapshotHeader);
    out += '\n';
    for (const auto& s : history.snapshots) {
        const auto& m = s.metrics;
        out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", s.epoch, m.miou, m.precision,
                           m.recall, m.f1, m.oa);
    }
    return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no) {
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw IoError(fmt::format("CSV line {}: cannot parse '{}'", line_no, field));
    }
    return value;
}

// Yields the data rows split into fields after checking the header.
std::vector<std::vector<std::string_view>> data_rows(std::string_view text, std::string_view header,
                                                     std::size_t columns) {
    std::vector<std::vector<std::string_view>> rows;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (line_no == 1) {
            if (line != header) throw IoError(fmt::format("CSV header must be '{}'", header));
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != columns) {
            throw IoError(fmt::format("CSV line {}: expected {} fields, got {}", line_no, columns,
                                      fields.size()));
        }
        rows.push_back(std::move(fields));
    }
    if (line_no == 0) throw IoError("CSV is empty");
    if (rows.empty()) throw IoError("CSV has a header but no data rows");
    return rows;
}

}  // namespace

std::vector<HistoryRecord> parse_history_csv(std::string_view text) {
    std::vector<HistoryRecord> out;
    std::size_t line_no = 1;
    for (const auto& f : data_rows(text, kHistoryHeader, 6)) {
        ++line_no;
        HistoryRecord r;
        r.step = parse_number<std::uint64_t>(f[0], line_no);
        r.epoch = parse_number<std::uint32_t>(f[1], line_no);
        r.loss = parse_number<double>(f[2], line_no);
        if (!f[3].empty()) r.threshold = parse_number<double>(f[3], line_no);
        if (!f[4].empty()) r.best_loss = parse_number<double>(f[4], line_no);
        if (!f[5].empty()) r.action = parse_action(f[5]);
        out.push_back(r);
    }
    return out;
}

std::vector<EvalSnapshot> parse_snapshots_csv(std::string_view text) {
    std::vector<EvalSnapshot> out;
    std::size_t line_no = 1;
    for (const auto& f : data_rows(text, kSnapshotHeader, 6)) {
        ++line_no;
        EvalSnapshot s;
        s.epoch = parse_number<std::uint32_t>(f[0], line_no);
        s.metrics.miou = parse_number<double>(f[1], line_no);
        s.metrics.precision = parse_number<double>(f[2], line_no);
        s.metrics.recall = parse_number<double>(f[3], line_no);
        s.metrics.f1 = parse_number<double>(f[4], line_no);
        s.metrics.oa = parse_number<double>(f[5], line_no);
        out.push_back(s);
    }
    return out;
}

}  // namespace cal

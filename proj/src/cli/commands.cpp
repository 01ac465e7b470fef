#include "cal/cli/commands.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "cal/checkpoint.hpp"
#include "cal/cli/config.hpp"
#include "cal/cli/plot.hpp"
#include "cal/dataset.hpp"
#include "cal/error.hpp"
#include "cal/synthetic.hpp"
#include "cal/trainer.hpp"

namespace cal::cli {

namespace fs = std::filesystem;

namespace {

struct Flags {
    std::string config;
    std::string checkpoint;
    std::optional<double> threshold;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--config", flags.config, "JSON configuration file");
    cmd->add_option("--checkpoint", flags.checkpoint, "model checkpoint to start from / evaluate");
    cmd->add_option("--threshold", flags.threshold, "relabeling threshold in [0, 255]");
    cmd->add_option("--out", flags.out, "output directory (plot: output SVG path)");
    cmd->add_option("--seed", flags.seed, "seed for shuffling and synthesis");
}

// Flags override the config file, which overrides the built-in defaults.
RunConfig resolve(const Flags& flags) {
    RunConfig cfg = flags.config.empty() ? RunConfig{} : load_config(flags.config);
    if (flags.out) cfg.out_dir = *flags.out;
    if (flags.seed) cfg.set_seed(*flags.seed);
    return cfg;
}

std::string help_footer() {
    std::string text = "Configuration keys (JSON sections; default in brackets):\n";
    for (const auto& key : config_keys()) {
        text += fmt::format("  {:<30} [{}] {}\n", key.name, key.default_value, key.description);
    }
    return text;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path prepare_out(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    return cfg.out_dir;
}

Dataset require_dataset(const fs::path& manifest, const char* key) {
    if (manifest.empty()) throw ConfigError(fmt::format("{} is not set in the config", key));
    return load_dataset(manifest);
}

int cmd_synth(const Flags& flags, std::ostream& out) {
    const RunConfig cfg = resolve(flags);
    const SyntheticBenchmark bench = make_benchmark(cfg.synth);
    const fs::path dir = prepare_out(cfg);
    out << write_dataset(bench.train, dir / "train").string() << '\n';
    if (!bench.test.empty()) out << write_dataset(bench.test, dir / "test").string() << '\n';
    return 0;
}

int cmd_convert(const Flags& flags, const std::string& input, const std::string& split,
                std::ostream& out) {
    const RunConfig cfg = resolve(flags);
    const fs::path dir = prepare_out(cfg);
    const DatasetManifest manifest = scan_38cloud(input, dir, parse_split(split));
    const fs::path path = dir / kManifestName;
    write_text(path, format_manifest(manifest));
    out << fmt::format("{} ({} entries)\n", path.string(), manifest.entries.size());
    return 0;
}

void write_run(const fs::path& dir, const std::string& prefix, const TrainResult& result) {
    save_checkpoint(dir / (prefix + ".ckpt"), result.checkpoint);
    write_text(dir / (prefix + "_history.csv"), history_csv(result.history));
    if (!result.history.snapshots.empty()) {
        write_text(dir / (prefix + "_snapshots.csv"), snapshots_csv(result.history));
    }
}

int cmd_train(const Flags& flags, bool cal, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = resolve(flags);
    const Dataset train = require_dataset(cfg.train_manifest, "data.train_manifest");
    std::optional<Dataset> heldout;
    if (!cfg.test_manifest.empty()) heldout = load_dataset(cfg.test_manifest);

    Checkpoint start;
    if (!flags.checkpoint.empty()) {
        start = load_checkpoint(flags.checkpoint);
    } else {
        if (cal) err << "warning: no --checkpoint given; fine-tuning a fresh model\n";
        start = fresh_checkpoint(train, cfg.window, cfg.train.learning_rate);
    }
    const fs::path dir = prepare_out(cfg);
    const Dataset* held = heldout ? &*heldout : nullptr;
    const TrainResult result = cal ? cal_finetune(train, std::move(start), cfg.train, held)
                                   : train_baseline(train, std::move(start), cfg.train, held);
    write_run(dir, cal ? "cal" : "baseline", result);

    const auto losses = result.history.epoch_mean_losses();
    for (std::size_t e = 0; e < losses.size(); ++e) {
        out << fmt::format("epoch {} mean loss {:.6f}\n", e + 1, losses[e]);
    }
    if (result.final_threshold) out << fmt::format("final threshold {:.6f}\n", *result.final_threshold);
    if (result.history.degenerate_batches > 0) {
        err << fmt::format("note: {} batches had all-clear or all-cloud labels\n",
                           result.history.degenerate_batches);
    }
    if (!result.history.snapshots.empty()) {
        out << "held-out mIoU Precision Recall F1 OA: "
            << format_table_row(result.history.snapshots.back().metrics) << '\n';
    }
    return 0;
}

int cmd_relabel(const Flags& flags, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = resolve(flags);
    const Dataset train = require_dataset(cfg.train_manifest, "data.train_manifest");
    double threshold = cfg.train.controller.initial_threshold;
    if (flags.threshold) {
        threshold = *flags.threshold;
    } else {
        err << fmt::format("warning: no --threshold given; using controller.initial_threshold {}\n",
                           threshold);
    }
    const auto weights = cfg.train.weights_for(train.bands.size());
    const Dataset relabeled = relabel_dataset(train, threshold, weights, cfg.train.morphology);
    out << write_dataset(relabeled, prepare_out(cfg) / "relabeled").string() << '\n';
    return 0;
}

int cmd_eval(const Flags& flags, std::ostream& out) {
    const RunConfig cfg = resolve(flags);
    if (flags.checkpoint.empty()) throw ConfigError("eval needs --checkpoint");
    const Checkpoint ckpt = load_checkpoint(flags.checkpoint);
    const Dataset test = require_dataset(cfg.test_manifest, "data.test_manifest");
    const ConfusionMatrix cm = confusion(test, ckpt.model, cfg.train.eval_cut);
    const MetricsReport r = report(cm);

    std::string csv = "split,patches,tp,fp,fn,tn,miou,precision,recall,f1,oa\n";
    csv += fmt::format("{},{},{},{},{},{},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f}\n", split_name(test.split),
                       test.size(), cm.tp, cm.fp, cm.fn, cm.tn, 100.0 * r.miou, 100.0 * r.precision,
                       100.0 * r.recall, 100.0 * r.f1, 100.0 * r.oa);
    write_text(prepare_out(cfg) / "eval.csv", csv);
    out << "mIoU Precision Recall F1 OA: " << format_table_row(r) << '\n';
    out << fmt::format("cloud IoU {:.4f}  clear IoU {:.4f}\n", 100.0 * r.cloud_iou, 100.0 * r.clear_iou);
    if (r.degenerate != 0) out << "note: some ratios had zero denominators and are reported as 0\n";
    return 0;
}

int cmd_plot(const Flags& flags, const std::string& history, const std::string& snapshots,
             std::ostream& out) {
    const auto records = parse_history_csv(read_text(history));
    std::vector<EvalSnapshot> snaps;
    if (!snapshots.empty()) snaps = parse_snapshots_csv(read_text(snapshots));
    fs::path target = flags.out ? fs::path(*flags.out) : fs::path(history).replace_extension(".svg");
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    write_text(target, render_training_svg(records, snaps));
    out << target.string() << '\n';
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Noisy-label cloud segmentation with loss-feedback adaptive labeling", "calseg"};
    app.footer(help_footer());
    app.require_subcommand(1);

    Flags flags;
    std::string input;
    std::string split = "train";
    std::string history;
    std::string snapshots;

    auto* synth = app.add_subcommand("synth", "generate a synthetic noisy-label benchmark");
    auto* convert = app.add_subcommand("convert", "scan pre-converted 38-Cloud PGMs into a manifest");
    auto* train = app.add_subcommand("train", "baseline training on the stored masks");
    auto* finetune = app.add_subcommand("finetune", "fine-tune with adaptive relabeling");
    auto* relabel = app.add_subcommand("relabel", "rewrite masks by thresholding the patches");
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test manifest");
    auto* plot = app.add_subcommand("plot", "render a history CSV as SVG curves");
    for (auto* cmd : {synth, convert, train, finetune, relabel, eval, plot}) {
        add_common(cmd, flags);
        cmd->footer(help_footer());
    }
    convert->add_option("input", input, "directory holding <band>_patch_*.pgm files")->required();
    convert->add_option("--split", split, "split recorded in the manifest (train|test)");
    plot->add_option("history", history, "history CSV")->required();
    plot->add_option("--snapshots", snapshots, "snapshot CSV adding a precision-per-epoch panel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (synth->parsed()) return cmd_synth(flags, out);
        if (convert->parsed()) return cmd_convert(flags, input, split, out);
        if (train->parsed()) return cmd_train(flags, false, out, err);
        if (finetune->parsed()) return cmd_train(flags, true, out, err);
        if (relabel->parsed()) return cmd_relabel(flags, out, err);
        if (eval->parsed()) return cmd_eval(flags, out);
        if (plot->parsed()) return cmd_plot(flags, history, snapshots, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace cal::cli

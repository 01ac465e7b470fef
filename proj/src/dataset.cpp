#include "cal/dataset.hpp"

#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "cal/error.hpp"
#include "cal/pgm.hpp"

namespace cal {

namespace fs = std::filesystem;

std::string_view split_name(Split split) { return split == Split::Train ? "train" : "test"; }

Split parse_split(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "test") return Split::Test;
    throw ConfigError(fmt::format("unknown split '{}'", name));
}

std::vector<ImagePatch> Dataset::patches() const {
    std::vector<ImagePatch> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.patch);
    return out;
}

namespace {

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

std::optional<std::string> optional_file(const std::string& token) {
    if (token == "-") return std::nullopt;
    return token;
}

}  // namespace

DatasetManifest parse_manifest(std::string_view text) {
    DatasetManifest m;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool saw_magic = false;
    std::set<std::string> ids;
    const auto fail = [&](const std::string& what) {
        throw IoError(fmt::format("manifest line {}: {}", line_no, what));
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto t = tokens(line);
        if (t.empty() || t[0].starts_with('#')) continue;
        if (!saw_magic) {
            if (t.size() != 2 || t[0] != "calseg-manifest") fail("expected 'calseg-manifest 1'");
            if (t[1] != "1") fail(fmt::format("unsupported manifest version {}", t[1]));
            saw_magic = true;
            continue;
        }
        const std::string& key = t[0];
        if (key != "entry" && !m.entries.empty()) fail(fmt::format("'{}' after entries", key));
        if (key == "split") {
            if (t.size() != 2) fail("split takes one value");
            try {
                m.split = parse_split(t[1]);
            } catch (const ConfigError& e) {
                fail(e.what());
            }
        } else if (key == "bit_depth") {
            if (t.size() != 2 || (t[1] != "8" && t[1] != "16")) fail("bit_depth must be 8 or 16");
            m.bit_depth = std::stoi(t[1]);
        } else if (key == "bands") {
            if (t.size() < 2) fail("bands needs at least one name");
            m.bands.clear();
            for (std::size_t i = 1; i < t.size(); ++i) {
                try {
                    m.bands.push_back(parse_band(t[i]));
                } catch (const ConfigError& e) {
                    fail(e.what());
                }
            }
        } else if (key == "entry") {
            if (t.size() != 4 + m.bands.size()) {
                fail(fmt::format("entry needs id, mask, reference and {} band files",
                                 m.bands.size()));
            }
            if (!ids.insert(t[1]).second) fail(fmt::format("duplicate entry id '{}'", t[1]));
            ManifestEntry e;
            e.id = t[1];
            e.mask_file = optional_file(t[2]);
            e.reference_file = optional_file(t[3]);
            e.band_files.assign(t.begin() + 4, t.end());
            m.entries.push_back(std::move(e));
        } else {
            fail(fmt::format("unknown key '{}'", key));
        }
    }
    if (!saw_magic) throw IoError("manifest is empty (missing 'calseg-manifest 1')");
    return m;
}

std::string format_manifest(const DatasetManifest& m) {
    std::string out = "calseg-manifest 1\n";
    out += fmt::format("split {}\n", split_name(m.split));
    out += fmt::format("bit_depth {}\n", m.bit_depth);
    out += "bands";
    for (Band b : m.bands) out += fmt::format(" {}", band_name(b));
    out += "\n";
    for (const auto& e : m.entries) {
        out += fmt::format("entry {} {} {}", e.id, e.mask_file.value_or("-"),
                           e.reference_file.value_or("-"));
        for (const auto& f : e.band_files) out += " " + f;
        out += "\n";
    }
    return out;
}

namespace {

Mask load_mask(const fs::path& path, std::size_t width, std::size_t height) {
    const Mask mask = mask_from_pgm(read_pgm(path));
    if (!mask.same_shape(width, height)) {
        throw DimensionError(fmt::format("{} is {}x{}, patch is {}x{}", path.filename().string(),
                                         mask.width(), mask.height(), width, height));
    }
    return mask;
}

Sample load_entry(const ManifestEntry& e, const DatasetManifest& m, const fs::path& dir) {
    std::vector<std::vector<double>> bands;
    std::size_t width = 0;
    std::size_t height = 0;
    for (const auto& file : e.band_files) {
        const PgmImage img = read_pgm(dir / file);
        if (bands.empty()) {
            width = img.width;
            height = img.height;
        } else if (img.width != width || img.height != height) {
            throw DimensionError(fmt::format("band file {} is {}x{}, expected {}x{}", file,
                                             img.width, img.height, width, height));
        }
        bands.push_back(normalized_samples(img));
    }
    Sample s{e.id, ImagePatch(width, height, m.bands, std::move(bands)), std::nullopt, std::nullopt};
    if (e.mask_file) s.mask = load_mask(dir / *e.mask_file, width, height);
    if (e.reference_file) s.reference = load_mask(dir / *e.reference_file, width, height);
    return s;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open manifest {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Dataset load_dataset(const fs::path& manifest_path) {
    const DatasetManifest m = parse_manifest(read_text(manifest_path));
    const fs::path dir = manifest_path.parent_path();
    Dataset d{m.split, m.bands, m.bit_depth, {}};
    d.samples.reserve(m.entries.size());
    for (const auto& e : m.entries) {
        try {
            d.samples.push_back(load_entry(e, m, dir));
        } catch (const Error& err) {
            throw IoError(fmt::format("entry '{}': {}", e.id, err.what()));
        }
    }
    return d;
}

fs::path write_dataset(const Dataset& dataset, const fs::path& root) {
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", root.string(), ec.message()));

    DatasetManifest m{dataset.split, dataset.bit_depth, dataset.bands, {}};
    for (const auto& s : dataset.samples) {
        if (s.patch.bands() != dataset.bands) {
            throw DimensionError(fmt::format("sample '{}' band list differs from the dataset", s.id));
        }
        ManifestEntry e{s.id, {}, std::nullopt, std::nullopt};
        for (std::size_t b = 0; b < dataset.bands.size(); ++b) {
            const std::string file = fmt::format("{}_{}.pgm", s.id, band_name(dataset.bands[b]));
            write_pgm(root / file, quantize_band(s.patch.width(), s.patch.height(), s.patch.band(b),
                                                 dataset.bit_depth));
            e.band_files.push_back(file);
        }
        if (s.mask) {
            e.mask_file = s.id + "_mask.pgm";
            write_pgm(root / *e.mask_file, mask_to_pgm(*s.mask));
        }
        if (s.reference) {
            e.reference_file = s.id + "_reference.pgm";
            write_pgm(root / *e.reference_file, mask_to_pgm(*s.reference));
        }
        m.entries.push_back(std::move(e));
    }

    const fs::path manifest_path = root / kManifestName;
    std::ofstream out(manifest_path, std::ios::trunc);
    out << format_manifest(m);
    if (!out) throw IoError(fmt::format("failed writing {}", manifest_path.string()));
    return manifest_path;
}

DatasetManifest scan_38cloud(const fs::path& dir, const fs::path& manifest_dir, Split split) {
    static const std::regex stem(R"(^(red|green|blue|nir|gt)_(patch_\d+_\d+_by_\d+_.+)\.pgm$)");
    struct Files {
        std::map<Band, fs::path> bands;
        std::optional<fs::path> gt;
    };
    std::map<std::string, Files> found;

    std::error_code ec;
    fs::recursive_directory_iterator it(dir, ec);
    if (ec) throw IoError(fmt::format("cannot scan {}: {}", dir.string(), ec.message()));
    for (const auto& entry : it) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        std::smatch match;
        if (!std::regex_match(name, match, stem)) continue;
        Files& files = found[match[2].str()];
        const fs::path rel = fs::relative(entry.path(), manifest_dir);
        if (match[1] == "gt") {
            files.gt = rel;
        } else {
            files.bands[parse_band(match[1].str())] = rel;
        }
    }

    DatasetManifest m;
    m.split = split;
    m.bands = default_bands();
    for (const auto& [id, files] : found) {
        ManifestEntry e{id, {}, std::nullopt, std::nullopt};
        for (Band b : m.bands) {
            const auto f = files.bands.find(b);
            if (f == files.bands.end()) {
                throw IoError(fmt::format("patch '{}' has no {} band file", id, band_name(b)));
            }
            e.band_files.push_back(f->second.generic_string());
        }
        if (files.gt) e.mask_file = files.gt->generic_string();
        m.entries.push_back(std::move(e));
    }
    if (!m.entries.empty()) {
        const PgmImage first = read_pgm(manifest_dir / m.entries.front().band_files.front());
        m.bit_depth = first.maxval >= 256 ? 16 : 8;
    }
    return m;
}

}  // namespace cal

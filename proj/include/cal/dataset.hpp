#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cal/raster.hpp"

namespace cal {

enum class Split : std::uint8_t { Train, Test };

std::string_view split_name(Split split);
Split parse_split(std::string_view name);

/// One patch with its training label and, optionally, a clean reference label.
struct Sample {
    std::string id;
    ImagePatch patch;
    std::optional<Mask> mask;
    std::optional<Mask> reference;

    bool operator==(const Sample&) const = default;
};

struct Dataset {
    Split split = Split::Train;
    std::vector<Band> bands = default_bands();
    int bit_depth = 8;
    std::vector<Sample> samples;

    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }
    std::vector<ImagePatch> patches() const;

    bool operator==(const Dataset&) const = default;
};

struct ManifestEntry {
    std::string id;
    std::vector<std::string> band_files;
    std::optional<std::string> mask_file;
    std::optional<std::string> reference_file;

    bool operator==(const ManifestEntry&) const = default;
};

/// Text manifest. Grammar (one item per line, '#' starts a comment line):
///
///     calseg-manifest 1
///     split train|test
///     bit_depth 8|16
///     bands <band> [<band>...]          band names: red green blue nir
///     entry <id> <mask|-> <reference|-> <band file>...
///
/// Header keys must precede entries. File names are relative to the manifest's
/// directory and may not contain whitespace.
struct DatasetManifest {
    Split split = Split::Train;
    int bit_depth = 8;
    std::vector<Band> bands = default_bands();
    std::vector<ManifestEntry> entries;

    bool operator==(const DatasetManifest&) const = default;
};

DatasetManifest parse_manifest(std::string_view text);
std::string format_manifest(const DatasetManifest& manifest);

inline constexpr std::string_view kManifestName = "manifest.txt";

/// Loads every entry in manifest order, normalizing bands into [0, 255]. Errors name
/// the offending entry.
Dataset load_dataset(const std::filesystem::path& manifest_path);

/// Writes PGM files and `manifest.txt` under `root` (created if needed); returns the
/// manifest path. Patch values must lie on the dataset's bit-depth grid for the round
/// trip to be exact.
std::filesystem::path write_dataset(const Dataset& dataset, const std::filesystem::path& root);

/// Builds a manifest from pre-converted 38-Cloud files named
/// `<red|green|blue|nir|gt>_patch_<i>_<row>_by_<col>_<scene>.pgm` anywhere below `dir`.
/// Entries are sorted by patch id; `gt_` files become the mask. Paths are made relative
/// to `manifest_dir`.
DatasetManifest scan_38cloud(const std::filesystem::path& dir,
                             const std::filesystem::path& manifest_dir, Split split);

}  // namespace cal

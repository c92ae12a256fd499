#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cob/evaluation.hpp"
#include "cob/orientation.hpp"
#include "cob/partition.hpp"
#include "cob/types.hpp"
#include "cob/ucm.hpp"

namespace cob::io {

namespace fs = std::filesystem;

// Binary formats are little-endian with a 4-byte magic and a u32 version.
//   .lmap  "COBL" version h w, then h*w u32 labels
//   .fmap  "COBF" version h w channels, then channel-major f32 values
// Readers throw FormatError on bad magic, versions or truncated payloads.
LabelMap read_lmap(const fs::path& path);
void write_lmap(const fs::path& path, const LabelMap& labels);

FloatMap read_fmap(const fs::path& path);
void write_fmap(const fs::path& path, const FloatMap& map);

// Binary 8-bit PGM (P5); values scaled to [0,1].
FloatMap read_pgm(const fs::path& path);
void write_pgm(const fs::path& path, const FloatMap& image);

// {"height","width","region_count","entries":[{"a","b","strength","coords":[[r,c],...]}]}
// Entries are written in ascending pair order.
std::string sb_to_json(const SparseBoundaries& sb);
SparseBoundaries sb_from_json(const std::string& text);
SparseBoundaries read_sb_json(const fs::path& path);
void write_sb_json(const fs::path& path, const SparseBoundaries& sb);

// {"height","width","region_count","finest","merges":[{"a","b","parent","level"}]}
// where "finest" names an .lmap file relative to the json. write_ucm_json
// stores the finest partition next to it, named after the json with its
// .ucm.json (or .json) suffix replaced by .finest.lmap.
Hierarchy read_ucm_json(const fs::path& path);
void write_ucm_json(const fs::path& path, const Hierarchy& h);

// {"height","width","bins","records":[{"row","col","bin","confidence"}]}
OrientationField read_orient_json(const fs::path& path);
void write_orient_json(const fs::path& path, const OrientationField& field);

// One image per line, tab-separated: id, prediction path, ground-truth paths
// joined by ';'. Blank lines and lines starting with '#' are skipped;
// relative paths resolve against the manifest's directory.
struct ManifestEntry {
  std::string id;
  fs::path prediction;
  std::vector<fs::path> ground_truth;
};
std::vector<ManifestEntry> read_manifest(const fs::path& path);

GroundTruthSet read_ground_truth(const std::vector<fs::path>& paths);

// TSV with header "threshold\tprecision\trecall\tf".
std::string curve_to_tsv(const PRCurve& curve);
// {"ods_f","ods_threshold","ois_f","ap"}
std::string curve_summary_json(const PRCurve& curve);
std::string orientation_curve_tsv(const OrientationCurve& curve);

std::string read_text(const fs::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_atomic(const fs::path& path, const std::string& bytes);

}  // namespace cob::io

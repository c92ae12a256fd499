#include "cob/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace cob::io {

using nlohmann::json;

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

class Reader {
 public:
  Reader(const std::string& bytes, const fs::path& path) : bytes_(bytes), path_(path) {}

  void expect_magic(const char* magic) {
    need(4);
    if (std::memcmp(bytes_.data() + pos_, magic, 4) != 0) fail("bad magic, expected " + std::string(magic, 4));
    pos_ += 4;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  float f32() { return std::bit_cast<float>(u32()); }

  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail("truncated file");
  }

  void expect_end() const {
    if (pos_ != bytes_.size()) fail("trailing bytes");
  }

  [[noreturn]] void fail(const std::string& what) const { throw FormatError(path_.string() + ": " + what); }

 private:
  const std::string& bytes_;
  fs::path path_;
  std::size_t pos_ = 0;
};

std::uint32_t checked_dim(Reader& in, const char* what) {
  const std::uint32_t v = in.u32();
  if (v == 0 || v > (1u << 16)) in.fail(std::string("implausible ") + what);
  return v;
}

json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(where + ": missing or invalid field '" + key + "'");
  }
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

LabelMap read_lmap(const fs::path& path) {
  const std::string bytes = read_text(path);
  Reader in(bytes, path);
  in.expect_magic("COBL");
  if (in.u32() != 1) in.fail("unsupported version");
  const std::uint32_t h = checked_dim(in, "height");
  const std::uint32_t w = checked_dim(in, "width");
  std::vector<RegionId> labels(static_cast<std::size_t>(h) * w);
  in.need(labels.size() * 4);
  for (RegionId& l : labels) l = in.u32();
  in.expect_end();
  try {
    return LabelMap(static_cast<int>(h), static_cast<int>(w), std::move(labels));
  } catch (const RepresentationError& e) {
    in.fail(e.what());
  }
}

void write_lmap(const fs::path& path, const LabelMap& labels) {
  std::string out = "COBL";
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(labels.height()));
  put_u32(out, static_cast<std::uint32_t>(labels.width()));
  for (RegionId l : labels.labels()) put_u32(out, l);
  write_atomic(path, out);
}

FloatMap read_fmap(const fs::path& path) {
  const std::string bytes = read_text(path);
  Reader in(bytes, path);
  in.expect_magic("COBF");
  if (in.u32() != 1) in.fail("unsupported version");
  const std::uint32_t h = checked_dim(in, "height");
  const std::uint32_t w = checked_dim(in, "width");
  const std::uint32_t ch = checked_dim(in, "channel count");
  FloatMap map(static_cast<int>(h), static_cast<int>(w), static_cast<int>(ch));
  in.need(map.data().size() * 4);
  for (float& v : map.data()) {
    v = in.f32();
    if (!std::isfinite(v)) in.fail("non-finite value");
  }
  in.expect_end();
  return map;
}

void write_fmap(const fs::path& path, const FloatMap& map) {
  std::string out = "COBF";
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  put_u32(out, static_cast<std::uint32_t>(map.channels()));
  for (float v : map.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  write_atomic(path, out);
}

FloatMap read_pgm(const fs::path& path) {
  const std::string bytes = read_text(path);
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> void { throw FormatError(path.string() + ": " + what); };
  auto token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  if (token() != "P5") fail("not a binary PGM (P5)");
  int dims[3] = {0, 0, 0};
  for (int& d : dims) {
    const std::string t = token();
    try {
      std::size_t used = 0;
      d = std::stoi(t, &used);
      if (used != t.size()) fail("bad header");
    } catch (const std::logic_error&) {
      fail("bad header");
    }
  }
  const int w = dims[0], h = dims[1], maxval = dims[2];
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) fail("only 8-bit PGM images are supported");
  ++pos;  // single whitespace before the raster
  if (bytes.size() < pos || bytes.size() - pos != static_cast<std::size_t>(w) * h) fail("truncated raster");
  FloatMap img(h, w);
  for (std::size_t i = 0; i < img.data().size(); ++i) {
    img.data()[i] = static_cast<float>(static_cast<unsigned char>(bytes[pos + i])) / static_cast<float>(maxval);
  }
  return img;
}

void write_pgm(const fs::path& path, const FloatMap& image) {
  std::string out = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  for (std::size_t i = 0; i < image.plane_size(); ++i) {
    out.push_back(static_cast<char>(std::lround(std::clamp(image.data()[i], 0.0f, 1.0f) * 255.0f)));
  }
  write_atomic(path, out);
}

std::string sb_to_json(const SparseBoundaries& sb) {
  json entries = json::array();
  for (const RegionPair& p : sb.pairs()) {
    const BoundaryEntry& e = sb.at(p);
    json coords = json::array();
    for (const Edgel& g : e.coords) coords.push_back({g.row, g.col});
    entries.push_back({{"a", p.a}, {"b", p.b}, {"strength", e.strength}, {"coords", std::move(coords)}});
  }
  json j{{"height", sb.height()}, {"width", sb.width()}, {"region_count", sb.region_count()},
         {"entries", std::move(entries)}};
  return j.dump() + "\n";
}

SparseBoundaries sb_from_json(const std::string& text) {
  const std::string where = "sparse boundaries";
  const json j = parse_json(text, where);
  const int h = field<int>(j, "height", where);
  const int w = field<int>(j, "width", where);
  const auto r = field<RegionId>(j, "region_count", where);
  if (h <= 0 || w <= 0) throw FormatError(where + ": dimensions must be positive");
  SparseBoundaries sb(h, w, r);
  if (!j.contains("entries") || !j["entries"].is_array()) throw FormatError(where + ": missing entries");
  for (const json& e : j["entries"]) {
    const auto a = field<RegionId>(e, "a", where);
    const auto b = field<RegionId>(e, "b", where);
    BoundaryEntry entry;
    entry.strength = field<double>(e, "strength", where);
    for (const auto& rc : field<std::vector<std::vector<int>>>(e, "coords", where)) {
      if (rc.size() != 2) throw FormatError(where + ": coordinates must be [row, col]");
      if (!is_edgel(rc[0], rc[1]) || rc[0] >= 2 * h - 1 || rc[1] >= 2 * w - 1) {
        throw FormatError(where + ": coordinate is not an edgel of the grid");
      }
      entry.coords.push_back(Edgel{rc[0], rc[1]});
    }
    try {
      sb.insert(RegionPair{a, b}, std::move(entry));
    } catch (const Error& err) {
      throw FormatError(where + ": " + err.what());
    }
  }
  return sb;
}

SparseBoundaries read_sb_json(const fs::path& path) {
  try {
    return sb_from_json(read_text(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_sb_json(const fs::path& path, const SparseBoundaries& sb) { write_atomic(path, sb_to_json(sb)); }

namespace {

fs::path finest_path_for(const fs::path& ucm_path) {
  std::string name = ucm_path.filename().string();
  for (const char* suffix : {".ucm.json", ".json"}) {
    const std::string s = suffix;
    if (name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0) {
      name.resize(name.size() - s.size());
      break;
    }
  }
  return name + ".finest.lmap";
}

}  // namespace

Hierarchy read_ucm_json(const fs::path& path) {
  const std::string where = path.string();
  const json j = parse_json(read_text(path), where);
  Hierarchy h;
  h.finest = read_lmap(path.parent_path() / field<std::string>(j, "finest", where));
  if (field<int>(j, "height", where) != h.finest.height() || field<int>(j, "width", where) != h.finest.width() ||
      field<RegionId>(j, "region_count", where) != h.finest.region_count()) {
    throw FormatError(where + ": header does not match the finest partition");
  }
  if (!j.contains("merges") || !j["merges"].is_array()) throw FormatError(where + ": missing merges");
  for (const json& m : j["merges"]) {
    h.merges.push_back(Merge{field<RegionId>(m, "a", where), field<RegionId>(m, "b", where),
                             field<RegionId>(m, "parent", where), field<double>(m, "level", where)});
  }
  try {
    h.finest.validate();
    h.validate();
  } catch (const Error& e) {
    throw FormatError(where + ": " + e.what());
  }
  return h;
}

void write_ucm_json(const fs::path& path, const Hierarchy& h) {
  const fs::path finest = finest_path_for(path);
  write_lmap(path.parent_path() / finest, h.finest);
  json merges = json::array();
  for (const Merge& m : h.merges) {
    merges.push_back({{"a", m.a}, {"b", m.b}, {"parent", m.parent}, {"level", m.level}});
  }
  json j{{"height", h.finest.height()},
         {"width", h.finest.width()},
         {"region_count", h.finest.region_count()},
         {"finest", finest.string()},
         {"merges", std::move(merges)}};
  write_atomic(path, j.dump() + "\n");
}

OrientationField read_orient_json(const fs::path& path) {
  const std::string where = path.string();
  const json j = parse_json(read_text(path), where);
  OrientationField f;
  f.height = field<int>(j, "height", where);
  f.width = field<int>(j, "width", where);
  f.bins = j.contains("bins") ? field<int>(j, "bins", where) : 8;
  if (f.height <= 0 || f.width <= 0 || f.bins < 2) throw FormatError(where + ": bad header");
  if (!j.contains("records") || !j["records"].is_array()) throw FormatError(where + ": missing records");
  for (const json& r : j["records"]) {
    OrientationRecord rec{field<int>(r, "row", where), field<int>(r, "col", where), field<int>(r, "bin", where),
                          field<double>(r, "confidence", where)};
    if (rec.row < 0 || rec.row >= f.height || rec.col < 0 || rec.col >= f.width || rec.bin < 0 ||
        rec.bin >= f.bins) {
      throw FormatError(where + ": record out of range");
    }
    f.records.push_back(rec);
  }
  return f;
}

void write_orient_json(const fs::path& path, const OrientationField& field) {
  json records = json::array();
  for (const auto& r : field.records) {
    records.push_back({{"row", r.row}, {"col", r.col}, {"bin", r.bin}, {"confidence", r.confidence}});
  }
  json j{{"height", field.height}, {"width", field.width}, {"bins", field.bins}, {"records", std::move(records)}};
  write_atomic(path, j.dump() + "\n");
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::istringstream in(read_text(path));
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  std::vector<ManifestEntry> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    const std::string where = path.string() + ":" + std::to_string(number);
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty() || cols[2].empty()) {
      throw FormatError(where + ": expected id, prediction and ground truth separated by tabs");
    }
    ManifestEntry e{cols[0], resolve(cols[1]), {}};
    std::size_t s = 0;
    while (true) {
      const std::size_t semi = cols[2].find(';', s);
      const std::string gt = cols[2].substr(s, semi - s);
      if (gt.empty()) throw FormatError(where + ": empty ground-truth path");
      e.ground_truth.push_back(resolve(gt));
      if (semi == std::string::npos) break;
      s = semi + 1;
    }
    out.push_back(std::move(e));
  }
  if (out.empty()) throw FormatError(path.string() + ": manifest lists no images");
  return out;
}

GroundTruthSet read_ground_truth(const std::vector<fs::path>& paths) {
  GroundTruthSet gts;
  for (const fs::path& p : paths) gts.annotations.push_back(read_lmap(p));
  gts.validate();
  return gts;
}

namespace {

std::string fixed(double v) {
  std::ostringstream ss;
  ss << std::setprecision(10) << std::fixed << v;
  return ss.str();
}

}  // namespace

std::string curve_to_tsv(const PRCurve& curve) {
  std::string out = "threshold\tprecision\trecall\tf\n";
  for (const PRPoint& p : curve.points) {
    out += fixed(p.threshold) + "\t" + fixed(p.precision) + "\t" + fixed(p.recall) + "\t" + fixed(p.f) + "\n";
  }
  return out;
}

std::string curve_summary_json(const PRCurve& curve) {
  json j{{"ods_f", curve.ods_f}, {"ods_threshold", curve.ods_threshold}, {"ois_f", curve.ois_f}, {"ap", curve.ap}};
  return j.dump(2) + "\n";
}

std::string orientation_curve_tsv(const OrientationCurve& curve) {
  std::string out = "percentile\taccuracy\n";
  for (const CurvePoint& p : curve.points) out += std::to_string(p.percentile) + "\t" + fixed(p.accuracy) + "\n";
  return out;
}

}  // namespace cob::io

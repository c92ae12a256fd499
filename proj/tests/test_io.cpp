#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "cob/io.hpp"
#include "generators.hpp"

namespace cob {
namespace {

namespace fs = std::filesystem;
using testing::Rng;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("cob_io_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write_bytes(const fs::path& p, const std::string& bytes) const {
    std::ofstream(p, std::ios::binary) << bytes;
  }

  fs::path dir_;
};

TEST_F(IoTest, LabelMapRoundTrip) {
  Rng rng(101);
  for (int i = 0; i < 10; ++i) {
    const LabelMap labels = testing::random_sized_labels(rng, 3, 30, 12);
    io::write_lmap(path("a.lmap"), labels);
    EXPECT_EQ(io::read_lmap(path("a.lmap")), labels);
  }
  const std::string bytes = io::read_text(path("a.lmap"));
  EXPECT_EQ(bytes.substr(0, 4), "COBL");
}

TEST_F(IoTest, FloatMapRoundTrip) {
  Rng rng(103);
  const FloatMap m = testing::random_map(rng, 7, 9, 3);
  io::write_fmap(path("m.fmap"), m);
  EXPECT_EQ(io::read_fmap(path("m.fmap")), m);
}

TEST_F(IoTest, PgmRoundTripQuantizes) {
  FloatMap m(4, 5);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 5; ++c) m(r, c) = static_cast<float>((r * 5 + c) * 13) / 255.0f;
  }
  io::write_pgm(path("i.pgm"), m);
  const FloatMap back = io::read_pgm(path("i.pgm"));
  ASSERT_EQ(back.height(), 4);
  ASSERT_EQ(back.width(), 5);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 5; ++c) EXPECT_NEAR(back(r, c), m(r, c), 1e-6);
  }
}

TEST_F(IoTest, PgmAcceptsCommentsAndRejectsOtherFormats) {
  write_bytes(path("c.pgm"), std::string("P5\n# comment\n2 1\n255\n") + '\x00' + '\xff');
  const FloatMap m = io::read_pgm(path("c.pgm"));
  EXPECT_EQ(m(0, 0), 0.0f);
  EXPECT_EQ(m(0, 1), 1.0f);
  write_bytes(path("p2.pgm"), "P2\n2 1\n255\n0 255\n");
  EXPECT_THROW(io::read_pgm(path("p2.pgm")), FormatError);
}

TEST_F(IoTest, SparseBoundariesJsonRoundTrip) {
  Rng rng(107);
  for (int i = 0; i < 10; ++i) {
    const LabelMap labels = testing::random_sized_labels(rng, 4, 20, 15);
    const SparseBoundaries sb = testing::with_random_strengths(sparse_from_labels(labels), rng);
    io::write_sb_json(path("sb.json"), sb);
    const SparseBoundaries back = io::read_sb_json(path("sb.json"));
    EXPECT_EQ(back, sb);
    for (RegionPair p : sb.pairs()) EXPECT_EQ(back.at(p).strength, sb.at(p).strength);
    EXPECT_EQ(io::sb_to_json(back), io::sb_to_json(sb));
  }
}

TEST_F(IoTest, HierarchyJsonRoundTrip) {
  Rng rng(109);
  const Hierarchy h = testing::random_hierarchy(rng, 12, 15, 9);
  io::write_ucm_json(path("h.ucm.json"), h);
  EXPECT_TRUE(fs::exists(path("h.finest.lmap")));
  EXPECT_EQ(io::read_ucm_json(path("h.ucm.json")), h);
}

TEST_F(IoTest, OrientationJsonRoundTrip) {
  OrientationField f{3, 4, 8, {{0, 1, 3, 0.25}, {2, 3, 7, 1.0}}};
  io::write_orient_json(path("o.json"), f);
  EXPECT_EQ(io::read_orient_json(path("o.json")), f);
}

TEST_F(IoTest, ManifestResolvesRelativePaths) {
  write_bytes(path("list.tsv"), "# id\tpred\tgt\n\nimg1\tp1.json\tg1.lmap;/abs/g2.lmap\n");
  const auto entries = io::read_manifest(path("list.tsv"));
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].id, "img1");
  EXPECT_EQ(entries[0].prediction, dir_ / "p1.json");
  ASSERT_EQ(entries[0].ground_truth.size(), 2u);
  EXPECT_EQ(entries[0].ground_truth[0], dir_ / "g1.lmap");
  EXPECT_EQ(entries[0].ground_truth[1], fs::path("/abs/g2.lmap"));
  write_bytes(path("bad.tsv"), "only-one-field\n");
  EXPECT_THROW(io::read_manifest(path("bad.tsv")), FormatError);
}

TEST_F(IoTest, MalformedBinaryFilesAreRejected) {
  io::write_lmap(path("ok.lmap"), LabelMap(2, 2, {0, 0, 1, 1}));
  std::string bytes = io::read_text(path("ok.lmap"));
  write_bytes(path("trunc.lmap"), bytes.substr(0, bytes.size() - 2));
  EXPECT_THROW(io::read_lmap(path("trunc.lmap")), FormatError);
  bytes[0] = 'X';
  write_bytes(path("magic.lmap"), bytes);
  EXPECT_THROW(io::read_lmap(path("magic.lmap")), FormatError);
  EXPECT_THROW(io::read_fmap(path("ok.lmap")), FormatError);
  EXPECT_THROW(io::read_lmap(path("missing.lmap")), FormatError);
  write_bytes(path("bad.json"), "{not json");
  EXPECT_THROW(io::read_sb_json(path("bad.json")), FormatError);
}

TEST_F(IoTest, AtomicWriteReplacesContent) {
  io::write_atomic(path("t.txt"), "one");
  io::write_atomic(path("t.txt"), "two");
  EXPECT_EQ(io::read_text(path("t.txt")), "two");
  EXPECT_FALSE(fs::exists(path("t.txt.tmp")));
}

TEST(IoText, CurveSummaryHasTheFourKeys) {
  PRCurve c;
  c.points = {{0.0, 0.5, 1.0, 2.0 / 3.0}, {0.5, 1.0, 0.5, 2.0 / 3.0}};
  c.ods_f = 2.0 / 3.0;
  const std::string json = io::curve_summary_json(c);
  for (const char* key : {"ods_f", "ods_threshold", "ois_f", "ap"}) EXPECT_NE(json.find(key), std::string::npos);
  const std::string tsv = io::curve_to_tsv(c);
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "threshold\tprecision\trecall\tf");
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 3);
}

}  // namespace
}  // namespace cob

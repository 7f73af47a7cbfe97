#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pd/cluster.hpp"

using pd::BinaryImage;
using pd::CellColor;

namespace {

BinaryImage from_rows(const std::vector<std::string>& rows) {
  BinaryImage img(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      img.bits[static_cast<std::size_t>(r) * img.width + c] = rows[r][c] == '1';
    }
  }
  return img;
}

std::multiset<int> size_multiset(const pd::ClusterLabeling& lab) {
  std::multiset<int> out;
  for (const auto& cl : lab.clusters) out.insert(cl.size);
  return out;
}

// Compare library labeling against the recursive flood-fill oracle exactly:
// same label assignment, same sizes, same raster-sorted pixel lists.
void check_against_oracle(const BinaryImage& img, CellColor color) {
  auto lab = pd::label_components(img, color);
  auto ref = oracle::flood_fill(img, color == CellColor::kBlack);
  REQUIRE(lab.labels == ref.labels);
  REQUIRE(lab.clusters.size() == ref.pixels.size());
  for (std::size_t i = 0; i < lab.clusters.size(); ++i) {
    const auto& cl = lab.clusters[i];
    CHECK(cl.id == static_cast<int>(i) + 1);
    CHECK(cl.pixels == ref.pixels[i]);
    CHECK(cl.size == static_cast<int>(ref.pixels[i].size()));
    int min_r = img.height, max_r = -1, min_c = img.width, max_c = -1;
    for (auto [r, c] : ref.pixels[i]) {
      min_r = std::min(min_r, r);
      max_r = std::max(max_r, r);
      min_c = std::min(min_c, c);
      max_c = std::max(max_c, c);
    }
    CHECK(cl.min_row == min_r);
    CHECK(cl.max_row == max_r);
    CHECK(cl.min_col == min_c);
    CHECK(cl.max_col == max_c);
  }
}

}  // namespace

TEST_CASE("labeling a small hand-checked image") {
  BinaryImage img = from_rows({"110", "010", "001"});
  auto lab = pd::label_components(img, CellColor::kBlack);
  REQUIRE(lab.clusters.size() == 2);
  CHECK(lab.labels == std::vector<int>{1, 1, 0, 0, 1, 0, 0, 0, 2});
  CHECK(lab.clusters[0].size == 3);
  CHECK(lab.clusters[0].pixels ==
        std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {1, 1}});
  CHECK(lab.clusters[0].min_row == 0);
  CHECK(lab.clusters[0].max_row == 1);
  CHECK(lab.clusters[0].min_col == 0);
  CHECK(lab.clusters[0].max_col == 1);
  CHECK(lab.clusters[1].size == 1);
  CHECK(lab.clusters[1].pixels == std::vector<std::pair<int, int>>{{2, 2}});

  auto white = pd::label_components(img, CellColor::kWhite);
  REQUIRE(white.clusters.size() == 2);
  CHECK(size_multiset(white) == std::multiset<int>{2, 3});

  auto no_pixels = pd::label_components(img, CellColor::kBlack, false);
  CHECK(no_pixels.labels == lab.labels);
  REQUIRE(no_pixels.clusters.size() == 2);
  CHECK(no_pixels.clusters[0].size == 3);
  CHECK(no_pixels.clusters[0].pixels.empty());
}

TEST_CASE("labeling edge cases") {
  BinaryImage blank(4, 3);
  auto lab = pd::label_components(blank, CellColor::kBlack);
  CHECK(lab.clusters.empty());
  CHECK(std::all_of(lab.labels.begin(), lab.labels.end(), [](int v) { return v == 0; }));
  CHECK(pd::max_cluster_size(lab) == 0);
  CHECK(pd::max_cluster_size(pd::label_components(blank, CellColor::kWhite)) == 12);

  BinaryImage one(1, 1);
  one.bits = {1};
  auto single = pd::label_components(one, CellColor::kBlack);
  REQUIRE(single.clusters.size() == 1);
  CHECK(single.clusters[0].size == 1);
}

TEST_CASE("labeling agrees with flood fill on every 3x3 pattern") {
  for (int mask = 0; mask < 512; ++mask) {
    BinaryImage img(3, 3);
    for (int i = 0; i < 9; ++i) img.bits[i] = (mask >> i) & 1;
    check_against_oracle(img, CellColor::kBlack);
    check_against_oracle(img, CellColor::kWhite);
  }
}

TEST_CASE("labeling agrees with flood fill on random images") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    double p = 0.1 + 0.8 * (seed % 9) / 8.0;
    BinaryImage img = oracle::random_binary(8, 8, p, seed * 7 + 1);
    check_against_oracle(img, CellColor::kBlack);
  }
  check_against_oracle(oracle::random_binary(31, 17, 0.55, 4242), CellColor::kBlack);
  check_against_oracle(oracle::random_binary(1, 40, 0.5, 77), CellColor::kBlack);
  check_against_oracle(oracle::random_binary(40, 1, 0.5, 78), CellColor::kBlack);
}

TEST_CASE("cluster lists partition the matching pixels") {
  BinaryImage img = oracle::random_binary(24, 24, 0.58, 909);
  auto lab = pd::label_components(img, CellColor::kBlack);
  std::set<std::pair<int, int>> seen;
  int covered = 0;
  for (const auto& cl : lab.clusters) {
    CHECK(std::is_sorted(cl.pixels.begin(), cl.pixels.end()));
    for (auto [r, c] : cl.pixels) {
      CHECK(img.at(r, c) == 1);
      CHECK(lab.labels[static_cast<std::size_t>(r) * img.width + c] == cl.id);
      CHECK(seen.insert({r, c}).second);  // no pixel claimed twice
      ++covered;
    }
  }
  CHECK(covered == img.black_count());
}

TEST_CASE("cluster sizes are invariant under rotation and mirroring") {
  BinaryImage img = oracle::random_binary(19, 13, 0.5, 31337);
  auto base = size_multiset(pd::label_components(img, CellColor::kBlack));
  CHECK(size_multiset(pd::label_components(oracle::rotate90(img), CellColor::kBlack)) ==
        base);
  CHECK(size_multiset(pd::label_components(oracle::mirror(img), CellColor::kBlack)) ==
        base);
}

TEST_CASE("find_cluster_at_least finds exactly the demanded mass") {
  // A 5x5 block inside a 10x10 frame: 25 black pixels, nothing more.
  BinaryImage img(10, 10);
  for (int r = 2; r < 7; ++r)
    for (int c = 3; c < 8; ++c) img.bits[static_cast<std::size_t>(r) * 10 + c] = 1;

  auto hit = pd::find_cluster_at_least(img, 25);
  REQUIRE(hit.found.has_value());
  CHECK(hit.found->size == 25);
  CHECK(hit.found->min_row == 2);
  CHECK(hit.found->max_row == 6);
  CHECK(hit.found->min_col == 3);
  CHECK(hit.found->max_col == 7);
  CHECK(std::is_sorted(hit.found->pixels.begin(), hit.found->pixels.end()));

  auto miss = pd::find_cluster_at_least(img, 26);
  CHECK_FALSE(miss.found.has_value());
  CHECK(miss.max_size == 25);

  // The witness is trimmed to the demanded size even when the cluster is bigger.
  auto partial = pd::find_cluster_at_least(img, 10);
  REQUIRE(partial.found.has_value());
  CHECK(partial.found->size == 10);
  CHECK(partial.found->pixels.size() == 10);
  CHECK(oracle::connected_set(partial.found->pixels));
  for (auto [r, c] : partial.found->pixels) CHECK(img.at(r, c) == 1);

  CHECK_THROWS_AS((void)pd::find_cluster_at_least(img, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)pd::find_cluster_at_least(img, -3), std::invalid_argument);
}

TEST_CASE("find_cluster_at_least matches exhaustive labeling on random images") {
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    BinaryImage img = oracle::random_binary(32, 32, 0.45 + 0.2 * (seed % 5) / 4.0,
                                            seed * 13 + 5);
    int truth = oracle::flood_max_cluster(img);
    int n = 1 + static_cast<int>(seed % 60);
    auto res = pd::find_cluster_at_least(img, n);
    CHECK(res.found.has_value() == (truth >= n));
    if (res.found.has_value()) {
      CHECK(res.found->size == n);
      CHECK(oracle::connected_set(res.found->pixels));
      for (auto [r, c] : res.found->pixels) CHECK(img.at(r, c) == 1);
    } else {
      CHECK(res.max_size == truth);
    }
  }
}

TEST_CASE("find_cluster_at_least is deterministic") {
  BinaryImage img = oracle::random_binary(64, 64, 0.55, 2718);
  auto a = pd::find_cluster_at_least(img, 40);
  auto b = pd::find_cluster_at_least(img, 40);
  REQUIRE(a.found.has_value());
  REQUIRE(b.found.has_value());
  CHECK(a.found->pixels == b.found->pixels);
}

TEST_CASE("left-right crossing detection") {
  CHECK(pd::has_left_right_crossing(from_rows({"000", "111", "000"})));
  CHECK_FALSE(pd::has_left_right_crossing(from_rows({"000", "000", "000"})));
  // Diagonal touching is not 4-adjacency.
  CHECK_FALSE(pd::has_left_right_crossing(from_rows({"100", "010", "001"})));
  CHECK(pd::has_left_right_crossing(from_rows({"110", "010", "011"})));

  BinaryImage column(1, 5);
  column.bits = {0, 1, 0, 1, 0};
  CHECK(pd::has_left_right_crossing(column));  // width 1: any black pixel crosses
  column.bits = {0, 0, 0, 0, 0};
  CHECK_FALSE(pd::has_left_right_crossing(column));
}

TEST_CASE("disjoint crossing counts on structured images") {
  // k separated full rows give exactly k vertex-disjoint crossings.
  for (int k = 1; k <= 4; ++k) {
    BinaryImage img(9, 2 * k);
    for (int i = 0; i < k; ++i)
      for (int c = 0; c < 9; ++c) img.bits[static_cast<std::size_t>(2 * i) * 9 + c] = 1;
    CHECK(pd::count_disjoint_crossings(img) == k);
  }

  // A fully black n x n square supports one crossing per row.
  BinaryImage full(6, 6);
  std::fill(full.bits.begin(), full.bits.end(), std::uint8_t{1});
  CHECK(pd::count_disjoint_crossings(full) == 6);

  // Width 1: every black pixel is its own crossing.
  BinaryImage column(1, 7);
  column.bits = {1, 0, 1, 1, 0, 0, 1};
  CHECK(pd::count_disjoint_crossings(column) == 4);

  CHECK(pd::count_disjoint_crossings(from_rows({"000", "000"})) == 0);

  // An hourglass pinched to one shared pixel: two paths exist but share a vertex.
  CHECK(pd::count_disjoint_crossings(from_rows({"110", "010", "011"})) == 1);
}

TEST_CASE("disjoint crossing counts match the max-flow oracle on random images") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    BinaryImage img = oracle::random_binary(10, 10, 0.45 + 0.3 * (seed % 4) / 3.0,
                                            seed * 101 + 7);
    int count = pd::count_disjoint_crossings(img);
    CHECK(count == oracle::disjoint_crossings_bfs(img));
    CHECK((count >= 1) == pd::has_left_right_crossing(img));
    if (count >= 1)
      CHECK(pd::max_cluster_size(pd::label_components(img, CellColor::kBlack, false)) >=
            img.width);
  }
}

TEST_CASE("cluster csv export") {
  BinaryImage img = from_rows({"110", "010", "001"});
  auto lab = pd::label_components(img, CellColor::kBlack);
  std::ostringstream buf;
  pd::write_clusters_csv(buf, lab, false);
  CHECK(buf.str() ==
        "label,size,min_row,min_col,max_row,max_col\n"
        "1,3,0,0,1,1\n"
        "2,1,2,2,2,2\n");

  std::ostringstream buf2;
  pd::write_clusters_csv(buf2, lab, true);
  CHECK(buf2.str() ==
        "label,size,min_row,min_col,max_row,max_col,pixels\n"
        "1,3,0,0,1,1,0:0;0:1;1:1\n"
        "2,1,2,2,2,2,2:2\n");
}

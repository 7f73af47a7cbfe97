#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "pd/image.hpp"

namespace pd {

enum class CellColor : std::uint8_t { kWhite = 0, kBlack = 1 };

struct Cluster {
  int id = 0;    // 1-based, in raster order of discovery
  int size = 0;  // number of pixels
  // (row, col) members in raster order; empty when pixel storage is off.
  std::vector<std::pair<int, int>> pixels;
  int min_row = 0, min_col = 0, max_row = 0, max_col = 0;
};

struct ClusterLabeling {
  // Per-pixel label, row-major; 0 marks pixels of the other color.
  std::vector<std::int32_t> labels;
  std::vector<Cluster> clusters;  // clusters[i].id == i + 1
};

// 4-connected components of the given color. Iterative traversal (explicit
// stack), so image size is bounded by memory, not the call stack.
ClusterLabeling label_components(const BinaryImage& img, CellColor color,
                                 bool store_pixels = true);

int max_cluster_size(const ClusterLabeling& labeling);

struct ClusterSearchResult {
  // First black cluster (raster discovery order) that reached min_size; its
  // pixels are the min_size cells explored when the search stopped.
  std::optional<Cluster> found;
  // Largest fully explored cluster; the exact maximum when nothing was found.
  int max_size = 0;
};

// Scan for a black cluster of at least min_size pixels, stopping the instant
// one grows that large. Linear in the number of pixels.
ClusterSearchResult find_cluster_at_least(const BinaryImage& img, int min_size);

// True when some black 4-connected path joins column 0 to column width-1.
bool has_left_right_crossing(const BinaryImage& img);

// Maximum number of vertex-disjoint black left-right crossings (max-flow with
// unit vertex capacities).
int count_disjoint_crossings(const BinaryImage& img);

// CSV rows "label,size,min_row,min_col,max_row,max_col"; with_pixels appends
// a column of semicolon-separated "row:col" members.
void write_clusters_csv(std::ostream& out, const ClusterLabeling& labeling,
                        bool with_pixels = false);

}  // namespace pd

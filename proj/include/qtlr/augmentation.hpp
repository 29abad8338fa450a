#ifndef QTLR_AUGMENTATION_HPP
#define QTLR_AUGMENTATION_HPP

#include <iosfwd>
#include <vector>

#include "qtlr/mask.hpp"
#include "qtlr/quaternion_matrix.hpp"
#include "qtlr/quaternion_tensor.hpp"

namespace qtlr {

// One axis at one level: an axis of length L = count * length - (count - 1) * overlap
// is cut into `count` blocks of `length`, consecutive blocks sharing `overlap`.
struct AxisSplit {
  Index count = 1;
  Index length = 1;
  Index overlap = 0;

  Index source_length() const { return count * length - (count - 1) * overlap; }
  friend bool operator==(const AxisSplit&, const AxisSplit&) = default;
};

// Level n contributes tensor mode n with dimension row.count * col.count;
// the mode index is row_block + row.count * col_block.
struct LevelSplit {
  AxisSplit row;
  AxisSplit col;
  friend bool operator==(const LevelSplit&, const LevelSplit&) = default;
};

// Explicit index map from an H x W image to an order-N tensor built by
// recursive (overlapping) block splitting. Level 1 is the coarsest split and
// becomes mode 1.
class AugmentPlan {
 public:
  AugmentPlan() = default;
  // Validates the split chain and enumerates the index map.
  AugmentPlan(Index height, Index width, std::vector<LevelSplit> levels);

  Index height() const { return height_; }
  Index width() const { return width_; }
  const Dims& target_dims() const { return target_; }
  const std::vector<LevelSplit>& levels() const { return levels_; }
  // Column-major source pixel (row + H col) of every target entry.
  const std::vector<Index>& source_index() const { return source_; }
  // Copies of every source pixel, column-major H x W.
  std::vector<Index> multiplicity() const;
  // True when no level overlaps, i.e. the map is a permutation.
  bool is_bijective() const;

  friend bool operator==(const AugmentPlan&, const AugmentPlan&) = default;

 private:
  Index height_ = 0;
  Index width_ = 0;
  std::vector<LevelSplit> levels_;
  Dims target_;
  std::vector<Index> source_;
};

// Searches per-level row x col factorizations of each target dim and, per
// axis, overlaps in {2, 1, 0} (largest first) so that both axes reach block
// length 1 after the last level. Throws PlanningError naming the axis.
AugmentPlan plan_augmentation(Index height, Index width, const Dims& target_dims);

// All-4 target: ceil(log2(max(H, W))) + 1 levels.
Dims default_target_dims(Index height, Index width);

QuaternionTensord augment(const QuaternionMatrixd& image, const AugmentPlan& plan);
// Each pixel becomes the mean of all its copies.
QuaternionMatrixd deaugment(const QuaternionTensord& tensor, const AugmentPlan& plan);
MaskTensor augment_mask(const BoolPlane& mask, const AugmentPlan& plan);

// Text manifest: source dims, target dims and one line per level with the
// row and col split triples (count length overlap).
void write_manifest(std::ostream& os, const AugmentPlan& plan);
AugmentPlan read_manifest(std::istream& is);

}  // namespace qtlr

#endif  // QTLR_AUGMENTATION_HPP

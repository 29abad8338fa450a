#include "qtlr/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace qtlr {

namespace {

void check_axis(const std::vector<LevelSplit>& levels, Index length, bool rows) {
  const char* name = rows ? "row" : "column";
  Index current = length;
  for (std::size_t n = 0; n < levels.size(); ++n) {
    const AxisSplit& s = rows ? levels[n].row : levels[n].col;
    if (s.count < 1 || s.length < 1 || s.overlap < 0)
      throw ArgumentError(std::string("augmentation: invalid ") + name + " split at level " + std::to_string(n + 1));
    if (s.count > 1 && s.overlap >= s.length)
      throw ArgumentError(std::string("augmentation: ") + name + " overlap must be shorter than the block at level " +
                          std::to_string(n + 1));
    if (s.source_length() != current)
      throw ArgumentError(std::string("augmentation: ") + name + " split at level " + std::to_string(n + 1) +
                          " covers " + std::to_string(s.source_length()) + " instead of " + std::to_string(current));
    current = s.length;
  }
  if (current != 1)
    throw ArgumentError(std::string("augmentation: ") + name + " blocks end with length " + std::to_string(current) +
                        ", expected 1");
}

// Per-axis overlap search with memo on (level, length).
class AxisPlanner {
 public:
  explicit AxisPlanner(std::vector<Index> counts) : counts_(std::move(counts)) {}

  bool solve(Index length, std::vector<AxisSplit>& out) {
    out.clear();
    if (!feasible(0, length)) return false;
    Index current = length;
    for (std::size_t n = 0; n < counts_.size(); ++n) {
      const AxisSplit s = *choose(n, current);
      out.push_back(s);
      current = s.length;
    }
    return true;
  }

 private:
  std::optional<AxisSplit> step(Index count, Index length, Index overlap) const {
    if (count == 1) return overlap == 0 ? std::optional<AxisSplit>(AxisSplit{1, length, 0}) : std::nullopt;
    const Index num = length + (count - 1) * overlap;
    if (num % count != 0) return std::nullopt;
    const Index block = num / count;
    if (block < 1 || overlap >= block) return std::nullopt;
    return AxisSplit{count, block, overlap};
  }

  std::optional<AxisSplit> choose(std::size_t level, Index length) {
    for (Index overlap : {2, 1, 0}) {
      auto s = step(counts_[level], length, overlap);
      if (s && feasible(level + 1, s->length)) return s;
    }
    return std::nullopt;
  }

  bool feasible(std::size_t level, Index length) {
    if (level == counts_.size()) return length == 1;
    const auto key = std::make_pair(level, length);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const bool ok = choose(level, length).has_value();
    memo_[key] = ok;
    return ok;
  }

  std::vector<Index> counts_;
  std::map<std::pair<std::size_t, Index>, bool> memo_;
};

// Factor pairs (rows, cols) of d, most balanced first, more row splits on ties.
std::vector<std::pair<Index, Index>> factor_pairs(Index d) {
  std::vector<std::pair<Index, Index>> pairs;
  for (Index a = 1; a <= d; ++a)
    if (d % a == 0) pairs.emplace_back(a, d / a);
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& p, const auto& q) {
    const Index dp = std::abs(p.first - p.second), dq = std::abs(q.first - q.second);
    if (dp != dq) return dp < dq;
    return p.first > q.first;
  });
  return pairs;
}

class PlanSearch {
 public:
  PlanSearch(Index h, Index w, const Dims& target) : h_(h), w_(w), target_(target) {
    for (Index d : target) choices_.push_back(factor_pairs(d));
  }

  std::optional<std::vector<LevelSplit>> run() {
    rows_.clear();
    cols_.clear();
    if (dfs(0)) return result_;
    return std::nullopt;
  }

  bool rows_ever_feasible() const { return rows_ok_; }
  bool cols_ever_feasible() const { return cols_ok_; }

 private:
  // Product of the largest possible coverage bounds prunes hopeless prefixes:
  // an axis with c splits left can cover at most prod(c) pixels.
  bool dfs(std::size_t level) {
    if (level == target_.size()) {
      std::vector<AxisSplit> rs, cs;
      const bool r = AxisPlanner(rows_).solve(h_, rs);
      const bool c = AxisPlanner(cols_).solve(w_, cs);
      rows_ok_ = rows_ok_ || r;
      cols_ok_ = cols_ok_ || c;
      if (!r || !c) return false;
      result_.clear();
      for (std::size_t n = 0; n < rs.size(); ++n) result_.push_back({rs[n], cs[n]});
      return true;
    }
    for (const auto& [a, b] : choices_[level]) {
      rows_.push_back(a);
      cols_.push_back(b);
      if (coverage_ok() && dfs(level + 1)) return true;
      rows_.pop_back();
      cols_.pop_back();
    }
    return false;
  }

  bool coverage_ok() const {
    Index rmax = 1, cmax = 1;
    for (Index a : rows_) rmax *= a;
    for (Index b : cols_) cmax *= b;
    Index rest = 1;
    for (std::size_t n = rows_.size(); n < target_.size(); ++n) rest *= target_[n];
    // Zero overlap maximizes coverage.
    return rmax * rest >= h_ && cmax * rest >= w_;
  }

  Index h_, w_;
  Dims target_;
  std::vector<std::vector<std::pair<Index, Index>>> choices_;
  std::vector<Index> rows_, cols_;
  std::vector<LevelSplit> result_;
  bool rows_ok_ = false, cols_ok_ = false;
};

std::string target_string(Index h, Index w, const Dims& target) {
  return std::to_string(h) + "x" + std::to_string(w) + " -> " + dims_to_string(target);
}

}  // namespace

AugmentPlan::AugmentPlan(Index height, Index width, std::vector<LevelSplit> levels)
    : height_(height), width_(width), levels_(std::move(levels)) {
  if (height < 1 || width < 1) throw ArgumentError("augmentation: image dims must be positive");
  if (levels_.empty()) throw ArgumentError("augmentation: at least one level is required");
  check_axis(levels_, height, true);
  check_axis(levels_, width, false);
  for (const auto& l : levels_) target_.push_back(l.row.count * l.col.count);

  // Offsets of every mode index into the source row and column.
  const std::size_t order = levels_.size();
  std::vector<std::vector<Index>> row_off(order), col_off(order);
  for (std::size_t n = 0; n < order; ++n) {
    const auto& l = levels_[n];
    for (Index j = 0; j < target_[n]; ++j) {
      const Index rb = j % l.row.count, cb = j / l.row.count;
      row_off[n].push_back(rb * (l.row.length - l.row.overlap));
      col_off[n].push_back(cb * (l.col.length - l.col.overlap));
    }
  }
  const Index total = product(target_);
  source_.resize(total);
  std::vector<Index> idx(order, 0);
  for (Index t = 0; t < total; ++t) {
    Index r = 0, c = 0;
    for (std::size_t n = 0; n < order; ++n) {
      r += row_off[n][idx[n]];
      c += col_off[n][idx[n]];
    }
    source_[t] = r + height_ * c;
    for (std::size_t n = 0; n < order; ++n) {
      if (++idx[n] < target_[n]) break;
      idx[n] = 0;
    }
  }
}

std::vector<Index> AugmentPlan::multiplicity() const {
  std::vector<Index> m(height_ * width_, 0);
  for (Index s : source_) ++m[s];
  return m;
}

bool AugmentPlan::is_bijective() const {
  return std::all_of(levels_.begin(), levels_.end(), [](const LevelSplit& l) {
    return l.row.overlap == 0 && l.col.overlap == 0;
  });
}

AugmentPlan plan_augmentation(Index height, Index width, const Dims& target_dims) {
  if (height < 1 || width < 1) throw ArgumentError("augmentation: image dims must be positive");
  if (target_dims.empty()) throw ArgumentError("augmentation: target dims are empty");
  for (Index d : target_dims)
    if (d < 1) throw ArgumentError("augmentation: target dims must be positive");
  PlanSearch search(height, width, target_dims);
  auto levels = search.run();
  if (!levels) {
    std::string axis;
    if (!search.rows_ever_feasible() && !search.cols_ever_feasible())
      axis = "both the row axis (height " + std::to_string(height) + ") and the column axis (width " +
             std::to_string(width) + ")";
    else if (!search.rows_ever_feasible())
      axis = "the row axis (height " + std::to_string(height) + ")";
    else if (!search.cols_ever_feasible())
      axis = "the column axis (width " + std::to_string(width) + ")";
    else
      axis = "the row and column axes jointly";
    throw PlanningError("no augmentation plan for " + target_string(height, width, target_dims) + ": " + axis +
                        " cannot be split down to single pixels with overlaps in {0,1,2}");
  }
  return AugmentPlan(height, width, std::move(*levels));
}

Dims default_target_dims(Index height, Index width) {
  if (height < 1 || width < 1) throw ArgumentError("augmentation: image dims must be positive");
  const Index longest = std::max(height, width);
  Index levels = 1;
  while ((Index(1) << (levels - 1)) < longest) ++levels;  // ceil(log2) + 1
  return Dims(static_cast<std::size_t>(std::max<Index>(levels, 2)), 4);
}

QuaternionTensord augment(const QuaternionMatrixd& image, const AugmentPlan& plan) {
  if (image.rows() != plan.height() || image.cols() != plan.width())
    throw ShapeError("augment: image is " + std::to_string(image.rows()) + "x" + std::to_string(image.cols()) +
                     ", plan expects " + std::to_string(plan.height()) + "x" + std::to_string(plan.width()));
  QuaternionTensord out(plan.target_dims());
  const auto& src = plan.source_index();
  for (int c = 0; c < 4; ++c) {
    const double* in = image.plane(c).data();
    auto& dst = out.plane(c);
    for (std::size_t t = 0; t < src.size(); ++t) dst(static_cast<Index>(t)) = in[src[t]];
  }
  return out;
}

QuaternionMatrixd deaugment(const QuaternionTensord& tensor, const AugmentPlan& plan) {
  if (tensor.dims() != plan.target_dims())
    throw ShapeError("deaugment: tensor dims " + dims_to_string(tensor.dims()) + ", plan expects " +
                     dims_to_string(plan.target_dims()));
  QuaternionMatrixd out(plan.height(), plan.width());
  const auto& src = plan.source_index();
  const auto count = plan.multiplicity();
  // Mean taken as first copy plus the averaged deviations from it, so that
  // identical copies give back the pixel bit for bit.
  std::vector<Index> first(count.size(), -1);
  for (std::size_t t = 0; t < src.size(); ++t)
    if (first[src[t]] < 0) first[src[t]] = static_cast<Index>(t);
  for (int c = 0; c < 4; ++c) {
    double* dst = out.plane(c).data();
    const auto& in = tensor.plane(c);
    std::vector<double> dev(count.size(), 0.0);
    for (std::size_t t = 0; t < src.size(); ++t) dev[src[t]] += in(static_cast<Index>(t)) - in(first[src[t]]);
    for (std::size_t p = 0; p < count.size(); ++p) dst[p] = in(first[p]) + dev[p] / static_cast<double>(count[p]);
  }
  return out;
}

MaskTensor augment_mask(const BoolPlane& mask, const AugmentPlan& plan) {
  if (mask.rows() != plan.height() || mask.cols() != plan.width())
    throw ShapeError("augment_mask: mask is " + std::to_string(mask.rows()) + "x" + std::to_string(mask.cols()) +
                     ", plan expects " + std::to_string(plan.height()) + "x" + std::to_string(plan.width()));
  MaskTensor out(plan.target_dims(), false);
  const auto& src = plan.source_index();
  for (std::size_t t = 0; t < src.size(); ++t) out.observed(static_cast<Index>(t)) = mask.data()[src[t]];
  return out;
}

void write_manifest(std::ostream& os, const AugmentPlan& plan) {
  os << "source " << plan.height() << ' ' << plan.width() << '\n';
  os << "target";
  for (Index d : plan.target_dims()) os << ' ' << d;
  os << '\n';
  for (std::size_t n = 0; n < plan.levels().size(); ++n) {
    const auto& l = plan.levels()[n];
    os << "level " << n + 1 << " row " << l.row.count << ' ' << l.row.length << ' ' << l.row.overlap << " col "
       << l.col.count << ' ' << l.col.length << ' ' << l.col.overlap << '\n';
  }
}

AugmentPlan read_manifest(std::istream& is) {
  Index h = 0, w = 0;
  Dims target;
  std::vector<LevelSplit> levels;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "source") {
      ls >> h >> w;
    } else if (key == "target") {
      Index d;
      while (ls >> d) target.push_back(d);
    } else if (key == "level") {
      std::size_t n;
      std::string rk, ck;
      LevelSplit l;
      ls >> n >> rk >> l.row.count >> l.row.length >> l.row.overlap >> ck >> l.col.count >> l.col.length >>
          l.col.overlap;
      if (!ls || rk != "row" || ck != "col" || n != levels.size() + 1)
        throw IoError("augmentation manifest: malformed line '" + line + "'");
      levels.push_back(l);
    } else {
      throw IoError("augmentation manifest: unknown key '" + key + "'");
    }
  }
  if (h < 1 || w < 1 || levels.empty()) throw IoError("augmentation manifest: missing source dims or levels");
  AugmentPlan plan;
  try {
    plan = AugmentPlan(h, w, std::move(levels));
  } catch (const ArgumentError& e) {
    throw IoError(std::string("augmentation manifest: ") + e.what());
  }
  if (!target.empty() && target != plan.target_dims())
    throw IoError("augmentation manifest: target " + dims_to_string(target) + " disagrees with its levels " +
                  dims_to_string(plan.target_dims()));
  return plan;
}

}  // namespace qtlr

#ifndef QTLR_MASK_HPP
#define QTLR_MASK_HPP

#include <Eigen/Core>

#include <utility>

#include "qtlr/error.hpp"
#include "qtlr/quaternion_tensor.hpp"

namespace qtlr {

// H x W observation pattern of an image, true = observed.
using BoolPlane = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Observation pattern over a tensor: true = observed.
struct MaskTensor {
  Dims dims;
  Eigen::Array<bool, Eigen::Dynamic, 1> observed;

  MaskTensor() = default;
  MaskTensor(Dims d, bool value) : dims(std::move(d)), observed(product(dims)) { observed.setConstant(value); }
  MaskTensor(Dims d, Eigen::Array<bool, Eigen::Dynamic, 1> values) : dims(std::move(d)), observed(std::move(values)) {
    if (observed.size() != product(dims)) throw ShapeError("mask size does not match its dims");
  }

  Index size() const { return observed.size(); }
  Index count() const { return observed.count(); }
};

}  // namespace qtlr

#endif  // QTLR_MASK_HPP

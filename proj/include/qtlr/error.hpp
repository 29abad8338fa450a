#ifndef QTLR_ERROR_HPP
#define QTLR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qtlr {

// Dimension mismatch between operands.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Parameter outside its admissible range (mode index, threshold, ...).
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Multi-index outside the tensor bounds.
class BoundsError : public std::out_of_range {
 public:
  explicit BoundsError(const std::string& what) : std::out_of_range(what) {}
};

// Mathematically undefined request, e.g. inverse of zero.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// No augmentation plan reaches the requested target dims.
class PlanningError : public std::runtime_error {
 public:
  explicit PlanningError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine produced an internally inconsistent result (NaN, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qtlr

#endif  // QTLR_ERROR_HPP

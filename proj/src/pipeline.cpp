#include "qtlr/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace qtlr {

void InpaintConfig::validate() const {
  if (target)
    for (Index d : *target)
      if (d < 1) throw ArgumentError("target dims must be positive");
  if (target && target->size() < 2) throw ArgumentError("target needs at least two dims");
  if (!(epsilon > 0)) throw ArgumentError("epsilon must be positive");
  if (!(C >= 0)) throw ArgumentError("C must be non-negative");
  if (mu0)
    for (double m : *mu0)
      if (!(m > 0)) throw ArgumentError("mu0 values must be positive");
  if (!(mu_max > 0)) throw ArgumentError("mu_max must be positive");
  if (!(rho > 1)) throw ArgumentError("rho must exceed 1");
  if (!(tol > 0)) throw ArgumentError("tol must be positive");
  if (max_iters < 1) throw ArgumentError("max_iters must be at least 1");
  if (!(sr > 0 && sr <= 1)) throw ArgumentError("sr must lie in (0, 1]");
}

InpaintConfig parse_inpaint_config(const KeyValues& kv) {
  kv.require_known({"target", "epsilon", "C", "mu0", "mu_max", "rho", "tol", "max_iters", "orientation", "sr", "seed"});
  InpaintConfig cfg;
  if (kv.has("target") && kv.get_string("target") != "auto") cfg.target = kv.get_indices("target");
  if (kv.has("epsilon")) cfg.epsilon = kv.get_double("epsilon");
  if (kv.has("C")) cfg.C = kv.get_double("C");
  if (kv.has("mu0") && kv.get_string("mu0") != "auto") cfg.mu0 = kv.get_doubles("mu0");
  if (kv.has("mu_max")) cfg.mu_max = kv.get_double("mu_max");
  if (kv.has("rho")) cfg.rho = kv.get_double("rho");
  if (kv.has("tol")) cfg.tol = kv.get_double("tol");
  if (kv.has("max_iters")) cfg.max_iters = static_cast<int>(kv.get_index("max_iters"));
  if (kv.has("orientation")) {
    const auto& o = kv.get_string("orientation");
    if (o == "as_defined")
      cfg.orientation = UnfoldingOrientation::kAsDefined;
    else if (o == "transposed")
      cfg.orientation = UnfoldingOrientation::kTransposed;
    else
      throw ArgumentError("orientation must be as_defined or transposed, got '" + o + "'");
  }
  if (kv.has("sr")) cfg.sr = kv.get_double("sr");
  if (kv.has("seed")) cfg.seed = kv.get_u64("seed");
  cfg.validate();
  return cfg;
}

void write_inpaint_config(std::ostream& os, const InpaintConfig& cfg) {
  const auto old = os.precision(17);
  os << "target=" << (cfg.target ? join_indices(*cfg.target) : "auto") << '\n';
  os << "epsilon=" << cfg.epsilon << "\nC=" << cfg.C << '\n';
  os << "mu0=";
  if (cfg.mu0) {
    for (std::size_t i = 0; i < cfg.mu0->size(); ++i) os << (i ? "," : "") << (*cfg.mu0)[i];
  } else {
    os << "auto";
  }
  os << "\nmu_max=" << cfg.mu_max << "\nrho=" << cfg.rho << "\ntol=" << cfg.tol << "\nmax_iters=" << cfg.max_iters;
  os << "\norientation=" << (cfg.orientation == UnfoldingOrientation::kAsDefined ? "as_defined" : "transposed");
  os << "\nsr=" << cfg.sr << "\nseed=" << cfg.seed << '\n';
  os.precision(old);
}

InpaintResult inpaint(const ColorImage& image, const BoolPlane& mask, const InpaintConfig& cfg,
                      const IterationObserver<double>& observer) {
  cfg.validate();
  if (mask.rows() != image.height() || mask.cols() != image.width())
    throw ShapeError("mask is " + std::to_string(mask.rows()) + "x" + std::to_string(mask.cols()) + ", image is " +
                     std::to_string(image.height()) + "x" + std::to_string(image.width()));
  const auto start = std::chrono::steady_clock::now();

  InpaintResult out;
  out.plan = plan_augmentation(image.height(), image.width(),
                               cfg.target ? *cfg.target : default_target_dims(image.height(), image.width()));
  const Dims& dims = out.plan.target_dims();
  out.observed = apply_mask(image, mask);

  CompletionProblem<double> problem;
  problem.omega = augment_mask(mask, out.plan);
  problem.X = augment(to_quaternion(out.observed), out.plan);
  problem.alpha = default_alpha(dims);
  problem.wnn = {cfg.epsilon, cfg.C};
  if (cfg.mu0 && cfg.mu0->size() == 1)
    problem.mu0.assign(dims.size() - 1, cfg.mu0->front());
  else
    problem.mu0 = cfg.mu0 ? *cfg.mu0 : default_mu(dims.size());
  problem.mu_max = cfg.mu_max;
  problem.rho = cfg.rho;
  problem.tol = cfg.tol;
  problem.max_iters = cfg.max_iters;
  problem.orientation = cfg.orientation;

  out.completion = solve(problem, observer);
  out.recovered = from_quaternion(deaugment(out.completion.T, out.plan));
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.psnr = psnr(image, out.recovered);
  out.ssim = ssim(image, out.recovered);
  out.baseline_psnr = psnr(image, out.observed);
  out.baseline_ssim = ssim(image, out.observed);
  return out;
}

}  // namespace qtlr

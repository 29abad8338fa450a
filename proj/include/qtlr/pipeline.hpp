#ifndef QTLR_PIPELINE_HPP
#define QTLR_PIPELINE_HPP

#include <optional>
#include <vector>

#include "qtlr/augmentation.hpp"
#include "qtlr/completion.hpp"
#include "qtlr/config.hpp"
#include "qtlr/imaging.hpp"

namespace qtlr {

// Inpainting parameters. Unset target and mu0 fall back to
// default_target_dims and default_mu.
struct InpaintConfig {
  std::optional<Dims> target;
  double epsilon = 1e-3;
  double C = 1.0;
  std::optional<std::vector<double>> mu0;
  double mu_max = 1e6;
  double rho = 1.03;
  double tol = 1e-5;
  int max_iters = 300;
  UnfoldingOrientation orientation = UnfoldingOrientation::kAsDefined;
  double sr = 0.3;
  std::uint64_t seed = 42;

  // Range checks that do not need the image.
  void validate() const;
};

// Keys: target, epsilon, C, mu0 (one value for all k or N-1 values), mu_max,
// rho, tol, max_iters, orientation (as_defined|transposed), sr, seed.
InpaintConfig parse_inpaint_config(const KeyValues& kv);
void write_inpaint_config(std::ostream& os, const InpaintConfig& cfg);

struct InpaintResult {
  AugmentPlan plan;
  ColorImage observed;   // missing pixels black
  ColorImage recovered;
  CompletionResult<double> completion;
  double psnr = 0, ssim = 0;
  double baseline_psnr = 0, baseline_ssim = 0;  // zero-filled observation
  double seconds = 0;
};

// encode -> augment -> mask -> solve -> de-augment -> decode -> score
InpaintResult inpaint(const ColorImage& image, const BoolPlane& mask, const InpaintConfig& cfg,
                      const IterationObserver<double>& observer = {});

}  // namespace qtlr

#endif  // QTLR_PIPELINE_HPP

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "qtlr/pipeline.hpp"
#include "qtlr/qtlr.hpp"
#include "qtlr/qtns.hpp"

namespace fs = std::filesystem;
using namespace qtlr;

namespace {

enum ExitCode { kOk = 0, kArgument = 2, kIo = 3, kNumerical = 4 };

bool is_qtns(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  char magic[4] = {};
  is.read(magic, 4);
  return is.gcount() == 4 && std::string(magic, 4) == "QTNS";
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os || !(os << text)) throw IoError("cannot write '" + path.string() + "'");
}

struct DecomposeArgs {
  std::string input, out, target;
  double eps = 0.1;
  std::string rule = "residual";
};

int run_decompose(const DecomposeArgs& a) {
  ensure_dir(a.out);
  QuaternionTensord t;
  std::ostringstream report;
  if (is_qtns(a.input)) {
    t = load_qtns(a.input);
  } else {
    const auto img = read_image(a.input);
    KeyValues kv;
    kv.set("target", a.target.empty() ? "auto" : a.target);
    const Dims dims = kv.get_string("target") == "auto" ? default_target_dims(img.height(), img.width())
                                                        : kv.get_indices("target");
    const auto plan = plan_augmentation(img.height(), img.width(), dims);
    std::ofstream manifest(fs::path(a.out) / "plan.txt");
    write_manifest(manifest, plan);
    t = augment(to_quaternion(img), plan);
  }
  QtlrQsvdOptions<double> options;
  if (a.rule == "residual")
    options.rule = TruncationRule::kResidualAtMostDelta;
  else if (a.rule == "delta")
    options.rule = TruncationRule::kSigmaAtLeastDelta;
  else if (a.rule == "delta_squared")
    options.rule = TruncationRule::kSigmaAtLeastDeltaSquared;
  else
    throw ArgumentError("--rule must be residual, delta or delta_squared");

  const auto cores = qtlr_qsvd(t, a.eps, options);
  save_cores(a.out, cores);
  const double err = t.norm() == 0 ? 0.0 : relative_error(t, cores);
  if (!std::isfinite(err)) throw NumericalError("decompose: non-finite reconstruction error");
  const double ratio = static_cast<double>(cores.parameter_count()) / static_cast<double>(t.size());
  report << "dims=" << join_indices(t.dims()) << "\nranks=" << join_indices(cores.ranks())
         << "\nrelative_error=" << fmt(err) << "\nstorage_ratio=" << fmt(ratio) << '\n';
  write_text(fs::path(a.out) / "report.txt", report.str());
  std::cout << report.str();
  return kOk;
}

struct InpaintArgs {
  std::string image, mask, config, out;
  std::optional<double> sr;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  bool quiet = false;
};

int run_inpaint(const InpaintArgs& a) {
  KeyValues kv;
  if (!a.config.empty()) kv = read_config_file(a.config);
  for (const auto& o : a.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ArgumentError("--set expects key=value, got '" + o + "'");
    kv.set(o.substr(0, eq), o.substr(eq + 1));
  }
  std::ostringstream tmp;
  if (a.sr) {
    tmp << std::setprecision(17) << *a.sr;
    kv.set("sr", tmp.str());
  }
  if (a.seed) kv.set("seed", std::to_string(*a.seed));
  const InpaintConfig cfg = parse_inpaint_config(kv);

  const auto img = read_image(a.image);
  const BoolPlane mask = a.mask.empty() ? random_mask(img.height(), img.width(), cfg.sr, cfg.seed) : read_mask(a.mask);
  ensure_dir(a.out);
  const fs::path out(a.out);

  IterationObserver<double> observer;
  if (!a.quiet)
    observer = [](const SolverState<double>&, const IterationRecord<double>& r) {
      if (r.iter % 25 == 0) std::cerr << "iter " << r.iter << " change " << fmt(r.relative_change) << '\n';
    };
  const auto res = inpaint(img, mask, cfg, observer);

  write_image((out / "recovered.png").string(), res.recovered);
  write_image((out / "observed.png").string(), res.observed);
  write_mask((out / "mask.png").string(), mask);
  {
    std::ostringstream cfg_text;
    write_inpaint_config(cfg_text, cfg);
    write_text(out / "config.txt", cfg_text.str());
    std::ofstream plan(out / "plan.txt");
    write_manifest(plan, res.plan);
    std::ofstream hist(out / "history.csv");
    write_history_csv(hist, res.completion.history);
  }
  std::ostringstream m;
  m << "psnr=" << fmt(res.psnr) << " ssim=" << fmt(res.ssim) << " baseline_psnr=" << fmt(res.baseline_psnr)
    << " baseline_ssim=" << fmt(res.baseline_ssim) << " iterations=" << res.completion.iterations
    << " converged=" << (res.completion.converged ? 1 : 0) << " seconds=" << fmt(res.seconds)
    << " observed=" << mask.count() << '/' << mask.size() << " seed=" << cfg.seed << '\n';
  write_text(out / "metrics.txt", m.str());
  std::cout << m.str();
  return kOk;
}

int run_metrics(const std::string& ref, const std::string& test) {
  const auto a = read_image(ref);
  const auto b = read_image(test);
  std::cout << "psnr=" << fmt(psnr(a, b)) << " ssim=" << fmt(ssim(a, b)) << '\n';
  return kOk;
}

int run_mask(Index h, Index w, double sr, std::uint64_t seed, const std::string& out) {
  const auto m = random_mask(h, w, sr, seed);
  write_mask(out, m);
  std::cout << "observed=" << m.count() << '/' << m.size() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quaternion tensor left ring decomposition and color image inpainting"};
  app.require_subcommand(1);

  DecomposeArgs dec;
  auto* decompose = app.add_subcommand("decompose", "QTLR-QSVD of a QTNS tensor or an augmented image");
  decompose->add_option("--input", dec.input, "QTNS tensor or PNG/PPM image")->required();
  decompose->add_option("--eps", dec.eps, "relative error budget eps_p > 0")->required();
  decompose->add_option("--out", dec.out, "output directory for cores and report")->required();
  decompose->add_option("--target", dec.target, "augmentation dims for image input, comma separated");
  decompose->add_option("--rule", dec.rule, "truncation rule: residual, delta or delta_squared");

  InpaintArgs inp;
  auto* inpaint_cmd = app.add_subcommand(
      "inpaint",
      "complete missing pixels; PSNR uses the MSE pooled over R, G, B with peak 1, SSIM is the channel mean");
  inpaint_cmd->add_option("--image", inp.image, "PNG/PPM color image")->required();
  auto* sr_opt = inpaint_cmd->add_option("--sr", inp.sr, "sampling rate in (0, 1] for a random mask");
  inpaint_cmd->add_option("--seed", inp.seed, "mask seed");
  auto* mask_opt = inpaint_cmd->add_option("--mask", inp.mask, "mask image, non-black = observed");
  mask_opt->excludes(sr_opt);
  inpaint_cmd->add_option("--config", inp.config, "key=value config file");
  inpaint_cmd->add_option("--set", inp.overrides, "config override key=value, repeatable");
  inpaint_cmd->add_option("--out", inp.out, "output directory")->required();
  inpaint_cmd->add_flag("--quiet", inp.quiet, "no progress on stderr");

  std::string ref, test;
  auto* metrics = app.add_subcommand("metrics", "PSNR (pooled MSE, peak 1) and SSIM of two images");
  metrics->add_option("--ref", ref)->required();
  metrics->add_option("--test", test)->required();

  Index mh = 0, mw = 0;
  double msr = 0;
  std::uint64_t mseed = 0;
  std::string mout;
  auto* mask = app.add_subcommand("mask", "write a random observation mask");
  mask->add_option("--height", mh)->required();
  mask->add_option("--width", mw)->required();
  mask->add_option("--sr", msr)->required();
  mask->add_option("--seed", mseed)->required();
  mask->add_option("--out", mout)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kArgument;
  }

  try {
    if (*decompose) return run_decompose(dec);
    if (*inpaint_cmd) return run_inpaint(inp);
    if (*metrics) return run_metrics(ref, test);
    if (*mask) return run_mask(mh, mw, msr, mseed, mout);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const PlanningError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kArgument;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kArgument;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kArgument;
}

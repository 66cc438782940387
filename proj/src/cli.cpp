#include "lsr/cli.hpp"

#include "lsr/fourier.hpp"
#include "lsr/io.hpp"
#include "lsr/phantom.hpp"
#include "lsr/solver.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <ostream>

namespace lsr {

namespace {

struct PhantomArgs
{
  PhantomSpec spec;
  std::string out;
  std::string truth;
};

struct MaskArgs
{
  Index n = 0;
  std::string pattern = "cartesian";
  double af = 4.0;
  double fraction = 0.75;
  double center_fraction = kDefaultCenterFraction;
  Index acs = 0;
  std::uint64_t seed = 0;
  std::string out;
};

struct ReconArgs
{
  std::string kspace;
  std::string mask;
  std::string out;
  std::string report;
  double lambda1 = 1e-3;
  double lambda2 = 1e-3;
  std::string gamma = "1";
  int iters = 50;
  double tol = 1e-6;
  std::string mode = "full";
  Index filter_len = 16;
  int levels = 3;
  int threads = 1;
};

struct EvalArgs
{
  std::string ref;
  std::string test;
  std::string out_json;
};

void run_phantom(PhantomArgs const &a, std::ostream &out)
{
  auto const p = gen_phantom(a.spec);
  write_tensor(a.out, p.kspace);
  if (!a.truth.empty()) {
    write_tensor(a.truth, p.coil_images);
  }
  out << fmt::format("phantom {}x{}x{} seed {} -> {}\n", a.spec.m, a.spec.n, a.spec.coils, a.spec.seed, a.out);
}

void run_mask(MaskArgs const &a, std::ostream &out)
{
  auto const mask = [&]() {
    if (a.pattern == "cartesian") {
      return gen_cartesian(a.n, a.af, a.center_fraction, a.seed);
    }
    if (a.pattern == "pf") {
      return gen_partial_fourier(a.n, a.fraction, a.af, a.center_fraction, a.seed);
    }
    if (a.pattern == "uniform") {
      if (a.af != std::round(a.af)) {
        throw Error("uniform pattern needs an integer --af");
      }
      return gen_uniform(a.n, static_cast<Index>(a.af), a.acs);
    }
    throw Error(fmt::format("unknown pattern '{}'", a.pattern));
  }();
  write_mask(a.out, mask);
  out << fmt::format("mask n={} sampled={} af={:.6f} -> {}\n", mask.n(), mask.count(), af_of(mask), a.out);
}

void run_recon(ReconArgs const &a, std::ostream &out)
{
  SolverConfig cfg;
  cfg.lambda1 = a.lambda1;
  cfg.lambda2 = a.lambda2;
  if (a.gamma == "auto") {
    cfg.gamma.reset();
  } else {
    try {
      std::size_t used = 0;
      cfg.gamma = std::stod(a.gamma, &used);
      if (used != a.gamma.size()) {
        throw std::invalid_argument("trailing characters");
      }
    } catch (std::exception const &) {
      throw Error(fmt::format("--gamma must be 'auto' or a number, got '{}'", a.gamma));
    }
  }
  cfg.max_iters = a.iters;
  cfg.tol = a.tol;
  cfg.mode = prior_from_string(a.mode);
  cfg.hankel.filter_len = a.filter_len;
  cfg.frame_levels = a.levels;

  auto const mask = read_mask(a.mask);
  auto const y = apply_mask(read_tensor(a.kspace), mask);
  ReconOptions opts;
  opts.threads = a.threads;
  auto const res = recon_image(y, mask, cfg, opts);
  write_tensor(a.out, res.image);

  int iters = 0;
  for (auto const &r : res.rows) {
    iters += r.iterations;
  }
  out << fmt::format("recon {} rows, {} iterations total, mode {} -> {}\n", res.rows.size(), iters,
                     to_string(cfg.mode), a.out);

  if (!a.report.empty()) {
    nlohmann::json j;
    j["scale"] = res.scale;
    for (auto const &r : res.rows) {
      j["rows"].push_back({{"row", r.row},
                           {"iterations", r.iterations},
                           {"objective", r.objective},
                           {"final_change", std::isfinite(r.final_change) ? nlohmann::json(r.final_change) : nullptr},
                           {"seconds", r.seconds}});
    }
    std::ofstream f(a.report);
    if (!f) {
      throw Error(fmt::format("cannot open {} for writing", a.report));
    }
    f << j.dump(2) << '\n';
  }
}

void run_eval(EvalArgs const &a, std::ostream &out)
{
  auto const ref = read_tensor(a.ref);
  auto const test = read_tensor(a.test);
  if (!ref.same_shape(test)) {
    throw Error("reference and test tensors differ in shape");
  }
  auto const report = evaluate(sos_combine(ref), sos_combine(test));
  auto const text = metrics_to_json(report).dump();
  out << text << '\n';
  if (!a.out_json.empty()) {
    std::ofstream f(a.out_json);
    if (!f) {
      throw Error(fmt::format("cannot open {} for writing", a.out_json));
    }
    f << text << '\n';
  }
}

} // namespace

auto cli_main(int argc, char const *const *argv, std::ostream &out, std::ostream &err) -> int
{
  CLI::App app{"Row-wise low-rank + sparse reconstruction of undersampled multi-coil k-space", "lsrecon"};
  app.require_subcommand(1);

  PhantomArgs pa;
  auto *phantom = app.add_subcommand("phantom", "Generate a synthetic multi-coil phantom k-space");
  phantom->add_option("--m", pa.spec.m, "FE size")->capture_default_str();
  phantom->add_option("--n", pa.spec.n, "PE size")->capture_default_str();
  phantom->add_option("--coils", pa.spec.coils, "Number of coils")->capture_default_str();
  phantom->add_option("--support", pa.spec.support, "Odd k-space support of the sensitivities")->capture_default_str();
  phantom->add_option("--shapes", pa.spec.shapes, "Number of shapes")->capture_default_str();
  phantom->add_option("--seed", pa.spec.seed, "Random seed")->capture_default_str();
  phantom->add_option("--out", pa.out, "Output k-space tensor")->required();
  phantom->add_option("--truth", pa.truth, "Optional output of the true coil images");

  MaskArgs ma;
  auto *mask = app.add_subcommand("mask", "Generate a PE undersampling mask");
  mask->add_option("--n", ma.n, "PE size")->required();
  mask->add_option("--pattern", ma.pattern, "cartesian | uniform | pf")
    ->check(CLI::IsMember({"cartesian", "uniform", "pf"}))
    ->capture_default_str();
  mask->add_option("--af", ma.af, "Acceleration factor")->capture_default_str();
  mask->add_option("--fraction", ma.fraction, "Partial Fourier fraction")->capture_default_str();
  mask->add_option("--center-fraction", ma.center_fraction, "Fully sampled center fraction")->capture_default_str();
  mask->add_option("--acs", ma.acs, "Center lines added to the uniform pattern")->capture_default_str();
  mask->add_option("--seed", ma.seed, "Random seed")->capture_default_str();
  mask->add_option("--out", ma.out, "Output mask JSON")->required();

  ReconArgs ra;
  auto *recon = app.add_subcommand("recon", "Reconstruct coil images from undersampled k-space");
  recon->add_option("--kspace", ra.kspace, "Input k-space tensor (unsampled lines are zeroed)")->required();
  recon->add_option("--mask", ra.mask, "Mask JSON")->required();
  recon->add_option("--out", ra.out, "Output coil image tensor")->required();
  recon->add_option("--report", ra.report, "Optional per-row report JSON");
  recon->add_option("--lambda1", ra.lambda1, "Low-rank weight")->capture_default_str();
  recon->add_option("--lambda2", ra.lambda2, "Sparsity weight")->capture_default_str();
  recon->add_option("--gamma", ra.gamma, "Step size or 'auto'")->capture_default_str();
  recon->add_option("--iters", ra.iters, "Maximum iterations")->capture_default_str();
  recon->add_option("--tol", ra.tol, "Relative change tolerance")->capture_default_str();
  recon->add_option("--mode", ra.mode, "full | lr | sp")
    ->check(CLI::IsMember({"full", "lr", "sp"}))
    ->capture_default_str();
  recon->add_option("--filter-len", ra.filter_len, "Hankel filter length")->capture_default_str();
  recon->add_option("--levels", ra.levels, "Frame levels")->capture_default_str();
  recon->add_option("--threads", ra.threads, "Worker threads")->capture_default_str();

  EvalArgs ea;
  auto *eval = app.add_subcommand("eval", "RLNE / PSNR / SSIM of SOS-combined images");
  eval->add_option("--ref", ea.ref, "Reference coil image tensor")->required();
  eval->add_option("--test", ea.test, "Test coil image tensor")->required();
  eval->add_option("--out-json", ea.out_json, "Optional metrics JSON output");

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const &) {
    out << app.help();
    return kExitOk;
  } catch (CLI::CallForAllHelp const &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (CLI::ParseError const &e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  try {
    if (*phantom) {
      run_phantom(pa, out);
    } else if (*mask) {
      run_mask(ma, out);
    } else if (*recon) {
      run_recon(ra, out);
    } else if (*eval) {
      run_eval(ea, out);
    }
  } catch (NumericalError const &e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (std::exception const &e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}

} // namespace lsr

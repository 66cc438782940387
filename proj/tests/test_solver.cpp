#include "helpers.hpp"
#include "lsr/fourier.hpp"
#include "lsr/frame.hpp"
#include "lsr/metrics.hpp"
#include "lsr/phantom.hpp"
#include "lsr/solver.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

using namespace lsr;

namespace {

struct Scene
{
  Phantom phantom;
  SamplingMask mask;
  ComplexTensor3 kspace; // masked
  ComplexTensor3 hybrid; // masked, scaled to max |Y| = 1
};

auto scene(Index size = 32, std::uint64_t mask_seed = 0) -> Scene
{
  PhantomSpec spec;
  spec.m = size;
  spec.n = size;
  auto p = gen_phantom(spec);
  auto m = gen_cartesian(size, 4, kDefaultCenterFraction, mask_seed);
  auto y = apply_mask(p.kspace, m);
  ComplexTensor3 ys = y;
  ys *= 1.0 / y.max_abs();
  auto h = ifft_fe(ys);
  return Scene{std::move(p), std::move(m), std::move(y), std::move(h)};
}

auto small_cfg(Index b = 8) -> SolverConfig
{
  SolverConfig cfg;
  cfg.hankel.filter_len = b;
  cfg.gamma.reset();
  return cfg;
}

// Evaluates the objective from an explicit Hankel matrix, Q = W^(1/2) and a
// dense frame analysis matrix.
auto dense_objective(HybridRow const &e, HybridRow const &z, SamplingMask const &m, CxMatrix const &w,
                     SolverConfig const &cfg) -> double
{
  Index const n = e.pe(), j = e.coils(), b = cfg.hankel.filter_len, g = n - b + 1;
  double data = 0.0;
  for (Index i = 0; i < n; i++) {
    for (Index c = 0; c < j; c++) {
      Cx const r = z.data(i, c) - (m.sampled(i) ? e.data(i, c) : Cx{0.0, 0.0});
      data += std::norm(r);
    }
  }
  CxMatrix h(g, b * j);
  for (Index c = 0; c < j; c++) {
    for (Index p = 0; p < g; p++) {
      for (Index q = 0; q < b; q++) {
        h(p, c * b + q) = e.data(p + q, c);
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<CxMatrix> es(w);
  CxMatrix const q = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  double const lr = (h * q).squaredNorm();

  // Inverse centered DFT along PE as a dense matrix, then the frame
  // analysis as a dense matrix, applied to each coil.
  CxMatrix f(n, n);
  for (Index k = 0; k < n; k++) {
    for (Index t = 0; t < n; t++) {
      f(t, k) = std::polar(1.0 / std::sqrt(double(n)), 2.0 * M_PI * double((k - n / 2) * (t - n / 2)) / double(n));
    }
  }
  int const levels = cfg.frame_levels;
  CxMatrix d(n * (levels + 1), n);
  for (Index i = 0; i < n; i++) {
    auto const c = frame_forward(test::unit_column(n, i), levels);
    for (int l = 0; l < levels; l++) {
      d.block(l * n, i, n, 1) = c.high[size_t(l)];
    }
    d.block(levels * n, i, n, 1) = c.low;
  }
  double sp = 0.0;
  for (Index c = 0; c < j; c++) {
    sp += (d * f * e.data.col(c)).cwiseAbs().sum();
  }
  return 0.5 * data + cfg.lambda1 * lr + cfg.lambda2 * sp;
}

} // namespace

TEST_CASE("solver-config", "[solver]")
{
  CHECK(prior_from_string("full") == Prior::Full);
  CHECK(prior_from_string("lr") == Prior::LowRankOnly);
  CHECK(prior_from_string("sparse_only") == Prior::SparseOnly);
  CHECK_THROWS_AS(prior_from_string("both"), Error);
  for (auto p : {Prior::Full, Prior::LowRankOnly, Prior::SparseOnly}) {
    CHECK(prior_from_string(to_string(p)) == p);
  }

  SolverConfig cfg;
  cfg.mode = Prior::LowRankOnly;
  CHECK(cfg.sparse_weight() == 0.0);
  CHECK(cfg.lowrank_weight() == cfg.lambda1);
  cfg.mode = Prior::SparseOnly;
  CHECK(cfg.lowrank_weight() == 0.0);

  cfg = SolverConfig{};
  cfg.lambda1 = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = SolverConfig{};
  cfg.gamma = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = SolverConfig{};
  cfg.max_iters = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("objective", "[solver]")
{
  std::mt19937_64 rng(1);
  auto const m = gen_cartesian(16, 2, 0.125, 3);
  auto const cfg = small_cfg(4);
  auto const hc = cfg.hankel.with_dims(16, 2);
  auto const w = weight_update(gram(test::random_row(rng, 16, 2), hc), 0.5);

  SECTION("examples")
  {
    auto const full = gen_cartesian(16, 1, 0.0, 0);
    auto const z = test::random_row(rng, 16, 2);
    SolverConfig c0 = cfg;
    c0.lambda1 = 0.0;
    c0.lambda2 = 0.0;
    CHECK(objective(z, z, full, w, c0) == 0.0);
    CHECK(objective(HybridRow(16, 2), z, full, w, cfg) == Catch::Approx(0.5 * z.data.squaredNorm()));
  }

  SECTION("dense oracle")
  {
    for (auto mode : {Prior::Full, Prior::LowRankOnly, Prior::SparseOnly}) {
      SolverConfig c = cfg;
      c.mode = mode;
      c.lambda1 = 0.3;
      c.lambda2 = 0.2;
      auto const z = apply_mask(test::random_row(rng, 16, 2), m);
      auto const e = test::random_row(rng, 16, 2);
      SolverConfig dense = c;
      dense.lambda1 = c.lowrank_weight();
      dense.lambda2 = c.sparse_weight();
      double const ref = dense_objective(e, z, m, w.matrix(), dense);
      CHECK(std::abs(objective(e, z, m, w, c) - ref) <= 1e-10 * ref);
    }
  }
}

TEST_CASE("auto-step", "[solver]")
{
  std::mt19937_64 rng(2);
  auto const m = gen_cartesian(32, 4, 0.1, 1);
  auto const z = apply_mask(test::random_row(rng, 32, 3), m);
  auto cfg = small_cfg(8);
  auto const hc = cfg.hankel.with_dims(32, 3);
  auto const w = weight_update(gram(test::random_row(rng, 32, 3), hc), 1.0);

  SECTION("projection only")
  {
    SolverConfig c = cfg;
    c.lambda1 = 0.0;
    double const g = auto_step(z, m, w, c);
    CHECK(0.99 / g >= 1.0 - 1e-3);
    CHECK(0.99 / g <= 1.0 + 1e-12);
    double const g0 = auto_step(z, m, WeightMatrix(CxMatrix::Zero(hc.width(), hc.width()), 0.0), cfg);
    CHECK(0.99 / g0 >= 1.0 - 1e-3);
    CHECK(0.99 / g0 <= 1.0 + 1e-12);
  }

  SECTION("converged estimate on phantom rows")
  {
    auto const s = scene(64);
    SolverConfig c;
    auto const hc64 = c.hankel.with_dims(64, 4);
    for (Index r : {8, 20, 32, 44}) {
      auto const zr = s.hybrid.row(r);
      auto const a = gram(zr, hc64);
      auto const wr = weight_update(a, hc64.epsilon(max_eigenvalue(a), 1));
      double const l20 = 0.99 / auto_step(zr, s.mask, wr, c);
      double const l50 = 0.99 / auto_step(zr, s.mask, wr, c, 50);
      CHECK(std::abs(l20 - l50) < 0.01 * l50);
      CHECK(auto_step(zr, s.mask, wr, c) == auto_step(zr, s.mask, wr, c));
    }
  }
}

TEST_CASE("recon-row", "[solver]")
{
  std::mt19937_64 rng(3);

  SECTION("full mask without priors returns the data")
  {
    auto const full = gen_cartesian(16, 1, 0.0, 0);
    auto const z = test::random_row(rng, 16, 2);
    SolverConfig cfg;
    cfg.lambda1 = 0.0;
    cfg.lambda2 = 0.0;
    cfg.gamma = 1.0;
    cfg.max_iters = 1;
    auto const [e, rep] = recon_row(z, full, cfg);
    CHECK(e.data == z.data);
    CHECK(rep.iterations == 1);
  }

  SECTION("zero row stays zero")
  {
    auto const m = gen_cartesian(32, 4, 0.1, 0);
    for (auto mode : {Prior::Full, Prior::LowRankOnly, Prior::SparseOnly}) {
      auto cfg = small_cfg();
      cfg.mode = mode;
      auto const [e, rep] = recon_row(HybridRow(32, 2), m, cfg);
      CHECK(e.data.norm() == 0.0);
      CHECK(rep.objective.size() == size_t(rep.iterations) + 1);
    }
  }

  SECTION("trace length and early stop")
  {
    auto const s = scene();
    auto cfg = small_cfg();
    cfg.max_iters = 7;
    cfg.tol = 0.0;
    auto const [e, rep] = recon_row(s.hybrid.row(10), s.mask, cfg);
    CHECK(rep.iterations == 7);
    CHECK(rep.objective.size() == 8);
    cfg.tol = 1e30;
    auto const [e2, rep2] = recon_row(s.hybrid.row(10), s.mask, cfg);
    CHECK(rep2.iterations == 1);
    CHECK(rep2.objective.size() == 2);
  }

  SECTION("sparse-only never touches the Hankel operator")
  {
    auto const s = scene();
    auto cfg = small_cfg();
    cfg.mode = Prior::SparseOnly;
    cfg.hankel.filter_len = 1000; // would be rejected if the low-rank path ran
    CHECK_NOTHROW(recon_row(s.hybrid.row(5), s.mask, cfg));
    cfg.mode = Prior::Full;
    CHECK_THROWS_AS(recon_row(s.hybrid.row(5), s.mask, cfg), Error);
  }

  SECTION("homogeneity")
  {
    auto const s = scene();
    auto const z = s.hybrid.row(12);
    double const alpha = 3.7;
    HybridRow const za(CxMatrix(alpha * z.data));
    for (auto mode : {Prior::Full, Prior::LowRankOnly, Prior::SparseOnly}) {
      auto cfg = small_cfg();
      cfg.mode = mode;
      cfg.max_iters = 10;
      cfg.tol = 0.0;
      auto scaled = cfg;
      scaled.lambda1 *= alpha;
      scaled.lambda2 *= alpha;
      auto const [e, r1] = recon_row(z, s.mask, cfg);
      auto const [ea, r2] = recon_row(za, s.mask, scaled);
      CHECK((ea.data - alpha * e.data).norm() <= 1e-9 * alpha * e.data.norm());
    }
  }

  SECTION("frozen weight gives a monotone low-rank objective")
  {
    auto const s = scene();
    for (Index r = 4; r < 28; r += 4) {
      auto cfg = small_cfg();
      cfg.mode = Prior::LowRankOnly;
      cfg.refresh_every = 0;
      cfg.tol = 0.0;
      auto const [e, rep] = recon_row(s.hybrid.row(r), s.mask, cfg);
      for (size_t k = 1; k < rep.objective.size(); k++) {
        CHECK(rep.objective[k] <= rep.objective[k - 1] + 1e-12);
      }
    }
  }

  SECTION("divergence is reported")
  {
    auto const s = scene();
    auto cfg = small_cfg();
    cfg.gamma = 1e6;
    cfg.lambda1 = 10.0;
    cfg.max_iters = 200;
    CHECK_THROWS_AS(recon_row(s.hybrid.row(16), s.mask, cfg), NumericalError);
  }

  SECTION("improves a phantom row")
  {
    auto const s = scene(64);
    auto const full = ifft_fe(s.phantom.kspace);
    double const scale = s.kspace.max_abs();
    Index const r = 30;
    auto const ref = full.row(r);
    auto const z = s.hybrid.row(r);
    SolverConfig cfg;
    cfg.gamma.reset();
    auto const [e, rep] = recon_row(z, s.mask, cfg);
    CxMatrix const ez = scale * z.data, er = scale * e.data;
    CHECK((er - ref.data).norm() < (ez - ref.data).norm());
  }
}

TEST_CASE("recon-image", "[solver]")
{
  auto const s = scene();
  auto cfg = small_cfg();
  cfg.max_iters = 10;

  SECTION("no iterations is zero-filled")
  {
    cfg.max_iters = 0;
    auto const r = recon_image(s.kspace, s.mask, cfg);
    auto const zf = zero_filled(s.kspace);
    for (Index i = 0; i < zf.size(); i++) {
      CHECK(std::abs(r.image.data()[size_t(i)] - zf.data()[size_t(i)]) <= 1e-12 * zf.max_abs());
    }
  }

  SECTION("schedule independent")
  {
    auto const a = recon_image(s.kspace, s.mask, cfg);
    ReconOptions rev;
    rev.row_order.resize(size_t(s.kspace.fe()));
    std::iota(rev.row_order.rbegin(), rev.row_order.rend(), 0);
    auto const b = recon_image(s.kspace, s.mask, cfg, rev);
    ReconOptions par;
    par.threads = 4;
    auto const c = recon_image(s.kspace, s.mask, cfg, par);
    CHECK(a.image == b.image);
    CHECK(a.image == c.image);
    for (Index i = 0; i < a.image.size(); i++) {
      CHECK(std::isfinite(std::abs(a.image.data()[size_t(i)])));
    }
  }

  SECTION("errors")
  {
    ComplexTensor3 bad = s.kspace;
    Index const miss = [&] {
      for (Index i = 0; i < s.mask.n(); i++) {
        if (!s.mask.sampled(i)) {
          return i;
        }
      }
      return Index{0};
    }();
    bad(3, miss, 1) = Cx{1.0, 0.0};
    CHECK_THROWS_AS(recon_image(bad, s.mask, cfg), Error);

    ReconOptions dup;
    dup.row_order.assign(size_t(s.kspace.fe()), 0);
    CHECK_THROWS_AS(recon_image(s.kspace, s.mask, cfg, dup), Error);

    cfg.gamma = 1e6;
    cfg.lambda1 = 10.0;
    cfg.max_iters = 200;
    CHECK_THROWS_MATCHES(recon_image(s.kspace, s.mask, cfg), NumericalError,
                         Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith("row ")));
  }
}

TEST_CASE("tune-params", "[solver]")
{
  auto const s = scene();
  auto cfg = small_cfg();
  cfg.max_iters = 10;
  auto const truth = sos_combine(s.phantom.coil_images);

  SECTION("singleton")
  {
    std::vector<std::pair<double, double>> const grid{{2e-3, 5e-4}};
    auto const t = tune_params(grid, s.kspace, s.mask, truth, cfg);
    CHECK(t.best == 0);
    CHECK(t.config.lambda1 == 2e-3);
    CHECK(t.config.lambda2 == 5e-4);
  }

  SECTION("regularized beats unregularized")
  {
    std::vector<std::pair<double, double>> const grid{{0.0, 0.0}, {1e-3, 1e-3}};
    auto const t = tune_params(grid, s.kspace, s.mask, truth, cfg);
    CHECK(t.best == 1);
    CHECK(t.rlne[1] < t.rlne[0]);
  }

  SECTION("ties go to the first entry")
  {
    std::vector<std::pair<double, double>> const grid{{1e-3, 1e-3}, {1e-3, 1e-3}};
    auto const t = tune_params(grid, s.kspace, s.mask, truth, cfg);
    CHECK(t.best == 0);
    CHECK(t.rlne[0] == t.rlne[1]);
  }

  CHECK_THROWS_AS(tune_params({}, s.kspace, s.mask, truth, cfg), Error);
}

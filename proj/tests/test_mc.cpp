#include "rvb/errors.hpp"
#include "rvb/exact.hpp"
#include "rvb/mc.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

namespace rvb {
namespace {

McConfig small_config(int L, std::uint64_t seed) {
  McConfig cfg;
  cfg.L = L;
  cfg.seed = seed;
  cfg.n_therm = 200;
  cfg.n_sweeps = 3200;
  cfg.n_bins = 32;
  return cfg;
}

int plaquette_at(const Lattice& lat, int s00) {
  const auto& ps = lat.plaquettes();
  for (std::size_t q = 0; q < ps.size(); ++q)
    if (ps[q].s00 == s00) return static_cast<int>(q);
  return -1;
}

TEST(McConfig, Validation) {
  McConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.thermalization_sweeps(), 10000);
  cfg.L = 128;
  EXPECT_EQ(cfg.thermalization_sweeps(), 12800);

  auto bad = [](auto mutate) {
    McConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(bad([](McConfig& c) { c.L = 2; }).validate(), ValidationError);
  EXPECT_THROW(bad([](McConfig& c) { c.L = 5; }).validate(), ValidationError);
  EXPECT_THROW(bad([](McConfig& c) { c.n_bins = 16; }).validate(), ValidationError);
  EXPECT_THROW(bad([](McConfig& c) { c.n_sweeps = 1000, c.n_bins = 64; }).validate(), ValidationError);
  EXPECT_THROW(bad([](McConfig& c) { c.winding_fraction = 0.7, c.worm_fraction = 0.3; }).validate(),
               ValidationError);
  EXPECT_THROW(bad([](McConfig& c) { c.winding_fraction = 0, c.worm_fraction = 0; }).validate(), ValidationError);
  EXPECT_NO_THROW(bad([](McConfig& c) {
                    c.winding_fraction = 0, c.worm_fraction = 0, c.allow_sector_freezing = true;
                  }).validate());
  EXPECT_THROW(bad([](McConfig& c) { c.bc = Boundary::Open; }).validate(), ValidationError);
  EXPECT_NO_THROW(bad([](McConfig& c) { c.bc = Boundary::Open, c.winding_fraction = 0; }).validate());
}

TEST(McState, ColumnarStart) {
  McConfig cfg = small_config(4, 1);
  const McState st(cfg);
  EXPECT_EQ(st.n_loops(), 8);
  EXPECT_EQ(st.log2_weight(), 0);
  EXPECT_EQ(st.winding(0), st.winding(1));
  // identical columnar replicas: only the 8 dimer bonds of 32 sit on a common loop
  EXPECT_DOUBLE_EQ(st.measure(), -3.0 / 16.0);
}

TEST(McState, DeterministicForFixedSeed) {
  McConfig cfg = small_config(8, 42);
  McState a(cfg), b(cfg);
  for (int k = 0; k < 50; ++k) {
    a.sweep();
    b.sweep();
  }
  EXPECT_TRUE(a == b);
  cfg.seed = 43;
  McState c(cfg);
  for (int k = 0; k < 50; ++k) c.sweep();
  EXPECT_FALSE(a == c);
}

TEST(McState, IncrementalLoopCountMatchesRecount) {
  for (int L : {4, 8, 16}) {
    McConfig cfg = small_config(L, 7 + L);
    cfg.worm_fraction = 0.05;
    McState st(cfg);
    for (int k = 0; k < 2000; ++k) {
      switch (k % 3) {
        case 0: st.plaquette_update(); break;
        case 1: st.winding_update(); break;
        default: st.worm_update(); break;
      }
      ASSERT_EQ(st.n_loops(), count_loops(st.replica(0), st.replica(1))) << "L=" << L << " step " << k;
      if (k % 97 == 0) {
        EXPECT_EQ(st.winding(0), compute_winding(st.lattice(), st.replica(0)));
        EXPECT_EQ(st.winding(1), compute_winding(st.lattice(), st.replica(1)));
        EXPECT_NO_THROW(st.covering(0));
        EXPECT_NO_THROW(st.covering(1));
      }
    }
  }
}

TEST(McState, PlaquetteMetropolis) {
  McConfig cfg = small_config(4, 3);
  McState st(cfg);
  const int q = plaquette_at(st.lattice(), 0);
  ASSERT_GE(q, 0);
  // merging two trivial loops into one costs a factor 1/2
  auto out = st.propose_plaquette(0, q, 0.6);
  EXPECT_TRUE(out.eligible);
  EXPECT_EQ(out.delta_loops, -1);
  EXPECT_FALSE(out.accepted);
  EXPECT_EQ(st.n_loops(), 8);
  out = st.propose_plaquette(0, q, 0.4);
  EXPECT_TRUE(out.accepted);
  EXPECT_EQ(st.n_loops(), 7);
  // flipping the other replica identically restores 8 loops, always accepted
  out = st.propose_plaquette(1, q, 0.999);
  EXPECT_EQ(out.delta_loops, +1);
  EXPECT_TRUE(out.accepted);
  EXPECT_EQ(st.n_loops(), 8);
  // plaquette (1,0): holds no parallel pair in the columnar start
  const int q2 = plaquette_at(st.lattice(), 1);
  McState fresh(cfg);
  EXPECT_FALSE(fresh.propose_plaquette(0, q2, 0.0).eligible);
}

TEST(McState, LineShiftEligibility) {
  McConfig cfg = small_config(4, 5);
  McState st(cfg);
  // columnar rows are fully horizontal: shifting a row is allowed, a column is not
  EXPECT_FALSE(st.propose_line_shift(0, true, 0, 0.0).eligible);
  const auto w0 = st.winding(0);
  const auto out = st.propose_line_shift(0, false, 0, 0.0);
  EXPECT_TRUE(out.eligible);
  EXPECT_TRUE(out.accepted);
  EXPECT_NE(st.winding(0), w0);
  EXPECT_EQ(st.winding(0), compute_winding(st.lattice(), st.replica(0)));
  EXPECT_EQ(st.n_loops(), count_loops(st.replica(0), st.replica(1)));
}

TEST(McState, OpenBoundaryRejectsLineShifts) {
  McConfig cfg = small_config(4, 5);
  cfg.bc = Boundary::Open;
  cfg.winding_fraction = 0.0;
  McState st(cfg);
  EXPECT_THROW(st.propose_line_shift(0, false, 0, 0.0), ValidationError);
}

TEST(McState, PlaquetteFlipsPreserveWinding) {
  McConfig cfg = small_config(8, 9);
  cfg.winding_fraction = 0.0;
  cfg.worm_fraction = 0.0;
  cfg.allow_sector_freezing = true;
  McState st(cfg);
  const auto w0 = st.winding(0), w1 = st.winding(1);
  for (int k = 0; k < 200; ++k) st.sweep();
  EXPECT_EQ(st.winding(0), w0);
  EXPECT_EQ(st.winding(1), w1);
  EXPECT_GT(st.plaquette_counter().accepted, 0u);
}

TEST(McState, VisitsEveryCoveringOfTheFourByFourTorus) {
  McConfig cfg = small_config(4, 2024);
  McState st(cfg);
  std::set<std::vector<int>> seen;
  std::set<Winding> sectors;
  for (int k = 0; k < 20000 && seen.size() < 272; ++k) {
    st.sweep();
    for (int r = 0; r < 2; ++r) {
      seen.emplace(st.replica(r).begin(), st.replica(r).end());
      sectors.insert(st.winding(r));
    }
  }
  EXPECT_EQ(seen.size(), 272u);
  EXPECT_EQ(sectors.size(), 13u);
}

TEST(McState, MeasurementStaysInRange) {
  McConfig cfg = small_config(8, 17);
  McState st(cfg);
  for (int k = 0; k < 300; ++k) {
    st.sweep();
    const double m = st.measure();
    EXPECT_GE(m, -0.75);
    EXPECT_LE(m, 0.0);
  }
}

TEST(BinStatistics, KnownValuesAndNonFinite) {
  const std::vector<double> bins{1.0, 2.0, 3.0, 4.0};
  const auto s = bin_statistics(bins);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.err, std::sqrt(1.25 / 3.0), 1e-15);
  const std::vector<double> bad{1.0, std::nan("")};
  EXPECT_THROW(bin_statistics(bad), std::runtime_error);
}

TEST(RunChain, ReproducibleAndConsistent) {
  const McConfig cfg = small_config(4, 99);
  const auto x = run_chain(cfg);
  const auto y = run_chain(cfg);
  EXPECT_EQ(x.bin_series, y.bin_series);
  EXPECT_EQ(x.corr_mean, y.corr_mean);
  ASSERT_EQ(x.bin_series.size(), 32u);
  EXPECT_EQ(x.samples_per_bin, 100);
  EXPECT_EQ(x.n_samples, 3200);
  EXPECT_NEAR(x.corr_mean, x.raw_sum / x.n_samples, 1e-12);
  EXPECT_NEAR(x.p_mean, -4.0 / 3.0 * x.corr_mean, 1e-12);
  EXPECT_NEAR(x.p_err, 4.0 / 3.0 * x.corr_err, 1e-12);
  std::uint64_t hist = 0;
  for (const auto& [w, n] : x.sector_histogram) hist += n;
  EXPECT_EQ(hist, 2u * 3200u);
  EXPECT_EQ(x.rng_algorithm, Rng::kAlgorithm);
  // exact 4x4 torus value is -905/2707; short chain, generous tolerance
  EXPECT_NEAR(x.corr_mean, -905.0 / 2707.0, 6 * x.corr_err + 1e-3);
}

TEST(RunChain, ErrorShrinksLikeInverseSquareRoot) {
  McConfig cfg = small_config(8, 123);
  cfg.n_bins = 400;
  cfg.n_sweeps = 4000;
  const auto short_run = run_chain(cfg);
  cfg.n_sweeps = 16000;
  const auto long_run = run_chain(cfg);
  const double ratio = short_run.corr_err / long_run.corr_err;
  EXPECT_GT(ratio, 2.0 * 0.7);
  EXPECT_LT(ratio, 2.0 * 1.3);
}

TEST(MergeResults, CombinesChains) {
  McConfig a = small_config(4, 1), b = small_config(4, 2);
  const auto x = run_chain(a), y = run_chain(b);
  const auto m = merge_results(x, y);
  EXPECT_EQ(m.bin_series.size(), x.bin_series.size() + y.bin_series.size());
  EXPECT_EQ(m.n_samples, x.n_samples + y.n_samples);
  EXPECT_EQ(m.seeds.size(), 2u);
  EXPECT_EQ(m.plaquette.proposed, x.plaquette.proposed + y.plaquette.proposed);
  EXPECT_NEAR(m.corr_mean, (x.corr_mean + y.corr_mean) / 2, 1e-12);
  McConfig other = small_config(8, 3);
  EXPECT_THROW(merge_results(x, run_chain(other)), ValidationError);
}

}  // namespace
}  // namespace rvb

#include "rvb/errors.hpp"
#include "rvb/io.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace rvb {
namespace {

TEST(Rational, DecimalRendering) {
  EXPECT_EQ(to_decimal(Rational(1, 3), 4), "0.3333");
  EXPECT_EQ(to_decimal(Rational(2, 3), 4), "0.6667");
  EXPECT_EQ(to_decimal(Rational(-2, 3), 4), "-0.6667");
  EXPECT_EQ(to_decimal(Rational(1, 8), 2), "0.13");  // half away from zero
  EXPECT_EQ(to_decimal(Rational(-1, 8), 2), "-0.13");
  EXPECT_EQ(to_decimal(Rational(5), 3), "5.000");
  EXPECT_EQ(to_fraction_string(fraction(-6, 8)), "-3/4");
  EXPECT_EQ(to_fraction_string(Rational(2)), "2/1");
  EXPECT_EQ(parse_fraction("3620/8121"), Rational(3620, 8121));
  EXPECT_EQ(parse_fraction("-1/4"), Rational(-1, 4));
  EXPECT_THROW(parse_fraction("1/0"), ValidationError);
  EXPECT_THROW(parse_fraction("abc"), ValidationError);
}

TEST(FitCsv, ReadsAndWrites) {
  std::istringstream in("L,p,p_err\n8,0.41,0.001\n16,0.40,0.0008\n\n32,0.398,0.0009\n");
  const auto pts = read_fit_csv(in);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[1].L, 16);
  EXPECT_DOUBLE_EQ(pts[2].p_err, 0.0009);
  std::ostringstream out;
  write_fit_csv(out, pts);
  std::istringstream back(out.str());
  const auto again = read_fit_csv(back);
  ASSERT_EQ(again.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(again[k].L, pts[k].L);
    EXPECT_DOUBLE_EQ(again[k].p, pts[k].p);
    EXPECT_DOUBLE_EQ(again[k].p_err, pts[k].p_err);
  }
}

TEST(FitCsv, RejectsMalformedInput) {
  std::istringstream no_header("8,0.41,0.001\n");
  EXPECT_THROW(read_fit_csv(no_header), ValidationError);
  std::istringstream short_row("L,p,p_err\n8,0.41\n");
  EXPECT_THROW(read_fit_csv(short_row), ValidationError);
  std::istringstream garbage("L,p,p_err\n8,zero,0.001\n");
  EXPECT_THROW(read_fit_csv(garbage), ValidationError);
  EXPECT_THROW(read_fit_csv_file("/nonexistent/points.csv"), ValidationError);
}

TEST(McJson, RoundTrip) {
  McConfig cfg;
  cfg.L = 4;
  cfg.seed = 12345678901234567ull;
  cfg.n_therm = 100;
  cfg.n_sweeps = 640;
  cfg.n_bins = 32;
  const auto r = run_chain(cfg);
  const json doc = to_json(r);
  const auto back = mc_result_from_json(json::parse(doc.dump()));
  EXPECT_EQ(back.config.seed, cfg.seed);
  EXPECT_EQ(back.bin_series, r.bin_series);
  EXPECT_EQ(back.corr_mean, r.corr_mean);
  EXPECT_EQ(back.corr_err, r.corr_err);
  EXPECT_EQ(back.sector_histogram, r.sector_histogram);
  EXPECT_EQ(back.plaquette.accepted, r.plaquette.accepted);
  EXPECT_EQ(back.worm.proposed, r.worm.proposed);
  EXPECT_EQ(to_json(back).dump(), doc.dump());
  EXPECT_THROW(mc_result_from_json(json::object()), ValidationError);
}

TEST(BinsCsv, OneRowPerBin) {
  McResult r;
  r.bin_series = {-0.3, -0.31};
  std::ostringstream out;
  write_bins_csv(out, r);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "bin_index,corr_mean");
  EXPECT_NE(text.find("\n0,"), std::string::npos);
  EXPECT_NE(text.find("\n1,"), std::string::npos);
}

TEST(ExactRecordJson, Fields) {
  ExactRecord rec;
  rec.size = 4;
  rec.bc = Boundary::Periodic;
  rec.i = 0;
  rec.j = 1;
  rec.orbit_index = 0;
  rec.orbit_size = 32;
  rec.value = Rational(-905, 2707);
  const json j = to_json(rec);
  EXPECT_EQ(j.at("ensemble"), "nn_liquid");
  EXPECT_EQ(j.at("L"), 4);
  EXPECT_EQ(j.at("bc"), "periodic");
  EXPECT_EQ(j.at("value_rational"), "-905/2707");
  EXPECT_EQ(j.at("p_decimal").get<std::string>().substr(0, 15), "0.4457579115872");
  EXPECT_EQ(j.at("orbit").at("size"), 32);

  ExactRecord same;
  same.ensemble = Ensemble::BipartiteGas;
  same.size = 3;
  same.i = 0;
  same.j = 2;
  same.value = Rational(1, 4);
  const json g = to_json(same);
  EXPECT_EQ(g.at("N"), 3);
  EXPECT_TRUE(g.at("p_decimal").is_null());
  EXPECT_TRUE(g.at("bc").is_null());
}

TEST(Header, Versioned) {
  const json h = document_header("gas");
  EXPECT_EQ(h.at("schema_version"), 1);
  EXPECT_EQ(h.at("kind"), "gas");
  EXPECT_TRUE(h.at("code_version").is_string());
}

}  // namespace
}  // namespace rvb

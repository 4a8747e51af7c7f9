#include "support.hpp"

namespace fmn {
namespace {

// Independent re-evaluation of the flagship breakdown from the published
// coefficients, written out term by term.
std::map<SourceId, double> flagship_oracle() {
  const double area = 4.5 * 112 + 0.4 * 168;
  const double wafer = std::numbers::pi * 75.0 * 75.0;
  const double n = area / (0.8 * wafer * 0.95);
  const double r = 14.0 / 7.0, phi = 0.8, rho = 0.9;
  auto e = [&](double usage, double gwp) { return n * usage * rho * gwp; };
  return {
      {SourceId::Etching, e(0.005 * area * 20 * std::pow(r, 0.5) * phi, 9928)},
      {SourceId::ChamberCleaning, e(0.003 * area * 15 * std::pow(r, 0.5) * phi, 19550)},
      {SourceId::Photolithography, e(0.0007 * area * 25 * r * phi, 12356)},
      {SourceId::HeatTransferFluids, e(0.0025 * 20 * std::pow(r, 0.5) * 300, 9405)},
      {SourceId::SolventFluids, e(0.001 * area * 10 * std::pow(r, 0.5), 13140)},
      {SourceId::DielectricFluids, e(0.01 * area, 9136)},
      {SourceId::WaferThinning, e(0.0002 * wafer, 17490)},
      {SourceId::Testing, e(0.0001 * area * 20 * r, 16285)},
      {SourceId::VaporPhaseSoldering, e(0.4 * 5 * (2500.0 / 4000.0), 17140)},
      {SourceId::VacuumPumps, e(0.02 * 50 * std::pow(r, 0.8), 9264)},
      {SourceId::PlasmaCoatings, e(0.0001 * area * 10 * r, 11000)},
      {SourceId::Packaging, e(0.0002 * 2500, 18600)},
  };
}

const std::map<SourceId, double> kPublished = {
    {SourceId::Etching, 24560},          {SourceId::ChamberCleaning, 21278}, {SourceId::Photolithography, 7568},
    {SourceId::HeatTransferFluids, 7640}, {SourceId::SolventFluids, 4064},   {SourceId::DielectricFluids, 1998},
    {SourceId::WaferThinning, 2365},     {SourceId::Testing, 1424},         {SourceId::VaporPhaseSoldering, 820},
    {SourceId::VacuumPumps, 618},        {SourceId::PlasmaCoatings, 480},   {SourceId::Packaging, 356},
};

TEST(Engine, FlagshipMatchesIndependentOracle) {
  const auto b = total_emission(test::flagship(), test::oregon_profile(), GwpHorizon::Y500);
  const auto oracle = flagship_oracle();
  for (const auto& e : b.sources) EXPECT_LT(test::rel_err(e.gco2eq, oracle.at(e.source)), 1e-12) << source_name(e.source);
  EXPECT_EQ(b.die_area_mm2, 571.2);
  EXPECT_EQ(b.node_ratio, 2.0);
}

TEST(Engine, FlagshipNearPublishedValues) {
  const auto b = total_emission(test::flagship(), test::oregon_profile());
  for (const auto& [s, v] : kPublished) {
    const double tol = s == SourceId::ChamberCleaning ? 0.03 : 0.01;
    EXPECT_LT(test::rel_err(b.at(s).gco2eq, v), tol) << source_name(s);
  }
  EXPECT_LT(test::rel_err(b.total_gco2eq, 73171.0), 0.015);
}

TEST(Engine, TotalResumsExactly) {
  const auto b = total_emission(test::flagship(), test::oregon_profile());
  EXPECT_EQ(b.total_gco2eq, sum_sources(b));
  for (const auto& e : b.sources) EXPECT_EQ(e.gco2eq, emission_product(e));
}

TEST(Engine, FullRecoveryZeroesEverything) {
  auto p = test::oregon_profile();
  p.release.release_fraction = 0.0;
  const auto b = total_emission(test::flagship(), p);
  for (const auto& e : b.sources) EXPECT_EQ(e.gco2eq, 0.0);
  EXPECT_EQ(b.total_gco2eq, 0.0);
}

TEST(Engine, DoublingReleaseDoublesEverything) {
  auto p = test::oregon_profile();
  p.release.release_fraction = 0.45;
  const auto half = total_emission(test::flagship(), p);
  p.release.release_fraction = 0.9;
  const auto full = total_emission(test::flagship(), p);
  for (std::size_t i = 0; i < kSourceCount; ++i)
    EXPECT_NEAR(full.sources[i].gco2eq, 2 * half.sources[i].gco2eq, 1e-12 * full.sources[i].gco2eq);
  EXPECT_NEAR(full.total_gco2eq, 2 * half.total_gco2eq, 1e-12 * full.total_gco2eq);
}

TEST(Engine, LinearInCoefficientAndGwp) {
  const auto base = total_emission(test::flagship(), test::oregon_profile());
  for (SourceId s : kAllSources) {
    auto p = test::oregon_profile();
    *p.source(s).params.k *= 3.0;
    std::get<GwpValues>(p.source(s).gwp)[GwpHorizon::Y500] *= 0.5;
    const auto b = total_emission(test::flagship(), p);
    for (SourceId o : kAllSources) {
      if (o == s)
        EXPECT_NEAR(b.at(o).gco2eq, 1.5 * base.at(o).gco2eq, 1e-12 * b.at(o).gco2eq);
      else
        EXPECT_EQ(b.at(o).gco2eq, base.at(o).gco2eq);
    }
  }
}

TEST(Engine, ShrinkingNodeIncreasesTotals) {
  auto spec = test::flagship();
  spec.lithography = Lithography::DUV;
  double prev = 0.0;
  for (double nm : {14.0, 10.0, 7.0, 5.0}) {
    spec.node_nm = nm;
    const double t = total_emission(spec, test::oregon_profile()).total_gco2eq;
    EXPECT_GT(t, prev) << nm;
    prev = t;
  }
}

TEST(Engine, EuvShrinksOnlyLithographySources) {
  auto duv = test::flagship();
  duv.lithography = Lithography::DUV;
  const auto a = total_emission(duv, test::oregon_profile());
  const auto b = total_emission(test::flagship(), test::oregon_profile());
  for (SourceId s : kAllSources) {
    if (source_info(s).uses_lith_factor)
      EXPECT_LT(b.at(s).gco2eq, a.at(s).gco2eq);
    else
      EXPECT_EQ(b.at(s).gco2eq, a.at(s).gco2eq);
  }
}

TEST(Engine, ZeroDieAreaZeroesAllSources) {
  const auto b = total_emission(spec_from_json(preset_json("zero-area")), test::oregon_profile());
  EXPECT_EQ(b.die_area_mm2, 0.0);
  for (const auto& e : b.sources) EXPECT_EQ(e.gco2eq, 0.0);
}

TEST(Engine, ErrorsCarrySpecFieldPaths) {
  auto spec = test::flagship();
  spec.node_nm = 0;
  auto e = test::expect_error([&] { total_emission(spec, test::oregon_profile()); });
  EXPECT_EQ(e.code(), Errc::invalid_argument);
  EXPECT_EQ(e.field(), "spec.node_nm");
  spec = test::flagship();
  spec.features.erase("cache_mb");
  EXPECT_EQ(test::expect_error([&] { total_emission(spec, test::oregon_profile()); }).code(), Errc::missing_feature);
  EXPECT_EQ(test::expect_error([&] { total_emission(test::flagship(), test::oregon_profile(), GwpHorizon::Y20); }).code(),
            Errc::missing_horizon);
}

TEST(Engine, TemplateProfileReportsMissingCoefficient) {
  const auto tmpl = profile_from_json(preset_json("template"));
  auto e = test::expect_error([&] { total_emission(test::flagship(), tmpl); });
  EXPECT_EQ(e.code(), Errc::missing_parameter);
  EXPECT_NE(e.field().find("k_"), std::string::npos);
}

TEST(Engine, CompoundMixGwp) {
  auto p = test::oregon_profile();
  p.source(SourceId::Etching).gwp = CompoundMix{{{"CF4", 1.0}, {"SF6", 1.0}}};
  p.default_horizon = GwpHorizon::Y100;
  for (SourceId s : kAllSources)
    if (s != SourceId::Etching) std::get<GwpValues>(p.source(s).gwp)[GwpHorizon::Y100] = 1000.0;
  const auto b = total_emission(test::flagship(), p);
  EXPECT_EQ(b.at(SourceId::Etching).gwp, 16290.0);
}

TEST(Validation, Comparisons) {
  const auto b = total_emission(test::flagship(), test::oregon_profile());
  std::map<SourceId, double> same;
  for (const auto& e : b.sources) same[e.source] = e.gco2eq;
  auto v = compare_to_measured(b, same);
  EXPECT_EQ(v.max_abs_diff, 0.0);
  EXPECT_TRUE(v.skipped.empty());

  v = compare_to_measured(b, kPublished);
  EXPECT_LE(v.max_abs_diff, 0.03);

  auto partial = kPublished;
  partial.erase(SourceId::Packaging);
  v = compare_to_measured(b, partial);
  ASSERT_EQ(v.skipped.size(), 1u);
  EXPECT_EQ(v.skipped[0], SourceId::Packaging);
  EXPECT_EQ(v.entries.size(), 11u);
}

TEST(Validation, FivePercentOver) {
  EmissionBreakdown b;
  for (SourceId s : kAllSources) b.sources[source_index(s)] = {s, 0, 0, 0, 0, s == SourceId::Etching ? 105.0 : 1.0};
  const auto v = compare_to_measured(b, {{SourceId::Etching, 100.0}});
  EXPECT_NEAR(v.entries.at(0).diff, 0.05, 1e-12);
}

}  // namespace
}  // namespace fmn

#include "support.hpp"

namespace fmn {
namespace {

constexpr GeoPoint kSite{45.5229, -122.9898};

FacilitySite preset_site() { return site_from_json(preset_json("synthetic-site")); }

FabProfile with_null_k(FabProfile p, std::initializer_list<SourceId> sources) {
  for (SourceId s : sources) p.source(s).params.k.reset();
  return p;
}

TEST(Haversine, Examples) {
  EXPECT_EQ(haversine_miles({10, 20}, {10, 20}), 0.0);
  EXPECT_NEAR(haversine_miles({0, 0}, {0, 180}), std::numbers::pi * kEarthRadiusMiles, 1e-9);
  EXPECT_NEAR(haversine_miles({0, 0}, {0, 180}), 12436.8, 0.1);
  EXPECT_NEAR(haversine_miles({0, 0}, {0, 1}), 69.09, 0.01);
  EXPECT_EQ(test::expect_error([] { haversine_miles({91, 0}, {0, 0}); }).field(), "latitude");
}

TEST(Haversine, SymmetricAndTriangle) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> lat(-89, 89), lon(-179, 179);
  for (int i = 0; i < 200; ++i) {
    GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)}, c{lat(rng), lon(rng)};
    EXPECT_NEAR(haversine_miles(a, b), haversine_miles(b, a), 1e-9);
    EXPECT_LE(haversine_miles(a, c), haversine_miles(a, b) + haversine_miles(b, c) + 1e-6);
  }
}

// Point `miles` north of kSite.
EmissionRecord at(double miles, double mass, std::string compound = "CF4", int year = 2023) {
  return {kSite.latitude + miles / (kEarthRadiusMiles * std::numbers::pi / 180.0), kSite.longitude, year,
          std::move(compound), mass};
}

FacilitySite bare_site() { return {kSite, {{2023, 1.0}}, {{2023, test::flagship()}}}; }

TEST(Baseline, Examples) {
  EXPECT_EQ(baseline_subtract({at(0, 100), at(20, 900)}, bare_site(), 2023, "CF4").attributable_g, 100.0);
  EXPECT_EQ(baseline_subtract({at(0, 100), at(1, 100), at(2, 100), at(3, 100), at(4, 100)}, bare_site(), 2023, "CF4")
                .attributable_g,
            0.0);
  const auto r = baseline_subtract({at(0, 500), at(3, 40), at(7, 60)}, bare_site(), 2023, "CF4");
  EXPECT_EQ(r.attributable_g, 450.0);
  EXPECT_EQ(r.neighbor_records, 2u);
}

TEST(Baseline, ClampsAtZero) {
  const auto r = baseline_subtract({at(0, 10), at(5, 100)}, bare_site(), 2023, "CF4");
  EXPECT_EQ(r.attributable_g, 0.0);
  EXPECT_TRUE(r.clamped);
}

TEST(Baseline, ToleranceAndRadiusEdges) {
  // 0.2 mi counts as co-located, 10.5 mi is outside the baseline radius.
  const auto r = baseline_subtract({at(0, 100), at(0.2, 50), at(10.5, 1000), at(9.5, 30)}, bare_site(), 2023, "CF4");
  EXPECT_EQ(r.facility_records, 2u);
  EXPECT_EQ(r.attributable_g, 120.0);
}

TEST(Baseline, Errors) {
  EXPECT_EQ(test::expect_error([] { baseline_subtract({at(0, 1)}, bare_site(), 2022, "CF4"); }).code(), Errc::no_records);
  EXPECT_EQ(test::expect_error([] { baseline_subtract({at(3, 1)}, bare_site(), 2023, "CF4"); }).code(),
            Errc::no_facility_records);
  EXPECT_EQ(test::expect_error([] { attributable_masses({}, bare_site()); }).code(), Errc::no_records);
}

TEST(Baseline, OrderInvariant) {
  std::vector<EmissionRecord> recs{at(0, 100.1), at(0.1, 3.3), at(2, 0.7), at(4, 1e6), at(5, 1e-6), at(6, 44.4)};
  const double want = baseline_subtract(recs, bare_site(), 2023, "CF4").attributable_g;
  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    std::shuffle(recs.begin(), recs.end(), rng);
    EXPECT_EQ(baseline_subtract(recs, bare_site(), 2023, "CF4").attributable_g, want);
  }
}

TEST(RecordsCsv, RoundTripAndErrors) {
  const std::vector<EmissionRecord> recs{at(0, 100.5), at(3, 7, "SF6", 2021)};
  const auto back = records_from_csv(records_to_csv(recs));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].compound, "SF6");
  EXPECT_EQ(back[1].latitude, recs[1].latitude);
  EXPECT_EQ(test::expect_error([] { records_from_csv(""); }).code(), Errc::no_records);
  EXPECT_EQ(test::expect_error([] { records_from_csv("lat,lon,year,compound,mass_g\n"); }).code(), Errc::no_records);
  EXPECT_EQ(test::expect_error([] { records_from_csv("a,b\n1,2\n"); }).code(), Errc::schema);
  auto e = test::expect_error([] { records_from_csv("lat,lon,year,compound,mass_g\n1,2,2020,CF4,-1\n"); });
  EXPECT_EQ(e.code(), Errc::negative_mass);
  EXPECT_EQ(e.field(), "records:2.mass_g");
  EXPECT_EQ(test::expect_error([] { records_from_csv("lat,lon,year,compound,mass_g\n1,2,20x0,CF4,1\n"); }).field(),
            "records:2.year");
}

TEST(Calibration, RecoversSingleEtchCoefficient) {
  const auto truth = test::oregon_profile();
  const auto site = preset_site();
  const auto tmpl = with_null_k(truth, {SourceId::Etching});
  const auto out = calibrate(synthesize_records(truth, site), site, tmpl);
  EXPECT_LT(test::rel_err(out.result.coefficients.at(SourceId::Etching), 0.005), 1e-9);
  EXPECT_LT(out.result.residual, 1e-9);
}

TEST(Calibration, RecoversTwoCoefficientsFromTwoYears) {
  auto truth = test::oregon_profile();
  truth.source(SourceId::Etching).params.k = 0.0071;
  truth.source(SourceId::ChamberCleaning).params.k = 0.0019;
  auto site = preset_site();
  site.units_produced_per_year.erase(2022);
  site.product_specs.erase(2022);
  const auto out = calibrate(synthesize_records(truth, site), site,
                             with_null_k(truth, {SourceId::Etching, SourceId::ChamberCleaning}));
  EXPECT_LT(test::rel_err(out.result.coefficients.at(SourceId::Etching), 0.0071), 1e-6);
  EXPECT_LT(test::rel_err(out.result.coefficients.at(SourceId::ChamberCleaning), 0.0019), 1e-6);
}

TEST(Calibration, RecoversAllTwelveFromPresetRecords) {
  const auto records = records_from_csv(preset_text("synthetic-records"));
  const auto out = calibrate(records, preset_site(), profile_from_json(preset_json("template")));
  const auto truth = test::oregon_profile();
  ASSERT_EQ(out.result.coefficients.size(), 12u);
  for (const auto& [s, k] : out.result.coefficients)
    EXPECT_LT(test::rel_err(k, *truth.source(s).params.k), 1e-6) << source_name(s);
  EXPECT_LT(out.result.residual, 1e-9);
  EXPECT_EQ(total_emission(test::flagship(), out.profile).total_gco2eq,
            total_emission(test::flagship(), out.profile).total_gco2eq);
}

TEST(Calibration, ZeroAttributableMassFitsZero) {
  const auto records = records_from_csv(preset_text("synthetic-records-uniform"));
  const auto out = calibrate(records, preset_site(), profile_from_json(preset_json("template")));
  for (const auto& [s, k] : out.result.coefficients) EXPECT_EQ(k, 0.0) << source_name(s);
  bool warned = false;
  for (const auto& w : out.result.warnings) warned |= w.find("is 0") != std::string::npos;
  EXPECT_TRUE(warned);
  for (const auto& [key, m] : out.masses.mass_g) EXPECT_EQ(m, 0.0);
}

TEST(Calibration, UnderdeterminedListsSources) {
  auto site = preset_site();
  site.units_produced_per_year = {{2023, 1000.0}};
  site.product_specs = {{2023, test::flagship()}};
  const auto truth = test::oregon_profile();
  auto e = test::expect_error(
      [&] { calibrate(synthesize_records(truth, site), site, profile_from_json(preset_json("template"))); });
  EXPECT_EQ(e.code(), Errc::underdetermined);
  EXPECT_NE(std::string(e.what()).find("etching"), std::string::npos);
}

TEST(Calibration, RecordOrderDoesNotMatter) {
  auto records = records_from_csv(preset_text("synthetic-records"));
  const auto tmpl = profile_from_json(preset_json("template"));
  const auto want = calibrate(records, preset_site(), tmpl).result.coefficients;
  std::mt19937_64 rng(37);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(records.begin(), records.end(), rng);
    EXPECT_EQ(calibrate(records, preset_site(), tmpl).result.coefficients, want);
  }
}

TEST(Calibration, PerYearMeanAgreesOnExactData) {
  const auto truth = test::oregon_profile();
  const auto site = preset_site();
  CalibrateRequest req;
  req.calibration.pooling = YearPooling::PerYearMean;
  const auto out = calibrate(synthesize_records(truth, site), site, with_null_k(truth, {SourceId::Etching}), req);
  EXPECT_LT(test::rel_err(out.result.coefficients.at(SourceId::Etching), 0.005), 1e-9);
}

TEST(SiteJson, RoundTripAndErrors) {
  const auto site = preset_site();
  EXPECT_EQ(to_json(site_from_json(to_json(site))), to_json(site));
  json j = to_json(site);
  j["units_produced_per_year"]["twenty"] = 1;
  EXPECT_TRUE(is_schema_error(test::expect_error([&] { site_from_json(j); }).code()));
}

}  // namespace
}  // namespace fmn

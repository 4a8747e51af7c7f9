#include "support.hpp"

namespace fmn {
namespace {

CompoundRegistry ab_registry() {
  return CompoundRegistry({
      {"A", {{GwpHorizon::Y100, 9000.0}}, std::nullopt, std::nullopt},
      {"B", {{GwpHorizon::Y100, 18000.0}}, std::nullopt, std::nullopt},
  });
}

TEST(BlendedGwp, SingleCompoundIsIdentity) {
  const auto reg = default_compound_registry();
  EXPECT_DOUBLE_EQ(blended_gwp({{{"CF4", 1.0}}}, reg, GwpHorizon::Y100), 7380.0);
}

TEST(BlendedGwp, EqualMixOfCf4AndSf6) {
  const auto reg = default_compound_registry();
  EXPECT_DOUBLE_EQ(blended_gwp({{{"CF4", 1.0}, {"SF6", 1.0}}}, reg, GwpHorizon::Y100), (7380.0 + 25200.0) / 2.0);
}

TEST(BlendedGwp, WeightedMix) {
  EXPECT_DOUBLE_EQ(blended_gwp({{{"A", 2.0}, {"B", 1.0}}}, ab_registry(), GwpHorizon::Y100), 12000.0);
}

TEST(BlendedGwp, Errors) {
  const auto reg = default_compound_registry();
  EXPECT_EQ(test::expect_error([&] { blended_gwp({{{"NF3", 1.0}}}, reg, GwpHorizon::Y100); }).code(),
            Errc::unknown_compound);
  EXPECT_EQ(test::expect_error([&] { blended_gwp({{{"CF4", 0.0}}}, reg, GwpHorizon::Y100); }).code(),
            Errc::zero_ratios);
  EXPECT_EQ(test::expect_error([&] { blended_gwp({{{"CF4", 1.0}}}, reg, GwpHorizon::Y20); }).code(),
            Errc::missing_horizon);
  EXPECT_EQ(test::expect_error([&] { blended_gwp({}, reg, GwpHorizon::Y100); }).code(), Errc::zero_ratios);
}

TEST(BlendedGwp, ScaleInvariantAndBounded) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ratio(0.0, 5.0), scale(1e-3, 1e3);
  const auto reg = default_compound_registry();
  for (int i = 0; i < 500; ++i) {
    CompoundMix mix{{{"CF4", ratio(rng) + 1e-6}, {"SF6", ratio(rng)}}};
    const double g = blended_gwp(mix, reg, GwpHorizon::Y100);
    EXPECT_GE(g, 7380.0);
    EXPECT_LE(g, 25200.0);
    const double s = scale(rng);
    for (auto& e : mix.entries) e.ratio *= s;
    EXPECT_NEAR(blended_gwp(mix, reg, GwpHorizon::Y100), g, 1e-9 * g);
  }
}

TEST(Mmtce, Examples) {
  EXPECT_NEAR(mmtce(1.0, 1.0), 12.0 / 44.0, 1e-15);
  EXPECT_EQ(mmtce(0.0, 25200.0), 0.0);
  EXPECT_NEAR(mmtce(0.001, 7380.0), 0.001 * 7380.0 * 12.0 / 44.0, 1e-12);
  EXPECT_NEAR(mmtce(0.001, 7380.0), 2.012727, 1e-6);
}

TEST(Mmtce, LinearInBothArguments) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> m(0.0, 10.0), g(1.0, 30000.0), a(0.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    const double mass = m(rng), gwp = g(rng), k = a(rng);
    EXPECT_NEAR(mmtce(k * mass, gwp), k * mmtce(mass, gwp), 1e-12 * (1.0 + k * mmtce(mass, gwp)));
    EXPECT_NEAR(mmtce(mass, k * gwp + 1.0), mmtce(mass, 1.0) * (k * gwp + 1.0), 1e-12 * (1.0 + mmtce(mass, k * gwp + 1.0)));
  }
}

TEST(Mmtce, RejectsNegativeMass) {
  EXPECT_EQ(test::expect_error([] { mmtce(-1.0, 1.0); }).code(), Errc::negative_mass);
  EXPECT_EQ(test::expect_error([] { grams_to_co2eq(-0.5, 10.0); }).code(), Errc::negative_mass);
}

TEST(GramsToCo2eq, Examples) {
  EXPECT_EQ(grams_to_co2eq(1.0, 9928.0), 9928.0);
  EXPECT_EQ(grams_to_co2eq(0.0, 123.0), 0.0);
  EXPECT_EQ(grams_to_co2eq(2.5, 18600.0), 46500.0);
}

TEST(Horizon, NamesRoundTrip) {
  for (GwpHorizon h : kAllHorizons) EXPECT_EQ(parse_horizon(horizon_name(h)), h);
  EXPECT_TRUE(is_schema_error(test::expect_error([] { parse_horizon("y50"); }).code()));
}

TEST(Registry, RejectsDuplicatesAndBadGwp) {
  CompoundRegistry reg;
  reg.add({"X", {{GwpHorizon::Y20, 5.0}}, std::nullopt, std::nullopt});
  EXPECT_EQ(test::expect_error([&] { reg.add({"X", {}, std::nullopt, std::nullopt}); }).code(), Errc::schema);
  EXPECT_EQ(test::expect_error([&] { reg.add({"Y", {{GwpHorizon::Y20, 0.0}}, std::nullopt, std::nullopt}); }).code(),
            Errc::invalid_argument);
}

}  // namespace
}  // namespace fmn

#include "support.hpp"

#include "../oracle/optimizer_oracle.hpp"

namespace fmn {
namespace {

Catalog fixture(const char* name = "fixture") { return catalog_from_json(preset_json(name)); }

void expect_matches(const std::vector<Assembly>& got, const std::vector<oracle::Row>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].key.cpu, want[i].cpu) << i;
    EXPECT_EQ(got[i].key.dram, want[i].dram) << i;
    EXPECT_EQ(got[i].key.storage, want[i].storage) << i;
    EXPECT_EQ(got[i].total_gco2eq, want[i].total) << i;
  }
}

TEST(Enumerate, ProductCountWithoutConstraints) {
  std::mt19937_64 rng(41);
  auto cat = oracle::random_catalog(rng, 3);
  while (cat.components.size() != 9) cat = oracle::random_catalog(rng, 3);
  std::array<int, 3> n{};
  for (const auto& c : cat.components) ++n[static_cast<int>(c.kind)];
  const auto all = enumerate_assemblies(cat, general_purpose(), GwpHorizon::Y500, preset_resolver());
  EXPECT_EQ(all.size(), static_cast<std::size_t>(n[0] * n[1] * n[2]));
}

TEST(Enumerate, RejectingClassGivesNothing) {
  const auto cat = fixture();
  EXPECT_TRUE(enumerate_assemblies(cat, cat.server_class("rejects-everything"), GwpHorizon::Y500, preset_resolver()).empty());
}

TEST(Enumerate, FixtureClassCountsMatchFilter) {
  const auto cat = fixture();
  for (const char* cls : {"GeneralPurpose", "ComputeOptimized", "MemoryOptimized", "StorageOptimized"}) {
    const auto got = enumerate_assemblies(cat, cat.server_class(cls), GwpHorizon::Y500, preset_resolver());
    const auto want = oracle::brute_force(cat, oracle::predicate(cls), GwpHorizon::Y500);
    EXPECT_EQ(got.size(), want.size()) << cls;
    EXPECT_FALSE(got.empty()) << cls;
  }
  EXPECT_EQ(enumerate_assemblies(cat, general_purpose(), GwpHorizon::Y500, preset_resolver()).size(), 100u);
}

TEST(Rank, FixtureMatchesBruteForce) {
  const auto cat = fixture();
  for (const char* cls : {"GeneralPurpose", "ComputeOptimized", "MemoryOptimized", "StorageOptimized"}) {
    const auto r = rank_assemblies(enumerate_assemblies(cat, cat.server_class(cls), GwpHorizon::Y500, preset_resolver()));
    const auto want = oracle::brute_force(cat, oracle::predicate(cls), GwpHorizon::Y500);
    expect_matches(r.ranking, want);
    EXPECT_EQ(r.median().key.cpu, want[(want.size() - 1) / 2].cpu);
  }
}

TEST(Rank, SingleAssemblyIsEverything) {
  Assembly a;
  a.key = {"c", "d", "s"};
  a.total_gco2eq = 5;
  const auto r = rank_assemblies({a});
  EXPECT_EQ(r.lowest(), a);
  EXPECT_EQ(r.median(), a);
  EXPECT_EQ(r.highest(), a);
}

TEST(Rank, LowerMedianAndIdTieBreak) {
  std::vector<Assembly> v(4);
  const char* ids[] = {"d", "b", "c", "a"};
  for (int i = 0; i < 4; ++i) {
    v[i].key = {ids[i], "x", "y"};
    v[i].total_gco2eq = 10.0;
  }
  const auto r = rank_assemblies(v);
  EXPECT_EQ(r.median_index, 1u);
  EXPECT_EQ(r.ranking[0].key.cpu, "a");
  EXPECT_EQ(r.median().key.cpu, "b");
  EXPECT_EQ(test::expect_error([] { rank_assemblies({}); }).code(), Errc::empty_input);
}

TEST(Rank, TotalsDecomposeExactly) {
  for (const auto& a : enumerate_assemblies(fixture(), general_purpose(), GwpHorizon::Y500, preset_resolver()))
    EXPECT_EQ(a.total_gco2eq, a.embodied_total() + a.fluorinated_total());
}

Assembly point(const char* id, double perf, double total) {
  Assembly a;
  a.key = {id, "d", "s"};
  a.performance = perf;
  a.total_gco2eq = total;
  return a;
}

TEST(Pareto, Examples) {
  const auto both = pareto_front({point("a", 10, 100), point("b", 5, 50)});
  EXPECT_EQ(both.size(), 2u);
  const auto flat = pareto_front({point("a", 1, 30), point("b", 1, 20), point("c", 1, 20), point("d", 1, 40)});
  ASSERT_EQ(flat.size(), 2u);
  EXPECT_EQ(flat[0].key.cpu, "b");
  EXPECT_EQ(flat[1].key.cpu, "c");
}

TEST(Pareto, FixtureMatchesDominanceOracle) {
  const auto cat = fixture();
  const auto all = enumerate_assemblies(cat, general_purpose(), GwpHorizon::Y500, preset_resolver());
  expect_matches(pareto_front(all), oracle::pareto(oracle::brute_force(cat, oracle::predicate("GeneralPurpose"), GwpHorizon::Y500)));
}

TEST(Pareto, DominatedComponentDoesNotChangeFront) {
  auto cat = fixture();
  const auto before = pareto_front(enumerate_assemblies(cat, general_purpose(), GwpHorizon::Y500, preset_resolver()));
  // Same spec as cpu-a but worse on both axes.
  Component worse = cat.components.front();
  ASSERT_EQ(worse.id, "cpu-a");
  worse.id = "cpu-z";
  worse.embodied_carbon_gco2eq += 5000;
  worse.performance_score -= 0.5;
  cat.components.push_back(worse);
  const auto after = pareto_front(enumerate_assemblies(cat, general_purpose(), GwpHorizon::Y500, preset_resolver()));
  EXPECT_EQ(after, before);
}

TEST(Parallel, MatchesSequential) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 5; ++i) {
    const auto cat = oracle::random_catalog(rng);
    const auto seq = enumerate_assemblies(cat, general_purpose(), GwpHorizon::Y500, preset_resolver(), {1});
    const auto par = enumerate_assemblies(cat, general_purpose(), GwpHorizon::Y500, preset_resolver(), {4});
    EXPECT_EQ(seq, par);
    EXPECT_EQ(dump(to_json(rank_assemblies(seq))), dump(to_json(rank_assemblies(par))));
  }
}

TEST(RankStability, UniformGwpGivesIdenticalOrders) {
  const auto cat = fixture("fixture-uniform-gwp");
  const auto r = rank_stability(cat, general_purpose(), {GwpHorizon::Y20, GwpHorizon::Y100, GwpHorizon::Y500}, preset_resolver());
  EXPECT_TRUE(r.identical());
  for (const auto& w : r.winners)
    for (const auto& [h, rank] : w.rank_under) EXPECT_EQ(rank, 1u);
}

TEST(RankStability, HorizonDependentGwpMatchesRecomputation) {
  const auto cat = fixture("fixture-horizon-gwp");
  const std::vector<GwpHorizon> hs{GwpHorizon::Y20, GwpHorizon::Y100, GwpHorizon::Y500};
  const auto r = rank_stability(cat, general_purpose(), hs, preset_resolver());
  for (GwpHorizon h : hs) {
    const auto want = oracle::brute_force(cat, oracle::predicate("GeneralPurpose"), h);
    ASSERT_EQ(r.order.at(h).size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(r.order.at(h)[i].cpu, want[i].cpu);
  }
}

TEST(CatalogJson, ErrorsNameComponentAndField) {
  json j = preset_json("fixture");
  j["components"][5]["attributes"].erase("memory_standard");
  auto e = test::expect_error([&] { catalog_from_json(j); });
  EXPECT_EQ(e.field(), "components[dram-a].attributes.memory_standard");
  j = preset_json("fixture");
  j["components"][0]["spec"]["node_nm"] = -3;
  EXPECT_EQ(test::expect_error([&] { catalog_from_json(j); }).field(), "components[cpu-a].spec.node_nm");
  j = preset_json("fixture");
  j["components"][1]["id"] = "cpu-a";
  EXPECT_EQ(test::expect_error([&] { catalog_from_json(j); }).code(), Errc::schema);
}

TEST(CatalogJson, RoundTrip) {
  const auto cat = fixture("fixture-uniform-gwp");
  EXPECT_EQ(to_json(catalog_from_json(to_json(cat))), to_json(cat));
}

TEST(CatalogJson, UnknownProfileIsNotFound) {
  json j = preset_json("fixture");
  j["components"][0]["fab_profile"] = "nowhere";
  auto e = test::expect_error(
      [&] { enumerate_assemblies(catalog_from_json(j), general_purpose(), GwpHorizon::Y500, preset_resolver()); });
  EXPECT_EQ(e.code(), Errc::not_found);
  EXPECT_EQ(e.field(), "components[cpu-a].fab_profile");
}

}  // namespace
}  // namespace fmn

// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "herocluster/patch_ingest.hpp"
#include "support.hpp"

using namespace herocluster;
namespace fs = std::filesystem;

namespace {

PatchConstants parse_fixture(const std::string& patch, Warnings* warnings = nullptr) {
  const fs::path dir = hc_test::fixture("constants/" + patch);
  return parse_patch_constants(dir / "hero_abilities.json", dir / "abilities.json", dir / "heroes.json", patch,
                               warnings);
}

AliasMap shipped_aliases() { return AliasMap::load(fs::path(HC_DATA) / "alias_map.csv"); }

RawAbilityTable single(std::map<std::string, RawValue> props, const std::string& ability = "a") {
  return {"7.31", {{"hero", ability, std::move(props)}}};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

// Three constants documents in a scratch directory.
struct MiniConstants {
  hc_test::TempDir dir;
  fs::path mapping = dir / "hero_abilities.json";
  fs::path abilities = dir / "abilities.json";
  fs::path heroes = dir / "heroes.json";

  MiniConstants(const std::string& mapping_json, const std::string& abilities_json, const std::string& heroes_json) {
    hc_test::write_text(mapping, mapping_json);
    hc_test::write_text(abilities, abilities_json);
    hc_test::write_text(heroes, heroes_json);
  }
  PatchConstants parse(Warnings* w = nullptr) const { return parse_patch_constants(mapping, abilities, heroes, "7.31", w); }
};

const char* kOneHero = R"({"1": {"id": 1, "name": "npc_dota_hero_a", "primary_attr": "str", "str_gain": 2.5}})";

}  // namespace

TEST(ParseConstants, KeepsOnlyPlayableAbilities) {
  Warnings warnings;
  auto parsed = parse_fixture("7.31", &warnings);
  EXPECT_EQ(parsed.abilities.patch, "7.31");
  EXPECT_EQ(parsed.abilities.entries.size(), 16u);
  EXPECT_EQ(parsed.heroes.size(), 4u);
  for (const auto& e : parsed.abilities.entries) {
    EXPECT_NE(e.ability, "neutral_satyr_hellcaller_shockwave");
    EXPECT_NE(e.ability, "generic_hidden");
  }
  std::set<std::string> characters;
  for (const auto& e : parsed.abilities.entries) characters.insert(e.character);
  EXPECT_EQ(characters, (std::set<std::string>{"antimage", "axe", "crystal_maiden", "windrunner"}));
}

TEST(ParseConstants, EveryRowBelongsToAMappedHero) {
  for (const char* patch : {"7.31", "7.32", "7.33"}) {
    auto parsed = parse_fixture(patch);
    auto mapping = nlohmann::json::parse(hc_test::read_text(hc_test::fixture(std::string("constants/") + patch +
                                                                             "/hero_abilities.json")));
    for (const auto& e : parsed.abilities.entries) {
      const auto& list = mapping.at("npc_dota_hero_" + e.character).at("abilities");
      EXPECT_NE(std::find(list.begin(), list.end(), e.ability), list.end()) << patch << " " << e.ability;
    }
  }
}

TEST(ParseConstants, NewCharacterAppearsInItsDebutPatch) {
  auto p31 = parse_fixture("7.31");
  auto p32 = parse_fixture("7.32");
  auto has_muerta = [](const PatchConstants& p) {
    return std::any_of(p.abilities.entries.begin(), p.abilities.entries.end(),
                       [](const RawAbility& a) { return a.character == "muerta"; });
  };
  EXPECT_FALSE(has_muerta(p31));
  EXPECT_TRUE(has_muerta(p32));
  EXPECT_EQ(p32.abilities.patch, "7.32");
  auto hero = std::find_if(p32.heroes.begin(), p32.heroes.end(), [](auto& h) { return h.character == "muerta"; });
  ASSERT_NE(hero, p32.heroes.end());
  EXPECT_EQ(hero->id, 138);
}

TEST(ParseConstants, PerLevelListKeptVerbatim) {
  MiniConstants c(R"({"npc_dota_hero_a": {"abilities": ["a_nuke"]}})",
                  R"({"a_nuke": {"dname": "Nuke", "attrib": [{"key": "damage", "value": "30 40 50"}], "cd": [9, 8]}})",
                  kOneHero);
  auto parsed = c.parse();
  ASSERT_EQ(parsed.abilities.entries.size(), 1u);
  const auto& props = parsed.abilities.entries[0].properties;
  EXPECT_EQ(std::get<std::vector<double>>(props.at("damage")), (std::vector<double>{30, 40, 50}));
  EXPECT_EQ(std::get<std::vector<double>>(props.at("cd")), (std::vector<double>{9, 8}));
  EXPECT_FALSE(props.count("dname"));
}

TEST(ParseConstants, UniversalAcceptedInAnyPatch) {
  MiniConstants c(R"({"npc_dota_hero_a": {"abilities": []}})", "{}",
                  R"({"1": {"id": 1, "name": "npc_dota_hero_a", "primary_attr": "all"}})");
  auto parsed = c.parse();
  ASSERT_EQ(parsed.heroes.size(), 1u);
  EXPECT_EQ(parsed.heroes[0].primary_attribute, PrimaryAttribute::Universal);
  auto p33 = parse_fixture("7.33");
  EXPECT_TRUE(std::any_of(p33.heroes.begin(), p33.heroes.end(),
                          [](auto& h) { return h.primary_attribute == PrimaryAttribute::Universal; }));
}

TEST(ParseConstants, Errors) {
  MiniConstants broken(R"({"npc_dota_hero_a": {"abilities": [}})", "{}", kOneHero);
  try {
    broken.parse();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedDocument);
    EXPECT_NE(std::string(e.what()).find("hero_abilities.json at byte"), std::string::npos) << e.what();
  }

  MiniConstants unknown(R"({"npc_dota_hero_ghost": {"abilities": []}})", "{}", kOneHero);
  EXPECT_EQ(code_of([&] { unknown.parse(); }), ErrorCode::UnknownHeroReference);

  MiniConstants bad_attr(R"({})", "{}", R"({"1": {"id": 1, "name": "npc_dota_hero_a", "primary_attr": "luck"}})");
  EXPECT_EQ(code_of([&] { bad_attr.parse(); }), ErrorCode::MalformedDocument);

  EXPECT_EQ(code_of([] { parse_patch_constants("/no/such/a.json", "/no/b.json", "/no/c.json", "7.31"); }),
            ErrorCode::FileUnreadable);
}

TEST(ParseConstants, UnknownExtraKeysTolerated) {
  MiniConstants c(R"({"npc_dota_hero_a": {"abilities": ["x"], "facets": [{"id": 1}], "whatever": 3}})",
                  R"({"x": {"behavior": ["Passive", "Aura"], "new_field": {"nested": true}}})",
                  R"({"1": {"id": 1, "name": "npc_dota_hero_a", "primary_attr": "agi", "roles": ["Carry"], "extra": null}})");
  EXPECT_EQ(c.parse().abilities.entries.size(), 1u);
}

TEST(AliasMap, ShippedMapIsValidAndCoversMovementSpeed) {
  auto aliases = shipped_aliases();
  EXPECT_EQ(aliases.resolve("movement_speed_bonus"), (std::pair<std::string, int>{"movement_speed_slow", -1}));
  EXPECT_EQ(aliases.resolve("movement_speed_slow"), (std::pair<std::string, int>{"movement_speed_slow", 1}));
  EXPECT_EQ(aliases.resolve("unlisted"), (std::pair<std::string, int>{"unlisted", 1}));
}

TEST(AliasMap, InvariantsEnforced) {
  EXPECT_EQ(code_of([] { AliasMap({{"a", "b", 1}, {"a", "c", 1}}); }), ErrorCode::InvalidAliasMap);
  EXPECT_EQ(code_of([] { AliasMap({{"a", "b", 2}}); }), ErrorCode::InvalidAliasMap);
  // "b" is canonical and also renamed: applying the map twice would move it again.
  EXPECT_EQ(code_of([] { AliasMap({{"a", "b", 1}, {"b", "c", 1}}); }), ErrorCode::InvalidAliasMap);
  EXPECT_NO_THROW(AliasMap({{"a", "b", -1}, {"b", "b", 1}}));
}

TEST(AliasMap, ResolveIsClosed) {
  auto aliases = shipped_aliases();
  for (const auto& rule : aliases.rules()) {
    auto [canonical, sign] = aliases.resolve(rule.source);
    EXPECT_EQ(aliases.resolve(canonical), (std::pair<std::string, int>{canonical, 1}));
  }
}

TEST(Normalize, AliasedSpellingsGiveIdenticalRows) {
  auto aliases = shipped_aliases();
  auto slow = normalize_properties(single({{"movement_speed_slow", 30.0}}), aliases);
  auto bonus = normalize_properties(single({{"movement_speed_bonus", -30.0}}), aliases);
  EXPECT_EQ(slow.columns, bonus.columns);
  EXPECT_EQ(slow.rows, bonus.rows);
  EXPECT_EQ(slow.rows[0].values, std::vector<double>{30.0});
}

TEST(Normalize, ListCollapsesToMean) {
  auto t = normalize_properties(single({{"damage", std::vector<double>{30, 40, 50}}}), AliasMap{});
  std::vector<double> levels{30, 40, 50};
  double mean = 0;
  for (double v : levels) mean += v / levels.size();
  EXPECT_DOUBLE_EQ(t.rows[0].values[0], mean);
}

TEST(Normalize, TextBecomesPresenceFlagAndMissingIsZero) {
  RawAbilityTable raw{"7.31",
                      {{"h", "a", {{"behavior", std::string("Unit Target")}, {"radius", 300.0}}},
                       {"h", "b", {}}}};
  auto t = normalize_properties(raw, AliasMap{});
  EXPECT_EQ(t.columns, (std::vector<std::string>{"behavior", "radius"}));
  EXPECT_EQ(t.rows[0].values, (std::vector<double>{1, 300}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1].values, (std::vector<double>{0, 0}));
}

TEST(Normalize, ConflictingSourcesAreSummedWithWarning) {
  AliasMap aliases({{"bonus_movement_speed", "movement_speed_slow", -1}, {"movement_speed_bonus", "movement_speed_slow", -1}});
  Warnings warnings;
  auto t = normalize_properties(single({{"bonus_movement_speed", -10.0}, {"movement_speed_bonus", -20.0}}), aliases,
                                &warnings);
  EXPECT_DOUBLE_EQ(t.rows[0].values[0], 30.0);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("ConflictingProperty"), std::string::npos);

  warnings.clear();
  auto same = normalize_properties(single({{"bonus_movement_speed", -10.0}, {"movement_speed_bonus", -10.0}}), aliases,
                                   &warnings);
  EXPECT_DOUBLE_EQ(same.rows[0].values[0], 10.0);
  EXPECT_TRUE(warnings.empty());
}

TEST(Normalize, IdempotentOnFixtures) {
  auto aliases = shipped_aliases();
  for (const char* patch : {"7.31", "7.32", "7.33"}) {
    auto once = normalize_properties(parse_fixture(patch).abilities, aliases);
    auto twice = normalize_properties(to_raw(once), aliases);
    EXPECT_EQ(once, twice) << patch;
  }
}

TEST(Normalize, ColumnOrderIgnoresInputOrder) {
  auto raw = parse_fixture("7.32").abilities;
  auto aliases = shipped_aliases();
  auto reference = normalize_properties(raw, aliases).columns;
  EXPECT_TRUE(std::is_sorted(reference.begin(), reference.end()));
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(raw.entries.begin(), raw.entries.end(), rng);
    EXPECT_EQ(normalize_properties(raw, aliases).columns, reference);
  }
}

TEST(Normalize, AliasEquivalenceOverRandomValues) {
  auto aliases = shipped_aliases();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-100, 100);
  for (const auto& rule : aliases.rules()) {
    if (rule.source == rule.canonical) continue;
    const double v = u(rng);
    auto a = normalize_properties(single({{rule.source, v}, {"radius", 5.0}}), aliases);
    auto b = normalize_properties(single({{rule.canonical, v * rule.sign}, {"radius", 5.0}}), aliases);
    EXPECT_EQ(a, b) << rule.source;
  }
}

TEST(HeroAttributes, SuffixSharedWithinCharacter) {
  auto parsed = parse_fixture("7.31");
  auto table = attach_hero_attributes(normalize_properties(parsed.abilities, shipped_aliases()), parsed.heroes);
  const std::size_t suffix = hero_columns().size();
  const std::size_t first = table.columns.size() - suffix;
  for (std::size_t c = first; c < table.columns.size(); ++c) EXPECT_TRUE(is_hero_column(table.columns[c]));
  std::map<std::string, std::vector<double>> seen;
  std::size_t antimage_rows = 0;
  for (const auto& row : table.rows) {
    EXPECT_EQ(row.values.size(), table.columns.size());
    std::vector<double> tail(row.values.begin() + static_cast<std::ptrdiff_t>(first), row.values.end());
    auto [it, inserted] = seen.emplace(row.character, tail);
    if (!inserted) EXPECT_EQ(it->second, tail) << row.character;
    antimage_rows += row.character == "antimage";
  }
  EXPECT_EQ(antimage_rows, 4u);
  EXPECT_NE(seen["antimage"], seen["axe"]);
  auto gain = *table.column_index("hero_str_gain");
  EXPECT_NE(seen["antimage"][gain - first], seen["axe"][gain - first]);
}

TEST(HeroAttributes, UniversalOneHot) {
  RawAbilityTable raw{"7.33", {{"pango", "roll", {{"damage", 10.0}}}}};
  HeroAttributeRecord hero{"pango", 120, PrimaryAttribute::Universal, {{"str_gain", 2.0}}};
  auto t = attach_hero_attributes(normalize_properties(raw, AliasMap{}), {hero});
  const auto& v = t.rows[0].values;
  EXPECT_EQ(std::vector<double>(v.end() - 4, v.end()), (std::vector<double>{0, 0, 0, 1}));
  EXPECT_EQ(t.columns.back(), "hero_primary_universal");
}

TEST(HeroAttributes, MissingRecordRaises) {
  RawAbilityTable raw{"7.31", {{"ghost", "boo", {}}}};
  EXPECT_EQ(code_of([&] { attach_hero_attributes(normalize_properties(raw, AliasMap{}), {}); }),
            ErrorCode::MissingHeroRecord);
}

TEST(FeatureTable, RoundTrip) {
  auto parsed = parse_fixture("7.33");
  auto table = attach_hero_attributes(normalize_properties(parsed.abilities, shipped_aliases()), parsed.heroes);
  hc_test::TempDir dir;
  persist_feature_table(table, dir / "f.csv");
  EXPECT_EQ(load_feature_table(dir / "f.csv"), table);
  EXPECT_EQ(load_feature_table(dir / "f.csv", table.columns), table);

  StandardizedAbilityTable small{"7.31", {"a", "b"}, {{"x", "x1", {1, 2}}, {"x", "x2", {0.1, 0}}, {"y", "y1", {-3, 4e-9}}}};
  persist_feature_table(small, dir / "s.csv");
  EXPECT_EQ(load_feature_table(dir / "s.csv"), small);
}

TEST(FeatureTable, HeaderMismatches) {
  hc_test::TempDir dir;
  hc_test::write_text(dir / "perm.csv", "patch,character,ability,b,a\n7.31,x,y,1,2\n");
  try {
    load_feature_table(dir / "perm.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaMismatch);
  }
  hc_test::write_text(dir / "extra.csv", "patch,character,ability,a,b,zzz_new\n7.31,x,y,1,2,3\n");
  try {
    load_feature_table(dir / "extra.csv", std::vector<std::string>{"a", "b"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaMismatch);
    EXPECT_NE(std::string(e.what()).find("zzz_new"), std::string::npos);
  }
  EXPECT_EQ(code_of([&] { load_feature_table(dir / "missing.csv"); }), ErrorCode::FileUnreadable);
}

TEST(CrossPatch, ProjectionReportsNewColumnsAndZeroFillsMissing) {
  StandardizedAbilityTable fit{"7.31", {"a", "b"}, {{"x", "x1", {1, 2}}}};
  StandardizedAbilityTable later{"7.32", {"a", "c", "d"}, {{"x", "x1", {5, 7, 0}}}};
  auto p = project(later, fit.columns);
  EXPECT_EQ(p.matrix.cols(), 2u);
  EXPECT_EQ(p.matrix(0, 0), 5);
  EXPECT_EQ(p.matrix(0, 1), 0);
  EXPECT_EQ(p.dropped_columns, std::vector<std::string>{"c"});  // d is all zero: nothing lost
  EXPECT_EQ(p.missing_columns, std::vector<std::string>{"b"});
  EXPECT_EQ(union_columns({fit, later}), (std::vector<std::string>{"a", "b", "c", "d"}));
}

TEST(HeroIds, RoundTrip) {
  hc_test::TempDir dir;
  std::map<int, std::string> names{{1, "antimage"}, {138, "muerta"}};
  persist_hero_ids(names, dir / "ids.csv");
  EXPECT_EQ(load_hero_ids(dir / "ids.csv"), names);
}

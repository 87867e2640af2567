// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "herocluster/csv.hpp"
#include "herocluster/error.hpp"
#include "herocluster/matrix.hpp"

namespace herocluster {

using Warnings = std::vector<std::string>;

// ---------------------------------------------------------------------------
// Raw constants
// ---------------------------------------------------------------------------

/// A property value as it appears in the constants files: free text, a single
/// number, or a per-level list of numbers.
using RawValue = std::variant<std::string, double, std::vector<double>>;

struct RawAbility {
  std::string character;
  std::string ability;
  std::map<std::string, RawValue> properties;
};

struct RawAbilityTable {
  std::string patch;
  std::vector<RawAbility> entries;
};

enum class PrimaryAttribute { Strength, Agility, Intelligence, Universal };

inline constexpr std::array<PrimaryAttribute, 4> kPrimaryAttributes = {
    PrimaryAttribute::Strength, PrimaryAttribute::Agility, PrimaryAttribute::Intelligence,
    PrimaryAttribute::Universal};

inline std::optional<PrimaryAttribute> parse_primary_attribute(std::string_view text) {
  if (text == "str" || text == "strength" || text == "Strength") return PrimaryAttribute::Strength;
  if (text == "agi" || text == "agility" || text == "Agility") return PrimaryAttribute::Agility;
  if (text == "int" || text == "intelligence" || text == "Intelligence")
    return PrimaryAttribute::Intelligence;
  if (text == "all" || text == "universal" || text == "Universal") return PrimaryAttribute::Universal;
  return std::nullopt;
}

struct HeroAttributeRecord {
  std::string character;
  int id = 0;
  PrimaryAttribute primary_attribute = PrimaryAttribute::Strength;
  std::map<std::string, double> stats;
};

/// Numeric hero fields carried into the feature table, in column order.
inline const std::vector<std::string>& hero_stat_names() {
  static const std::vector<std::string> names = {
      "agi_gain",        "attack_point",    "attack_range",     "attack_rate",
      "base_agi",        "base_armor",      "base_attack_max",  "base_attack_min",
      "base_attack_time", "base_health",    "base_health_regen", "base_int",
      "base_mana",       "base_mana_regen", "base_mr",          "base_str",
      "day_vision",      "int_gain",        "move_speed",       "night_vision",
      "projectile_speed", "str_gain",       "turn_rate"};
  return names;
}

inline constexpr std::string_view kHeroColumnPrefix = "hero_";

inline const std::vector<std::string>& hero_columns() {
  static const std::vector<std::string> columns = [] {
    std::vector<std::string> out;
    for (const auto& name : hero_stat_names()) out.push_back(std::string(kHeroColumnPrefix) + name);
    for (const char* attr : {"strength", "agility", "intelligence", "universal"})
      out.push_back(std::string(kHeroColumnPrefix) + "primary_" + attr);
    return out;
  }();
  return columns;
}

inline bool is_hero_column(std::string_view name) { return name.starts_with(kHeroColumnPrefix); }

inline std::string strip_hero_prefix(std::string_view internal_name) {
  constexpr std::string_view prefix = "npc_dota_hero_";
  if (internal_name.starts_with(prefix)) internal_name.remove_prefix(prefix.size());
  return std::string(internal_name);
}

namespace detail {

using nlohmann::json;

inline json load_json(const std::filesystem::path& path) {
  const std::string text = csv::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::MalformedDocument,
         path.string() + " at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

// Splits "30 40 50" or "30/40/50" into numbers; nullopt when any token is not numeric.
inline std::optional<std::vector<double>> numeric_tokens(std::string_view text) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '/' || text[i] == '\t')) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '/' && text[j] != '\t') ++j;
    std::string_view token = text.substr(i, j - i);
    if (token.ends_with('%')) token.remove_suffix(1);
    double value = 0.0;
    if (!csv::parse_number(token, value)) return std::nullopt;
    out.push_back(value);
    i = j;
  }
  if (out.empty()) return std::nullopt;
  return out;
}

inline std::optional<RawValue> to_raw_value(const json& value) {
  if (value.is_null()) return std::nullopt;
  if (value.is_boolean()) return RawValue{value.get<bool>() ? 1.0 : 0.0};
  if (value.is_number()) return RawValue{value.get<double>()};
  if (value.is_string()) {
    const auto& text = value.get_ref<const std::string&>();
    if (auto numbers = numeric_tokens(text)) {
      if (numbers->size() == 1) return RawValue{numbers->front()};
      return RawValue{std::move(*numbers)};
    }
    return RawValue{text};
  }
  if (value.is_array()) {
    std::vector<double> numbers;
    for (const auto& element : value) {
      if (element.is_number()) {
        numbers.push_back(element.get<double>());
      } else if (element.is_string()) {
        auto parsed = numeric_tokens(element.get_ref<const std::string&>());
        if (!parsed) return RawValue{value.dump()};
        numbers.insert(numbers.end(), parsed->begin(), parsed->end());
      } else {
        return RawValue{value.dump()};
      }
    }
    if (numbers.empty()) return std::nullopt;
    if (numbers.size() == 1) return RawValue{numbers.front()};
    return RawValue{std::move(numbers)};
  }
  return RawValue{value.dump()};
}

// Display-only fields of an ability entry.
inline bool is_descriptive_key(std::string_view key) {
  return key == "dname" || key == "desc" || key == "img" || key == "lore" || key == "notes" ||
         key == "attrib";
}

inline std::map<std::string, RawValue> ability_properties(const json& ability) {
  std::map<std::string, RawValue> props;
  if (!ability.is_object()) return props;
  for (const auto& [key, value] : ability.items()) {
    if (is_descriptive_key(key)) continue;
    if (auto raw = to_raw_value(value)) props.emplace(key, std::move(*raw));
  }
  if (auto it = ability.find("attrib"); it != ability.end() && it->is_array()) {
    for (const auto& attrib : *it) {
      if (!attrib.is_object()) continue;
      auto key = attrib.find("key");
      auto value = attrib.find("value");
      if (key == attrib.end() || !key->is_string() || value == attrib.end()) continue;
      if (auto raw = to_raw_value(*value)) props.insert_or_assign(key->get<std::string>(), std::move(*raw));
    }
  }
  return props;
}

}  // namespace detail

struct PatchConstants {
  RawAbilityTable abilities;
  std::vector<HeroAttributeRecord> heroes;
};

/// Parses the three per-patch constants documents. Only abilities listed
/// under a playable hero in the hero->abilities mapping are kept.
inline PatchConstants parse_patch_constants(const std::filesystem::path& hero_abilities_path,
                                            const std::filesystem::path& abilities_path,
                                            const std::filesystem::path& heroes_path,
                                            const std::string& patch_label,
                                            Warnings* warnings = nullptr) {
  using detail::json;
  const json mapping = detail::load_json(hero_abilities_path);
  const json abilities = detail::load_json(abilities_path);
  const json heroes = detail::load_json(heroes_path);
  if (!mapping.is_object())
    fail(ErrorCode::MalformedDocument, hero_abilities_path.string() + " at /: expected an object");
  if (!abilities.is_object())
    fail(ErrorCode::MalformedDocument, abilities_path.string() + " at /: expected an object");
  if (!heroes.is_object() && !heroes.is_array())
    fail(ErrorCode::MalformedDocument, heroes_path.string() + " at /: expected an object");

  std::map<std::string, HeroAttributeRecord> hero_records;
  for (const auto& [key, hero] : heroes.items()) {
    const std::string where = heroes_path.string() + " at /" + key;
    if (!hero.is_object()) fail(ErrorCode::MalformedDocument, where + ": expected an object");
    auto name = hero.find("name");
    if (name == hero.end() || !name->is_string())
      fail(ErrorCode::MalformedDocument, where + "/name: expected a string");
    HeroAttributeRecord record;
    record.character = strip_hero_prefix(name->get<std::string>());
    if (auto id = hero.find("id"); id != hero.end() && id->is_number_integer()) {
      record.id = id->get<int>();
    } else {
      fail(ErrorCode::MalformedDocument, where + "/id: expected an integer");
    }
    auto primary = hero.find("primary_attr");
    if (primary == hero.end() || !primary->is_string())
      fail(ErrorCode::MalformedDocument, where + "/primary_attr: expected a string");
    auto parsed = parse_primary_attribute(primary->get<std::string>());
    if (!parsed)
      fail(ErrorCode::MalformedDocument,
           where + "/primary_attr: unknown attribute '" + primary->get<std::string>() + "'");
    record.primary_attribute = *parsed;
    for (const auto& stat : hero_stat_names()) {
      auto it = hero.find(stat);
      if (it == hero.end() || it->is_null()) continue;
      if (it->is_number()) {
        record.stats[stat] = it->get<double>();
      } else if (double v = 0; it->is_string() && csv::parse_number(it->get<std::string>(), v)) {
        record.stats[stat] = v;
      }
    }
    hero_records.insert_or_assign(record.character, std::move(record));
  }

  PatchConstants out;
  out.abilities.patch = patch_label;
  std::set<std::string> seen_abilities;
  for (const auto& [hero_key, entry] : mapping.items()) {
    const std::string character = strip_hero_prefix(hero_key);
    auto hero = hero_records.find(character);
    if (hero == hero_records.end())
      fail(ErrorCode::UnknownHeroReference,
           "'" + hero_key + "' in " + hero_abilities_path.string() + " is absent from " +
               heroes_path.string());
    out.heroes.push_back(hero->second);
    auto list = entry.find("abilities");
    if (!entry.is_object() || list == entry.end() || !list->is_array())
      fail(ErrorCode::MalformedDocument,
           hero_abilities_path.string() + " at /" + hero_key + "/abilities: expected an array");
    for (const auto& name_json : *list) {
      if (!name_json.is_string())
        fail(ErrorCode::MalformedDocument,
             hero_abilities_path.string() + " at /" + hero_key + "/abilities: expected strings");
      const auto& name = name_json.get_ref<const std::string&>();
      if (name == "generic_hidden" || name.empty()) continue;
      auto ability = abilities.find(name);
      if (ability == abilities.end()) {
        if (warnings) warnings->push_back("ability '" + name + "' of " + character + " missing from " +
                                          abilities_path.string());
        continue;
      }
      if (!seen_abilities.insert(name).second) {
        if (warnings) warnings->push_back("ability '" + name + "' listed twice; kept first");
        continue;
      }
      out.abilities.entries.push_back({character, name, detail::ability_properties(*ability)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Alias map
// ---------------------------------------------------------------------------

struct AliasRule {
  std::string source;
  std::string canonical;
  int sign = 1;
};

/// Renames equivalent property spellings onto one canonical name, flipping the
/// sign where the two spellings express the same effect with opposite signs.
class AliasMap {
 public:
  AliasMap() = default;
  explicit AliasMap(std::vector<AliasRule> rules) : rules_(std::move(rules)) {
    std::set<std::string> canonicals;
    for (const auto& rule : rules_) {
      if (rule.sign != 1 && rule.sign != -1)
        fail(ErrorCode::InvalidAliasMap, "sign of '" + rule.source + "' must be 1 or -1");
      if (rule.source.empty() || rule.canonical.empty())
        fail(ErrorCode::InvalidAliasMap, "empty property name");
      if (!index_.emplace(rule.source, &rule - rules_.data()).second)
        fail(ErrorCode::InvalidAliasMap, "duplicate source '" + rule.source + "'");
      canonicals.insert(rule.canonical);
    }
    // A canonical name may only appear as a source in an identity rule.
    for (const auto& name : canonicals) {
      auto it = index_.find(name);
      if (it == index_.end()) continue;
      const auto& rule = rules_[it->second];
      if (rule.canonical != name || rule.sign != 1)
        fail(ErrorCode::InvalidAliasMap,
             "canonical '" + name + "' is itself remapped; the map must be closed");
    }
  }

  static AliasMap load(const std::filesystem::path& path) {
    auto rows = csv::read(path);
    if (rows.empty() || rows[0] != csv::Row{"source", "canonical", "sign"})
      fail(ErrorCode::InvalidAliasMap, path.string() + ": header must be source,canonical,sign");
    std::vector<AliasRule> rules;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& row = rows[i];
      std::int64_t sign = 0;
      if (row.size() != 3 || !csv::parse_integer(row[2], sign))
        fail(ErrorCode::InvalidAliasMap, path.string() + ":" + std::to_string(i + 1) + ": bad rule");
      rules.push_back({row[0], row[1], static_cast<int>(sign)});
    }
    return AliasMap(std::move(rules));
  }

  /// (canonical name, sign) for a property; unmapped names are their own canonical.
  std::pair<std::string, int> resolve(const std::string& property) const {
    auto it = index_.find(property);
    if (it == index_.end()) return {property, 1};
    const auto& rule = rules_[it->second];
    return {rule.canonical, rule.sign};
  }

  const std::vector<AliasRule>& rules() const noexcept { return rules_; }

 private:
  std::vector<AliasRule> rules_;
  std::map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Standardized table
// ---------------------------------------------------------------------------

struct StandardizedRow {
  std::string character;
  std::string ability;
  std::vector<double> values;

  friend bool operator==(const StandardizedRow&, const StandardizedRow&) = default;
};

struct StandardizedAbilityTable {
  std::string patch;
  std::vector<std::string> columns;
  std::vector<StandardizedRow> rows;

  std::optional<std::size_t> column_index(std::string_view name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) return std::nullopt;
    return static_cast<std::size_t>(it - columns.begin());
  }

  friend bool operator==(const StandardizedAbilityTable&, const StandardizedAbilityTable&) = default;
};

/// Collapses a raw value to one magnitude: numbers as-is, per-level lists by
/// their arithmetic mean, text as a presence flag.
inline double collapse_value(const RawValue& value) {
  if (const auto* number = std::get_if<double>(&value)) return *number;
  if (const auto* list = std::get_if<std::vector<double>>(&value)) {
    if (list->empty()) return 0.0;
    double sum = 0.0;
    for (double v : *list) sum += v;
    return sum / static_cast<double>(list->size());
  }
  return 1.0;
}

inline StandardizedAbilityTable normalize_properties(const RawAbilityTable& raw, const AliasMap& aliases,
                                                     Warnings* warnings = nullptr) {
  std::vector<std::map<std::string, double>> canonical_rows;
  canonical_rows.reserve(raw.entries.size());
  std::set<std::string> column_set;
  for (const auto& entry : raw.entries) {
    std::map<std::string, double> values;
    std::map<std::string, std::string> first_source;
    for (const auto& [name, value] : entry.properties) {
      auto [canonical, sign] = aliases.resolve(name);
      double magnitude = collapse_value(value);
      if (!std::holds_alternative<std::string>(value)) magnitude *= sign;
      auto [it, inserted] = values.emplace(canonical, magnitude);
      if (inserted) {
        first_source.emplace(canonical, name);
        continue;
      }
      if (std::abs(it->second - magnitude) <= 1e-12 * std::max(1.0, std::abs(magnitude))) continue;
      if (warnings)
        warnings->push_back(std::string(to_string(ErrorCode::ConflictingProperty)) + ": " + entry.ability +
                            ": '" + first_source[canonical] + "' and '" + name + "' both map to '" +
                            canonical + "' with different values; summed");
      it->second += magnitude;
    }
    for (const auto& [name, v] : values) column_set.insert(name);
    canonical_rows.push_back(std::move(values));
  }

  StandardizedAbilityTable table;
  table.patch = raw.patch;
  table.columns.assign(column_set.begin(), column_set.end());
  table.rows.reserve(raw.entries.size());
  for (std::size_t i = 0; i < raw.entries.size(); ++i) {
    StandardizedRow row{raw.entries[i].character, raw.entries[i].ability,
                        std::vector<double>(table.columns.size(), 0.0)};
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (auto it = canonical_rows[i].find(table.columns[c]); it != canonical_rows[i].end())
        row.values[c] = it->second;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

/// Converts a standardized table back into raw numeric properties, so that it
/// can be re-normalized.
inline RawAbilityTable to_raw(const StandardizedAbilityTable& table) {
  RawAbilityTable raw;
  raw.patch = table.patch;
  for (const auto& row : table.rows) {
    RawAbility entry{row.character, row.ability, {}};
    for (std::size_t c = 0; c < table.columns.size(); ++c) entry.properties.emplace(table.columns[c], row.values[c]);
    raw.entries.push_back(std::move(entry));
  }
  return raw;
}

inline StandardizedAbilityTable attach_hero_attributes(const StandardizedAbilityTable& table,
                                                       const std::vector<HeroAttributeRecord>& heroes) {
  for (const auto& column : table.columns)
    if (is_hero_column(column))
      fail(ErrorCode::InvalidArgument, "table already carries hero column '" + column + "'");
  std::map<std::string, const HeroAttributeRecord*> by_name;
  for (const auto& hero : heroes) by_name.emplace(hero.character, &hero);

  StandardizedAbilityTable out = table;
  const auto& extra = hero_columns();
  out.columns.insert(out.columns.end(), extra.begin(), extra.end());
  for (auto& row : out.rows) {
    auto it = by_name.find(row.character);
    if (it == by_name.end())
      fail(ErrorCode::MissingHeroRecord, "no hero attributes for '" + row.character + "'");
    const HeroAttributeRecord& hero = *it->second;
    for (const auto& stat : hero_stat_names()) {
      auto s = hero.stats.find(stat);
      row.values.push_back(s == hero.stats.end() ? 0.0 : s->second);
    }
    for (auto attr : kPrimaryAttributes) row.values.push_back(hero.primary_attribute == attr ? 1.0 : 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Column sets across patches
// ---------------------------------------------------------------------------

/// Canonical column order: ability columns lexicographic, then the hero suffix
/// in its fixed order.
inline bool is_canonical_order(const std::vector<std::string>& columns, std::string* offending = nullptr) {
  std::size_t i = 0;
  for (; i < columns.size() && !is_hero_column(columns[i]); ++i) {
    if (i > 0 && !(columns[i - 1] < columns[i])) {
      if (offending) *offending = columns[i];
      return false;
    }
  }
  if (i == columns.size()) return true;
  const auto& hero = hero_columns();
  if (columns.size() - i != hero.size()) {
    if (offending) {
      for (std::size_t j = i; j < columns.size(); ++j)
        if (std::find(hero.begin(), hero.end(), columns[j]) == hero.end()) {
          *offending = columns[j];
          return false;
        }
      *offending = columns[i];
    }
    return false;
  }
  for (std::size_t j = 0; j < hero.size(); ++j)
    if (columns[i + j] != hero[j]) {
      if (offending) *offending = columns[i + j];
      return false;
    }
  return true;
}

inline std::vector<std::string> union_columns(const std::vector<StandardizedAbilityTable>& tables) {
  std::set<std::string> ability;
  bool any_hero = false;
  for (const auto& table : tables)
    for (const auto& column : table.columns) {
      if (is_hero_column(column))
        any_hero = true;
      else
        ability.insert(column);
    }
  std::vector<std::string> out(ability.begin(), ability.end());
  if (any_hero) out.insert(out.end(), hero_columns().begin(), hero_columns().end());
  return out;
}

/// A table laid onto a fixed column list. Columns the table has but the target
/// lacks are dropped and reported; target columns the table lacks are zero.
struct ProjectedTable {
  Matrix matrix;
  std::vector<std::string> dropped_columns;
  std::vector<std::string> missing_columns;
};

inline ProjectedTable project(const StandardizedAbilityTable& table, const std::vector<std::string>& columns) {
  ProjectedTable out;
  out.matrix = Matrix(table.rows.size(), columns.size());
  std::vector<std::optional<std::size_t>> source(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    source[c] = table.column_index(columns[c]);
    if (!source[c]) out.missing_columns.push_back(columns[c]);
  }
  for (const auto& column : table.columns)
    if (std::find(columns.begin(), columns.end(), column) == columns.end()) {
      bool all_zero = true;
      const std::size_t idx = *table.column_index(column);
      for (const auto& row : table.rows) all_zero = all_zero && row.values[idx] == 0.0;
      if (!all_zero) out.dropped_columns.push_back(column);
    }
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (source[c]) out.matrix(r, c) = table.rows[r].values[*source[c]];
  return out;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline void persist_feature_table(const StandardizedAbilityTable& table, const std::filesystem::path& path) {
  std::vector<csv::Row> rows;
  csv::Row header{"patch", "character", "ability"};
  header.insert(header.end(), table.columns.begin(), table.columns.end());
  rows.push_back(std::move(header));
  for (const auto& row : table.rows) {
    csv::Row line{table.patch, row.character, row.ability};
    for (double v : row.values) line.push_back(csv::format_number(v));
    rows.push_back(std::move(line));
  }
  csv::write(path, rows);
}

/// Loads a feature CSV. The header must be in canonical column order; when
/// `expected_columns` is given it must match exactly.
inline StandardizedAbilityTable load_feature_table(
    const std::filesystem::path& path,
    const std::optional<std::vector<std::string>>& expected_columns = std::nullopt) {
  auto rows = csv::read(path);
  const std::string origin = path.string();
  if (rows.empty()) fail(ErrorCode::SchemaMismatch, origin + ": missing header");
  const auto& header = rows[0];
  if (header.size() < 3 || header[0] != "patch" || header[1] != "character" || header[2] != "ability")
    fail(ErrorCode::SchemaMismatch, origin + ": header must start with patch,character,ability");
  StandardizedAbilityTable table;
  table.columns.assign(header.begin() + 3, header.end());
  if (expected_columns) {
    for (const auto& column : table.columns)
      if (std::find(expected_columns->begin(), expected_columns->end(), column) == expected_columns->end())
        fail(ErrorCode::SchemaMismatch, origin + ": unexpected column '" + column + "'");
    for (const auto& column : *expected_columns)
      if (std::find(table.columns.begin(), table.columns.end(), column) == table.columns.end())
        fail(ErrorCode::SchemaMismatch, origin + ": missing column '" + column + "'");
    if (table.columns != *expected_columns)
      fail(ErrorCode::SchemaMismatch, origin + ": columns are not in the expected order");
  }
  std::string offending;
  if (!is_canonical_order(table.columns, &offending))
    fail(ErrorCode::SchemaMismatch, origin + ": column '" + offending + "' breaks canonical order");

  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& line = rows[i];
    const std::string where = origin + ":" + std::to_string(i + 1);
    if (line.size() != header.size())
      fail(ErrorCode::MalformedDocument, where + ": expected " + std::to_string(header.size()) + " fields");
    if (i == 1) {
      table.patch = line[0];
    } else if (line[0] != table.patch) {
      fail(ErrorCode::MalformedDocument, where + ": mixed patches '" + table.patch + "' and '" + line[0] + "'");
    }
    StandardizedRow row{line[1], line[2], {}};
    row.values.reserve(table.columns.size());
    for (std::size_t c = 3; c < line.size(); ++c) {
      double v = 0.0;
      if (!csv::parse_number(line[c], v))
        fail(ErrorCode::MalformedDocument, where + ": column '" + header[c] + "' is not a number");
      row.values.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline void persist_hero_ids(const std::vector<HeroAttributeRecord>& heroes, const std::filesystem::path& path) {
  std::vector<csv::Row> rows{{"id", "character"}};
  for (const auto& hero : heroes) rows.push_back({std::to_string(hero.id), hero.character});
  csv::write(path, rows);
}

inline void persist_hero_ids(const std::map<int, std::string>& names, const std::filesystem::path& path) {
  std::vector<csv::Row> rows{{"id", "character"}};
  for (const auto& [id, name] : names) rows.push_back({std::to_string(id), name});
  csv::write(path, rows);
}

/// id -> character name.
inline std::map<int, std::string> load_hero_ids(const std::filesystem::path& path) {
  auto rows = csv::read(path);
  if (rows.empty() || rows[0] != csv::Row{"id", "character"})
    fail(ErrorCode::SchemaMismatch, path.string() + ": header must be id,character");
  std::map<int, std::string> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::int64_t id = 0;
    if (rows[i].size() != 2 || !csv::parse_integer(rows[i][0], id))
      fail(ErrorCode::MalformedDocument, path.string() + ":" + std::to_string(i + 1) + ": bad row");
    out[static_cast<int>(id)] = rows[i][1];
  }
  return out;
}

}  // namespace herocluster

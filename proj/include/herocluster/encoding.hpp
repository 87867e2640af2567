// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "herocluster/clustering.hpp"
#include "herocluster/csv.hpp"
#include "herocluster/error.hpp"
#include "herocluster/patch_ingest.hpp"

namespace herocluster {

using Counts = std::vector<std::uint32_t>;

/// Number of abilities a character has in each cluster.
struct CharacterVector {
  std::string character;
  std::string patch;
  Counts counts;

  friend bool operator==(const CharacterVector&, const CharacterVector&) = default;
};

enum class Team { Radiant, Dire };

struct LineupVector {
  Team team = Team::Radiant;
  Counts counts;

  friend bool operator==(const LineupVector&, const LineupVector&) = default;
};

/// Multi-hot over character ids 0..max_id.
struct IdVector {
  int max_id = 0;
  std::vector<std::uint8_t> bits;
};

inline constexpr std::size_t kTeamSize = 5;

inline std::vector<std::uint8_t> encode_ability(std::size_t label, std::size_t k) {
  if (label >= k)
    fail(ErrorCode::LabelOutOfRange, "label " + std::to_string(label) + " outside [0, " + std::to_string(k) + ")");
  std::vector<std::uint8_t> one_hot(k, 0);
  one_hot[label] = 1;
  return one_hot;
}

inline CharacterVector encode_character(std::span<const std::size_t> ability_labels, std::size_t k,
                                        std::string character = {}, std::string patch = {}) {
  CharacterVector out{std::move(character), std::move(patch), Counts(k, 0)};
  for (auto label : ability_labels) {
    if (label >= k)
      fail(ErrorCode::LabelOutOfRange, "label " + std::to_string(label) + " outside [0, " + std::to_string(k) + ")");
    ++out.counts[label];
  }
  return out;
}

inline LineupVector encode_lineup(std::span<const CharacterVector> members, Team team = Team::Radiant,
                                  std::size_t team_size = kTeamSize) {
  if (members.size() != team_size)
    fail(ErrorCode::WrongTeamSize,
         std::to_string(members.size()) + " members, expected " + std::to_string(team_size));
  if (members.empty()) return {team, {}};
  const std::size_t k = members.front().counts.size();
  LineupVector out{team, Counts(k, 0)};
  for (const auto& member : members) {
    if (member.counts.size() != k)
      fail(ErrorCode::MixedDimensions, "member '" + member.character + "' has " +
                                           std::to_string(member.counts.size()) + " clusters, expected " +
                                           std::to_string(k));
    if (member.patch != members.front().patch)
      fail(ErrorCode::MixedDimensions, "members come from patches '" + members.front().patch + "' and '" +
                                           member.patch + "'");
    for (std::size_t i = 0; i < k; ++i) out.counts[i] += member.counts[i];
  }
  return out;
}

/// The conventional id encoding. A character whose id lies beyond the id
/// space seen at training time cannot be represented.
inline IdVector encode_character_ids(std::span<const int> ids, int max_id) {
  if (max_id < 0) fail(ErrorCode::InvalidArgument, "max_id must be non-negative");
  IdVector out{max_id, std::vector<std::uint8_t>(static_cast<std::size_t>(max_id) + 1, 0)};
  for (int id : ids) {
    if (id < 0 || id > max_id)
      fail(ErrorCode::IdOutOfRange,
           "character id " + std::to_string(id) + " outside the trained id space [0, " + std::to_string(max_id) + "]");
    out.bits[static_cast<std::size_t>(id)] = 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Character tables: (patch, character) -> CharacterVector
// ---------------------------------------------------------------------------

struct AbilityLabel {
  std::string patch;
  std::string character;
  std::string ability;
  std::size_t label = 0;
};

/// Character vectors for every patch and character, keyed by (patch, name).
class CharacterTable {
 public:
  CharacterTable() = default;
  explicit CharacterTable(std::size_t k) : k_(k) {}

  std::size_t k() const noexcept { return k_; }

  void add(CharacterVector vector) {
    if (vector.counts.size() != k_)
      fail(ErrorCode::MixedDimensions, "character '" + vector.character + "' has " +
                                           std::to_string(vector.counts.size()) + " clusters, table has " +
                                           std::to_string(k_));
    auto key = std::make_pair(vector.patch, vector.character);
    entries_.insert_or_assign(std::move(key), std::move(vector));
  }

  const CharacterVector* find(const std::string& patch, const std::string& character) const {
    auto it = entries_.find({patch, character});
    return it == entries_.end() ? nullptr : &it->second;
  }

  const CharacterVector& at(const std::string& patch, const std::string& character) const {
    if (const auto* v = find(patch, character)) return *v;
    fail(ErrorCode::UnknownCharacter, "no encoded vector for '" + character + "' in patch " + patch);
  }

  std::vector<CharacterVector> all() const {
    std::vector<CharacterVector> out;
    for (const auto& [key, v] : entries_) out.push_back(v);
    return out;
  }

  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::size_t k_ = 0;
  std::map<std::pair<std::string, std::string>, CharacterVector> entries_;
};

/// Labels a patch's ability table against a frozen model and groups the
/// labels per character. Characters are added in first-seen order.
struct EncodedPatch {
  std::vector<AbilityLabel> labels;
  std::vector<CharacterVector> characters;
  std::vector<std::string> dropped_columns;
  std::vector<std::string> missing_columns;
};

inline EncodedPatch encode_patch(const ClusterModel& model, const StandardizedAbilityTable& table,
                                 bool strict = false) {
  auto projected = project(table, model.columns);
  if (strict && !projected.dropped_columns.empty())
    fail(ErrorCode::DimensionMismatch, "patch " + table.patch + " has column '" + projected.dropped_columns.front() +
                                           "' unseen by the model");
  EncodedPatch out;
  out.dropped_columns = std::move(projected.dropped_columns);
  out.missing_columns = std::move(projected.missing_columns);
  const Labels labels = assign(model, projected.matrix);
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> per_character;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    out.labels.push_back({table.patch, row.character, row.ability, labels[r]});
    auto [it, inserted] = per_character.try_emplace(row.character);
    if (inserted) order.push_back(row.character);
    it->second.push_back(labels[r]);
  }
  for (const auto& name : order) out.characters.push_back(encode_character(per_character[name], model.k, name, table.patch));
  return out;
}

inline void write_character_vectors(const std::vector<CharacterVector>& vectors, std::size_t k,
                                    const std::filesystem::path& path) {
  std::vector<csv::Row> rows;
  csv::Row header{"patch", "character"};
  for (std::size_t i = 0; i < k; ++i) header.push_back("c" + std::to_string(i));
  rows.push_back(std::move(header));
  for (const auto& v : vectors) {
    if (v.counts.size() != k) fail(ErrorCode::MixedDimensions, "character '" + v.character + "' has wrong width");
    csv::Row row{v.patch, v.character};
    for (auto c : v.counts) row.push_back(std::to_string(c));
    rows.push_back(std::move(row));
  }
  csv::write(path, rows);
}

inline CharacterTable load_character_vectors(const std::filesystem::path& path) {
  auto rows = csv::read(path);
  if (rows.empty() || rows[0].size() < 3 || rows[0][0] != "patch" || rows[0][1] != "character")
    fail(ErrorCode::SchemaMismatch, path.string() + ": header must be patch,character,c0..");
  const std::size_t k = rows[0].size() - 2;
  for (std::size_t i = 0; i < k; ++i)
    if (rows[0][i + 2] != "c" + std::to_string(i))
      fail(ErrorCode::SchemaMismatch, path.string() + ": unexpected column '" + rows[0][i + 2] + "'");
  CharacterTable table(k);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != k + 2) fail(ErrorCode::MalformedDocument, path.string() + ":" + std::to_string(r + 1) + ": bad width");
    CharacterVector v{row[1], row[0], Counts(k)};
    for (std::size_t i = 0; i < k; ++i) {
      std::int64_t count = 0;
      if (!csv::parse_integer(row[i + 2], count) || count < 0)
        fail(ErrorCode::MalformedDocument, path.string() + ":" + std::to_string(r + 1) + ": bad count");
      v.counts[i] = static_cast<std::uint32_t>(count);
    }
    table.add(std::move(v));
  }
  return table;
}

inline void write_ability_labels(const std::vector<AbilityLabel>& labels, const std::filesystem::path& path) {
  std::vector<csv::Row> rows{{"patch", "character", "ability", "label"}};
  for (const auto& l : labels) rows.push_back({l.patch, l.character, l.ability, std::to_string(l.label)});
  csv::write(path, rows);
}

inline std::vector<AbilityLabel> load_ability_labels(const std::filesystem::path& path) {
  auto rows = csv::read(path);
  if (rows.empty() || rows[0] != csv::Row{"patch", "character", "ability", "label"})
    fail(ErrorCode::SchemaMismatch, path.string() + ": header must be patch,character,ability,label");
  std::vector<AbilityLabel> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::int64_t label = 0;
    if (rows[r].size() != 4 || !csv::parse_integer(rows[r][3], label) || label < 0)
      fail(ErrorCode::MalformedDocument, path.string() + ":" + std::to_string(r + 1) + ": bad row");
    out.push_back({rows[r][0], rows[r][1], rows[r][2], static_cast<std::size_t>(label)});
  }
  return out;
}

}  // namespace herocluster

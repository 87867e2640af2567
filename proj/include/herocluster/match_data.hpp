// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "herocluster/csv.hpp"
#include "herocluster/encoding.hpp"
#include "herocluster/error.hpp"

namespace herocluster {

inline constexpr std::size_t kSlots = 10;

/// One competitive match. Slots 0-4 are Radiant, 5-9 Dire.
struct MatchRecord {
  std::int64_t match_id = 0;
  std::string patch;
  std::int64_t duration = 0;  // seconds
  std::int64_t kills_radiant = 0;
  std::int64_t kills_dire = 0;
  std::array<int, kSlots> heroes{};
  bool radiant_win = false;

  std::span<const int, kTeamSize> radiant() const { return std::span<const int, kSlots>(heroes).first<kTeamSize>(); }
  std::span<const int, kTeamSize> dire() const { return std::span<const int, kSlots>(heroes).last<kTeamSize>(); }

  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

inline const csv::Row& match_csv_header() {
  static const csv::Row header = [] {
    csv::Row h{"MatchID", "Patch", "Duration", "KillsR", "KillsD"};
    for (std::size_t i = 0; i < kSlots; ++i) h.push_back("Hero" + std::to_string(i));
    h.push_back("RadiantWin");
    return h;
  }();
  return header;
}

inline void write_matches(const std::vector<MatchRecord>& records, const std::filesystem::path& path) {
  std::vector<csv::Row> rows{match_csv_header()};
  for (const auto& m : records) {
    csv::Row row{std::to_string(m.match_id), m.patch, std::to_string(m.duration), std::to_string(m.kills_radiant),
                 std::to_string(m.kills_dire)};
    for (int h : m.heroes) row.push_back(std::to_string(h));
    row.push_back(m.radiant_win ? "1" : "0");
    rows.push_back(std::move(row));
  }
  csv::write(path, rows);
}

inline std::vector<MatchRecord> read_matches(const std::filesystem::path& path) {
  auto rows = csv::read(path);
  if (rows.empty() || rows[0] != match_csv_header())
    fail(ErrorCode::SchemaMismatch, path.string() + ": header must be " + csv::join(match_csv_header()));
  std::vector<MatchRecord> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path.string() + ":" + std::to_string(r + 1);
    if (row.size() != match_csv_header().size()) fail(ErrorCode::MalformedDocument, where + ": wrong field count");
    auto integer = [&](std::size_t col) {
      std::int64_t v = 0;
      if (!csv::parse_integer(row[col], v))
        fail(ErrorCode::MalformedDocument, where + ": " + match_csv_header()[col] + " is not an integer");
      return v;
    };
    MatchRecord m;
    m.match_id = integer(0);
    m.patch = row[1];
    m.duration = integer(2);
    m.kills_radiant = integer(3);
    m.kills_dire = integer(4);
    for (std::size_t i = 0; i < kSlots; ++i) m.heroes[i] = static_cast<int>(integer(5 + i));
    const auto& win = row[5 + kSlots];
    if (win == "1" || win == "true" || win == "True")
      m.radiant_win = true;
    else if (win == "0" || win == "false" || win == "False")
      m.radiant_win = false;
    else
      fail(ErrorCode::MalformedDocument, where + ": RadiantWin must be 0 or 1");
    out.push_back(std::move(m));
  }
  return out;
}

inline bool is_valid(const MatchRecord& m) {
  if (m.patch.empty() || m.duration <= 0 || m.kills_radiant < 0 || m.kills_dire < 0) return false;
  std::set<int> ids;
  for (int h : m.heroes)
    if (h <= 0 || !ids.insert(h).second) return false;
  return true;
}

/// Drops records that break the match invariants, and repeated match ids
/// after their first occurrence.
inline std::vector<MatchRecord> filter_valid(const std::vector<MatchRecord>& records) {
  std::vector<MatchRecord> out;
  std::set<std::int64_t> seen;
  for (const auto& m : records)
    if (is_valid(m) && seen.insert(m.match_id).second) out.push_back(m);
  return out;
}

inline const std::vector<std::string>& default_holdout_patches() {
  static const std::vector<std::string> patches = {"7.32", "7.33"};
  return patches;
}

struct DatasetSplit {
  std::vector<MatchRecord> train;
  std::vector<MatchRecord> validation;
  std::vector<MatchRecord> test;
  std::vector<MatchRecord> holdout_732;
  std::vector<MatchRecord> holdout_733;
};

/// Holdout patches are routed aside; the rest is shuffled by `seed` and cut
/// 64/16/20. Membership depends only on the set of records, not their order.
inline DatasetSplit split_dataset(std::vector<MatchRecord> records, std::uint64_t seed,
                                  const std::vector<std::string>& holdout_patches = default_holdout_patches()) {
  if (records.empty()) fail(ErrorCode::EmptyDataset, "no match records to split");
  if (holdout_patches.size() != 2) fail(ErrorCode::InvalidArgument, "expected two holdout patches");
  std::sort(records.begin(), records.end(),
            [](const MatchRecord& a, const MatchRecord& b) { return a.match_id < b.match_id; });
  DatasetSplit split;
  std::vector<MatchRecord> pool;
  for (auto& m : records) {
    if (m.patch == holdout_patches[0])
      split.holdout_732.push_back(std::move(m));
    else if (m.patch == holdout_patches[1])
      split.holdout_733.push_back(std::move(m));
    else
      pool.push_back(std::move(m));
  }
  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  const std::size_t n = pool.size();
  const auto n_train = static_cast<std::size_t>(std::llround(0.64 * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(0.16 * static_cast<double>(n)));
  auto it = pool.begin();
  split.train.assign(std::make_move_iterator(it), std::make_move_iterator(it + static_cast<std::ptrdiff_t>(n_train)));
  it += static_cast<std::ptrdiff_t>(n_train);
  split.validation.assign(std::make_move_iterator(it), std::make_move_iterator(it + static_cast<std::ptrdiff_t>(n_val)));
  it += static_cast<std::ptrdiff_t>(n_val);
  split.test.assign(std::make_move_iterator(it), std::make_move_iterator(pool.end()));
  return split;
}

// ---------------------------------------------------------------------------
// Synthetic corpus
// ---------------------------------------------------------------------------

/// Generator parameters. Characters get ids 1..n_characters; the first
/// holdout patch introduces one extra character with id n_characters + 1.
/// Every patch after the first re-rolls each character's ability clusters
/// with probability `rework_probability`, mimicking balance patches.
struct SyntheticConfig {
  std::size_t n_matches = 5000;  // across the fit-era patches
  std::size_t holdout_matches = 1000;  // per holdout patch
  std::size_t k = 12;
  std::size_t n_characters = 40;
  std::size_t min_abilities = 4;
  std::size_t max_abilities = 6;
  std::vector<double> coefficients;  // length k; drawn from N(0, 1) when empty
  double base_kills = 25.0;
  double duration_effect = 6.0;  // kills per standard deviation of duration
  double signal = 1.0;           // scale on <coefficients, lineup counts>
  double duration_mean = 2400.0;
  double duration_std = 600.0;
  double min_duration = 600.0;
  double noise_std = 3.0;
  double rework_probability = 0.5;
  std::vector<std::string> patches = {"7.27", "7.28", "7.29", "7.30", "7.31"};
  std::vector<std::string> holdout_patches = {"7.32", "7.33"};
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::vector<MatchRecord> records;
  SyntheticConfig config;  // echo with coefficients filled in
  CharacterTable characters;
  std::map<int, std::string> hero_names;  // id -> name
  int new_character_id = 0;
};

inline std::string synthetic_character_name(int id) { return "synth_" + std::to_string(id); }

inline SyntheticCorpus generate_synthetic(SyntheticConfig config) {
  if (config.k == 0 || config.n_characters < 2 * kTeamSize || config.min_abilities == 0 ||
      config.min_abilities > config.max_abilities || config.patches.empty() || config.holdout_patches.size() != 2 ||
      config.duration_std < 0 || config.noise_std < 0 || config.rework_probability < 0 ||
      config.rework_probability > 1 || config.min_duration <= 0)
    fail(ErrorCode::InvalidConfig, "synthetic configuration out of range");
  if (!config.coefficients.empty() && config.coefficients.size() != config.k)
    fail(ErrorCode::InvalidConfig, "coefficients must have length k");

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  if (config.coefficients.empty())
    for (std::size_t i = 0; i < config.k; ++i) config.coefficients.push_back(normal(rng));

  SyntheticCorpus corpus;
  corpus.characters = CharacterTable(config.k);
  const int n_chars = static_cast<int>(config.n_characters);
  const int new_id = n_chars + 1;
  corpus.new_character_id = new_id;
  for (int id = 1; id <= new_id; ++id) corpus.hero_names[id] = synthetic_character_name(id);

  std::uniform_int_distribution<std::size_t> ability_count(config.min_abilities, config.max_abilities);
  std::uniform_int_distribution<std::size_t> cluster(0, config.k - 1);
  std::bernoulli_distribution rework(config.rework_probability);
  auto roll = [&](int id, const std::string& patch) {
    std::vector<std::size_t> labels(ability_count(rng));
    for (auto& l : labels) l = cluster(rng);
    return encode_character(labels, config.k, synthetic_character_name(id), patch);
  };

  std::vector<std::string> all_patches = config.patches;
  all_patches.insert(all_patches.end(), config.holdout_patches.begin(), config.holdout_patches.end());
  const std::string& debut_patch = config.holdout_patches[0];

  // Rosters per patch.
  std::map<std::string, std::vector<int>> rosters;
  std::map<int, CharacterVector> current;
  for (std::size_t p = 0; p < all_patches.size(); ++p) {
    const auto& patch = all_patches[p];
    for (int id = 1; id <= n_chars; ++id) {
      if (p == 0 || rework(rng)) {
        current[id] = roll(id, patch);
      } else {
        current[id].patch = patch;
      }
    }
    if (patch == debut_patch) {
      current[new_id] = roll(new_id, patch);
    } else if (auto it = current.find(new_id); it != current.end()) {
      it->second.patch = patch;
    }
    for (const auto& [id, v] : current) {
      corpus.characters.add(v);
      rosters[patch].push_back(id);
    }
  }

  std::int64_t next_id = 1000000;
  auto make_match = [&](const std::string& patch) {
    std::vector<int> pool = rosters[patch];
    std::shuffle(pool.begin(), pool.end(), rng);
    MatchRecord m;
    m.match_id = next_id++;
    m.patch = patch;
    std::copy_n(pool.begin(), kSlots, m.heroes.begin());
    // The debut patch exists to exercise the new character: it plays every match.
    if (patch == debut_patch && std::find(m.heroes.begin(), m.heroes.end(), new_id) == m.heroes.end())
      m.heroes[std::uniform_int_distribution<std::size_t>(0, kSlots - 1)(rng)] = new_id;
    const double duration = std::max(config.min_duration, config.duration_mean + config.duration_std * normal(rng));
    m.duration = std::llround(duration);
    const double duration_z =
        config.duration_std > 0 ? (static_cast<double>(m.duration) - config.duration_mean) / config.duration_std : 0.0;
    auto team_kills = [&](std::span<const int, kTeamSize> team) {
      double lineup = 0.0;
      for (int id : team) {
        const auto& counts = corpus.characters.at(patch, synthetic_character_name(id)).counts;
        for (std::size_t i = 0; i < config.k; ++i) lineup += config.coefficients[i] * counts[i];
      }
      const double kills = config.base_kills + config.duration_effect * duration_z + config.signal * lineup +
                           config.noise_std * normal(rng);
      return std::max<std::int64_t>(0, std::llround(kills));
    };
    m.kills_radiant = team_kills(m.radiant());
    m.kills_dire = team_kills(m.dire());
    m.radiant_win = m.kills_radiant != m.kills_dire ? m.kills_radiant > m.kills_dire
                                                     : std::bernoulli_distribution(0.5)(rng);
    return m;
  };

  const std::size_t fit_patches = config.patches.size();
  for (std::size_t p = 0; p < all_patches.size(); ++p) {
    const std::size_t count = p < fit_patches
                                  ? config.n_matches / fit_patches + (p < config.n_matches % fit_patches ? 1 : 0)
                                  : config.holdout_matches;
    for (std::size_t i = 0; i < count; ++i) corpus.records.push_back(make_match(all_patches[p]));
  }
  corpus.config = std::move(config);
  return corpus;
}

}  // namespace herocluster

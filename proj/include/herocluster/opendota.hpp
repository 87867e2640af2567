// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "herocluster/error.hpp"
#include "herocluster/match_data.hpp"
#include "herocluster/patch_ingest.hpp"

namespace herocluster::opendota {

struct FetchOptions {
  std::string base_url = "https://api.opendota.com";
  std::optional<std::string> api_key;
  std::size_t page_size = 1000;
  std::size_t max_retries = 5;
  std::chrono::milliseconds initial_backoff{1000};
  double rate_limit = 1.0;  // requests per second; 0 disables the ceiling
  std::chrono::seconds timeout{60};
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
};

inline bool is_safe_patch_label(const std::string& patch) {
  if (patch.empty()) return false;
  for (char c : patch)
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || std::islower(static_cast<unsigned char>(c))))
      return false;
  return true;
}

/// Professional and premium league matches in the given patches whose players
/// all stayed to the end, one page after `cursor` (exclusive).
inline std::string build_explorer_query(const std::vector<std::string>& patches, std::int64_t cursor,
                                        std::size_t page_size) {
  if (patches.empty()) fail(ErrorCode::InvalidArgument, "patch range is empty");
  std::string in_list;
  for (const auto& p : patches) {
    if (!is_safe_patch_label(p)) fail(ErrorCode::InvalidArgument, "invalid patch label '" + p + "'");
    if (!in_list.empty()) in_list += ", ";
    in_list += "'" + p + "'";
  }
  return "SELECT m.match_id, mp.patch, m.duration, m.radiant_score, m.dire_score, m.radiant_win, "
         "array_agg(pm.hero_id ORDER BY pm.player_slot) AS heroes "
         "FROM matches m "
         "JOIN match_patch mp USING (match_id) "
         "JOIN leagues l USING (leagueid) "
         "JOIN player_matches pm USING (match_id) "
         "WHERE mp.patch IN (" + in_list + ") "
         "AND l.tier IN ('professional', 'premium') "
         "AND m.match_id > " + std::to_string(cursor) + " "
         "GROUP BY m.match_id, mp.patch, m.duration, m.radiant_score, m.dire_score, m.radiant_win "
         "HAVING bool_and(pm.leaver_status = 0) "
         "ORDER BY m.match_id "
         "LIMIT " + std::to_string(page_size);
}

/// Maps explorer rows onto match records. Rows missing any field, or with a
/// hero list other than ten entries, are dropped with a warning.
inline std::vector<MatchRecord> parse_explorer_rows(const nlohmann::json& body, Warnings* warnings = nullptr,
                                                    std::int64_t* last_match_id = nullptr,
                                                    std::size_t* row_count = nullptr) {
  auto rows = body.find("rows");
  if (!body.is_object() || rows == body.end() || !rows->is_array()) {
    std::string detail = "response has no rows array";
    if (body.is_object())
      if (auto err = body.find("err"); err != body.end()) detail += ": " + err->dump();
    fail(ErrorCode::MalformedResponse, detail);
  }
  if (row_count) *row_count = rows->size();
  std::vector<MatchRecord> out;
  for (const auto& row : *rows) {
    if (!row.is_object()) fail(ErrorCode::MalformedResponse, "row is not an object");
    if (last_match_id)
      if (auto id = row.find("match_id"); id != row.end() && id->is_number_integer())
        *last_match_id = std::max(*last_match_id, id->get<std::int64_t>());
    auto drop = [&](const std::string& why) {
      if (warnings) warnings->push_back("dropped match " + (row.contains("match_id") ? row["match_id"].dump() : "?") + ": " + why);
    };
    auto integer = [&](const char* key) -> std::optional<std::int64_t> {
      auto it = row.find(key);
      if (it == row.end() || !it->is_number_integer()) return std::nullopt;
      return it->get<std::int64_t>();
    };
    MatchRecord m;
    auto id = integer("match_id");
    auto duration = integer("duration");
    auto kr = integer("radiant_score");
    auto kd = integer("dire_score");
    if (!id || !duration || !kr || !kd) {
      drop("missing numeric field");
      continue;
    }
    m.match_id = *id;
    m.duration = *duration;
    m.kills_radiant = *kr;
    m.kills_dire = *kd;
    auto patch = row.find("patch");
    if (patch == row.end() || !(patch->is_string() || patch->is_number())) {
      drop("missing patch");
      continue;
    }
    m.patch = patch->is_string() ? patch->get<std::string>() : patch->dump();
    auto win = row.find("radiant_win");
    if (win == row.end() || !win->is_boolean()) {
      drop("missing radiant_win");
      continue;
    }
    m.radiant_win = win->get<bool>();
    auto heroes = row.find("heroes");
    if (heroes == row.end() || !heroes->is_array() || heroes->size() != kSlots) {
      drop("hero slots incomplete");
      continue;
    }
    bool ok = true;
    for (std::size_t i = 0; i < kSlots; ++i) {
      const auto& h = (*heroes)[i];
      if (!h.is_number_integer()) {
        ok = false;
        break;
      }
      m.heroes[i] = h.get<int>();
    }
    if (!ok) {
      drop("hero slots incomplete");
      continue;
    }
    out.push_back(std::move(m));
  }
  return out;
}

namespace detail {

inline std::pair<std::string, std::string> split_base_url(const std::string& base) {
  // "http://host:port/prefix" -> ("http://host:port", "/prefix")
  auto scheme = base.find("://");
  auto path_start = base.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {base, ""};
  std::string prefix = base.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base.substr(0, path_start), prefix};
}

}  // namespace detail

/// Pages through the explorer endpoint by match-id cursor. Rate-limit and
/// server errors are retried with exponential backoff.
inline std::vector<MatchRecord> fetch_matches(const FetchOptions& options, const std::vector<std::string>& patches,
                                              Warnings* warnings = nullptr) {
  if (patches.empty()) fail(ErrorCode::InvalidArgument, "patch range is empty");
  if (options.page_size == 0) fail(ErrorCode::InvalidArgument, "page size must be positive");
  auto [host, prefix] = detail::split_base_url(options.base_url);
  httplib::Client client(host);
  client.set_connection_timeout(options.timeout);
  client.set_read_timeout(options.timeout);

  const auto min_interval =
      options.rate_limit > 0 ? std::chrono::milliseconds(static_cast<std::int64_t>(1000.0 / options.rate_limit))
                             : std::chrono::milliseconds(0);
  std::optional<std::chrono::steady_clock::time_point> last_request;
  auto throttle = [&] {
    if (last_request && min_interval.count() > 0) {
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - *last_request);
      if (elapsed < min_interval) options.sleep(min_interval - elapsed);
    }
    last_request = std::chrono::steady_clock::now();
  };

  std::vector<MatchRecord> out;
  std::int64_t cursor = 0;
  while (true) {
    httplib::Params params{{"sql", build_explorer_query(patches, cursor, options.page_size)}};
    if (options.api_key) params.emplace("api_key", *options.api_key);

    std::optional<std::string> body;
    std::string last_problem;
    bool rate_limited = false;
    for (std::size_t attempt = 0; attempt <= options.max_retries && !body; ++attempt) {
      if (attempt > 0) options.sleep(options.initial_backoff * (1LL << (attempt - 1)));
      throttle();
      auto res = client.Get(prefix + "/api/explorer", params, httplib::Headers{});
      if (!res) {
        rate_limited = false;
        last_problem = "connection failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 200) {
        body = res->body;
      } else if (res->status == 429) {
        rate_limited = true;
        last_problem = "HTTP 429";
      } else if (res->status >= 500) {
        rate_limited = false;
        last_problem = "HTTP " + std::to_string(res->status);
      } else {
        fail(ErrorCode::NetworkError, "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
      }
    }
    if (!body) {
      fail(rate_limited ? ErrorCode::RateLimited : ErrorCode::NetworkError,
           last_problem + " after " + std::to_string(options.max_retries) + " retries");
    }

    nlohmann::json json;
    try {
      json = nlohmann::json::parse(*body);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::MalformedResponse, std::string("explorer response is not JSON: ") + e.what());
    }
    std::int64_t last_id = cursor;
    std::size_t row_count = 0;
    auto page = parse_explorer_rows(json, warnings, &last_id, &row_count);
    out.insert(out.end(), std::make_move_iterator(page.begin()), std::make_move_iterator(page.end()));
    if (row_count < options.page_size || last_id <= cursor) break;
    cursor = last_id;
  }
  return out;
}

}  // namespace herocluster::opendota

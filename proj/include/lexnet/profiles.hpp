#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lexnet/common.hpp"
#include "lexnet/corpus.hpp"
#include "lexnet/graphcore.hpp"

namespace lexnet::profiles {

struct ProfileRow {
  int year = 0;
  std::uint64_t tokens = 0;
  std::uint64_t unique_tokens = 0;  // over the concatenated subtree text
  std::uint64_t items_above = 0;    // containers strictly inside the unit
  std::uint64_t items_on = 0;       // seqitems
  std::uint64_t items_below = 0;    // subseqitems
  std::uint64_t self_loops = 0;
  std::uint64_t weighted_in = 0;    // self-loops included
  std::uint64_t weighted_out = 0;
  std::uint64_t binary_in = 0;      // distinct neighbors; a self-loop counts once
  std::uint64_t binary_out = 0;

  bool operator==(const ProfileRow&) const = default;
};

struct ProfileSeries {
  std::string unit;
  std::vector<ProfileRow> rows;  // only years where the unit exists
};

// One year of input: the snapshot and its quotient at the unit's level.
struct YearInput {
  const corpus::Snapshot* snapshot = nullptr;
  const graph::QuotientGraph* quotient = nullptr;
};

ProfileRow profile_row(const std::string& unit, const corpus::Snapshot& snapshot,
                       const graph::QuotientGraph& q, const corpus::TokenizeOptions& tok = {});

/// Throws NotFoundError when the unit is absent from every year. Token drops of
/// 90 % or more between consecutive years are reported in `diag`.
ProfileSeries profile(const std::string& unit, const std::vector<YearInput>& years, Diagnostics& diag,
                      const corpus::TokenizeOptions& tok = {});

std::string profile_csv(const ProfileSeries& p);

struct EgoEdge {
  std::string neighbor;
  std::uint64_t neighbor_tokens = 0;
  std::uint64_t weight = 0;
  std::array<std::uint64_t, graph::kReferenceClasses> by_class{};
};

enum class EgoDirection { reliance, responsibility };

struct EgoView {
  std::string unit;
  EgoDirection direction = EgoDirection::reliance;
  std::uint64_t unit_tokens = 0;
  std::vector<EgoEdge> edges;  // sorted by neighbor key; self-loops excluded
};

std::pair<EgoView, EgoView> ego_views(const std::string& unit, const graph::QuotientGraph& q);

std::string ego_json(const EgoView& reliance, const EgoView& responsibility);
std::string ego_dot(const EgoView& view);

struct DeltaRow {
  std::string unit;
  std::array<std::int64_t, 10> delta{};  // indicator order as in ProfileRow
};

/// Per-unit change of every indicator between `from` and `to`; units missing
/// in either year are skipped. Sorted by unit.
std::vector<DeltaRow> profile_delta(const std::vector<ProfileSeries>& series, int from, int to);
std::string delta_csv(const std::vector<DeltaRow>& rows);

}  // namespace lexnet::profiles

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lexnet/macrostats.hpp"

namespace lexnet::micro {

enum class StarType { sink, hinge, source };
std::string_view to_string(StarType t);

/// sink if in >= ratio * out, source if out >= ratio * in, hinge otherwise.
/// Throws when both degrees are 0.
StarType classify_star(std::uint64_t delta_out, std::uint64_t delta_in, std::uint64_t ratio = 10);

struct StarOptions {
  std::size_t min_size = 10;   // hub plus spokes
  double density_cap = 0.05;   // max share of other spokes a spoke may touch
  std::uint64_t ratio = 10;
  unsigned jobs = 1;
};

struct Star {
  std::string hub;
  std::vector<std::string> spokes;  // sorted
  std::size_t n = 0;                // 1 + spokes
  std::uint64_t m_s = 0;            // edges among spokes, direction and multiplicity ignored
  std::uint64_t delta_out = 0;      // distinct out-neighbors of the hub, self excluded
  std::uint64_t delta_in = 0;
  StarType type = StarType::hinge;
  std::string heading;
};

/// Largest spoke-adjacency count a spoke may keep among `spokes` spokes.
std::uint64_t spoke_limit(std::size_t spokes, double density_cap);

/// Every node whose pruned ego neighborhood reaches `min_size` yields a star.
/// Parallel edges and self-loops are ignored. Sorted by n descending, then hub.
std::vector<Star> extract_stars(const macro::Digraph& g, const StarOptions& opts = {});

std::string stars_csv(const std::vector<Star>& stars, std::size_t top_k = SIZE_MAX);

}  // namespace lexnet::micro

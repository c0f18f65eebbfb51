#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lexnet/common.hpp"

namespace lexnet::partcmp {

// Node key -> cluster label. Labels are arbitrary strings.
using Partition = std::map<std::string, std::string>;

struct Contingency {
  std::vector<std::vector<std::uint64_t>> n;  // rows: clusters of X, columns: clusters of Y
  std::vector<std::uint64_t> rows, cols;
  std::uint64_t total = 0;
};

/// Throws when the partitions cover different node sets.
Contingency contingency(const Partition& x, const Partition& y);

// Node-pair counts: a = together in both, b = apart in both,
// c = together in X only, d = together in Y only.
struct PairCounts {
  std::uint64_t a = 0, b = 0, c = 0, d = 0;
  bool operator==(const PairCounts&) const = default;
};

PairCounts pair_counts(const Contingency& t);

struct Rational {
  __int128 num = 0;
  __int128 den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational& o) const { return num * o.den == o.num * den; }
};

/// Adjusted Rand index as an exact fraction. Partitions that are both a single
/// cluster or both all singletons give 1 with a diagnostic.
Rational ari_exact(const Partition& x, const Partition& y, Diagnostics* diag = nullptr);
double ari(const Partition& x, const Partition& y, Diagnostics* diag = nullptr);

/// I(X;Y) / sqrt(H(X) H(Y)) in natural logarithms, clamped to [0, 1].
/// Partitions equal up to relabeling give exactly 1.
double nmi(const Partition& x, const Partition& y, Diagnostics* diag = nullptr);

}  // namespace lexnet::partcmp

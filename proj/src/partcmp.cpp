#include "lexnet/partcmp.hpp"

#include <algorithm>
#include <cmath>

namespace lexnet::partcmp {

Contingency contingency(const Partition& x, const Partition& y) {
  if (x.size() != y.size()) throw Error("partitions cover different node sets");
  std::map<std::string, std::size_t> rx, ry;
  for (const auto& [_, l] : x) rx.emplace(l, 0);
  for (const auto& [_, l] : y) ry.emplace(l, 0);
  std::size_t i = 0;
  for (auto& [_, idx] : rx) idx = i++;
  i = 0;
  for (auto& [_, idx] : ry) idx = i++;

  Contingency t;
  t.n.assign(rx.size(), std::vector<std::uint64_t>(ry.size(), 0));
  t.rows.assign(rx.size(), 0);
  t.cols.assign(ry.size(), 0);
  auto ix = x.begin();
  auto iy = y.begin();
  for (; ix != x.end(); ++ix, ++iy) {
    if (ix->first != iy->first) throw Error("partitions cover different node sets");
    const auto r = rx[ix->second], c = ry[iy->second];
    ++t.n[r][c];
    ++t.rows[r];
    ++t.cols[c];
    ++t.total;
  }
  return t;
}

namespace {

__int128 choose2(std::uint64_t k) {
  return static_cast<__int128>(k) * (static_cast<__int128>(k) - 1) / 2;
}

}  // namespace

PairCounts pair_counts(const Contingency& t) {
  __int128 together = 0, sum_rows = 0, sum_cols = 0;
  for (const auto& row : t.n)
    for (auto v : row) together += choose2(v);
  for (auto v : t.rows) sum_rows += choose2(v);
  for (auto v : t.cols) sum_cols += choose2(v);
  PairCounts p;
  p.a = static_cast<std::uint64_t>(together);
  p.c = static_cast<std::uint64_t>(sum_rows - together);
  p.d = static_cast<std::uint64_t>(sum_cols - together);
  p.b = static_cast<std::uint64_t>(choose2(t.total) - sum_rows - sum_cols + together);
  return p;
}

Rational ari_exact(const Partition& x, const Partition& y, Diagnostics* diag) {
  const auto t = contingency(x, y);
  if (t.total < 2) throw Error("ARI needs at least two nodes");
  const auto p = pair_counts(t);
  const __int128 index = p.a;
  const __int128 sx = static_cast<__int128>(p.a) + p.c;
  const __int128 sy = static_cast<__int128>(p.a) + p.d;
  const __int128 pairs = choose2(t.total);
  Rational r;
  r.num = 2 * (index * pairs - sx * sy);
  r.den = pairs * (sx + sy) - 2 * sx * sy;
  if (r.den == 0) {
    if (diag) diag->note("ARI denominator is zero (both partitions trivial); reporting 1");
    return {1, 1};
  }
  if (r.den < 0) {
    r.num = -r.num;
    r.den = -r.den;
  }
  return r;
}

double ari(const Partition& x, const Partition& y, Diagnostics* diag) { return ari_exact(x, y, diag).value(); }

double nmi(const Partition& x, const Partition& y, Diagnostics* diag) {
  const auto t = contingency(x, y);
  if (t.total == 0) throw Error("NMI of empty partitions");
  // Equal up to relabeling: every row and column has a single nonzero cell.
  bool bijective = t.rows.size() == t.cols.size();
  for (std::size_t i = 0; bijective && i < t.n.size(); ++i)
    bijective = std::count_if(t.n[i].begin(), t.n[i].end(), [](std::uint64_t v) { return v > 0; }) == 1;
  if (bijective) return 1.0;

  const long double n = static_cast<long double>(t.total);
  auto entropy = [&](const std::vector<std::uint64_t>& m) {
    long double h = 0;
    for (auto v : m)
      if (v) h -= (v / n) * std::log(v / n);
    return h;
  };
  const long double hx = entropy(t.rows), hy = entropy(t.cols);
  if (hx <= 0 || hy <= 0) {
    if (diag) diag->note("NMI undefined: one partition has a single cluster; reporting 0");
    return 0.0;
  }
  long double mi = 0;
  for (std::size_t i = 0; i < t.n.size(); ++i) {
    for (std::size_t j = 0; j < t.n[i].size(); ++j) {
      const auto v = t.n[i][j];
      if (!v) continue;
      mi += (v / n) * std::log(n * v / (static_cast<long double>(t.rows[i]) * t.cols[j]));
    }
  }
  const long double r = mi / std::sqrt(hx * hy);
  return static_cast<double>(std::clamp(r, 0.0L, 1.0L));
}

}  // namespace lexnet::partcmp

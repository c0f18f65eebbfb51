#include "lexnet/microstars.hpp"

#include <algorithm>
#include <cmath>

#include "lexnet/csv.hpp"
#include "lexnet/parallel.hpp"

namespace lexnet::micro {

std::string_view to_string(StarType t) {
  switch (t) {
    case StarType::sink: return "sink";
    case StarType::hinge: return "hinge";
    case StarType::source: return "source";
  }
  return {};
}

StarType classify_star(std::uint64_t delta_out, std::uint64_t delta_in, std::uint64_t ratio) {
  if (delta_out == 0 && delta_in == 0) throw Error("a hub without edges is not a star");
  const auto wide = [](std::uint64_t v) { return static_cast<unsigned __int128>(v); };
  if (wide(delta_in) >= wide(ratio) * delta_out) return StarType::sink;
  if (wide(delta_out) >= wide(ratio) * delta_in) return StarType::source;
  return StarType::hinge;
}

std::uint64_t spoke_limit(std::size_t spokes, double density_cap) {
  if (spokes < 2) return 0;
  return static_cast<std::uint64_t>(std::floor(density_cap * static_cast<double>(spokes - 1) + 1e-9));
}

std::vector<Star> extract_stars(const macro::Digraph& g, const StarOptions& opts) {
  const auto n = g.keys.size();
  std::vector<std::vector<std::uint32_t>> und(n), out(n), in(n);
  for (auto [s, t] : g.edges) {
    if (s == t) continue;
    out[s].push_back(t);
    in[t].push_back(s);
    und[s].push_back(t);
    und[t].push_back(s);
  }
  for (auto* lists : {&und, &out, &in}) {
    for (auto& v : *lists) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  }

  const unsigned chunks = std::max(1u, opts.jobs);
  std::vector<std::vector<Star>> found(chunks);
  parallel_for(chunks, chunks, [&](std::size_t chunk) {
    std::vector<std::int64_t> slot(n, -1);  // node -> position among current spokes
    for (std::size_t hub = chunk; hub < n; hub += chunks) {
      const auto& nb = und[hub];
      if (nb.size() + 1 < opts.min_size || nb.empty()) continue;
      std::vector<std::uint32_t> spokes = nb;
      for (std::size_t i = 0; i < spokes.size(); ++i) slot[spokes[i]] = static_cast<std::int64_t>(i);
      std::vector<std::uint64_t> count(spokes.size(), 0);
      std::vector<char> alive(spokes.size(), 1);
      for (std::size_t i = 0; i < spokes.size(); ++i)
        for (auto w : und[spokes[i]])
          if (slot[w] >= 0) ++count[i];
      std::size_t size = spokes.size();
      while (size + 1 >= opts.min_size) {
        const auto limit = spoke_limit(size, opts.density_cap);
        std::int64_t worst = -1;
        for (std::size_t i = 0; i < spokes.size(); ++i) {
          if (!alive[i] || count[i] <= limit) continue;
          if (worst < 0 || count[i] > count[static_cast<std::size_t>(worst)] ||
              (count[i] == count[static_cast<std::size_t>(worst)] &&
               g.keys[spokes[i]] < g.keys[spokes[static_cast<std::size_t>(worst)]]))
            worst = static_cast<std::int64_t>(i);
        }
        if (worst < 0) break;
        const auto wi = static_cast<std::size_t>(worst);
        alive[wi] = 0;
        slot[spokes[wi]] = -1;
        --size;
        for (auto w : und[spokes[wi]])
          if (slot[w] >= 0) --count[static_cast<std::size_t>(slot[w])];
      }
      if (size + 1 >= opts.min_size) {
        Star s;
        s.hub = g.keys[hub];
        std::uint64_t adj = 0;
        for (std::size_t i = 0; i < spokes.size(); ++i) {
          if (!alive[i]) continue;
          s.spokes.push_back(g.keys[spokes[i]]);
          adj += count[i];
        }
        std::sort(s.spokes.begin(), s.spokes.end());
        s.n = size + 1;
        s.m_s = adj / 2;
        s.delta_out = out[hub].size();
        s.delta_in = in[hub].size();
        s.type = classify_star(s.delta_out, s.delta_in, opts.ratio);
        found[chunk].push_back(std::move(s));
      }
      for (auto w : spokes) slot[w] = -1;
    }
  });

  std::vector<Star> stars;
  for (auto& part : found)
    for (auto& s : part) stars.push_back(std::move(s));
  std::sort(stars.begin(), stars.end(), [](const Star& a, const Star& b) {
    return a.n != b.n ? a.n > b.n : a.hub < b.hub;
  });
  return stars;
}

std::string stars_csv(const std::vector<Star>& stars, std::size_t top_k) {
  std::string out;
  csv::append_row(out, {"hub", "n", "m_s", "delta_out", "delta_in", "type", "heading"});
  for (std::size_t i = 0; i < stars.size() && i < top_k; ++i) {
    const auto& s = stars[i];
    csv::append_row(out, {s.hub, std::to_string(s.n), std::to_string(s.m_s), std::to_string(s.delta_out),
                          std::to_string(s.delta_in), std::string(to_string(s.type)), s.heading});
  }
  return out;
}

}  // namespace lexnet::micro

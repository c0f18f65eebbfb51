#pragma once

#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lexnet/corpus.hpp"

namespace testing {

inline std::string random_text(std::mt19937& rng, std::size_t min_chars) {
  static const char* words[] = {"agency", "shall", "report", "annual", "permit", "holder", "notice", "within",
                                "days", "federal", "register", "fee", "reserve", "bank", "credit", "union",
                                "state", "tax", "credit", "insured", "deposit", "board", "rule", "order"};
  std::string out;
  while (out.size() < min_chars) {
    if (!out.empty()) out += ' ';
    out += words[rng() % (sizeof words / sizeof *words)];
  }
  return out;
}

// Changes `count` letters in distinct positions away from the first four.
inline std::string perturb(std::string text, std::mt19937& rng, int count) {
  for (int i = 0; i < count; ++i) {
    const std::size_t pos = 4 + rng() % (text.size() - 4);
    text[pos] = text[pos] == 'q' ? 'x' : 'q';
  }
  return text;
}

struct AlignFixture {
  lexnet::corpus::Snapshot a, b;
  std::map<std::string, std::pair<std::string, int>> expected;  // from -> (to, pass)
};

// Two snapshots of one title with four chapters. Every seqitem of the first
// year carries a planted edit whose expected pass is recorded.
inline AlignFixture alignment_fixture(unsigned seed = 1) {
  using namespace lexnet::corpus;
  std::mt19937 rng(seed);
  AlignFixture f;
  f.a.year = 2000;
  f.b.year = 2001;
  CorpusNode ra, rb;
  ra.key = rb.key = "T";
  ra.level = rb.level = "title";
  for (int c = 0; c < 4; ++c) {
    CorpusNode ca, cb;
    ca.key = cb.key = "T_c" + std::to_string(c);
    ca.level = cb.level = "chapter";
    ca.level_depth = cb.level_depth = 1;
    for (int s = 0; s < 10; ++s) {
      CorpusNode sa;
      sa.key = ca.key + "_s" + std::to_string(s);
      sa.level_kind = lexnet::LevelKind::seqitem;
      sa.level_depth = 2;
      CorpusNode sb = sa;
      const int kind = (c * 10 + s) % 5;
      switch (kind) {
        case 0:  // untouched long text
          sa.text = sb.text = random_text(rng, 80);
          f.expected[sa.key] = {sb.key, 1};
          break;
        case 1:  // renamed, same long text
          sa.text = sb.text = random_text(rng, 90);
          sb.key = sa.key + "_renamed";
          f.expected[sa.key] = {sb.key, 1};
          break;
        case 2:  // short text, same key
          sa.text = sb.text = "Reserved " + std::to_string(c) + "." + std::to_string(s);
          f.expected[sa.key] = {sb.key, 2};
          break;
        case 3: {  // text extended by a shorter addition
          sa.text = random_text(rng, 100);
          sb.text = *sa.text + " " + random_text(rng, 30);
          f.expected[sa.key] = {sb.key, 3};
          break;
        }
        case 4:  // renamed and slightly edited
          sa.text = random_text(rng, 120);
          sb.text = perturb(*sa.text, rng, 3);
          sb.key = sa.key + "_moved";
          f.expected[sa.key] = {sb.key, 4};
          break;
      }
      ca.children.push_back(sa);
      cb.children.push_back(sb);
    }
    ra.children.push_back(ca);
    rb.children.push_back(cb);
  }
  f.a.trees.push_back(ra);
  f.b.trees.push_back(rb);
  f.a.provenance["T"] = f.b.provenance["T"] = Provenance::native;
  return f;
}

}  // namespace testing

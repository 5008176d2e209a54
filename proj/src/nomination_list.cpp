#include "vnom/nomination_list.hpp"

#include <algorithm>
#include <numeric>

#include "vnom/error.hpp"

namespace vnom {

std::string_view scheme_tag(Scheme s) {
  switch (s) {
    case Scheme::kCanonical:
      return "lc";
    case Scheme::kCanonicalSampling:
      return "lcs";
    case Scheme::kSpectral:
      return "lp";
    case Scheme::kExtendedSpectral:
      return "lep";
    case Scheme::kChance:
      return "chance";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view tag) {
  for (Scheme s : {Scheme::kCanonical, Scheme::kCanonicalSampling, Scheme::kSpectral,
                   Scheme::kExtendedSpectral, Scheme::kChance}) {
    if (scheme_tag(s) == tag) {
      return s;
    }
  }
  throw ValidationError("unknown scheme '" + std::string(tag) +
                        "' (expected lc, lcs, lp, lep or chance)");
}

NominationList rank_by_score(Scheme scheme, std::span<const Vertex> vertices,
                             std::span<const double> scores) {
  if (vertices.size() != scores.size()) {
    throw ValidationError("vertex and score vectors differ in length");
  }
  std::vector<std::size_t> idx(vertices.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) {
      return scores[a] > scores[b];
    }
    return vertices[a] < vertices[b];
  });
  NominationList out;
  out.scheme = scheme;
  out.order.reserve(idx.size());
  out.scores.reserve(idx.size());
  for (std::size_t i : idx) {
    out.order.push_back(vertices[i]);
    out.scores.push_back(scores[i]);
  }
  return out;
}

NominationList rank_by_score_random_ties(Scheme scheme, std::span<const Vertex> vertices,
                                         std::span<const double> scores, Rng& rng) {
  NominationList out = rank_by_score(scheme, vertices, scores);
  std::size_t begin = 0;
  while (begin < out.size()) {
    std::size_t end = begin + 1;
    while (end < out.size() && out.scores[end] == out.scores[begin]) {
      ++end;
    }
    shuffle(out.order.begin() + begin, out.order.begin() + end, rng);
    begin = end;
  }
  return out;
}

}  // namespace vnom

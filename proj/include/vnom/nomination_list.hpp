#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vnom/rng.hpp"
#include "vnom/sbm.hpp"

namespace vnom {

enum class Scheme { kCanonical, kCanonicalSampling, kSpectral, kExtendedSpectral, kChance };

std::string_view scheme_tag(Scheme s);
/// Accepts "lc", "lcs", "lp", "lep", "chance".
Scheme parse_scheme(std::string_view tag);

/// An ordering of the ambiguous vertices, best candidate first, with the
/// score each scheme ranked by. Scores are nonincreasing along the list.
struct NominationList {
  Scheme scheme = Scheme::kChance;
  std::vector<Vertex> order;
  std::vector<double> scores;

  std::size_t size() const { return order.size(); }
};

/// Sorts `vertices` by nonincreasing score; equal scores go in ascending
/// vertex id.
NominationList rank_by_score(Scheme scheme, std::span<const Vertex> vertices,
                             std::span<const double> scores);

/// As rank_by_score, but runs of equal scores are shuffled uniformly.
NominationList rank_by_score_random_ties(Scheme scheme, std::span<const Vertex> vertices,
                                         std::span<const double> scores, Rng& rng);

}  // namespace vnom

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "selbox/common.hpp"
#include "selbox/concepts.hpp"

namespace selbox {

// A sampled finite interpretation: the root concept covers the whole
// domain, every other concept is a random subset of a random parent, and
// roles are random pair sets.  TBoxes generated from it state exact
// counting proportions, so they are satisfiable by construction.
struct GroundTruth {
  std::size_t domain = 0;
  std::vector<std::string> concept_names; // C00, C01, ...
  std::vector<std::string> role_names;    // r0, r1, ...
  // Bitmask per concept over domain elements (64 elements per word).
  std::vector<std::vector<std::uint64_t>> extents;
  // parents[i] = index of the sampled parent; npos for the root.
  std::vector<std::size_t> parents;
  // successors[role][element] = bitmask of role-successors.
  std::vector<std::vector<std::vector<std::uint64_t>>> successors;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct GenConfig {
  std::size_t concepts = 20;
  std::size_t roles = 2;
  std::size_t domain = 1000;
  std::uint64_t seed = 0;
  // 0 keeps point probabilities [p,p]; s > 0 widens to [p-s, p+s] clamped
  // into [0,1].
  double widen = 0.0;
};

struct GenResult {
  GroundTruth truth;
  TBox tbox;
};

// Enumerates every supported conditional shape over the sampled signature
// ((B|A), (B|A1 and A2), (B|some r A), (some r B|A)), with probabilities
// counted in the ground truth.  Empty-body conditionals are dropped, as are
// disjointness statements already implied by disjoint ancestors.
GenResult generate(const GenConfig& cfg);

// The subset of conditionals that mention no role.
TBox role_free_projection(const TBox& t);

// Membership bitmask of an arbitrary concept under the ground truth, and
// the counting proportion |head and body| / |body| (requires the body
// nonempty).
std::vector<std::uint64_t> truth_extension(const GroundTruth& gt, const Concept& c);
std::size_t truth_count(const GroundTruth& gt, const Concept& c);
double truth_proportion(const GroundTruth& gt, const Concept& head, const Concept& body);

std::string ground_truth_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const std::string& text);
void save_ground_truth(const GroundTruth& gt, const std::string& path);
GroundTruth load_ground_truth(const std::string& path);

} // namespace selbox

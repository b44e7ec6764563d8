#include "selbox/generate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "selbox/rng.hpp"

namespace selbox {

namespace {

using Bits = std::vector<std::uint64_t>;

Bits make_bits(std::size_t m) { return Bits((m + 63) / 64, 0); }

void set_bit(Bits& b, std::size_t i) { b[i >> 6] |= std::uint64_t{1} << (i & 63); }

bool test_bit(const Bits& b, std::size_t i) {
  return (b[i >> 6] >> (i & 63)) & 1u;
}

std::size_t count_bits(const Bits& b) {
  std::size_t n = 0;
  for (std::uint64_t w : b) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t count_and(const Bits& a, const Bits& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    n += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  return n;
}

bool intersects(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if ((a[i] & b[i]) != 0) return true;
  return false;
}

std::string index_name(char prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*zu", prefix, width, i);
  return buf;
}

int name_width(std::size_t count, int min_width) {
  int digits = 1;
  for (std::size_t v = count > 0 ? count - 1 : 0; v >= 10; v /= 10) ++digits;
  return std::max(digits, min_width);
}

std::size_t find_name(const std::vector<std::string>& names, const std::string& n,
                      const char* what) {
  auto it = std::find(names.begin(), names.end(), n);
  if (it == names.end())
    throw UserError(std::string(what) + " not found in the ground truth: " + n);
  return static_cast<std::size_t>(it - names.begin());
}

bool mentions_role(const Concept& c) {
  switch (c.kind()) {
  case ConceptKind::Exists:
    return true;
  case ConceptKind::And:
    return mentions_role(c.left()) || mentions_role(c.right());
  default:
    return false;
  }
}

} // namespace

GenResult generate(const GenConfig& cfg) {
  if (cfg.concepts < 2) throw UserError("generation needs at least 2 concepts");
  if (cfg.domain < 10) throw UserError("generation needs a domain of at least 10");
  if (!(cfg.widen >= 0.0 && cfg.widen <= 1.0))
    throw UserError("widen slack must lie in [0, 1]");

  const std::size_t k = cfg.concepts;
  const std::size_t m = cfg.domain;
  GroundTruth gt;
  gt.domain = m;
  const int cw = name_width(k, 2);
  const int rw = name_width(cfg.roles, 1);
  for (std::size_t i = 0; i < k; ++i)
    gt.concept_names.push_back(index_name('C', i, cw));
  for (std::size_t j = 0; j < cfg.roles; ++j)
    gt.role_names.push_back(index_name('r', j, rw));

  Rng rng(mix_seed(cfg.seed, 2));

  Bits root = make_bits(m);
  for (std::size_t e = 0; e < m; ++e) set_bit(root, e);
  gt.extents.push_back(std::move(root));
  gt.parents.push_back(GroundTruth::npos);
  for (std::size_t i = 1; i < k; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
      const auto parent = static_cast<std::size_t>(rng.below(i));
      const double q = rng.uniform(0.2, 0.8);
      Bits child = make_bits(m);
      bool nonempty = false;
      for (std::size_t e = 0; e < m; ++e) {
        if (!test_bit(gt.extents[parent], e)) continue;
        if (rng.bernoulli(q)) {
          set_bit(child, e);
          nonempty = true;
        }
      }
      if (nonempty) {
        gt.extents.push_back(std::move(child));
        gt.parents.push_back(parent);
        ok = true;
      }
    }
    if (!ok)
      throw UserError("concept sampling kept producing empty extensions; try another seed");
  }

  for (std::size_t r = 0; r < cfg.roles; ++r) {
    std::vector<Bits> succ(m);
    for (std::size_t a = 0; a < m; ++a) {
      succ[a] = make_bits(m);
      const auto ns = static_cast<std::size_t>(rng.below(5)); // 0..4 successors
      for (std::size_t s = 0; s < ns; ++s)
        set_bit(succ[a], static_cast<std::size_t>(rng.below(m)));
    }
    gt.successors.push_back(std::move(succ));
  }

  // Extension of (some r Ci) per role and concept.
  std::vector<std::vector<Bits>> exists_ext(cfg.roles, std::vector<Bits>(k));
  for (std::size_t r = 0; r < cfg.roles; ++r) {
    for (std::size_t i = 0; i < k; ++i) {
      Bits e = make_bits(m);
      for (std::size_t a = 0; a < m; ++a)
        if (intersects(gt.successors[r][a], gt.extents[i])) set_bit(e, a);
      exists_ext[r][i] = std::move(e);
    }
  }

  std::vector<std::vector<std::size_t>> chain(k);
  for (std::size_t i = 0; i < k; ++i) {
    chain[i].push_back(i);
    while (gt.parents[chain[i].back()] != GroundTruth::npos)
      chain[i].push_back(gt.parents[chain[i].back()]);
  }
  // (B|A)[0] is redundant when some ancestor pair other than (A, B) is
  // already disjoint; that statement subsumes this one.
  auto redundant_zero = [&](std::size_t a, std::size_t b) {
    for (std::size_t pa : chain[a])
      for (std::size_t pb : chain[b]) {
        if (pa == a && pb == b) continue;
        if (!intersects(gt.extents[pa], gt.extents[pb])) return true;
      }
    return false;
  };

  TBox t;
  auto emit = [&](Concept body, Concept head, std::size_t body_count,
                  std::size_t both_count) {
    const double p =
        static_cast<double>(both_count) / static_cast<double>(body_count);
    double lo = p, hi = p;
    if (cfg.widen > 0.0) {
      lo = std::max(0.0, p - cfg.widen);
      hi = std::min(1.0, p + cfg.widen);
    }
    t.conditionals.push_back(make_conditional(std::move(body), std::move(head), lo, hi));
  };

  auto name = [&](std::size_t i) { return Concept::atomic(gt.concept_names[i]); };

  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t ca = count_bits(gt.extents[a]);
    for (std::size_t b = 0; b < k; ++b) {
      if (a == b) continue;
      const std::size_t both = count_and(gt.extents[a], gt.extents[b]);
      if (both == 0 && redundant_zero(a, b)) continue;
      emit(name(a), name(b), ca, both);
    }
  }
  for (std::size_t a1 = 0; a1 < k; ++a1) {
    for (std::size_t a2 = a1 + 1; a2 < k; ++a2) {
      Bits inter = make_bits(m);
      for (std::size_t w = 0; w < inter.size(); ++w)
        inter[w] = gt.extents[a1][w] & gt.extents[a2][w];
      const std::size_t bc = count_bits(inter);
      if (bc == 0) continue; // proportion undefined
      for (std::size_t b = 0; b < k; ++b) {
        if (b == a1 || b == a2) continue;
        emit(Concept::conj(name(a1), name(a2)), name(b), bc,
             count_and(inter, gt.extents[b]));
      }
    }
  }
  for (std::size_t r = 0; r < cfg.roles; ++r) {
    for (std::size_t a = 0; a < k; ++a) {
      const std::size_t bc = count_bits(exists_ext[r][a]);
      if (bc == 0) continue;
      for (std::size_t b = 0; b < k; ++b)
        emit(Concept::exists(gt.role_names[r], name(a)), name(b), bc,
             count_and(exists_ext[r][a], gt.extents[b]));
    }
  }
  for (std::size_t r = 0; r < cfg.roles; ++r) {
    for (std::size_t a = 0; a < k; ++a) {
      const std::size_t ca = count_bits(gt.extents[a]);
      for (std::size_t b = 0; b < k; ++b)
        emit(name(a), Concept::exists(gt.role_names[r], name(b)), ca,
             count_and(gt.extents[a], exists_ext[r][b]));
    }
  }

  return {std::move(gt), std::move(t)};
}

TBox role_free_projection(const TBox& t) {
  TBox out;
  for (const Conditional& c : t.conditionals)
    if (!mentions_role(c.head) && !mentions_role(c.body))
      out.conditionals.push_back(c);
  return out;
}

std::vector<std::uint64_t> truth_extension(const GroundTruth& gt, const Concept& c) {
  switch (c.kind()) {
  case ConceptKind::Top: {
    Bits all = make_bits(gt.domain);
    for (std::size_t e = 0; e < gt.domain; ++e) set_bit(all, e);
    return all;
  }
  case ConceptKind::Bottom:
    return make_bits(gt.domain);
  case ConceptKind::Atomic:
    return gt.extents[find_name(gt.concept_names, c.name(), "concept")];
  case ConceptKind::And: {
    Bits a = truth_extension(gt, c.left());
    const Bits b = truth_extension(gt, c.right());
    for (std::size_t w = 0; w < a.size(); ++w) a[w] &= b[w];
    return a;
  }
  case ConceptKind::Exists: {
    const std::size_t r = find_name(gt.role_names, c.role(), "role");
    const Bits filler = truth_extension(gt, c.left());
    Bits out = make_bits(gt.domain);
    for (std::size_t a = 0; a < gt.domain; ++a)
      if (intersects(gt.successors[r][a], filler)) set_bit(out, a);
    return out;
  }
  }
  throw InternalError("unhandled concept kind");
}

std::size_t truth_count(const GroundTruth& gt, const Concept& c) {
  return count_bits(truth_extension(gt, c));
}

double truth_proportion(const GroundTruth& gt, const Concept& head, const Concept& body) {
  const Bits be = truth_extension(gt, body);
  const std::size_t bc = count_bits(be);
  if (bc == 0) throw UserError("body is empty in the ground truth");
  const Bits he = truth_extension(gt, head);
  return static_cast<double>(count_and(be, he)) / static_cast<double>(bc);
}

std::string ground_truth_json(const GroundTruth& gt) {
  nlohmann::ordered_json j;
  j["domain"] = gt.domain;
  nlohmann::ordered_json concepts = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < gt.concept_names.size(); ++i) {
    std::vector<std::size_t> ids;
    for (std::size_t e = 0; e < gt.domain; ++e)
      if (test_bit(gt.extents[i], e)) ids.push_back(e);
    concepts[gt.concept_names[i]] = ids;
  }
  j["concepts"] = std::move(concepts);
  nlohmann::ordered_json parents = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < gt.concept_names.size(); ++i)
    if (gt.parents[i] != GroundTruth::npos)
      parents[gt.concept_names[i]] = gt.concept_names[gt.parents[i]];
  j["parents"] = std::move(parents);
  nlohmann::ordered_json roles = nlohmann::ordered_json::object();
  for (std::size_t r = 0; r < gt.role_names.size(); ++r) {
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < gt.domain; ++a)
      for (std::size_t b = 0; b < gt.domain; ++b)
        if (test_bit(gt.successors[r][a], b)) pairs.push_back({a, b});
    roles[gt.role_names[r]] = std::move(pairs);
  }
  j["roles"] = std::move(roles);
  return j.dump(2) + "\n";
}

GroundTruth ground_truth_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UserError(std::string("bad ground-truth JSON: ") + e.what());
  }
  try {
    GroundTruth gt;
    gt.domain = j.at("domain").get<std::size_t>();
    if (gt.domain == 0) throw UserError("ground truth has an empty domain");
    for (const auto& [name, ids] : j.at("concepts").items()) {
      gt.concept_names.push_back(name);
      Bits ext = make_bits(gt.domain);
      for (const auto& id : ids) {
        const auto e = id.get<std::size_t>();
        if (e >= gt.domain) throw UserError("element id outside the domain: " + std::to_string(e));
        set_bit(ext, e);
      }
      gt.extents.push_back(std::move(ext));
    }
    gt.parents.assign(gt.concept_names.size(), GroundTruth::npos);
    if (j.contains("parents")) {
      for (const auto& [child, parent] : j.at("parents").items()) {
        const std::size_t ci = find_name(gt.concept_names, child, "concept");
        gt.parents[ci] = find_name(gt.concept_names, parent.get<std::string>(), "concept");
      }
    }
    if (j.contains("roles")) {
      for (const auto& [rname, pairs] : j.at("roles").items()) {
        gt.role_names.push_back(rname);
        std::vector<Bits> succ(gt.domain, make_bits(gt.domain));
        for (const auto& pair : pairs) {
          const auto a = pair.at(0).get<std::size_t>();
          const auto b = pair.at(1).get<std::size_t>();
          if (a >= gt.domain || b >= gt.domain)
            throw UserError("role pair outside the domain");
          set_bit(succ[a], b);
        }
        gt.successors.push_back(std::move(succ));
      }
    }
    return gt;
  } catch (const nlohmann::json::exception& e) {
    throw UserError(std::string("bad ground-truth JSON: ") + e.what());
  }
}

void save_ground_truth(const GroundTruth& gt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UserError("cannot write file: " + path);
  out << ground_truth_json(gt);
  if (!out) throw UserError("failed writing file: " + path);
}

GroundTruth load_ground_truth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ground_truth_from_json(buf.str());
}

} // namespace selbox

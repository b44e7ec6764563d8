#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selbox/boxes.hpp"
#include "selbox/concepts.hpp"

namespace selbox {

// Whether role maps train their diagonal scaling or keep it frozen at the
// identity (offset-only ablation).
enum class RelationMode : std::uint8_t { Affine, Translation };

std::string_view relation_mode_name(RelationMode m);
RelationMode relation_mode_from_name(std::string_view name);

struct EmbeddingMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  double beta = 10.0;
  RelationMode relation_mode = RelationMode::Affine;
};

// Box embedding of a signature.  Every concept owns a lower corner m and a
// log side length delta (upper corner = m + exp(delta), so boxes can never
// invert); every role owns an affine map x -> exp(log_diag) * x + b.
//
// All parameters live in one flat vector laid out as
//   concept i: [m (dim), delta (dim)] at 2*dim*i
//   role j:    [log_diag (dim), b (dim)] after all concepts
// so the optimizer and gradient tables can mirror the layout directly.
class BoxEmbedding {
public:
  BoxEmbedding() = default;
  BoxEmbedding(int dim, std::vector<std::string> concept_names,
               std::vector<std::string> role_names);

  int dim() const { return dim_; }
  const std::vector<std::string>& concept_names() const { return concept_names_; }
  const std::vector<std::string>& role_names() const { return role_names_; }
  std::size_t num_concepts() const { return concept_names_.size(); }
  std::size_t num_roles() const { return role_names_.size(); }

  std::optional<std::size_t> concept_index(std::string_view name) const;
  std::optional<std::size_t> role_index(std::string_view name) const;

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t num_params() const { return params_.size(); }

  std::size_t concept_offset(std::size_t i) const { return 2 * dim_ * i; }
  std::size_t role_offset(std::size_t j) const {
    return 2 * dim_ * (concept_names_.size() + j);
  }

  std::span<double> concept_lower(std::size_t i);
  std::span<const double> concept_lower(std::size_t i) const;
  std::span<double> concept_delta(std::size_t i);
  std::span<const double> concept_delta(std::size_t i) const;
  std::span<double> role_log_diag(std::size_t j);
  std::span<const double> role_log_diag(std::size_t j) const;
  std::span<double> role_b(std::size_t j);
  std::span<const double> role_b(std::size_t j) const;

  Box concept_box(std::size_t i) const;
  AffineMap role_map(std::size_t j) const;

  EmbeddingMeta meta;

private:
  int dim_ = 0;
  std::vector<std::string> concept_names_;
  std::vector<std::string> role_names_;
  std::map<std::string, std::size_t, std::less<>> concept_index_;
  std::map<std::string, std::size_t, std::less<>> role_index_;
  std::vector<double> params_;
};

// True when every name of the signature has an entry.
bool covers(const BoxEmbedding& e, const Signature& sig);

// JSON schema:
//   {"dim": n,
//    "concepts": {name: {"m": [...], "delta": [...]}},
//    "roles":    {name: {"log_diag": [...], "b": [...]}},
//    "meta":     {"seed": ..., "epochs": ..., "beta": ..., "relation_mode": ...}}
// Numbers are written with 17 significant digits so values round-trip
// exactly.
std::string embedding_to_json(const BoxEmbedding& e);
BoxEmbedding embedding_from_json(std::string_view json_text);
void save_embedding(const BoxEmbedding& e, const std::filesystem::path& path);
BoxEmbedding load_embedding(const std::filesystem::path& path);

} // namespace selbox

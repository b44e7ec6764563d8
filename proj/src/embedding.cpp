#include "selbox/embedding.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "selbox/common.hpp"

namespace selbox {

std::string_view relation_mode_name(RelationMode m) {
  return m == RelationMode::Affine ? "affine" : "translation";
}

RelationMode relation_mode_from_name(std::string_view name) {
  if (name == "affine") return RelationMode::Affine;
  if (name == "translation") return RelationMode::Translation;
  throw UserError("unknown relation mode '" + std::string(name) +
                  "' (expected 'affine' or 'translation')");
}

BoxEmbedding::BoxEmbedding(int dim, std::vector<std::string> concept_names,
                           std::vector<std::string> role_names)
    : dim_(dim),
      concept_names_(std::move(concept_names)),
      role_names_(std::move(role_names)) {
  if (dim <= 0) throw UserError("embedding dimension must be positive");
  for (std::size_t i = 0; i < concept_names_.size(); ++i)
    if (!concept_index_.emplace(concept_names_[i], i).second)
      throw UserError("duplicate concept name '" + concept_names_[i] + "'");
  for (std::size_t j = 0; j < role_names_.size(); ++j)
    if (!role_index_.emplace(role_names_[j], j).second)
      throw UserError("duplicate role name '" + role_names_[j] + "'");
  params_.assign(2 * static_cast<std::size_t>(dim_) *
                     (concept_names_.size() + role_names_.size()),
                 0.0);
}

std::optional<std::size_t> BoxEmbedding::concept_index(std::string_view name) const {
  auto it = concept_index_.find(name);
  if (it == concept_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> BoxEmbedding::role_index(std::string_view name) const {
  auto it = role_index_.find(name);
  if (it == role_index_.end()) return std::nullopt;
  return it->second;
}

std::span<double> BoxEmbedding::concept_lower(std::size_t i) {
  return {params_.data() + concept_offset(i), static_cast<std::size_t>(dim_)};
}
std::span<const double> BoxEmbedding::concept_lower(std::size_t i) const {
  return {params_.data() + concept_offset(i), static_cast<std::size_t>(dim_)};
}
std::span<double> BoxEmbedding::concept_delta(std::size_t i) {
  return {params_.data() + concept_offset(i) + dim_, static_cast<std::size_t>(dim_)};
}
std::span<const double> BoxEmbedding::concept_delta(std::size_t i) const {
  return {params_.data() + concept_offset(i) + dim_, static_cast<std::size_t>(dim_)};
}
std::span<double> BoxEmbedding::role_log_diag(std::size_t j) {
  return {params_.data() + role_offset(j), static_cast<std::size_t>(dim_)};
}
std::span<const double> BoxEmbedding::role_log_diag(std::size_t j) const {
  return {params_.data() + role_offset(j), static_cast<std::size_t>(dim_)};
}
std::span<double> BoxEmbedding::role_b(std::size_t j) {
  return {params_.data() + role_offset(j) + dim_, static_cast<std::size_t>(dim_)};
}
std::span<const double> BoxEmbedding::role_b(std::size_t j) const {
  return {params_.data() + role_offset(j) + dim_, static_cast<std::size_t>(dim_)};
}

Box BoxEmbedding::concept_box(std::size_t i) const {
  Box b;
  auto m = concept_lower(i);
  auto d = concept_delta(i);
  b.lower.assign(m.begin(), m.end());
  b.upper.resize(m.size());
  for (std::size_t k = 0; k < m.size(); ++k)
    b.upper[k] = m[k] + std::exp(d[k]);
  return b;
}

AffineMap BoxEmbedding::role_map(std::size_t j) const {
  AffineMap t;
  auto g = role_log_diag(j);
  auto b = role_b(j);
  t.log_diag.assign(g.begin(), g.end());
  t.offset.assign(b.begin(), b.end());
  return t;
}

bool covers(const BoxEmbedding& e, const Signature& sig) {
  for (const auto& name : sig.concepts)
    if (!e.concept_index(name)) return false;
  for (const auto& name : sig.roles)
    if (!e.role_index(name)) return false;
  return true;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void append_array(std::string& out, std::span<const double> values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    append_number(out, values[i]);
  }
  out += ']';
}

std::vector<double> read_array(const nlohmann::json& j, const std::string& where,
                               std::size_t expected) {
  if (!j.is_array() || j.size() != expected)
    throw UserError("embedding file: " + where + " must be an array of length " +
                    std::to_string(expected));
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : j) {
    if (!v.is_number()) throw UserError("embedding file: non-numeric entry in " + where);
    out.push_back(v.get<double>());
  }
  return out;
}

} // namespace

std::string embedding_to_json(const BoxEmbedding& e) {
  // Written by hand so every double gets exactly 17 significant digits;
  // generic emitters choose their own shortest form.
  std::string out;
  out += "{\n  \"dim\": " + std::to_string(e.dim()) + ",\n  \"concepts\": {";
  for (std::size_t i = 0; i < e.num_concepts(); ++i) {
    out += (i ? ",\n    " : "\n    ");
    out += '"' + e.concept_names()[i] + "\": {\"m\": ";
    append_array(out, e.concept_lower(i));
    out += ", \"delta\": ";
    append_array(out, e.concept_delta(i));
    out += '}';
  }
  out += e.num_concepts() ? "\n  },\n" : "},\n";
  out += "  \"roles\": {";
  for (std::size_t j = 0; j < e.num_roles(); ++j) {
    out += (j ? ",\n    " : "\n    ");
    out += '"' + e.role_names()[j] + "\": {\"log_diag\": ";
    append_array(out, e.role_log_diag(j));
    out += ", \"b\": ";
    append_array(out, e.role_b(j));
    out += '}';
  }
  out += e.num_roles() ? "\n  },\n" : "},\n";
  out += "  \"meta\": {\"seed\": " + std::to_string(e.meta.seed) +
         ", \"epochs\": " + std::to_string(e.meta.epochs) + ", \"beta\": ";
  append_number(out, e.meta.beta);
  out += ", \"relation_mode\": \"" + std::string(relation_mode_name(e.meta.relation_mode)) +
         "\"}\n}\n";
  return out;
}

BoxEmbedding embedding_from_json(std::string_view json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw UserError("embedding file: invalid JSON");
  if (!j.is_object() || !j.contains("dim") || !j.contains("concepts") ||
      !j.contains("roles"))
    throw UserError("embedding file: expected dim, concepts and roles");
  int dim = j.at("dim").get<int>();
  if (dim <= 0) throw UserError("embedding file: dim must be positive");

  std::vector<std::string> concept_names, role_names;
  for (const auto& [name, entry] : j.at("concepts").items()) {
    (void)entry;
    concept_names.push_back(name);
  }
  for (const auto& [name, entry] : j.at("roles").items()) {
    (void)entry;
    role_names.push_back(name);
  }
  // nlohmann objects iterate in key order, which keeps the layout stable
  // regardless of the order in the file.
  BoxEmbedding e(dim, std::move(concept_names), std::move(role_names));

  for (std::size_t i = 0; i < e.num_concepts(); ++i) {
    const auto& entry = j.at("concepts").at(e.concept_names()[i]);
    auto m = read_array(entry.at("m"), "concepts." + e.concept_names()[i] + ".m",
                        static_cast<std::size_t>(dim));
    auto d = read_array(entry.at("delta"), "concepts." + e.concept_names()[i] + ".delta",
                        static_cast<std::size_t>(dim));
    std::copy(m.begin(), m.end(), e.concept_lower(i).begin());
    std::copy(d.begin(), d.end(), e.concept_delta(i).begin());
  }
  for (std::size_t k = 0; k < e.num_roles(); ++k) {
    const auto& entry = j.at("roles").at(e.role_names()[k]);
    auto g = read_array(entry.at("log_diag"), "roles." + e.role_names()[k] + ".log_diag",
                        static_cast<std::size_t>(dim));
    auto b = read_array(entry.at("b"), "roles." + e.role_names()[k] + ".b",
                        static_cast<std::size_t>(dim));
    std::copy(g.begin(), g.end(), e.role_log_diag(k).begin());
    std::copy(b.begin(), b.end(), e.role_b(k).begin());
  }

  if (j.contains("meta")) {
    const auto& meta = j.at("meta");
    if (meta.contains("seed")) e.meta.seed = meta.at("seed").get<std::uint64_t>();
    if (meta.contains("epochs")) e.meta.epochs = meta.at("epochs").get<int>();
    if (meta.contains("beta")) e.meta.beta = meta.at("beta").get<double>();
    if (meta.contains("relation_mode"))
      e.meta.relation_mode =
          relation_mode_from_name(meta.at("relation_mode").get<std::string>());
  }
  return e;
}

void save_embedding(const BoxEmbedding& e, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UserError("cannot write " + path.string());
  out << embedding_to_json(e);
  if (!out) throw UserError("write failed: " + path.string());
}

BoxEmbedding load_embedding(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return embedding_from_json(buf.str());
  } catch (const UserError& e) {
    throw UserError(path.string() + ": " + e.what());
  }
}

} // namespace selbox

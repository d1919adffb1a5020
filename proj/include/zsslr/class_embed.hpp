#pragma once

#include <span>
#include <string>
#include <vector>

#include "zsslr/data_model.hpp"
#include "zsslr/error.hpp"

namespace zsslr {

enum class EmbeddingKind { AttrOnly, TextOnly, Combined };

/// Which class description feeds rho(c). `text_dim` is the reduced text width;
/// a reduced width equal to the raw text width means the raw vector is used
/// directly (no reduction matrix).
struct EmbeddingMode {
  EmbeddingKind kind = EmbeddingKind::AttrOnly;
  Eigen::Index text_dim = 64;

  bool uses_attributes() const { return kind != EmbeddingKind::TextOnly; }
  bool uses_text() const { return kind != EmbeddingKind::AttrOnly; }
  bool reduces_text(Eigen::Index raw_text_dim) const { return uses_text() && text_dim != raw_text_dim; }

  /// Offset of the text block inside rho(c).
  Eigen::Index text_offset(Eigen::Index attribute_count) const {
    return kind == EmbeddingKind::Combined ? attribute_count : 0;
  }

  Eigen::Index embedding_length(Eigen::Index attribute_count) const {
    switch (kind) {
      case EmbeddingKind::AttrOnly: return attribute_count;
      case EmbeddingKind::TextOnly: return text_dim;
      case EmbeddingKind::Combined: return attribute_count + text_dim;
    }
    return 0;
  }
};

inline std::string to_string(EmbeddingKind k) {
  switch (k) {
    case EmbeddingKind::AttrOnly: return "attr";
    case EmbeddingKind::TextOnly: return "text";
    case EmbeddingKind::Combined: return "combined";
  }
  return "attr";
}

inline EmbeddingKind embedding_kind_from_string(const std::string& s) {
  if (s == "attr") return EmbeddingKind::AttrOnly;
  if (s == "text") return EmbeddingKind::TextOnly;
  if (s == "combined") return EmbeddingKind::Combined;
  throw Error(ErrorKind::InvalidConfig, "embedding must be attr, text or combined, got \"" + s + "\"");
}

/// Linear, bias-free map from raw text (D_text) to the reduced width (d_t):
/// reduced = matrix^T * text.
struct ReductionMatrix {
  Matrix matrix;  // D_text x d_t
};

struct ClassEmbedding {
  std::string class_id;
  Vector vector;
};

inline ClassEmbedding compose_embedding(const ClassDescriptor& c, const EmbeddingMode& mode,
                                        const ReductionMatrix* reduction) {
  Vector text_block;
  if (mode.uses_text()) {
    if (reduction) {
      if (reduction->matrix.rows() != c.text.size() || reduction->matrix.cols() != mode.text_dim)
        throw Error(ErrorKind::DimensionMismatch,
                    "reduction is " + std::to_string(reduction->matrix.rows()) + "x" +
                        std::to_string(reduction->matrix.cols()) + ", class " + c.class_id + " needs " +
                        std::to_string(c.text.size()) + "x" + std::to_string(mode.text_dim));
      text_block = reduction->matrix.transpose() * c.text;
    } else if (mode.text_dim == c.text.size()) {
      text_block = c.text;
    } else {
      throw Error(ErrorKind::MissingReduction, "text width " + std::to_string(c.text.size()) + " -> " +
                                                   std::to_string(mode.text_dim) + " needs a reduction matrix");
    }
  }

  switch (mode.kind) {
    case EmbeddingKind::AttrOnly: return {c.class_id, c.attributes};
    case EmbeddingKind::TextOnly: return {c.class_id, std::move(text_block)};
    case EmbeddingKind::Combined: {
      Vector v(c.attributes.size() + text_block.size());
      v << c.attributes, text_block;
      return {c.class_id, std::move(v)};
    }
  }
  return {c.class_id, {}};
}

/// rho(c) for every descriptor, one per row.
inline Matrix compose_matrix(std::span<const ClassDescriptor> classes, const EmbeddingMode& mode,
                             const ReductionMatrix* reduction) {
  if (classes.empty()) return {};
  Matrix out;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const Vector v = compose_embedding(classes[i], mode, reduction).vector;
    if (i == 0) out.resize(static_cast<Eigen::Index>(classes.size()), v.size());
    out.row(static_cast<Eigen::Index>(i)) = v.transpose();
  }
  return out;
}

inline std::vector<ClassEmbedding> compose_all(std::span<const ClassDescriptor> classes, const EmbeddingMode& mode,
                                               const ReductionMatrix* reduction) {
  std::vector<ClassEmbedding> out;
  out.reserve(classes.size());
  for (const auto& c : classes) out.push_back(compose_embedding(c, mode, reduction));
  return out;
}

/// Copy of `c` with attribute k toggled between 0 and 1.
inline ClassDescriptor flip_attribute(const ClassDescriptor& c, Eigen::Index k) {
  if (k < 0 || k >= c.attributes.size())
    throw Error(ErrorKind::IndexOutOfRange, "attribute " + std::to_string(k) + " of class " + c.class_id +
                                                " (has " + std::to_string(c.attributes.size()) + ")");
  ClassDescriptor out = c;
  out.attributes[k] = 1.0 - out.attributes[k];
  return out;
}

}  // namespace zsslr

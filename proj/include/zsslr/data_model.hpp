#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsslr/error.hpp"

namespace zsslr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::size_t kDefaultAttributeCount = 53;

enum class Stream { Body, Hand };

constexpr std::string_view to_string(Stream s) { return s == Stream::Body ? "body" : "hand"; }

/// T snippet feature rows of one stream of one sample.
struct FeatureSequence {
  std::string sample_id;
  Stream stream = Stream::Body;
  Matrix data;  // T x d_s

  Eigen::Index length() const { return data.rows(); }
  Eigen::Index width() const { return data.cols(); }
};

struct Sample {
  std::string sample_id;
  std::string class_id;
  FeatureSequence body;
  std::optional<FeatureSequence> hand;
};

/// A class with its binary attribute vector and its (unit-norm) text vector.
/// Attributes are stored as reals so that malformed inputs remain representable
/// and reportable by validate_dataset.
struct ClassDescriptor {
  std::string class_id;
  std::string name;
  Vector attributes;
  Vector text;
};

enum class SplitMode { ZSL, GZSL };

struct SplitConfig {
  std::set<std::string> seen;
  std::set<std::string> validation;
  std::set<std::string> unseen;
  SplitMode mode = SplitMode::ZSL;
};

struct Dataset {
  std::size_t attribute_count = kDefaultAttributeCount;
  std::vector<std::string> attribute_names;
  std::vector<ClassDescriptor> classes;
  std::vector<Sample> samples;
  SplitConfig split;

  const ClassDescriptor* find_class(std::string_view id) const {
    auto it = std::find_if(classes.begin(), classes.end(),
                           [&](const ClassDescriptor& c) { return c.class_id == id; });
    return it == classes.end() ? nullptr : &*it;
  }

  const ClassDescriptor& class_at(std::string_view id) const {
    if (const auto* c = find_class(id)) return *c;
    throw Error(ErrorKind::InvariantViolation, "unknown class " + std::string(id));
  }

  /// Two-stream use is only possible when every sample carries a hand stream.
  bool hand_available() const {
    return !samples.empty() &&
           std::all_of(samples.begin(), samples.end(), [](const Sample& s) { return s.hand.has_value(); });
  }

  /// Samples whose class is in `ids`, in manifest order.
  std::vector<const Sample*> samples_in(const std::set<std::string>& ids) const {
    std::vector<const Sample*> out;
    for (const auto& s : samples)
      if (ids.count(s.class_id)) out.push_back(&s);
    return out;
  }

  /// Descriptors for `ids` in ascending id order.
  std::vector<ClassDescriptor> descriptors(const std::set<std::string>& ids) const {
    std::vector<ClassDescriptor> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(class_at(id));
    return out;
  }

  std::string attribute_name(std::size_t k) const {
    if (k < attribute_names.size()) return attribute_names[k];
    return "a" + std::to_string(k);
  }
};

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void check_sequence(const Sample& s, const FeatureSequence& seq, std::optional<Eigen::Index> expected_width,
                           std::vector<std::string>& out) {
  const std::string prefix = "sample " + s.sample_id + " " + std::string(to_string(seq.stream));
  if (seq.length() < 1 || seq.width() < 1) {
    out.push_back(prefix + " empty sequence");
    return;
  }
  if (expected_width && seq.width() != *expected_width)
    out.push_back(prefix + " width " + std::to_string(seq.width()) + ", expected " + std::to_string(*expected_width));
  for (Eigen::Index r = 0; r < seq.length(); ++r)
    if (!seq.data.row(r).allFinite()) out.push_back(prefix + " row " + std::to_string(r) + " non-finite");
}

}  // namespace detail

/// Every invariant violation in `d`, one description per offending entity.
/// Row and attribute indices are zero-based.
inline std::vector<std::string> validate_dataset(const Dataset& d) {
  std::vector<std::string> out;

  std::set<std::string> class_ids;
  std::optional<Eigen::Index> text_dim;
  for (const auto& c : d.classes) {
    if (!class_ids.insert(c.class_id).second) out.push_back("duplicate class id " + c.class_id);
    if (static_cast<std::size_t>(c.attributes.size()) != d.attribute_count)
      out.push_back("class " + c.class_id + " has " + std::to_string(c.attributes.size()) + " attributes, expected " +
                    std::to_string(d.attribute_count));
    for (Eigen::Index k = 0; k < c.attributes.size(); ++k)
      if (c.attributes[k] != 0.0 && c.attributes[k] != 1.0)
        out.push_back("class " + c.class_id + " attribute " + std::to_string(k) + " not binary");
    if (!text_dim) text_dim = c.text.size();
    if (c.text.size() != *text_dim)
      out.push_back("class " + c.class_id + " text length " + std::to_string(c.text.size()) + ", expected " +
                    std::to_string(*text_dim));
    if (c.text.size() == 0) {
      out.push_back("class " + c.class_id + " text vector empty");
    } else if (!c.text.allFinite()) {
      out.push_back("class " + c.class_id + " text non-finite");
    } else if (std::abs(c.text.norm() - 1.0) > 1e-9) {
      out.push_back("class " + c.class_id + " text not unit norm");
    }
  }

  std::set<std::string> sample_ids;
  std::optional<Eigen::Index> body_width, hand_width;
  for (const auto& s : d.samples) {
    if (!sample_ids.insert(s.sample_id).second) out.push_back("duplicate sample id " + s.sample_id);
    if (!class_ids.count(s.class_id)) out.push_back("sample " + s.sample_id + " class " + s.class_id + " unknown");
    detail::check_sequence(s, s.body, body_width, out);
    if (!body_width && s.body.width() > 0) body_width = s.body.width();
    if (s.hand) {
      detail::check_sequence(s, *s.hand, hand_width, out);
      if (!hand_width && s.hand->width() > 0) hand_width = s.hand->width();
      if (s.hand->length() != s.body.length())
        out.push_back("sample " + s.sample_id + " hand has T=" + std::to_string(s.hand->length()) + ", body has T=" +
                      std::to_string(s.body.length()));
    }
  }

  const auto check_refs = [&](const std::set<std::string>& ids, const char* which) {
    for (const auto& id : ids)
      if (!class_ids.count(id)) out.push_back(std::string("split ") + which + " references unknown class " + id);
  };
  check_refs(d.split.seen, "seen");
  check_refs(d.split.validation, "validation");
  check_refs(d.split.unseen, "unseen");

  if (d.split.mode == SplitMode::ZSL) {
    const auto check_disjoint = [&](const std::set<std::string>& a, const std::set<std::string>& b, const char* an,
                                    const char* bn) {
      for (const auto& id : a)
        if (b.count(id)) out.push_back("class " + id + " in both " + an + " and " + bn + " (zsl split)");
    };
    check_disjoint(d.split.seen, d.split.unseen, "seen", "unseen");
    check_disjoint(d.split.seen, d.split.validation, "seen", "validation");
    check_disjoint(d.split.validation, d.split.unseen, "validation", "unseen");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Feature files

/// Shortest decimal text that parses back to exactly `x`.
inline std::string format_real(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<double> parse_csv_row(std::string_view line, const std::string& where) {
  std::vector<double> row;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
      throw Error(ErrorKind::ParseError, where + ": field " + std::to_string(row.size()) + " '" + std::string(field) +
                                             "' is not a real number");
    row.push_back(value);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return row;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Parses a feature file: one snippet per line, comma-separated reals, no
/// header, uniform column count. LF or CRLF; blank lines are ignored.
inline Matrix read_feature_file(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    ++line_no;
    std::string_view line = detail::trim(std::string_view(text).substr(start, nl - start));
    start = nl + 1;
    if (line.empty()) continue;
    rows.push_back(detail::parse_csv_row(line, path.string() + " line " + std::to_string(line_no)));
    if (rows.back().size() != rows.front().size())
      throw Error(ErrorKind::InvariantViolation, path.string() + " line " + std::to_string(line_no) + " has " +
                                                     std::to_string(rows.back().size()) + " columns, expected " +
                                                     std::to_string(rows.front().size()) + " (ragged feature rows)");
  }
  if (rows.empty()) throw Error(ErrorKind::InvariantViolation, path.string() + " contains no feature rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

inline void write_feature_file(const std::filesystem::path& path, const Matrix& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      if (c) out << ',';
      out << format_real(data(r, c));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// Manifest

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw Error(ErrorKind::ParseError, where + ": missing field \"" + key + "\"");
  return obj.at(key);
}

inline std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw Error(ErrorKind::ParseError, where + ": field \"" + key + "\" must be a string");
  return v.get<std::string>();
}

inline Vector real_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw Error(ErrorKind::ParseError, where + " must be an array of reals");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw Error(ErrorKind::ParseError, where + "[" + std::to_string(i) + "] is not a number");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

inline std::set<std::string> id_set(const json& split, const char* key) {
  std::set<std::string> out;
  if (!split.contains(key)) return out;
  const json& arr = split.at(key);
  if (!arr.is_array()) throw Error(ErrorKind::ParseError, std::string("split: field \"") + key + "\" must be an array");
  for (const auto& v : arr) {
    if (!v.is_string()) throw Error(ErrorKind::ParseError, std::string("split.") + key + ": ids must be strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

}  // namespace detail

/// Builds a Dataset from an already parsed manifest. Relative paths resolve
/// against `base_dir`. Text vectors are l2-normalized. Throws
/// InvariantViolation listing every violation found.
inline Dataset dataset_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  using detail::json;
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "manifest: top level must be an object");

  Dataset d;
  if (doc.contains("attribute_count")) {
    const json& a = doc.at("attribute_count");
    if (!a.is_number_integer() || a.get<long long>() < 1)
      throw Error(ErrorKind::ParseError, "manifest: field \"attribute_count\" must be a positive integer");
    d.attribute_count = a.get<std::size_t>();
  }
  if (doc.contains("attribute_names")) {
    for (const auto& n : doc.at("attribute_names")) {
      if (!n.is_string()) throw Error(ErrorKind::ParseError, "manifest: attribute_names must be strings");
      d.attribute_names.push_back(n.get<std::string>());
    }
  }

  const auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  const json& classes = detail::require(doc, "classes", "manifest");
  if (!classes.is_array()) throw Error(ErrorKind::ParseError, "manifest: field \"classes\" must be an array");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const json& c = classes[i];
    const std::string where = "classes[" + std::to_string(i) + "]";
    ClassDescriptor cd;
    cd.class_id = detail::require_string(c, "id", where);
    cd.name = c.contains("name") && c.at("name").is_string() ? c.at("name").get<std::string>() : cd.class_id;
    cd.attributes = detail::real_array(detail::require(c, "attributes", where), where + ".attributes");
    if (c.contains("text")) {
      cd.text = detail::real_array(c.at("text"), where + ".text");
    } else if (c.contains("text_file")) {
      const Matrix row = read_feature_file(resolve(detail::require_string(c, "text_file", where)));
      cd.text = row.row(0).transpose();
    } else {
      throw Error(ErrorKind::ParseError, where + ": needs \"text\" or \"text_file\"");
    }
    const double norm = cd.text.norm();
    if (norm > 0.0 && std::isfinite(norm)) cd.text /= norm;
    d.classes.push_back(std::move(cd));
  }

  const json& samples = detail::require(doc, "samples", "manifest");
  if (!samples.is_array()) throw Error(ErrorKind::ParseError, "manifest: field \"samples\" must be an array");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const json& s = samples[i];
    const std::string where = "samples[" + std::to_string(i) + "]";
    Sample smp;
    smp.sample_id = detail::require_string(s, "id", where);
    smp.class_id = detail::require_string(s, "class_id", where);
    smp.body = {smp.sample_id, Stream::Body, read_feature_file(resolve(detail::require_string(s, "body", where)))};
    if (s.contains("hand") && !s.at("hand").is_null())
      smp.hand = FeatureSequence{smp.sample_id, Stream::Hand,
                                 read_feature_file(resolve(detail::require_string(s, "hand", where)))};
    d.samples.push_back(std::move(smp));
  }

  const json& split = detail::require(doc, "split", "manifest");
  const std::string mode = detail::require_string(split, "mode", "split");
  if (mode == "zsl")
    d.split.mode = SplitMode::ZSL;
  else if (mode == "gzsl")
    d.split.mode = SplitMode::GZSL;
  else
    throw Error(ErrorKind::ParseError, "split: mode must be \"zsl\" or \"gzsl\", got \"" + mode + "\"");
  d.split.seen = detail::id_set(split, "seen");
  d.split.validation = detail::id_set(split, "validation");
  d.split.unseen = detail::id_set(split, "unseen");

  const auto violations = validate_dataset(d);
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v;
    throw Error(ErrorKind::InvariantViolation, msg);
  }
  return d;
}

inline Dataset load_dataset(const std::filesystem::path& manifest_path) {
  const std::string text = detail::read_file(manifest_path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, manifest_path.string() + ": " + e.what());
  }
  return dataset_from_json(doc, manifest_path.parent_path());
}

/// Writes `d` as a manifest plus one feature file per stream under `dir`.
/// Returns the manifest path. Reals are written with round-trip precision.
inline std::filesystem::path save_dataset(const Dataset& d, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  using nlohmann::json;
  std::error_code ec;
  fs::create_directories(dir / "features", ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + (dir / "features").string() + ": " + ec.message());

  json doc;
  doc["attribute_count"] = d.attribute_count;
  if (!d.attribute_names.empty()) doc["attribute_names"] = d.attribute_names;

  json classes = json::array();
  for (const auto& c : d.classes) {
    json attrs = json::array(), text = json::array();
    for (double a : c.attributes) attrs.push_back(static_cast<int>(a));
    for (double t : c.text) text.push_back(t);
    classes.push_back({{"id", c.class_id}, {"name", c.name}, {"attributes", attrs}, {"text", text}});
  }
  doc["classes"] = classes;

  const auto file_stem = [](std::size_t index, const std::string& id) {
    std::string safe = id;
    for (char& ch : safe)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.')) ch = '_';
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%06zu_", index);
    return prefix + safe;
  };

  json samples = json::array();
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const Sample& s = d.samples[i];
    const std::string stem = file_stem(i, s.sample_id);
    json entry = {{"id", s.sample_id}, {"class_id", s.class_id}, {"body", "features/" + stem + "_body.csv"}};
    write_feature_file(dir / "features" / (stem + "_body.csv"), s.body.data);
    if (s.hand) {
      entry["hand"] = "features/" + stem + "_hand.csv";
      write_feature_file(dir / "features" / (stem + "_hand.csv"), s.hand->data);
    }
    samples.push_back(entry);
  }
  doc["samples"] = samples;

  doc["split"] = {{"mode", d.split.mode == SplitMode::ZSL ? "zsl" : "gzsl"},
                  {"seen", d.split.seen},
                  {"validation", d.split.validation},
                  {"unseen", d.split.unseen}};

  const fs::path manifest = dir / "manifest.json";
  std::ofstream out(manifest, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + manifest.string());
  out << doc.dump(2) << '\n';
  return manifest;
}

}  // namespace zsslr

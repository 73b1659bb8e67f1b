#ifndef TABSYNTH_SCHEMA_HPP
#define TABSYNTH_SCHEMA_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabsynth/error.hpp"

namespace tabsynth {

enum class ColumnKind { continuous, ordinal, categorical, binary, date };

inline std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::ordinal: return "ordinal";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::binary: return "binary";
    case ColumnKind::date: return "date";
  }
  return "?";
}

inline ColumnKind parse_column_kind(std::string_view text) {
  if (text == "continuous") return ColumnKind::continuous;
  if (text == "ordinal") return ColumnKind::ordinal;
  if (text == "categorical") return ColumnKind::categorical;
  if (text == "binary") return ColumnKind::binary;
  if (text == "date") return ColumnKind::date;
  throw Error(ErrorKind::InvalidSchema, "unknown column kind '" + std::string(text) + "'");
}

/// Kinds whose cells have a numeric view (value or integer code).
inline bool is_numeric_kind(ColumnKind kind) {
  return kind == ColumnKind::continuous || kind == ColumnKind::ordinal ||
         kind == ColumnKind::binary;
}

/// Kinds summarized by proportions rather than moments.
inline bool is_discrete_kind(ColumnKind kind) {
  return kind == ColumnKind::ordinal || kind == ColumnKind::categorical ||
         kind == ColumnKind::binary;
}

struct Bounds {
  double min = 0.0;
  double max = 0.0;

  bool contains(double x) const { return x >= min && x <= max; }
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  std::optional<std::string> unit;
  std::optional<Bounds> bounds;
  /// Ordered labels for categorical/binary. For binary, index is the integer code.
  std::vector<std::string> categories;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;

  void validate() const {
    if (name.empty()) throw Error(ErrorKind::InvalidSchema, "column with empty name");
    if (bounds && !(bounds->min <= bounds->max)) {
      throw Error(ErrorKind::InvalidSchema, name + ": bounds.min > bounds.max");
    }
    switch (kind) {
      case ColumnKind::categorical:
        if (categories.size() < 2) {
          throw Error(ErrorKind::InvalidSchema, name + ": categorical needs >= 2 categories");
        }
        break;
      case ColumnKind::binary:
        if (categories.size() != 2) {
          throw Error(ErrorKind::InvalidSchema, name + ": binary needs exactly 2 categories");
        }
        break;
      case ColumnKind::ordinal:
        if (!bounds) throw Error(ErrorKind::InvalidSchema, name + ": ordinal needs bounds");
        if (bounds->min != std::floor(bounds->min) || bounds->max != std::floor(bounds->max)) {
          throw Error(ErrorKind::InvalidSchema, name + ": ordinal bounds must be integers");
        }
        if (bounds->max - bounds->min + 1 < 2) {
          throw Error(ErrorKind::InvalidSchema, name + ": ordinal needs >= 2 levels");
        }
        break;
      case ColumnKind::continuous:
      case ColumnKind::date:
        break;
    }
    if (kind == ColumnKind::categorical || kind == ColumnKind::binary) {
      std::set<std::string> seen(categories.begin(), categories.end());
      if (seen.size() != categories.size()) {
        throw Error(ErrorKind::InvalidSchema, name + ": duplicate category label");
      }
      if (seen.contains("")) throw Error(ErrorKind::InvalidSchema, name + ": empty label");
    }
  }

  /// Label universe used for proportions. Ordinal levels are the integers in bounds.
  std::vector<std::string> labels() const {
    if (kind == ColumnKind::ordinal) {
      std::vector<std::string> out;
      for (auto v = static_cast<std::int64_t>(bounds->min);
           v <= static_cast<std::int64_t>(bounds->max); ++v) {
        out.push_back(std::to_string(v));
      }
      return out;
    }
    return categories;
  }

  /// Integer code of a categorical/binary label, or nullopt if unknown.
  std::optional<std::size_t> code_of(std::string_view label) const {
    for (std::size_t i = 0; i < categories.size(); ++i) {
      if (categories[i] == label) return i;
    }
    return std::nullopt;
  }
};

class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
    std::set<std::string> names;
    for (const auto& c : columns_) {
      c.validate();
      if (!names.insert(c.name).second) {
        throw Error(ErrorKind::InvalidSchema, "duplicate column '" + c.name + "'");
      }
    }
  }

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  const ColumnSpec& operator[](std::size_t i) const { return columns_[i]; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i].name == name) return i;
    }
    return std::nullopt;
  }

  bool contains(std::string_view name) const { return index_of(name).has_value(); }

  std::size_t require(std::string_view name) const {
    if (auto i = index_of(name)) return *i;
    throw Error(ErrorKind::UnknownColumn, "no column named '" + std::string(name) + "'");
  }

  const ColumnSpec& at(std::string_view name) const { return columns_[require(name)]; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& c : columns_) out.push_back(c.name);
    return out;
  }

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<ColumnSpec> columns_;
};

// JSON: {"columns": [{"name", "kind", "unit"?, "bounds"?: [min, max], "categories"?: [...]}]}

inline void to_json(nlohmann::json& j, const ColumnSpec& c) {
  j = nlohmann::json{{"name", c.name}, {"kind", std::string(to_string(c.kind))}};
  if (c.unit) j["unit"] = *c.unit;
  if (c.bounds) j["bounds"] = {c.bounds->min, c.bounds->max};
  if (!c.categories.empty()) j["categories"] = c.categories;
}

inline void from_json(const nlohmann::json& j, ColumnSpec& c) {
  try {
    c.name = j.at("name").get<std::string>();
    c.kind = parse_column_kind(j.at("kind").get<std::string>());
    c.unit = j.contains("unit") ? std::optional(j["unit"].get<std::string>()) : std::nullopt;
    if (j.contains("bounds")) {
      const auto& b = j["bounds"];
      if (!b.is_array() || b.size() != 2) {
        throw Error(ErrorKind::InvalidSchema, c.name + ": bounds must be [min, max]");
      }
      c.bounds = Bounds{b[0].get<double>(), b[1].get<double>()};
    } else {
      c.bounds.reset();
    }
    c.categories = j.value("categories", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidSchema, e.what());
  }
}

inline nlohmann::json schema_to_json(const Schema& s) {
  return nlohmann::json{{"columns", s.columns()}};
}

inline Schema schema_from_json(const nlohmann::json& j) {
  if (!j.contains("columns") || !j["columns"].is_array()) {
    throw Error(ErrorKind::InvalidSchema, "schema JSON needs a 'columns' array");
  }
  return Schema(j["columns"].get<std::vector<ColumnSpec>>());
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
}

inline Schema load_schema(const std::string& path) { return schema_from_json(read_json_file(path)); }

}  // namespace tabsynth

#endif  // TABSYNTH_SCHEMA_HPP

#pragma once

// Body specifications as JSON:
//   {"type":"cube","n":16,"halfwidth":1.0}
//   {"type":"lp_ball","n":64,"p":1.0}            p may be "inf"
//   {"type":"ellipsoid","semiaxes":[...]}
//   {"type":"zonotope","generators":[[...],...]}
//   {"type":"lq_zonoid","q":2.0,"atoms":[{"theta":[...],"weight":1.0},...]}
//   {"type":"polytope_v","vertices":[[...],...]}
// An optional "label" names the body in reports.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "kubota/bodies.hpp"
#include "kubota/errors.hpp"

namespace kubota {

using json = nlohmann::json;

namespace detail {

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline double as_number(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity" || s == "infinity") return kInf;
  }
  throw ValidationError("field '" + field + "': expected a number");
}

inline int as_int(const json& j, const std::string& field) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw ValidationError("field '" + field + "': expected an integer");
  }
  return j.get<int>();
}

inline Eigen::VectorXd as_vector(const json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError("field '" + field + "': expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = as_number(j[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

/// Array of equal-length rows, returned with one row per column.
inline Eigen::MatrixXd as_columns(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ValidationError("field '" + field + "': expected a nonempty array of vectors");
  const Eigen::VectorXd first = as_vector(j[0], field + "[0]");
  Eigen::MatrixXd m(first.size(), static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string name = field + "[" + std::to_string(i) + "]";
    const Eigen::VectorXd v = as_vector(j[i], name);
    if (v.size() != first.size()) {
      throw ValidationError("field '" + name + "': length " + std::to_string(v.size()) + " differs from " +
                            std::to_string(first.size()));
    }
    m.col(static_cast<Eigen::Index>(i)) = v;
  }
  return m;
}

inline json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json number_json(double x) { return std::isinf(x) ? json("inf") : json(x); }

}  // namespace detail

inline Body body_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("body: expected a JSON object");
  const std::string type = detail::require(j, "type", "body").get<std::string>();
  Body b = [&] {
    if (type == "cube") {
      const double hw = j.contains("halfwidth") ? detail::as_number(j.at("halfwidth"), "halfwidth") : 1.0;
      return Body::cube(detail::as_int(detail::require(j, "n", "cube"), "n"), hw);
    }
    if (type == "lp_ball") {
      const double r = j.contains("radius") ? detail::as_number(j.at("radius"), "radius") : 1.0;
      return Body::lp_ball(detail::as_int(detail::require(j, "n", "lp_ball"), "n"),
                           detail::as_number(detail::require(j, "p", "lp_ball"), "p"), r);
    }
    if (type == "ellipsoid") {
      return Body::ellipsoid(detail::as_vector(detail::require(j, "semiaxes", "ellipsoid"), "semiaxes"));
    }
    if (type == "zonotope") {
      return Body::zonotope(detail::as_columns(detail::require(j, "generators", "zonotope"), "generators"));
    }
    if (type == "polytope_v") {
      return Body::polytope_v(detail::as_columns(detail::require(j, "vertices", "polytope_v"), "vertices"));
    }
    if (type == "lq_zonoid") {
      const double q = detail::as_number(detail::require(j, "q", "lq_zonoid"), "q");
      const json& atoms = detail::require(j, "atoms", "lq_zonoid");
      if (!atoms.is_array() || atoms.empty()) throw ValidationError("field 'atoms': expected a nonempty array");
      json thetas = json::array();
      Eigen::VectorXd w(static_cast<Eigen::Index>(atoms.size()));
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string name = "atoms[" + std::to_string(i) + "]";
        thetas.push_back(detail::require(atoms[i], "theta", name));
        w(static_cast<Eigen::Index>(i)) = detail::as_number(detail::require(atoms[i], "weight", name), name + ".weight");
      }
      return Body::lq_zonoid(q, detail::as_columns(thetas, "atoms.theta"), w);
    }
    throw ValidationError("field 'type': unknown body type '" + type + "'");
  }();
  if (j.contains("label")) b.label = j.at("label").get<std::string>();
  return b;
}

/// Parses JSON text; syntax errors carry the line and column.
inline Body body_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON at " + detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                          e.what());
  }
  try {
    return body_from_json(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("body: ") + e.what());
  }
}

inline Body load_body(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read body file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return body_from_string(ss.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline json body_to_json(const Body& body) {
  json j = std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Cube>) {
          return {{"type", "cube"}, {"n", v.n}, {"halfwidth", v.halfwidth}};
        } else if constexpr (std::is_same_v<T, LpBall>) {
          return {{"type", "lp_ball"}, {"n", v.n}, {"p", detail::number_json(v.p)}, {"radius", v.radius}};
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return {{"type", "ellipsoid"}, {"semiaxes", detail::vector_json(v.semiaxes)}};
        } else if constexpr (std::is_same_v<T, Zonotope>) {
          json g = json::array();
          for (Eigen::Index c = 0; c < v.generators.cols(); ++c) g.push_back(detail::vector_json(v.generators.col(c)));
          return {{"type", "zonotope"}, {"generators", g}};
        } else if constexpr (std::is_same_v<T, LqZonoid>) {
          json a = json::array();
          for (Eigen::Index c = 0; c < v.atoms.cols(); ++c) {
            a.push_back({{"theta", detail::vector_json(v.atoms.col(c))}, {"weight", v.weights(c)}});
          }
          return {{"type", "lq_zonoid"}, {"q", detail::number_json(v.q)}, {"atoms", a}};
        } else {
          json a = json::array();
          for (Eigen::Index c = 0; c < v.vertices.cols(); ++c) a.push_back(detail::vector_json(v.vertices.col(c)));
          return {{"type", "polytope_v"}, {"vertices", a}};
        }
      },
      body.variant());
  if (!body.label.empty()) j["label"] = body.label;
  return j;
}

}  // namespace kubota

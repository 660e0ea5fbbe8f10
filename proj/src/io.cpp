#include "ordpoly/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ordpoly/errors.hpp"

namespace ordpoly {

namespace {

Rational exact_value(const std::string& name, const nlohmann::json& value) {
  if (value.is_string()) {
    try {
      return Rational::parse(value.get<std::string>());
    } catch (const Error& e) {
      throw InputError("exact value of '" + name + "': " + e.what());
    }
  }
  if (value.is_number_integer()) return Rational(value.get<long long>());
  if (value.is_number_float()) {
    throw InputError("exact value of '" + name + "' must be a string such as \"0.45\" or \"9/20\", not a JSON float");
  }
  throw InputError("exact value of '" + name + "' must be a string or an integer");
}

VarId declared(const ConstraintSet& cs, const nlohmann::json& name, std::string_view where) {
  if (!name.is_string()) throw InputError(std::string(where) + ": variable names must be strings");
  const auto found = cs.find(name.get<std::string>());
  if (!found) throw InputError(std::string(where) + ": undeclared variable '" + name.get<std::string>() + "'");
  return *found;
}

}  // namespace

ConstraintSet constraints_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("constraint file must hold a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "variables" && key != "order" && key != "exact") {
      throw InputError("unexpected key '" + key + "' in constraint file");
    }
  }
  ConstraintSet cs;
  if (doc.contains("variables")) {
    const auto& vars = doc.at("variables");
    if (!vars.is_array()) throw InputError("\"variables\" must be an array of names");
    for (const auto& v : vars) {
      if (!v.is_string()) throw InputError("\"variables\" must be an array of names");
      cs.add_variable(v.get<std::string>());
    }
  }
  if (doc.contains("order")) {
    const auto& order = doc.at("order");
    if (!order.is_array()) throw InputError("\"order\" must be an array of [lower, upper] pairs");
    for (const auto& pair : order) {
      if (!pair.is_array() || pair.size() != 2) throw InputError("\"order\" entries must be [lower, upper] pairs");
      cs.add_order(declared(cs, pair[0], "order"), declared(cs, pair[1], "order"));
    }
  }
  if (doc.contains("exact")) {
    const auto& exact = doc.at("exact");
    if (!exact.is_object()) throw InputError("\"exact\" must map names to values");
    for (const auto& [name, value] : exact.items()) {
      cs.set_exact(declared(cs, name, "exact"), exact_value(name, value));
    }
  }
  return cs;
}

ConstraintSet parse_constraints(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  return constraints_from_json(doc);
}

ConstraintSet load_constraints(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_constraints(buffer.str());
}

nlohmann::json constraints_to_json(const ConstraintSet& cs) {
  nlohmann::json doc;
  doc["variables"] = nlohmann::json::array();
  for (std::size_t i = 0; i < cs.size(); ++i) doc["variables"].push_back(cs.name(var(i)));
  doc["order"] = nlohmann::json::array();
  for (const auto& e : cs.order_edges()) doc["order"].push_back({cs.name(e.lo), cs.name(e.hi)});
  doc["exact"] = nlohmann::json::object();
  for (VarId v : cs.exacts()) doc["exact"][cs.name(v)] = cs.exact(v)->str();
  return doc;
}

std::string format_double(double value) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  // Via the exact binary value so rounding is half-even on the true decimal expansion.
  return Rational(mpq_class(value)).to_decimal(12);
}

nlohmann::json value_json(const Rational& value) {
  return {{"exact", value.str()}, {"approx", nlohmann::json::parse(value.to_decimal(12))}};
}

nlohmann::json value_json(double estimate) {
  return {{"approx", nlohmann::json::parse(format_double(estimate))}};
}

nlohmann::json polynomial_json(const Polynomial& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : p.coefficients()) out.push_back(c.str());
  return out;
}

nlohmann::json piecewise_json(const PiecewisePolynomial& f) {
  nlohmann::json bps = nlohmann::json::array();
  for (const auto& b : f.breakpoints()) bps.push_back(b.str());
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : f.pieces()) pieces.push_back(polynomial_json(p));
  return {{"breakpoints", bps}, {"pieces", pieces}};
}

}  // namespace ordpoly

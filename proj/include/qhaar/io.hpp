#ifndef QHAAR_IO_HPP_
#define QHAAR_IO_HPP_

// JSON and CSV encodings. Complex numbers are {"re": x, "im": y} with full
// double precision; dyadic rationals are "num/2^exp" strings.

#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qhaar/mra.hpp"
#include "qhaar/padic.hpp"
#include "qhaar/stepfn.hpp"
#include "qhaar/transform.hpp"
#include "qhaar/waveletgen.hpp"

namespace qhaar {

using Json = nlohmann::json;

/// Malformed or non-canonical input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

inline int require_int(const Json& j, const char* key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_number_integer()) throw FormatError(where + ": \"" + key + "\" must be an integer");
  return v.get<int>();
}

inline double require_finite(const Json& j, const char* key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_number()) throw FormatError(where + ": \"" + key + "\" must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw FormatError(where + ": \"" + key + "\" is not finite");
  return x;
}

}  // namespace detail

// --- scalars -------------------------------------------------------------

inline Json to_json(const Complex& z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Complex complex_from_json(const Json& j, const std::string& where = "complex") {
  return {detail::require_finite(j, "re", where), detail::require_finite(j, "im", where)};
}

inline Json to_json_object(const DyadicRational& x) { return Json{{"num", x.numerator().str()}, {"exp", x.exponent()}}; }

/// Accepts either the "num/2^exp" string or the {"num", "exp"} object.
inline DyadicRational dyadic_from_json(const Json& j) {
  try {
    if (j.is_string()) return DyadicRational::from_string(j.get<std::string>());
    if (j.is_object()) {
      const Json& num = detail::require(j, "num", "dyadic");
      const Json& exp = detail::require(j, "exp", "dyadic");
      if (!num.is_string() || !exp.is_number_integer()) throw FormatError("dyadic: wrong field types");
      return DyadicRational::from_string(num.get<std::string>() + "/2^" + std::to_string(exp.get<std::int64_t>()));
    }
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  throw FormatError("dyadic: expected a string or an object");
}

inline Json to_json(const DyadicVec2& v) { return Json::array({v.x1.to_string(), v.x2.to_string()}); }

inline DyadicVec2 vec2_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("point: expected an array of two dyadic strings");
  return {dyadic_from_json(j[0]), dyadic_from_json(j[1])};
}

// --- step functions -------------------------------------------------------

template <std::size_t D>
Json to_json(const StepFunction<D>& f) {
  Json cells = Json::array();
  for (const auto& [key, value] : f.cells()) {
    Json rep = Json::array();
    const auto point = f.representative(key);
    for (std::size_t i = 0; i < D; ++i) rep.push_back(detail::coord(point, i).to_string());
    cells.push_back(Json{{"rep", rep}, {"re", value.real()}, {"im", value.imag()}});
  }
  return Json{{"dim", D}, {"m", f.scale()}, {"n", f.support_exp()}, {"cells", cells}};
}

/// Reads a step function, rejecting non-canonical or duplicate representatives.
template <std::size_t D>
StepFunction<D> step_function_from_json(const Json& j) {
  const std::string where = "step function";
  if (detail::require_int(j, "dim", where) != static_cast<int>(D)) {
    throw FormatError(where + ": expected dim " + std::to_string(D));
  }
  const int m = detail::require_int(j, "m", where);
  const int n = detail::require_int(j, "n", where);
  if (m < -n) throw FormatError(where + ": m must be >= -n");
  if (m + n > kMaxGridBits) throw FormatError(where + ": grid too fine (m + n > " + std::to_string(kMaxGridBits) + ")");
  const Json& cells = detail::require(j, "cells", where);
  if (!cells.is_array()) throw FormatError(where + ": \"cells\" must be an array");

  const StepFunction<D> grid(m, n, {});
  typename StepFunction<D>::Cells out;
  for (const auto& cell : cells) {
    const Json& rep = detail::require(cell, "rep", where);
    if (!rep.is_array() || rep.size() != D) throw FormatError(where + ": rep must hold " + std::to_string(D) + " coordinates");
    PointOf<D> point;
    if constexpr (D == 1) {
      point = dyadic_from_json(rep[0]);
    } else {
      point = {dyadic_from_json(rep[0]), dyadic_from_json(rep[1])};
    }
    const auto key = grid.key_of(point);
    if (!key || !(grid.representative(*key) == point)) {
      throw FormatError(where + ": representative " + rep.dump() + " is not canonical for (m, n) = (" +
                        std::to_string(m) + ", " + std::to_string(n) + ")");
    }
    const Complex value = complex_from_json(cell, where);
    if (!out.emplace(*key, value).second) throw FormatError(where + ": duplicate representative " + rep.dump());
  }
  return StepFunction<D>(m, n, std::move(out));
}

// --- parameter grids ------------------------------------------------------

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const Json& j, int side, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != side) {
    throw FormatError(where + ": entries must have " + std::to_string(side) + " rows");
  }
  ComplexMatrix m(side, side);
  for (int r = 0; r < side; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != side) {
      throw FormatError(where + ": row " + std::to_string(r) + " must have " + std::to_string(side) + " entries");
    }
    for (int c = 0; c < side; ++c) m(r, c) = complex_from_json(j[r][c], where);
  }
  return m;
}

inline Json to_json(const GammaGrid& g) { return Json{{"s", g.s()}, {"entries", matrix_to_json(g.entries())}}; }

/// Shape errors raise FormatError; a modulus violation raises std::invalid_argument naming the entry.
inline GammaGrid gamma_from_json(const Json& j) {
  const int s = detail::require_int(j, "s", "gamma");
  if (s < 1 || s > 15) throw FormatError("gamma: s out of range");
  return GammaGrid(s, matrix_from_json(detail::require(j, "entries", "gamma"), 1 << s, "gamma"));
}

inline Json to_json(const AlphaGrid& a) { return Json{{"s", a.s()}, {"entries", matrix_to_json(a.entries())}}; }

inline AlphaGrid alpha_from_json(const Json& j) {
  const int s = detail::require_int(j, "s", "alpha");
  if (s < 1 || s > 15) throw FormatError("alpha: s out of range");
  return AlphaGrid::from_entries(s, matrix_from_json(detail::require(j, "entries", "alpha"), 1 << s, "alpha"));
}

// --- coefficients -------------------------------------------------------

inline Json to_json(const CoefficientSet& c) {
  Json scaling = Json::array();
  for (const auto& [a, v] : c.scaling) scaling.push_back(Json{{"a", to_json(a)}, {"re", v.real()}, {"im", v.imag()}});
  Json wavelet = Json::array();
  for (const auto& [key, v] : c.wavelet) {
    wavelet.push_back(Json{{"j", key.first}, {"a", to_json(key.second)}, {"re", v.real()}, {"im", v.imag()}});
  }
  return Json{{"s", c.s},         {"alpha_digest", c.alpha_digest}, {"j_min", c.j_min},
              {"j_max", c.j_max}, {"scaling", scaling},              {"wavelet", wavelet}};
}

inline CoefficientSet coefficients_from_json(const Json& j) {
  const std::string where = "coefficients";
  CoefficientSet c;
  c.s = detail::require_int(j, "s", where);
  c.j_min = detail::require_int(j, "j_min", where);
  c.j_max = detail::require_int(j, "j_max", where);
  if (c.j_min > c.j_max) throw FormatError(where + ": j_min > j_max");
  if (j.contains("alpha_digest")) {
    if (!j["alpha_digest"].is_string()) throw FormatError(where + ": alpha_digest must be a string");
    c.alpha_digest = j["alpha_digest"].get<std::string>();
  }
  const auto shift = [&](const Json& e) {
    DyadicVec2 a = vec2_from_json(detail::require(e, "a", where));
    if (!(frac_part(a) == a)) throw FormatError(where + ": shift " + a.to_string() + " is not in I_2^2");
    return a;
  };
  for (const auto& e : detail::require(j, "scaling", where)) {
    if (!c.scaling.emplace(shift(e), complex_from_json(e, where)).second) throw FormatError(where + ": duplicate scaling shift");
  }
  for (const auto& e : detail::require(j, "wavelet", where)) {
    const int level = detail::require_int(e, "j", where);
    if (level < c.j_min || level >= c.j_max) throw FormatError(where + ": wavelet level outside [j_min, j_max)");
    if (!c.wavelet.emplace(std::make_pair(level, shift(e)), complex_from_json(e, where)).second) {
      throw FormatError(where + ": duplicate wavelet entry");
    }
  }
  return c;
}

// --- reports --------------------------------------------------------------

inline Json to_json(const WaveletReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back(Json{{"name", c.name},
                          {"value", c.value},
                          {"threshold", c.threshold},
                          {"bound", c.upper_bound ? "upper" : "lower"},
                          {"pass", c.pass}});
  }
  return Json{{"s", r.s},
              {"tolerance", r.tolerance},
              {"pass", r.pass()},
              {"failing_checks", r.failing_checks()},
              {"checks", checks},
              {"completeness_rank", r.completeness_rank},
              {"v1_slice_dimension", r.v1_slice_dimension}};
}

inline Json to_json(const DualPathReport& r) {
  return Json{{"s", r.s},
              {"tolerance", r.tolerance},
              {"agree", r.agree},
              {"max_entry_difference", r.max_entry_difference},
              {"closed_form_D_unitarity_deviation", r.closed_form_unitarity},
              {"matrix_path_D_unitarity_deviation", r.matrix_path_unitarity},
              {"trusted_path", to_string(r.trusted)},
              {"discrepancy", !r.agree},
              {"pass", r.pass()},
              {"closed_form_alpha", to_json(r.closed_form)},
              {"matrix_path_alpha", to_json(r.matrix_path)}};
}

inline Json to_json(const SquareRootReport& r) {
  Json dims = Json::object();
  for (const auto& [k, v] : r.dims) dims[k] = v;
  Json out{{"t", r.t},
           {"dims", dims},
           {"max_residual", r.max_residual},
           {"max_gram_deviation", r.max_gram_deviation},
           {"wavelet_spaces_checked", r.wavelet_spaces_checked},
           {"tolerance", r.tolerance},
           {"pass", r.pass}};
  if (!r.pass) out["failure"] = Json{{"check", r.failed_check}, {"generator", r.failed_generator}};
  return out;
}

inline Json to_json(const ParsevalReport& r) {
  return Json{{"function_norm_sq", r.function_norm_sq},
              {"coefficient_norm_sq", r.coefficient_norm_sq},
              {"difference", r.difference},
              {"tolerance", r.tolerance},
              {"pass", r.pass}};
}

// --- CSV ------------------------------------------------------------------

/// One line per row; each entry written as the pair "re,im".
inline std::string to_csv(const ComplexMatrix& m) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c != 0) out << ',';
      out << m(r, c).real() << ',' << m(r, c).imag();
    }
    out << '\n';
  }
  return out.str();
}

inline std::string to_csv(const IntMatrix& m) {
  std::ostringstream out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c != 0 ? "," : "") << m(r, c);
    out << '\n';
  }
  return out.str();
}

inline Json int_matrix_to_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace qhaar

#endif  // QHAAR_IO_HPP_

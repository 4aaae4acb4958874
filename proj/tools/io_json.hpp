#pragma once

#include <dq/equivalence.hpp>

#include <json.hpp>

#include <memory>
#include <string>
#include <tuple>
#include <vector>

// JSON wire formats: rationals are [numerator, denominator] pairs, complex
// values are {re, im}, truncated series are per-power arrays, and functions
// list their Fourier modes explicitly. Integers that do not fit a machine
// word fall back to decimal strings so round trips stay exact.

namespace dqio {

using json = nlohmann::json;

inline json integer_json(const mpz_class &z) {
  if (z.fits_slong_p()) return json(z.get_si());
  return json(z.get_str());
}

inline mpz_class integer_from(const json &j) {
  if (j.is_string()) return mpz_class(j.get<std::string>());
  if (!j.is_number_integer()) throw std::invalid_argument("expected an integer or decimal string");
  return mpz_class(static_cast<long>(j.get<long long>()));
}

inline json rational_json(const mpq_class &q) { return json::array({integer_json(q.get_num()), integer_json(q.get_den())}); }

inline mpq_class rational_from(const json &j) {
  if (j.is_number_integer()) return mpq_class(integer_from(j));
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [numerator, denominator]");
  mpq_class q(integer_from(j.at(0)), integer_from(j.at(1)));
  q.canonicalize();
  return q;
}

inline json complex_json(const dq::GaussianRational &z) {
  return json{{"re", rational_json(z.re)}, {"im", rational_json(z.im)}};
}

inline dq::GaussianRational complex_from(const json &j) {
  if (j.is_array() || j.is_number_integer()) return dq::GaussianRational(rational_from(j));
  return dq::GaussianRational(rational_from(j.at("re")), j.contains("im") ? rational_from(j.at("im")) : mpq_class(0));
}

inline json scalar_json(const dq::FormalScalar &s) {
  json re = json::array();
  json im = json::array();
  for (int k = 0; k <= s.order(); ++k) {
    re.push_back(rational_json(s.coeff(k).re));
    im.push_back(rational_json(s.coeff(k).im));
  }
  return json{{"re", re}, {"im", im}};
}

inline dq::FormalScalar scalar_from(const json &j, int order) {
  dq::FormalScalar s(order);
  const json &re = j.at("re");
  const json &im = j.at("im");
  for (int k = 0; k <= order && k < static_cast<int>(re.size()); ++k)
    s.set_coeff(k, dq::GaussianRational(rational_from(re.at(static_cast<size_t>(k))),
                                        rational_from(im.at(static_cast<size_t>(k)))));
  return s;
}

inline json fun_json(const dq::Fun &f) {
  json modes = json::array();
  for (const auto &[m, c] : f.coeffs()) {
    json entry = scalar_json(c);
    entry["m"] = json(m);
    modes.push_back(std::move(entry));
  }
  return json{{"dim", f.dim()}, {"truncation", f.order()}, {"modes", modes}};
}

inline dq::Fun fun_from(const json &j) {
  int dim = j.at("dim").get<int>();
  int order = j.at("truncation").get<int>();
  dq::Fun f(dim, order);
  for (const json &entry : j.at("modes")) {
    dq::Mode m = entry.at("m").get<std::vector<int>>();
    if (static_cast<int>(m.size()) != dim) throw std::invalid_argument("mode length does not match dim");
    f.add_coeff(m, scalar_from(entry, order));
  }
  return f;
}

inline json h1_json(const dq::H1Class &h) {
  json out = json::array();
  for (const dq::FormalScalar &c : h) out.push_back(scalar_json(c));
  return out;
}

// Compact text form of a truncated series, e.g. "1 - 2 nu + 5/2 nu^2".
inline std::string scalar_text(const dq::FormalScalar &s) {
  std::string out;
  for (int k = 0; k <= s.order(); ++k) {
    const dq::GaussianRational &c = s.coeff(k);
    if (c.is_zero()) continue;
    std::string mag = c.str();
    if (!out.empty()) {
      if (mag.front() == '-' && c.im == 0) {
        out += " - ";
        mag.erase(0, 1);
      } else {
        out += " + ";
      }
    }
    out += mag;
    if (k == 1) out += " nu";
    if (k > 1) out += " nu^" + std::to_string(k);
  }
  return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------------------
// Engine configuration shared by the driver subcommands.

struct EngineConfig {
  int dim = 2;
  int order = 3;
  int dmax = 0;  // 0 picks the default policy for the order
  std::vector<dq::GaussianRational> omega;
  std::vector<std::tuple<int, int, int, mpq_class>> christoffel;
  int max_mode = 2;
  std::string format = "text";
};

inline EngineConfig config_from(const json &j) {
  EngineConfig c;
  if (j.contains("dim")) c.dim = j.at("dim").get<int>();
  if (j.contains("truncation")) c.order = j.at("truncation").get<int>();
  if (j.contains("K")) c.order = j.at("K").get<int>();
  if (j.contains("dmax")) c.dmax = j.at("dmax").get<int>();
  if (j.contains("omega"))
    for (const json &v : j.at("omega")) c.omega.push_back(complex_from(v));
  if (j.contains("christoffel"))
    for (const json &row : j.at("christoffel")) {
      if (!row.is_array() || row.size() < 4) throw std::invalid_argument("christoffel rows are [i, j, k, value]");
      c.christoffel.emplace_back(row.at(0).get<int>(), row.at(1).get<int>(), row.at(2).get<int>(),
                                 rational_from(row.at(3)));
    }
  if (j.contains("max_mode")) c.max_mode = j.at("max_mode").get<int>();
  if (j.contains("format")) c.format = j.at("format").get<std::string>();
  if (c.order < 1) throw std::invalid_argument("truncation order must be at least one");
  if (static_cast<int>(c.omega.size()) > c.order) throw std::invalid_argument("too many curvature coefficients for the truncation");
  return c;
}

inline std::shared_ptr<dq::FedosovData> make_data(const EngineConfig &c) {
  dq::ConnectionData conn = dq::ConnectionData::flat(c.dim, c.order);
  for (const auto &[i, j, k, v] : c.christoffel)
    conn.set_lowered(i, j, k, dq::Fun::constant(c.dim, c.order, dq::FormalScalar::constant(c.order, dq::GaussianRational(v))));
  std::vector<dq::GaussianRational> coeffs(static_cast<size_t>(c.order));
  for (size_t k = 0; k < c.omega.size(); ++k) coeffs[k] = c.omega[k];
  int dmax = c.dmax > 0 ? c.dmax : dq::default_dmax(c.order);
  return std::make_shared<dq::FedosovData>(conn, dq::block_curvature_form(c.dim, c.order, coeffs), dmax);
}

}  // namespace dqio

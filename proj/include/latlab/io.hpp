#pragma once

// File formats: lattice and theta-matrix JSON, weight lists, grid specs,
// CSV traces with witness sidecars, SVG convergence plots, and certificates
// that replay bit for bit.

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "latlab/algebraic.hpp"
#include "latlab/davenport.hpp"
#include "latlab/exponents.hpp"

namespace latlab {

using Json = nlohmann::json;

// ---- numeric tokens ----

// parse_rat grammar plus scientific notation ("1e5", "2.5e-3").
inline Rat parse_number(const std::string& text) {
  auto epos = text.find_first_of("eE");
  if (epos != std::string::npos && epos > 0 && epos + 1 < text.size() &&
      text.find("*2^") == std::string::npos) {
    std::string mant = text.substr(0, epos), exp = text.substr(epos + 1);
    bool eneg = false;
    if (exp[0] == '+' || exp[0] == '-') {
      eneg = exp[0] == '-';
      exp = exp.substr(1);
    }
    bool digits = !exp.empty();
    for (char c : exp)
      if (c < '0' || c > '9') digits = false;
    if (digits) {
      long e = std::strtol(exp.c_str(), nullptr, 10);
      Rat scale = rat_pow(Rat(10), eneg ? -e : e);
      return parse_rat(mant) * scale;
    }
  }
  return parse_rat(text);
}

inline std::vector<Rat> parse_weight_list(const std::string& csv) {
  std::vector<Rat> out;
  std::string tok;
  std::stringstream ss(csv);
  size_t idx = 0;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw ParseError("empty weight at position " + std::to_string(idx));
    out.push_back(parse_number(tok));
    ++idx;
  }
  if (out.empty() || csv.empty() || csv.back() == ',')
    throw ParseError("weight list needs comma-separated values, got '" + csv + "'");
  return out;
}

// ---- t-grid specs ----

struct GridSpec {
  Rat start, stop;
  bool geometric = true;
  size_t count = 0;
};

// "start:stop:{geom|lin}:count"
inline GridSpec parse_grid_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::string tok;
  std::stringstream ss(text);
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.size() != 4)
    throw ParseError("grid spec needs start:stop:{geom|lin}:count, got '" + text + "'");
  GridSpec g;
  g.start = parse_number(parts[0]);
  g.stop = parse_number(parts[1]);
  if (parts[2] == "geom")
    g.geometric = true;
  else if (parts[2] == "lin")
    g.geometric = false;
  else
    throw ParseError("grid scale must be geom or lin, got '" + parts[2] + "'");
  if (parts[3].empty() || parts[3].find_first_not_of("0123456789") != std::string::npos)
    throw ParseError("grid count must be a positive integer, got '" + parts[3] + "'");
  g.count = static_cast<size_t>(std::strtoul(parts[3].c_str(), nullptr, 10));
  return g;
}

inline std::vector<Rat> grid_from_spec(const GridSpec& g) {
  return make_t_grid(g.start, g.stop, g.geometric, g.count);
}

// ---- JSON plumbing ----

inline Json parse_json_text(const std::string& text, const std::string& what) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("invalid JSON in " + what);
  return j;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << text;
}

namespace detail {

inline std::string json_string_field(const Json& j, const char* key, const std::string& what) {
  if (!j.contains(key) || !j[key].is_string())
    throw ParseError(what + " needs a string field '" + key + "'");
  return j[key].get<std::string>();
}

inline Interval interval_entry_from_json(const Json& e, unsigned prec) {
  if (e.is_string()) return Interval::from_rat(parse_number(e.get<std::string>()), prec);
  if (e.is_array() && e.size() == 2 && e[0].is_string() && e[1].is_string())
    return Interval::from_rat_endpoints(parse_number(e[0].get<std::string>()),
                                        parse_number(e[1].get<std::string>()), prec);
  throw ParseError("float entries are a string or a [lo, hi] pair of strings");
}

template <class S>
Mat<S> parse_entry_matrix(const Json& rows, size_t nr, size_t nc, unsigned prec,
                          const MinPolyPtr& field, int root, bool columns_are_roots,
                          const std::string& what) {
  if (!rows.is_array() || rows.size() != nr)
    throw ParseError(what + " needs " + std::to_string(nr) + " rows");
  Mat<S> m;
  m.reserve(nr);
  for (size_t i = 0; i < nr; ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || row.size() != nc)
      throw ParseError(what + " row " + std::to_string(i) + " needs " + std::to_string(nc) +
                       " entries");
    Vec<S> out;
    out.reserve(nc);
    for (size_t j = 0; j < nc; ++j) {
      const Json& e = row[j];
      if constexpr (std::is_same_v<S, Rat>) {
        (void)prec;
        (void)field;
        (void)root;
        (void)columns_are_roots;
        if (!e.is_string()) throw ParseError(what + " rational entries must be strings");
        out.push_back(parse_number(e.get<std::string>()));
      } else if constexpr (std::is_same_v<S, NfReal>) {
        (void)prec;
        if (!e.is_string()) throw ParseError(what + " field entries must be strings");
        PolyQ p = poly_parse(e.get<std::string>(), 't');
        int r = columns_are_roots ? static_cast<int>(j) : root;
        out.push_back(NfReal(NfElem::from_poly(field, p), r));
      } else {
        (void)field;
        (void)root;
        (void)columns_are_roots;
        out.push_back(interval_entry_from_json(e, prec));
      }
    }
    m.push_back(std::move(out));
  }
  return m;
}

}  // namespace detail

// ---- lattice files ----

// {"dim": d, "scalar": "rational"|"numberfield"|"float", "basis": [[entry]]}
// numberfield entries are polynomials in t over the field of "minpoly", pinned
// either to one "root" index or columnwise via "embedding": "columns".
inline AnyLattice read_lattice_json(const Json& j, unsigned prec = kDefaultPrec) {
  if (!j.is_object()) throw ParseError("lattice file must be a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_unsigned())
    throw ParseError("lattice needs an unsigned 'dim'");
  size_t d = j["dim"].get<size_t>();
  if (d == 0) throw ParseError("lattice dimension must be positive");
  std::string kind = detail::json_string_field(j, "scalar", "lattice");
  if (!j.contains("basis")) throw ParseError("lattice needs a 'basis'");

  if (kind == "rational") {
    auto b = detail::parse_entry_matrix<Rat>(j["basis"], d, d, prec, nullptr, 0, false, "lattice");
    return lattice_from_basis(std::move(b), prec);
  }
  if (kind == "numberfield") {
    bool assert_irr = j.value("assert_irreducible", false);
    auto field =
        MinimalPolynomial::from_string(detail::json_string_field(j, "minpoly", "lattice"), assert_irr);
    bool columns = j.value("embedding", "") == std::string("columns");
    int root = 0;
    if (!columns) {
      if (!j.contains("root") || !j["root"].is_number_integer())
        throw ParseError("numberfield lattice needs 'root' or \"embedding\": \"columns\"");
      root = j["root"].get<int>();
    }
    auto b = detail::parse_entry_matrix<NfReal>(j["basis"], d, d, prec, field, root, columns,
                                                "lattice");
    return lattice_from_basis(std::move(b), prec);
  }
  if (kind == "float") {
    auto b =
        detail::parse_entry_matrix<Interval>(j["basis"], d, d, prec, nullptr, 0, false, "lattice");
    return lattice_from_basis(std::move(b), prec);
  }
  throw ParseError("unknown scalar kind '" + kind + "'");
}

inline AnyLattice read_lattice_file(const std::string& path, unsigned prec = kDefaultPrec) {
  return read_lattice_json(read_json_file(path), prec);
}

inline Json lattice_to_json(const Lattice<Rat>& l) {
  Json rows = Json::array();
  for (const auto& r : l.basis) {
    Json row = Json::array();
    for (const auto& e : r) row.push_back(rat_to_string(e));
    rows.push_back(std::move(row));
  }
  return Json{{"dim", l.dim}, {"scalar", "rational"}, {"basis", std::move(rows)}};
}

inline Json lattice_to_json(const Lattice<NfReal>& l) {
  Json rows = Json::array();
  for (const auto& r : l.basis) {
    Json row = Json::array();
    for (const auto& e : r) row.push_back(e.elem().to_string('t'));
    rows.push_back(std::move(row));
  }
  Json j{{"dim", l.dim},
         {"scalar", "numberfield"},
         {"minpoly", l.field->to_string()},
         {"basis", std::move(rows)}};
  if (l.algebraic_columns)
    j["embedding"] = "columns";
  else
    j["root"] = l.root;
  if (l.field->irreducibility_asserted()) j["assert_irreducible"] = true;
  return j;
}

inline Json lattice_to_json(const Lattice<Interval>& l) {
  Json rows = Json::array();
  for (const auto& r : l.basis) {
    Json row = Json::array();
    for (const auto& e : r) {
      if (e.is_point())
        row.push_back(e.lo_dyadic());
      else
        row.push_back(Json::array({e.lo_dyadic(), e.hi_dyadic()}));
    }
    rows.push_back(std::move(row));
  }
  return Json{{"dim", l.dim}, {"scalar", "float"}, {"basis", std::move(rows)}};
}

inline Json lattice_to_json(const AnyLattice& l) {
  return std::visit([](const auto& x) { return lattice_to_json(x); }, l);
}

// ---- theta files ----

using AnyTheta = std::variant<ThetaMatrix<Rat>, ThetaMatrix<NfReal>, ThetaMatrix<Interval>>;

// {"m": cols, "n": rows, "scalar": ..., "rows": [[entry]]}; field entries as in
// lattice files, always pinned to one root.
inline AnyTheta read_theta_json(const Json& j, unsigned prec = kDefaultPrec) {
  if (!j.is_object()) throw ParseError("theta file must be a JSON object");
  if (!j.contains("m") || !j["m"].is_number_unsigned() || !j.contains("n") ||
      !j["n"].is_number_unsigned())
    throw ParseError("theta needs unsigned 'm' and 'n'");
  size_t m = j["m"].get<size_t>(), n = j["n"].get<size_t>();
  if (m == 0 || n == 0) throw ParseError("theta needs m >= 1 and n >= 1");
  std::string kind = detail::json_string_field(j, "scalar", "theta");
  if (!j.contains("rows")) throw ParseError("theta needs 'rows'");

  if (kind == "rational") {
    ThetaMatrix<Rat> th;
    th.rows = detail::parse_entry_matrix<Rat>(j["rows"], n, m, prec, nullptr, 0, false, "theta");
    return th;
  }
  if (kind == "numberfield") {
    bool assert_irr = j.value("assert_irreducible", false);
    auto field =
        MinimalPolynomial::from_string(detail::json_string_field(j, "minpoly", "theta"), assert_irr);
    if (!j.contains("root") || !j["root"].is_number_integer())
      throw ParseError("numberfield theta needs 'root'");
    int root = j["root"].get<int>();
    ThetaMatrix<NfReal> th;
    th.rows =
        detail::parse_entry_matrix<NfReal>(j["rows"], n, m, prec, field, root, false, "theta");
    return th;
  }
  if (kind == "float") {
    ThetaMatrix<Interval> th;
    th.rows =
        detail::parse_entry_matrix<Interval>(j["rows"], n, m, prec, nullptr, 0, false, "theta");
    return th;
  }
  throw ParseError("unknown scalar kind '" + kind + "'");
}

inline AnyTheta read_theta_file(const std::string& path, unsigned prec = kDefaultPrec) {
  return read_theta_json(read_json_file(path), prec);
}

// ---- CSV traces ----

namespace detail {

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

// One row per grid entry; numeric columns are midpoint strings, witnesses live
// in a sidecar keyed by id so the table stays rectangular.
inline void write_trace_csv(std::ostream& os, const ExponentTrace& tr) {
  os << "kind,t,lower,upper,witness\n";
  for (size_t i = 0; i < tr.entries.size(); ++i) {
    const TraceEntry& e = tr.entries[i];
    os << exponent_kind_name(tr.kind) << ',' << rat_to_string(e.t) << ',';
    if (e.lower.has_value()) os << e.lower->mid_string(12);
    os << ',';
    if (e.upper.has_value()) os << e.upper->mid_string(12);
    os << ',';
    if (!e.witness.empty()) os << 'w' << i;
    os << '\n';
  }
}

inline void write_witness_csv(std::ostream& os, const ExponentTrace& tr) {
  os << "id,text\n";
  for (size_t i = 0; i < tr.entries.size(); ++i)
    if (!tr.entries[i].witness.empty())
      os << 'w' << i << ',' << detail::csv_quote(tr.entries[i].witness) << '\n';
  for (size_t i = 0; i < tr.notes.size(); ++i)
    os << 'n' << i << ',' << detail::csv_quote(tr.notes[i]) << '\n';
}

// ---- SVG convergence plot ----

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

// log10(t) on x, bound values on y; lower bounds in blue, upper in red.
inline void write_convergence_svg(std::ostream& os, const ExponentTrace& tr,
                                  const std::string& title) {
  const double W = 640, H = 400, ml = 60, mr = 20, mt = 40, mb = 50;
  std::vector<std::pair<double, double>> lo, hi;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  auto add = [&](double x, double y, std::vector<std::pair<double, double>>& v) {
    if (first) {
      xmin = xmax = x;
      ymin = ymax = y;
      first = false;
    }
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
    v.emplace_back(x, y);
  };
  for (const auto& e : tr.entries) {
    double x = std::log10(std::max(1e-300, e.t.convert_to<double>()));
    if (e.lower.has_value()) add(x, e.lower->mid_d(), lo);
    if (e.upper.has_value()) add(x, e.upper->mid_d(), hi);
  }
  if (xmax - xmin < 1e-9) xmax = xmin + 1;
  if (ymax - ymin < 1e-9) ymax = ymin + 1;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };
  auto poly = [&](const std::vector<std::pair<double, double>>& v, const char* color) {
    if (v.empty()) return;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : v) os << detail::svg_num(px(x)) << ',' << detail::svg_num(py(y)) << ' ';
    os << "\"/>\n";
    for (const auto& [x, y] : v)
      os << "<circle cx=\"" << detail::svg_num(px(x)) << "\" cy=\"" << detail::svg_num(py(y))
         << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
  };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 400\">\n"
     << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n"
     << "<text x=\"12\" y=\"24\" font-family=\"monospace\" font-size=\"14\">" << title
     << "</text>\n"
     << "<line x1=\"" << detail::svg_num(ml) << "\" y1=\"" << detail::svg_num(H - mb) << "\" x2=\""
     << detail::svg_num(W - mr) << "\" y2=\"" << detail::svg_num(H - mb)
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << detail::svg_num(ml) << "\" y1=\"" << detail::svg_num(mt) << "\" x2=\""
     << detail::svg_num(ml) << "\" y2=\"" << detail::svg_num(H - mb) << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << detail::svg_num(ml) << "\" y=\"" << detail::svg_num(H - mb + 18)
     << "\" font-family=\"monospace\" font-size=\"11\">log10 t = " << detail::svg_num(xmin)
     << "</text>\n"
     << "<text x=\"" << detail::svg_num(W - mr - 110) << "\" y=\"" << detail::svg_num(H - mb + 18)
     << "\" font-family=\"monospace\" font-size=\"11\">" << detail::svg_num(xmax) << "</text>\n"
     << "<text x=\"4\" y=\"" << detail::svg_num(H - mb) << "\" font-family=\"monospace\" "
     << "font-size=\"11\">" << detail::svg_num(ymin) << "</text>\n"
     << "<text x=\"4\" y=\"" << detail::svg_num(mt + 10) << "\" font-family=\"monospace\" "
     << "font-size=\"11\">" << detail::svg_num(ymax) << "</text>\n";
  poly(lo, "#2563eb");
  poly(hi, "#dc2626");
  os << "</svg>\n";
}

// ---- certificates ----

// Empty-box certificates carry exact rational weights and the lattice inline,
// so verification replays the enumeration bit for bit.
template <class S>
inline Json empty_box_certificate(const Lattice<S>& l, const std::vector<Rat>& weights,
                                  const std::string& context) {
  Json ws = Json::array();
  for (const auto& w : weights) ws.push_back(rat_to_string(w));
  return Json{{"type", "empty-box"},
              {"context", context},
              {"weights", std::move(ws)},
              {"lattice", lattice_to_json(l)}};
}

template <class S>
inline Json minima_certificate(const Lattice<S>& l, const std::vector<Rat>& weights,
                               const std::vector<MinimumWitness>& mins) {
  Json ws = Json::array();
  for (const auto& w : weights) ws.push_back(rat_to_string(w));
  Json mu = Json::array(), wit = Json::array();
  for (const auto& m : mins) {
    mu.push_back(m.mu.hi_dyadic());
    Json u = Json::array();
    for (const auto& c : m.u) u.push_back(c.str());
    wit.push_back(std::move(u));
  }
  return Json{{"type", "minima"},
              {"weights", std::move(ws)},
              {"mu_hi", std::move(mu)},
              {"witnesses", std::move(wit)},
              {"lattice", lattice_to_json(l)}};
}

struct VerifyResult {
  bool ok = false;
  std::string detail;
};

namespace detail {

inline std::vector<Rat> parse_rat_array(const Json& a, const std::string& what) {
  if (!a.is_array()) throw ParseError(what + " must be an array of strings");
  std::vector<Rat> out;
  for (const auto& e : a) {
    if (!e.is_string()) throw ParseError(what + " must hold strings");
    out.push_back(parse_number(e.get<std::string>()));
  }
  return out;
}

inline VerifyResult verify_empty_box(const Json& cert, unsigned prec) {
  auto ws = parse_rat_array(cert.at("weights"), "certificate weights");
  AnyLattice l = read_lattice_json(cert.at("lattice"), prec);
  return std::visit(
      [&](const auto& lat) -> VerifyResult {
        if (ws.size() != lat.dim) return {false, "weight count does not match the dimension"};
        EnumOptions opt;
        opt.start_prec = prec;
        auto res = enumerate_box(lat, Weights::from_rats(ws, prec), opt);
        if (res.verdict == Verdict::Empty)
          return {true, "replayed enumeration: certified empty at " +
                            std::to_string(res.prec_used) + " bits"};
        return {false, "replayed enumeration found " + std::to_string(res.points.size()) +
                           " point(s); the box is not empty"};
      },
      l);
}

inline VerifyResult verify_minima(const Json& cert, unsigned prec) {
  auto ws = parse_rat_array(cert.at("weights"), "certificate weights");
  auto mu = parse_rat_array(cert.at("mu_hi"), "certificate mu_hi");
  AnyLattice l = read_lattice_json(cert.at("lattice"), prec);
  const Json& wit = cert.at("witnesses");
  if (!wit.is_array()) throw ParseError("certificate witnesses must be an array");
  return std::visit(
      [&](const auto& lat) -> VerifyResult {
        size_t d = lat.dim;
        if (ws.size() != d || mu.size() != d || wit.size() != d)
          return {false, "certificate arrays do not match the dimension"};
        Mat<Rat> umat;
        for (size_t k = 0; k < d; ++k) {
          Vec<Int> u;
          for (const auto& c : wit[k]) u.push_back(Int(c.get<std::string>()));
          if (u.size() != d) return {false, "witness " + std::to_string(k) + " has wrong length"};
          auto z = lattice_coords_iv(lat, u, prec);
          for (size_t i = 0; i < d; ++i) {
            // membership in mu_k-dilated box, certified against the hi endpoint
            if (!abs_i(z[i]).cert_le_rat(mu[k] * ws[i]))
              return {false, "witness " + std::to_string(k) +
                                 " is not certainly inside the dilated box"};
          }
          Vec<Rat> ur;
          for (const auto& c : u) ur.push_back(Rat(c));
          umat.push_back(std::move(ur));
        }
        if (exact_det(umat) == 0) return {false, "witnesses are linearly dependent"};
        return {true, "replayed witness membership and independence"};
      },
      l);
}

}  // namespace detail

inline VerifyResult verify_certificate(const Json& cert, unsigned prec = kDefaultPrec) {
  if (!cert.is_object() || !cert.contains("type") || !cert["type"].is_string())
    throw ParseError("certificate needs a 'type'");
  std::string type = cert["type"].get<std::string>();
  if (type == "empty-box") return detail::verify_empty_box(cert, prec);
  if (type == "minima") return detail::verify_minima(cert, prec);
  throw ParseError("unknown certificate type '" + type + "'");
}

}  // namespace latlab

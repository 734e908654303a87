#pragma once

// Subcommand dispatch for the command-line harness. Exit codes: 0 success,
// 2 unusable input, 3 precision cap hit, 4 search budget exhausted.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "latlab/io.hpp"

namespace latlab {
namespace cli {

inline std::string fmt_d(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string fmt_rat(const Rat& q) { return fmt_d(q.convert_to<double>()); }

struct CommonOpts {
  std::string lattice_path, theta_path;
  unsigned prec = kDefaultPrec;
  std::string grid_spec;
  std::string tmax = "1e4";
  std::string out_dir = "latlab-out";
  std::vector<std::string> emit;
  unsigned threads = 1;
  unsigned long long seed = 0;

  bool emits(const char* what) const {
    for (const auto& e : emit)
      if (e == what) return true;
    return false;
  }

  std::filesystem::path out_path(const std::string& name) const {
    std::filesystem::create_directories(out_dir);
    return std::filesystem::path(out_dir) / name;
  }
};

inline void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--precision-bits", o.prec, "working precision for parsing and enumeration");
  sub->add_option("--t-grid", o.grid_spec, "scale grid, start:stop:{geom|lin}:count");
  sub->add_option("--Tmax", o.tmax, "largest scale");
  sub->add_option("--out-dir", o.out_dir, "directory for emitted files");
  sub->add_option("--emit", o.emit, "artifacts to write: csv, svg, certs")
      ->delimiter(',');
  sub->add_option("--threads", o.threads, "worker cap for the critical-box search");
  sub->add_option("--seed", o.seed, "random seed for box-shape sampling");
}

inline std::vector<Rat> default_grid(const CommonOpts& o, const Rat& tmax) {
  if (!o.grid_spec.empty()) return grid_from_spec(parse_grid_spec(o.grid_spec));
  return make_t_grid(Rat(4), tmax, true, 12);
}

inline size_t grid_count(const CommonOpts& o, size_t fallback) {
  if (o.grid_spec.empty()) return fallback;
  return parse_grid_spec(o.grid_spec).count;
}

// ---- minima ----

inline int run_minima(const CommonOpts& o, const std::string& weights_csv) {
  auto ws = parse_weight_list(weights_csv);
  AnyLattice any = read_lattice_file(o.lattice_path, o.prec);
  return std::visit(
      [&](const auto& l) -> int {
        if (ws.size() != l.dim) throw DomainViolation("--weights length must equal the dimension");
        EnumOptions opt;
        opt.start_prec = o.prec;
        auto mins = successive_minima(l, Weights::from_rats(ws, o.prec), 0, rat_2pow(-20), opt);
        std::cout << "k,mu,witness\n";
        std::ostringstream csv;
        csv << "k,mu,witness\n";
        for (size_t k = 0; k < mins.size(); ++k) {
          std::string urow = "(";
          for (size_t i = 0; i < mins[k].u.size(); ++i) {
            if (i) urow += ", ";
            urow += mins[k].u[i].str();
          }
          urow += ")";
          std::cout << k + 1 << ',' << mins[k].mu.to_string() << ',' << urow << '\n';
          csv << k + 1 << ',' << mins[k].mu.mid_string(12) << ',' << detail::csv_quote(urow)
              << '\n';
        }
        if (o.emits("csv")) write_text_file(o.out_path("minima.csv").string(), csv.str());
        if (o.emits("certs")) {
          auto cert = minima_certificate(l, ws, mins);
          write_text_file(o.out_path("minima_cert.json").string(), cert.dump(2) + "\n");
        }
        return 0;
      },
      any);
}

// ---- davenport ----

inline int run_davenport(const CommonOpts& o, const std::string& weights_csv) {
  auto ws = parse_weight_list(weights_csv);
  AnyLattice any = read_lattice_file(o.lattice_path, o.prec);
  return std::visit(
      [&](const auto& l) -> int {
        constexpr bool kExact = !std::is_same_v<std::decay_t<decltype(l)>, Lattice<Interval>>;
        if constexpr (!kExact) {
          (void)l;
          throw DomainViolation("the empty-box construction needs an exact scalar kind");
        } else {
          if (ws.size() != l.dim)
            throw DomainViolation("--weights length must equal the dimension");
          EnumOptions opt;
          opt.start_prec = o.prec;
          auto r = davenport_empty_box(l, Weights::from_rats(ws, o.prec), rat_2pow(-10), opt);
          std::cout << "c=" << fmt_rat(r.c) << " volume=" << r.volume.to_string() << " perm=(";
          for (size_t i = 0; i < r.perm.size(); ++i)
            std::cout << (i ? " " : "") << r.perm[i];
          std::cout << ")\nempty box weights:";
          for (const auto& w : r.box_weights) std::cout << ' ' << rat_to_string(w);
          std::cout << '\n';
          if (o.emits("certs")) {
            auto cert = empty_box_certificate(l, r.box_weights, "permuted-minima");
            write_text_file(o.out_path("davenport_cert.json").string(), cert.dump(2) + "\n");
          }
          return 0;
        }
      },
      any);
}

// ---- dichotomy ----

inline int run_dichotomy(const CommonOpts& o, const std::string& eps_csv) {
  auto eps = parse_weight_list(eps_csv);
  AnyLattice any = read_lattice_file(o.lattice_path, o.prec);
  return std::visit(
      [&](const auto& l) -> int {
        constexpr bool kExact = !std::is_same_v<std::decay_t<decltype(l)>, Lattice<Interval>>;
        if constexpr (!kExact) {
          (void)l;
          throw DomainViolation("the dichotomy runs on exact scalar kinds only");
        } else {
          EnumOptions opt;
          opt.start_prec = o.prec;
          std::ostringstream csv;
          csv << "eps,t,gamma,volume,case\n";
          size_t successes = 0;
          bool axis = false;
          for (size_t i = 0; i < eps.size(); ++i) {
            if (eps[i] <= 0) throw DomainViolation("--eps entries must be positive");
            try {
              auto out = dichotomy_witness(l, eps[i], 40, opt);
              if (out.axis_point) {
                std::string u;
                for (size_t k = 0; k < out.axis_u.size(); ++k)
                  u += (k ? ", " : "") + out.axis_u[k];
                std::cout << "axis point (" << u
                          << "); infinite branch: every box at this shape stays occupied\n";
                axis = true;
                break;
              }
              const auto& c = *out.certificate;
              std::string g = c.gamma_witness.has_value() ? c.gamma_witness->mid_string(12) : "";
              std::cout << "eps=" << fmt_rat(eps[i]) << " case=" << c.which_case
                        << " t=" << fmt_rat(c.t_witness) << " gamma=" << g
                        << " volume=" << c.volume.to_string();
              if (c.which_case == 2)
                std::cout << " p=" << c.p
                          << " delta=" << (c.delta.has_value() ? c.delta->to_string() : "");
              std::cout << '\n';
              csv << fmt_rat(eps[i]) << ',' << fmt_rat(c.t_witness) << ',' << g << ','
                  << c.volume.mid_string(12) << ',' << c.which_case << '\n';
              ++successes;
              if (o.emits("certs")) {
                auto cert = empty_box_certificate(l, c.box_weights,
                                                  c.which_case == 1 ? "dichotomy-case1"
                                                                    : "dichotomy-case2");
                write_text_file(
                    o.out_path("dichotomy_cert_" + std::to_string(i) + ".json").string(),
                    cert.dump(2) + "\n");
              }
            } catch (const GridExhausted& e) {
              std::cout << "eps=" << fmt_rat(eps[i]) << " grid-exhausted: " << e.what() << '\n';
              csv << fmt_rat(eps[i]) << ",,,,grid-exhausted\n";
            }
          }
          if (o.emits("csv")) write_text_file(o.out_path("dichotomy.csv").string(), csv.str());
          if (axis || successes > 0) return 0;
          throw BudgetExceeded("no epsilon produced a certificate");
        }
      },
      any);
}

// ---- exponent ----

inline void emit_trace(const CommonOpts& o, const ExponentTrace& tr) {
  if (o.emits("csv")) {
    std::ostringstream t, w;
    write_trace_csv(t, tr);
    write_witness_csv(w, tr);
    write_text_file(o.out_path("trace.csv").string(), t.str());
    write_text_file(o.out_path("witnesses.csv").string(), w.str());
  }
  if (o.emits("svg")) {
    std::ostringstream s;
    write_convergence_svg(s, tr, std::string(exponent_kind_name(tr.kind)) + " bounds");
    write_text_file(o.out_path("trace.svg").string(), s.str());
  }
}

inline int finish_exponent(const CommonOpts& o, const ExponentTrace& tr) {
  std::string lo = tr.estimate.has_value() ? fmt_rat(tr.estimate->lo_rat()) : "";
  std::string hi = tr.estimate.has_value() ? fmt_rat(tr.estimate->hi_rat()) : "";
  std::cout << "kind=" << exponent_kind_name(tr.kind) << " lower=" << lo << " upper=" << hi
            << " verdict=" << (tr.unbounded_suspected ? "unbounded-suspected" : "estimate")
            << '\n';
  for (const auto& n : tr.notes) std::cout << "note: " << n << '\n';
  emit_trace(o, tr);
  return 0;
}

inline int run_exponent(const CommonOpts& o, const std::string& kind) {
  Rat tmax = parse_number(o.tmax);
  if (kind == "mult" || kind == "mult-uniform") {
    if (o.theta_path.empty()) throw DomainViolation("--kind " + kind + " needs --theta");
    AnyTheta th = read_theta_file(o.theta_path, o.prec);
    return std::visit(
        [&](const auto& t) -> int {
          MultOptions mo;
          mo.prec = o.prec;
          mo.grid_size = grid_count(o, mo.grid_size);
          if (kind == "mult") return finish_exponent(o, mult_estimate(t, tmax, mo));
          auto grid = default_grid(o, tmax);
          return finish_exponent(o, mult_uniform_estimate(t, grid, tmax, mo));
        },
        th);
  }
  if (o.lattice_path.empty()) throw DomainViolation("--kind " + kind + " needs --lattice");
  AnyLattice any = read_lattice_file(o.lattice_path, o.prec);
  return std::visit(
      [&](const auto& l) -> int {
        constexpr bool kExact = !std::is_same_v<std::decay_t<decltype(l)>, Lattice<Interval>>;
        EnumOptions eo;
        eo.start_prec = o.prec;
        if (kind == "regular") {
          return finish_exponent(o, regular_estimate(l, tmax, grid_count(o, 16), eo));
        }
        if (kind == "weak" || kind == "weak-uniform") {
          return finish_exponent(o, weak_uniform_estimate(l, default_grid(o, tmax), tmax, eo));
        }
        if (kind == "uniform") {
          if constexpr (!kExact) {
            throw DomainViolation("the critical-box search needs an exact scalar kind");
          } else {
            UniformOptions uo;
            uo.threads = o.threads == 0 ? 1 : o.threads;
            uo.seed = o.seed;
            uo.enum_opt = eo;
            return finish_exponent(o, uniform_estimate(l, default_grid(o, tmax), uo));
          }
        }
        throw DomainViolation(
            "--kind must be regular, uniform, weak, mult, or mult-uniform, got '" + kind + "'");
      },
      any);
}

// ---- algebraic ----

inline int run_algebraic(const CommonOpts& o, const std::string& minpoly, long scan,
                         bool assert_irr) {
  AlgebraicLatticeSpec spec;
  spec.minpoly = MinimalPolynomial::from_string(minpoly, assert_irr);
  spec.precision_bits = o.prec;
  auto l = build_algebraic_lattice(spec);
  std::cout << "dim=" << l.dim << " disc=" << rat_to_string(spec.minpoly->discriminant())
            << " det=" << l.det_abs.to_string() << '\n';
  if (scan > 0) {
    auto rep = norm_form_check(l, scan);
    std::cout << "scanned=" << rep.points_checked;
    if (rep.min_abs_norm.has_value()) {
      std::cout << " min|norm|=" << rat_to_string(*rep.min_abs_norm) << " at u=(";
      for (size_t i = 0; i < rep.min_witness.size(); ++i)
        std::cout << (i ? ", " : "") << rep.min_witness[i].str();
      std::cout << ") units=" << rep.units.size();
    }
    std::cout << '\n';
    for (const auto& v : rep.violations) std::cout << "violation: " << v << '\n';
    if (!rep.violations.empty()) throw InternalError("norm scan found violations");
  }
  auto j = lattice_to_json(l);
  write_text_file(o.out_path("algebraic_lattice.json").string(), j.dump(2) + "\n");
  return 0;
}

// ---- oracle-cf ----

// "a0;a1,a2,..." with integer terms; a1 onward must be positive.
inline ContinuedFraction parse_cf_text(const std::string& text) {
  ContinuedFraction cf;
  auto semi = text.find(';');
  if (semi == std::string::npos)
    throw ParseError("continued fraction spec needs 'a0;a1,a2,...', got '" + text + "'");
  std::string head = text.substr(0, semi), tail = text.substr(semi + 1);
  if (head.empty()) throw ParseError("continued fraction needs a leading term");
  cf.a.push_back(Int(rat_num(parse_number(head))));
  std::stringstream ss(tail);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw ParseError("empty continued-fraction term");
    Rat q = parse_number(tok);
    if (rat_den(q) != 1) throw ParseError("continued-fraction terms must be integers");
    cf.a.push_back(rat_num(q));
  }
  return cf;
}

inline int run_oracle_cf(const CommonOpts& o, const std::string& cf_text,
                         const std::string& rational, unsigned K) {
  ContinuedFraction cf;
  if (!rational.empty()) {
    cf = cf_from_rational(parse_number(rational));
  } else if (!cf_text.empty()) {
    cf = parse_cf_text(cf_text);
  } else {
    throw DomainViolation("oracle-cf needs --cf or --rational");
  }
  auto res = cf_oracle_2d(cf, K);
  std::cout << "k,p,q,gamma\n";
  std::ostringstream csv;
  csv << "k,p,q,gamma\n";
  for (size_t k = 0; k < res.p.size(); ++k) {
    std::string g =
        k < res.gamma.size() && res.gamma[k].has_value() ? res.gamma[k]->mid_string(12) : "";
    std::cout << k << ',' << res.p[k].str() << ',' << res.q[k].str() << ',' << g << '\n';
    csv << k << ',' << res.p[k].str() << ',' << res.q[k].str() << ',' << g << '\n';
  }
  std::cout << "estimate="
            << (res.omega_estimate.has_value() ? res.omega_estimate->to_string() : "")
            << " unbounded=" << (res.unbounded ? "yes" : "no") << '\n';
  if (o.emits("csv")) write_text_file(o.out_path("oracle_cf.csv").string(), csv.str());
  return 0;
}

// ---- verify ----

inline int run_verify(const CommonOpts& o, const std::string& cert_path) {
  auto cert = read_json_file(cert_path);
  auto res = verify_certificate(cert, o.prec);
  std::cout << (res.ok ? "verified: " : "verification failed: ") << res.detail << '\n';
  return res.ok ? 0 : 1;
}

// ---- dispatch ----

inline int run(int argc, char** argv) {
  CLI::App app{"certified lattice geometry laboratory"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string weights_csv, eps_csv = "1e-1,1e-2,1e-3", kind, minpoly, cf_text, rational,
              cert_path;
  long scan = 0;
  bool assert_irr = false;
  unsigned K = 24;

  auto* minima = app.add_subcommand("minima", "successive minima of a weighted box");
  minima->add_option("--lattice", o.lattice_path, "lattice file")->required();
  minima->add_option("--weights", weights_csv, "comma-separated box weights")->required();
  add_common(minima, o);

  auto* dav = app.add_subcommand("davenport", "certified empty box from permuted minima");
  dav->add_option("--lattice", o.lattice_path, "lattice file")->required();
  dav->add_option("--weights", weights_csv, "comma-separated box weights")->required();
  add_common(dav, o);

  auto* dich = app.add_subcommand("dichotomy", "axis point or empty-cylinder certificate");
  dich->add_option("--lattice", o.lattice_path, "lattice file")->required();
  dich->add_option("--eps", eps_csv, "comma-separated shrink factors");
  add_common(dich, o);

  auto* expo = app.add_subcommand("exponent", "trace one approximation exponent");
  expo->add_option("--kind", kind, "regular, uniform, weak, mult, or mult-uniform")->required();
  expo->add_option("--lattice", o.lattice_path, "lattice file");
  expo->add_option("--theta", o.theta_path, "matrix file for mult kinds");
  add_common(expo, o);

  auto* alg = app.add_subcommand("algebraic", "build a totally real embedding lattice");
  alg->add_option("--minpoly", minpoly, "monic integer polynomial in x")->required();
  alg->add_option("--norm-scan", scan, "check coordinate products for |u| up to this bound");
  alg->add_flag("--assert-irreducible", assert_irr,
                "accept a degree >= 4 polynomial as irreducible");
  add_common(alg, o);

  auto* cf = app.add_subcommand("oracle-cf", "two-dimensional convergent oracle");
  cf->add_option("--cf", cf_text, "terms as a0;a1,a2,...");
  cf->add_option("--rational", rational, "exact rational input p/q");
  cf->add_option("--K", K, "largest convergent index");
  add_common(cf, o);

  auto* ver = app.add_subcommand("verify", "replay an emitted certificate");
  ver->add_option("--certificate", cert_path, "certificate file")->required();
  add_common(ver, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (minima->parsed()) return run_minima(o, weights_csv);
    if (dav->parsed()) return run_davenport(o, weights_csv);
    if (dich->parsed()) return run_dichotomy(o, eps_csv);
    if (expo->parsed()) return run_exponent(o, kind);
    if (alg->parsed()) return run_algebraic(o, minpoly, scan, assert_irr);
    if (cf->parsed()) return run_oracle_cf(o, cf_text, rational, K);
    if (ver->parsed()) return run_verify(o, cert_path);
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NotSquarefree& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NotTotallyReal& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NotIrreducibleVerified& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const PrecisionExhausted& e) {
    std::cerr << "precision: " << e.what() << '\n';
    return 3;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget: " << e.what() << '\n';
    return 4;
  } catch (const GridExhausted& e) {
    std::cerr << "budget: " << e.what() << '\n';
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cli
}  // namespace latlab

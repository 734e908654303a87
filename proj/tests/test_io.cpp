#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "latlab/io.hpp"

using namespace latlab;

TEST_CASE("numeric tokens cover scientific, dyadic, and fraction forms") {
  CHECK(parse_number("1e5") == Rat(100000));
  CHECK(parse_number("1e1") == Rat(10));
  CHECK(parse_number("2.5e-3") == Rat(1, 400));
  CHECK(parse_number("-1.5E2") == Rat(-150));
  CHECK(parse_number("3/4") == Rat(3, 4));
  CHECK(parse_number("0.25") == Rat(1, 4));
  CHECK(parse_number("5*2^-3") == Rat(5, 8));
  CHECK(parse_number("-7") == Rat(-7));
  CHECK_THROWS_AS(parse_number("abc"), ParseError);
  CHECK_THROWS_AS(parse_number(""), ParseError);
}

TEST_CASE("weight lists reject malformed input") {
  auto w = parse_weight_list("1,1,1");
  REQUIRE(w.size() == 3);
  CHECK(w[0] == 1);
  CHECK(parse_weight_list("1/2,0.5")[1] == Rat(1, 2));
  CHECK_THROWS_AS(parse_weight_list("1,,2"), ParseError);
  CHECK_THROWS_AS(parse_weight_list(""), ParseError);
  CHECK_THROWS_AS(parse_weight_list("1,2,"), ParseError);
  CHECK_THROWS_AS(parse_weight_list("1,x"), ParseError);
}

TEST_CASE("grid specs parse and expand") {
  auto g = parse_grid_spec("1e1:1e5:geom:10");
  CHECK(g.start == Rat(10));
  CHECK(g.stop == Rat(100000));
  CHECK(g.geometric);
  CHECK(g.count == 10);
  auto grid = grid_from_spec(g);
  CHECK(grid == make_t_grid(Rat(10), Rat(100000), true, 10));

  auto lin = parse_grid_spec("2:10:lin:5");
  CHECK_FALSE(lin.geometric);
  CHECK(grid_from_spec(lin).size() == 5);

  CHECK_THROWS_AS(parse_grid_spec("1:2:3"), ParseError);
  CHECK_THROWS_AS(parse_grid_spec("1:2:log:5"), ParseError);
  CHECK_THROWS_AS(parse_grid_spec("1:2:geom:x"), ParseError);
}

TEST_CASE("rational lattice files round-trip") {
  auto j = parse_json_text(R"({"dim": 2, "scalar": "rational",
                               "basis": [["1", "1/3"], ["0", "1"]]})",
                           "test");
  auto any = read_lattice_json(j);
  auto* l = std::get_if<Lattice<Rat>>(&any);
  REQUIRE(l != nullptr);
  CHECK(l->dim == 2);
  CHECK(l->basis[0][1] == Rat(1, 3));

  auto back = lattice_to_json(*l);
  auto any2 = read_lattice_json(back);
  CHECK(std::get<Lattice<Rat>>(any2).basis == l->basis);
}

TEST_CASE("numberfield lattice files round-trip both layouts") {
  auto j = parse_json_text(R"({"dim": 2, "scalar": "numberfield", "minpoly": "x^2-2",
                               "root": 1, "basis": [["1", "t"], ["0", "1"]]})",
                           "test");
  auto any = read_lattice_json(j);
  auto* l = std::get_if<Lattice<NfReal>>(&any);
  REQUIRE(l != nullptr);
  CHECK(l->root == 1);
  CHECK(l->basis[0][1].to_interval(64).contains_rat(Rat(0)) == false);

  AlgebraicLatticeSpec spec;
  spec.minpoly = MinimalPolynomial::make({1, -3, 0, 1});
  auto alg = build_algebraic_lattice(spec);
  auto back = lattice_to_json(alg);
  CHECK(back["embedding"] == "columns");
  auto any2 = read_lattice_json(back);
  auto* l2 = std::get_if<Lattice<NfReal>>(&any2);
  REQUIRE(l2 != nullptr);
  CHECK(l2->algebraic_columns);
  for (size_t i = 0; i < 3; ++i)
    for (size_t k = 0; k < 3; ++k) CHECK(l2->basis[i][k] == alg.basis[i][k]);
}

TEST_CASE("float lattice files accept points and endpoint pairs") {
  auto j = parse_json_text(R"({"dim": 2, "scalar": "float",
                               "basis": [["1", ["1.25", "1.5"]], ["0", "1"]]})",
                           "test");
  auto any = read_lattice_json(j, 96);
  auto* l = std::get_if<Lattice<Interval>>(&any);
  REQUIRE(l != nullptr);
  CHECK(l->basis[0][1].lo_rat() == Rat(5, 4));
  CHECK(l->basis[0][1].hi_rat() == Rat(3, 2));

  auto back = lattice_to_json(*l);
  auto any2 = read_lattice_json(back, 96);
  auto& l2 = std::get<Lattice<Interval>>(any2);
  CHECK(l2.basis[0][1].lo_rat() == Rat(5, 4));
  CHECK(l2.basis[0][1].hi_rat() == Rat(3, 2));
}

TEST_CASE("lattice files reject malformed shapes") {
  CHECK_THROWS_AS(read_lattice_json(parse_json_text("[1,2]", "t")), ParseError);
  CHECK_THROWS_AS(read_lattice_json(parse_json_text(R"({"dim": 2, "scalar": "odd",
                                                        "basis": []})",
                                                    "t")),
                  ParseError);
  CHECK_THROWS_AS(read_lattice_json(parse_json_text(R"({"dim": 2, "scalar": "rational",
                                                        "basis": [["1"], ["0", "1"]]})",
                                                    "t")),
                  ParseError);
  CHECK_THROWS_AS(
      read_lattice_json(parse_json_text(R"({"dim": 2, "scalar": "numberfield",
                                            "minpoly": "x^2-2", "basis": [["1","0"],["0","1"]]})",
                                        "t")),
      ParseError);
}

TEST_CASE("theta files parse for all scalar kinds") {
  auto j = parse_json_text(R"({"m": 2, "n": 1, "scalar": "rational",
                               "rows": [["1/3", "2/7"]]})",
                           "test");
  auto any = read_theta_json(j);
  auto* th = std::get_if<ThetaMatrix<Rat>>(&any);
  REQUIRE(th != nullptr);
  CHECK(th->m() == 2);
  CHECK(th->n() == 1);
  CHECK(th->rows[0][1] == Rat(2, 7));

  auto jf = parse_json_text(R"({"m": 1, "n": 1, "scalar": "numberfield",
                                "minpoly": "x^2-2", "root": 1, "rows": [["t"]]})",
                            "test");
  auto anyf = read_theta_json(jf);
  REQUIRE(std::get_if<ThetaMatrix<NfReal>>(&anyf) != nullptr);

  CHECK_THROWS_AS(read_theta_json(parse_json_text(R"({"m": 0, "n": 1, "scalar": "rational",
                                                      "rows": []})",
                                                  "t")),
                  ParseError);
}

TEST_CASE("trace tables serialize deterministically") {
  ExponentTrace tr;
  tr.kind = ExponentKind::Regular;
  TraceEntry e1;
  e1.t = Rat(10);
  e1.lower = Interval::from_rat(Rat(1, 2), 64);
  e1.upper = Interval::from_rat(Rat(3, 4), 64);
  e1.witness = "u=(1, 2)";
  TraceEntry e2;
  e2.t = Rat(100);
  e2.upper = Interval::from_rat(Rat(1, 4), 64);
  tr.entries = {e1, e2};
  tr.notes.push_back("note with \"quotes\"");

  std::ostringstream a, b;
  write_trace_csv(a, tr);
  write_trace_csv(b, tr);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("kind,t,lower,upper,witness\n", 0) == 0);
  CHECK(a.str().find("regular,10,") != std::string::npos);
  CHECK(a.str().find(",w0\n") != std::string::npos);
  CHECK(a.str().find("regular,100,,") != std::string::npos);

  std::ostringstream w;
  write_witness_csv(w, tr);
  CHECK(w.str().find("w0,\"u=(1, 2)\"") != std::string::npos);
  CHECK(w.str().find("n0,\"note with \"\"quotes\"\"\"") != std::string::npos);

  std::ostringstream svg;
  write_convergence_svg(svg, tr, "demo");
  CHECK(svg.str().find("<svg") != std::string::npos);
  CHECK(svg.str().find("polyline") != std::string::npos);
}

TEST_CASE("empty-box certificates replay") {
  auto j = parse_json_text(R"({"dim": 2, "scalar": "rational",
                               "basis": [["1", "0"], ["0", "1"]]})",
                           "test");
  auto any = read_lattice_json(j);
  auto& l = std::get<Lattice<Rat>>(any);

  auto cert = empty_box_certificate(l, {Rat(9, 10), Rat(9, 10)}, "test");
  auto res = verify_certificate(cert);
  CHECK(res.ok);

  auto bad = empty_box_certificate(l, {Rat(1), Rat(1)}, "test");
  auto res2 = verify_certificate(bad);
  CHECK_FALSE(res2.ok);

  auto cert2 = parse_json_text(cert.dump(), "round-trip");
  CHECK(verify_certificate(cert2).ok);
}

TEST_CASE("minima certificates check membership and independence") {
  auto j = parse_json_text(R"({"dim": 2, "scalar": "rational",
                               "basis": [["1", "0"], ["0", "1"]]})",
                           "test");
  auto any = read_lattice_json(j);
  auto& l = std::get<Lattice<Rat>>(any);
  auto w = Weights::from_rats({Rat(1), Rat(1)});
  auto mins = successive_minima(l, w);
  REQUIRE(mins.size() == 2);

  auto cert = minima_certificate(l, {Rat(1), Rat(1)}, mins);
  CHECK(verify_certificate(cert).ok);

  Json tampered = cert;
  tampered["witnesses"][1] = Json::array({"5", "0"});
  CHECK_FALSE(verify_certificate(tampered).ok);

  Json unknown = Json{{"type", "else"}};
  CHECK_THROWS_AS(verify_certificate(unknown), ParseError);
}

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "suite.hpp"
#include "tpoly/fedosov.hpp"
#include "tpoly/globalize.hpp"
#include "tpoly/gra_action.hpp"
#include "tpoly/graph.hpp"
#include "tpoly/linfty.hpp"
#include "tpoly/random.hpp"
#include "tpoly/schouten.hpp"

using namespace tpoly;

namespace {

constexpr const char* kGrammars = R"(Input formats
  element     sum of terms `<coef> * <monomial>` or `<monomial>`, e.g. "1/2 * x1^2 y1 p1 e2 - y2 + 3".
              x<i>, y<i> even variables; p<i> = psi_i, e<i> = eta_i odd. Listed in element order.
  element list (--args)  elements separated by ';'.
  graph file  one term per line `[<coef> *] n=<int>; edges=(i,j),(k,l),...`, 1-based vertices,
              edges in the listed order; '#' comments. Terms are symmetrized over vertex labels.
  connection file  lines `Gamma k i j : <polynomial in x>`; Gamma k j i is filled in; '#' comments.
  morphism file    lines `F <n> : <coef> * <graph>` (component of arity n),
                   `exp: <coef> * <graph>` (degree-0 cochain to exponentiate), `order: <k>`.
Output
  results as serialized elements or graph sums; checks as `CHECK <name> PASS|FAIL`.
Exit codes
  0 success, 1 verification failure (including a refused condition gate), 2 input error.)";

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<GradedElement> parse_list(const std::string& text, int d, TruncationPolicy pol) {
  std::vector<GradedElement> out;
  std::stringstream in(text);
  std::string item;
  int k = 0;
  while (std::getline(in, item, ';')) out.push_back(parse_element(item, d, pol, ++k));
  return out;
}

// Raw labeled graph sum (no symmetrization), for phi.
GraphSum parse_raw_graphs(const std::string& text) {
  GraphSum out;
  const InvariantGraphSum probe = parse_graph_file(text);  // validates the grammar
  (void)probe;
  std::istringstream in(text);
  std::string raw;
  int lineNo = 0;
  while (std::getline(in, raw)) {
    ++lineNo;
    std::string line = raw.substr(0, raw.find('#'));
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Rational c = 1;
    if (const auto star = line.find('*'); star != std::string::npos) {
      std::string coef = line.substr(0, star);
      coef.erase(0, coef.find_first_not_of(" \t"));
      coef.erase(coef.find_last_not_of(" \t") + 1);
      c = parse_rational(coef);
      line = line.substr(star + 1);
    }
    const SignedGraph g = parse_graph(line, lineNo);
    if (g.sign != 0) out.add(g.graph, c * g.sign);
  }
  return out;
}

struct Checks {
  bool ok = true;
  void operator()(const std::string& name, bool pass) {
    std::cout << "CHECK " << name << (pass ? " PASS" : " FAIL") << "\n";
    ok = ok && pass;
  }
  int exit_code() const { return ok ? 0 : 1; }
};

std::string show(const GradedElement& a) {
  const std::string s = serialize(a);
  return s.empty() ? "0" : s;
}

std::string show(const InvariantGraphSum& g) { return g.is_zero() ? "0" : g.to_string(); }

ConnectionJet load_connection(const std::string& path, int d, int xOrder) {
  if (path.empty()) return ConnectionJet::flat(d, xOrder);
  return ConnectionJet::parse(read_file(path), d, xOrder);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polyvector fields, Fedosov resolution and graph-complex actions.\n\n" + std::string(kGrammars)};
  app.require_subcommand(1);

  int d = 2, yOrder = 4, xOrder = 3, arity = 2, count = 100;
  std::uint64_t seed = 1;
  std::string lhs, rhs, graphFile, argsText, connectionFile, morphismFile, elementText;
  bool fiber = false, cochain = false, timings = false;

  auto dims = [&](CLI::App* c) {
    c->add_option("--d", d, "dimension (1..6)")->check(CLI::Range(1, kMaxDim));
    c->add_option("--yorder", yOrder, "y truncation order")->check(CLI::Range(1, kMaxOrder));
    c->add_option("--xorder", xOrder, "x truncation order")->check(CLI::Range(0, kMaxOrder));
  };

  auto* bracket = app.add_subcommand("bracket", "Schouten bracket (vertical bracket if y or eta appear)");
  bracket->add_option("--lhs", lhs, "element")->required();
  bracket->add_option("--rhs", rhs, "element")->required();
  dims(bracket);

  auto* deltaSuite = app.add_subcommand("delta-suite", "homotopy identity and nilpotency on random forms");
  deltaSuite->add_option("--count", count, "number of random forms");
  deltaSuite->add_option("--seed", seed, "random seed");
  dims(deltaSuite);

  auto* fedosov = app.add_subcommand("fedosov", "solve for A and verify the Fedosov package");
  fedosov->add_option("--connection", connectionFile, "connection file (flat if omitted)");
  fedosov->add_option("--seed", seed, "random seed");
  dims(fedosov);

  auto* tauCmd = app.add_subcommand("tau", "D-closed lift of a polyvector field");
  tauCmd->add_option("--connection", connectionFile, "connection file (flat if omitted)");
  tauCmd->add_option("--element", elementText, "polyvector field")->required();
  dims(tauCmd);

  auto* graphDiff = app.add_subcommand("graph-diff", "differential [MC,-] of a graph sum");
  graphDiff->add_option("--graph", graphFile, "graph file")->required();

  auto* graphBracket = app.add_subcommand("graph-bracket", "Lie bracket of two graph sums");
  graphBracket->add_option("--lhs", lhs, "graph file")->required();
  graphBracket->add_option("--rhs", rhs, "graph file")->required();

  auto* phiCmd = app.add_subcommand("phi", "evaluate the graph operator on arguments");
  phiCmd->add_option("--graph", graphFile, "graph file (terms taken as listed)")->required();
  phiCmd->add_option("--args", argsText, "element list")->required();
  phiCmd->add_flag("--fiber", fiber, "act on y and psi, x and eta inert");
  phiCmd->add_flag("--cochain", cochain, "evaluate the symmetrized cochain instead");
  dims(phiCmd);

  auto* conditions = app.add_subcommand("check-conditions", "conditions (1)-(4) for a graph sum");
  conditions->add_option("--graph", graphFile, "graph file")->required();
  conditions->add_option("--arity", arity, "arity cap")->check(CLI::Range(1, 6));
  conditions->add_option("--d", d, "dimension")->check(CLI::Range(1, kMaxDim));
  conditions->add_option("--seed", seed, "random seed");

  auto* glob = app.add_subcommand("globalize", "build F^glob and verify it");
  glob->add_option("--morphism", morphismFile, "morphism file")->required();
  glob->add_option("--connection", connectionFile, "connection file (flat if omitted)");
  glob->add_option("--arity", arity, "arity cap")->check(CLI::Range(1, 6));
  glob->add_option("--seed", seed, "random seed");
  dims(glob);

  auto* verify = app.add_subcommand("verify-all", "run the acceptance suite");
  verify->add_option("--arity", arity, "arity cap")->check(CLI::Range(1, 6));
  verify->add_option("--seed", seed, "random seed");
  verify->add_flag("--timings", timings, "print wall-clock times");
  dims(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const TruncationPolicy pol{yOrder, xOrder};
    Checks check;

    if (*bracket) {
      const GradedElement f = parse_element(lhs, d, pol);
      const GradedElement g = parse_element(rhs, d, pol);
      const bool base = is_polyvector(f) && is_polyvector(g);
      std::cout << show(base ? schouten_bracket(f, g) : vertical_bracket(f, g)) << "\n";
      return 0;
    }

    if (*deltaSuite) {
      Random rng(seed);
      ElementShape s;
      s.terms = 6;
      s.maxYDegree = yOrder - 1;
      ElementShape top = s;
      top.maxYDegree = yOrder;
      bool homotopy = true, truncated = true, nil = true, proj = true;
      for (int t = 0; t < count; ++t) {
        const GradedElement f = rng.element(d, pol, s);
        homotopy = homotopy && (sigma(f) + delta(delta_star(f)) + delta_star(delta(f))).same_terms(f);
        const GradedElement g = rng.element(d, pol, top);
        truncated = truncated && equal_mod_truncation(sigma(g) + delta(delta_star(g)) + delta_star(delta(g)), g);
        nil = nil && delta(delta(f)).is_zero() && delta_star(delta_star(f)).is_zero() && de_rham(de_rham(f)).is_zero();
        proj = proj && sigma(sigma(f)).same_terms(sigma(f)) && sigma(delta(f)).is_zero();
      }
      check("homotopy-identity", homotopy);
      check("homotopy-identity-mod-truncation", truncated);
      check("nilpotency", nil);
      check("sigma-projection", proj);
      return check.exit_code();
    }

    if (*fedosov) {
      const FedosovData fd = solve_A(load_connection(connectionFile, d, xOrder), pol);
      std::cout << "A = " << show(fd.aForm) << "\n";
      std::cout << "B = " << show(fd.bForm) << "\n";
      std::cout << "iterations = " << fd.iterations << "\n";
      bool ydeg = true;
      for (const auto& [m, c] : fd.aForm.terms()) ydeg = ydeg && m.y_degree() >= 2;
      check("delta-star-A", delta_star(fd.aForm).is_zero());
      check("A-y-degree", ydeg);
      check("fedosov-residual", is_zero_mod_truncation(fedosov_residual(fd)));
      Random rng(seed);
      ElementShape s;
      s.terms = 3;
      s.maxXDegree = 1;
      s.maxYDegree = 2;
      bool dd = true;
      for (int t = 0; t < 10; ++t) {
        dd = dd && is_zero_mod_truncation(differential_D(fd, differential_D(fd, rng.element(d, pol, s))));
      }
      check("D-squared", dd);
      return check.exit_code();
    }

    if (*tauCmd) {
      const FedosovData fd = solve_A(load_connection(connectionFile, d, xOrder), pol);
      const GradedElement f0 = parse_element(elementText, d, pol);
      if (!is_polyvector(f0)) throw InputError("tau takes a polyvector field (no y, no eta)");
      const GradedElement f = tau(fd, f0);
      std::cout << show(f) << "\n";
      check("sigma-tau", sigma(f).same_terms(f0));
      check("D-tau", is_zero_mod_truncation(differential_D(fd, f)));
      return check.exit_code();
    }

    if (*graphDiff) {
      std::cout << show(differential(parse_graph_file(read_file(graphFile)))) << "\n";
      return 0;
    }

    if (*graphBracket) {
      std::cout << show(lie_bracket(parse_graph_file(read_file(lhs)), parse_graph_file(read_file(rhs)))) << "\n";
      return 0;
    }

    if (*phiCmd) {
      const std::string text = read_file(graphFile);
      const std::vector<GradedElement> args = parse_list(argsText, d, pol);
      const Variables vars = fiber ? Variables::Fiber : Variables::Base;
      if (cochain) {
        std::cout << show(evaluate_cochain(parse_graph_file(text), args, vars)) << "\n";
      } else {
        std::cout << show(phi_directed_expansion(parse_raw_graphs(text), args, vars)) << "\n";
      }
      return 0;
    }

    if (*conditions) {
      const ConditionReport r = check_conditions(parse_graph_file(read_file(graphFile)), arity, d, seed);
      check("condition-1-formal", r.formal);
      check("condition-2-equivariant", r.equivariant);
      check("condition-3-vector-fields", r.vectorFields);
      check("condition-4-linear-vector-field", r.linearVectorField);
      if (!r.detail.empty()) std::cout << r.detail << "\n";
      return check.exit_code();
    }

    if (*glob) {
      const auto f = parse_morphism(read_file(morphismFile), arity + d);
      const ConnectionJet cj = load_connection(connectionFile, d, xOrder);
      GlobalizeResult g;
      try {
        g = globalize(*f, cj, pol, arity);
      } catch (const ConditionGateError& e) {
        std::cout << "gate: condition (" << e.condition() << ") fails\n" << e.what() << "\n";
        return 1;
      }
      std::cout << "F^glob_n(f_1..f_n) = sigma F^{vert,B}_n(tau f_1, ..., tau f_n), n <= " << arity << "\n";
      std::cout << f->serialize();
      std::cout << "B = " << show(g.morphism->fedosov().bForm) << "\n";
      std::cout << g.report;
      const MorphismCheck mc = check_morphism(*g.morphism, schouten_structure(), schouten_structure(), arity,
                                              polyvector_sampler(d, pol), seed, 3);
      check("morphism-equations", mc.ok);
      if (!mc.ok) std::cout << mc.detail << "\n";
      check("descent", check_descent(*g.morphism, arity, seed));
      const InvarianceReport inv = step2_invariance_report(*f, g.morphism->fedosov(), arity, 10, seed);
      check("step2-invariance", inv.unchanged);
      if (!inv.unchanged) std::cout << inv.detail << "\n";
      return check.exit_code();
    }

    if (*verify) {
      suite::Options o;
      o.d = d;
      o.yOrder = yOrder;
      o.xOrder = xOrder;
      o.arityCap = arity;
      o.seed = seed;
      const auto results = suite::run_acceptance(o, [&](const suite::Check& c) {
        std::cout << suite::format(c, timings) << std::endl;
      });
      for (const auto& c : results) check.ok = check.ok && c.ok;
      return check.exit_code();
    }
  } catch (const TerminationError& e) {
    std::cerr << "termination: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#include <run_acceptance.hpp>
#include <io_json.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

// Driver for the torus quantization engine. Every number printed is exact;
// output for a fixed invocation is byte-stable. Exit codes: 0 success,
// 1 usage or configuration error, 2 a mathematical check failed.

namespace {

using dqio::EngineConfig;
using dqio::json;
using namespace dq;

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty() || !s.empty()) out.push_back(cur);
  return out;
}

std::vector<int> parse_int_list(const std::string &s) {
  std::vector<int> out;
  for (const std::string &tok : split(s, ',')) out.push_back(std::stoi(tok));
  return out;
}

GaussianRational parse_rational_token(const std::string &tok) {
  try {
    auto slash = tok.find('/');
    if (slash == std::string::npos) return GaussianRational(make_rational(std::stol(tok)));
    return GaussianRational(make_rational(std::stol(tok.substr(0, slash)), std::stol(tok.substr(slash + 1))));
  } catch (const std::logic_error &) {
    throw std::invalid_argument("rationals look like p or p/q, got " + tok);
  }
}

std::vector<GaussianRational> parse_rational_list(const std::string &s) {
  std::vector<GaussianRational> out;
  for (const std::string &tok : split(s, ',')) out.push_back(parse_rational_token(tok));
  return out;
}

// Inline JSON if the argument looks like a document, else a file path.
json read_json_arg(const std::string &arg) {
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) return json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw std::invalid_argument("cannot open " + arg);
  json j;
  in >> j;
  return j;
}

struct CommonOpts {
  std::string config_file;
  int order = 0;
  std::string omega;
  bool as_json = false;
};

void add_common(CLI::App *sub, CommonOpts &o) {
  sub->add_option("--config", o.config_file, "engine configuration JSON file");
  sub->add_option("--K", o.order, "truncation order of the deformation parameter");
  sub->add_option("--omega", o.omega, "curvature block coefficients C1,C2,... (rationals allowed as p/q)");
  sub->add_flag("--json", o.as_json, "machine-readable output");
}

EngineConfig resolve_config(const CommonOpts &o, int default_order) {
  EngineConfig c;
  c.order = default_order;
  if (!o.config_file.empty()) c = dqio::config_from(read_json_arg(o.config_file));
  if (o.order > 0) c.order = o.order;
  if (!o.omega.empty()) c.omega = parse_rational_list(o.omega);
  if (static_cast<int>(c.omega.size()) > c.order) throw std::invalid_argument("too many curvature coefficients for the truncation");
  return c;
}

std::string h1_text(const H1Class &h) {
  std::string out;
  for (size_t d = 0; d < h.size(); ++d) {
    if (d > 0) out += ", ";
    out += "[" + dqio::scalar_text(h[d]) + "] dtheta_" + std::to_string(d + 1);
  }
  return out;
}

int cmd_associativity(const CommonOpts &o, int count, unsigned long seed, int bound) {
  EngineConfig c = resolve_config(o, 4);
  if (c.omega.empty()) c.omega = {dqacc::detail::gr(1)};
  auto data = dqio::make_data(c);
  FedosovStar fed(data);
  MoyalProduct moyal(c.dim, c.order);
  std::mt19937 rng(static_cast<unsigned int>(seed));
  int checked = 0;
  for (int t = 0; t < count; ++t) {
    Fun f = Fun::mode(c.dim, c.order, dqacc::detail::random_mode(rng, c.dim, bound),
                      FormalScalar::constant(c.order, dqacc::detail::random_coeff(rng)));
    Fun g = Fun::mode(c.dim, c.order, dqacc::detail::random_mode(rng, c.dim, bound),
                      FormalScalar::constant(c.order, dqacc::detail::random_coeff(rng)));
    Fun h = Fun::mode(c.dim, c.order, dqacc::detail::random_mode(rng, c.dim, bound),
                      FormalScalar::constant(c.order, dqacc::detail::random_coeff(rng)));
    if (!check_associativity(moyal, f, g, h) || !check_associativity(fed, f, g, h)) {
      std::cout << (o.as_json ? json{{"triples", t}, {"pass", false}}.dump(2) : "associativity failed on triple " + std::to_string(t))
                << "\n";
      return 2;
    }
    ++checked;
  }
  if (o.as_json)
    std::cout << json{{"triples", checked}, {"products", json::array({moyal.name(), fed.name()})}, {"pass", true}}.dump(2)
              << "\n";
  else
    std::cout << "checked " << checked << " seeded triples on both products, all associative\n";
  return 0;
}

int cmd_star_table(const CommonOpts &o, const std::string &pairs_arg, const std::string &product) {
  EngineConfig c = resolve_config(o, 3);
  std::unique_ptr<StarProduct> star;
  if (product == "moyal") {
    star = std::make_unique<MoyalProduct>(c.dim, c.order);
  } else if (product == "fedosov") {
    star = std::make_unique<FedosovStar>(dqio::make_data(c));
  } else {
    throw std::invalid_argument("unknown product " + product);
  }
  json table = json::array();
  if (!pairs_arg.empty())
    for (const std::string &pair_tok : split(pairs_arg, ';')) {
      std::vector<std::string> sides = split(pair_tok, ':');
      if (sides.size() != 2) throw std::invalid_argument("mode pairs look like m1,m2:n1,n2;...");
      Mode m = parse_int_list(sides[0]);
      Mode n = parse_int_list(sides[1]);
      Fun em = Fun::basis_mode(c.dim, c.order, m);
      Fun en = Fun::basis_mode(c.dim, c.order, n);
      json cochains = json::array();
      for (int k = 0; k <= c.order; ++k) cochains.push_back(dqio::fun_json(star_cochain(*star, k, em, en)));
      table.push_back(json{{"m", m}, {"n", n}, {"product", dqio::fun_json(star->eval(em, en))}, {"cochains", cochains}});
    }
  std::cout << json{{"product", star->name()}, {"truncation", c.order}, {"pairs", table}}.dump(2) << "\n";
  return 0;
}

int cmd_oracle_gate(const CommonOpts &o, int bound) {
  EngineConfig c = resolve_config(o, 4);
  c.omega.clear();
  auto data = dqio::make_data(c);
  FedosovStar fed(data);
  MoyalProduct moyal(c.dim, c.order);
  int pairs = 0;
  for (int m1 = -bound; m1 <= bound; ++m1)
    for (int m2 = -bound; m2 <= bound; ++m2)
      for (int n1 = -bound; n1 <= bound; ++n1)
        for (int n2 = -bound; n2 <= bound; ++n2) {
          Fun em = Fun::basis_mode(2, c.order, {m1, m2});
          Fun en = Fun::basis_mode(2, c.order, {n1, n2});
          if (fed.eval(em, en) != moyal.eval(em, en)) {
            if (o.as_json)
              std::cout << json{{"pairs_checked", pairs}, {"residual_zero", false},
                                {"first_mismatch", json{{"m", json::array({m1, m2})}, {"n", json::array({n1, n2})}}}}
                               .dump(2)
                        << "\n";
            else
              std::cout << "mismatch at (" << m1 << "," << m2 << ") x (" << n1 << "," << n2 << ")\n";
            return 2;
          }
          ++pairs;
        }
  if (o.as_json)
    std::cout << json{{"pairs_checked", pairs}, {"residual_zero", true}}.dump(2) << "\n";
  else
    std::cout << "quantized flat product matches the invariant oracle on " << pairs << " mode pairs through nu^"
              << c.order << "\n";
  return 0;
}

int cmd_flux_rotation(const CommonOpts &o, const std::string &v_arg) {
  EngineConfig c = resolve_config(o, 3);
  std::vector<int> v = parse_int_list(v_arg);
  auto data = dqio::make_data(c);
  H1Class classical = rotation_periods(c.dim, c.order, v);
  H1Class deformed = flux_def_of_loop({data, v});
  H1Class closed = flux_def_closed_form({data, v});
  bool match = deformed == closed;
  if (o.as_json) {
    std::cout << json{{"classical", dqio::h1_json(classical)},
                      {"deformed", dqio::h1_json(deformed)},
                      {"closed_form", dqio::h1_json(closed)},
                      {"match", match}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "classical:   " << h1_text(classical) << "\n";
    std::cout << "deformed:    " << h1_text(deformed) << "\n";
    std::cout << "closed form: " << h1_text(closed) << "\n";
    std::cout << (match ? "routes agree" : "routes disagree") << "\n";
  }
  return match ? 0 : 2;
}

int cmd_gamma_table(const CommonOpts &o, const std::string &sweep_file) {
  EngineConfig base = resolve_config(o, 3);
  json sweep = json::array();
  if (!sweep_file.empty())
    sweep = read_json_arg(sweep_file);
  else
    sweep.push_back(json::array());
  json rows = json::array();
  std::ostringstream csv;
  csv << "omega,loop";
  for (int d = 1; d <= base.dim; ++d) csv << ",dtheta_" << d;
  csv << "\n";
  for (const json &entry : sweep) {
    EngineConfig c = base;
    c.omega.clear();
    for (const json &coeff : entry) c.omega.push_back(dqio::complex_from(coeff));
    if (static_cast<int>(c.omega.size()) > c.order) throw std::invalid_argument("too many curvature coefficients for the truncation");
    auto data = dqio::make_data(c);
    std::vector<H1Class> gens = gamma_generators(data);
    std::string label;
    for (size_t k = 0; k < c.omega.size(); ++k) label += (k ? ";" : "") + std::string("C") + std::to_string(k + 1) + "=" + c.omega[k].str();
    if (label.empty()) label = "zero";
    json gen_json = json::array();
    for (size_t j = 0; j < gens.size(); ++j) {
      csv << label << ",e_" << (j + 1);
      for (const FormalScalar &comp : gens[j]) csv << "," << dqio::scalar_text(comp);
      csv << "\n";
      gen_json.push_back(dqio::h1_json(gens[j]));
    }
    json omega_json = json::array();
    for (const GaussianRational &z : c.omega) omega_json.push_back(dqio::complex_json(z));
    rows.push_back(json{{"omega", omega_json}, {"generators", gen_json}});
  }
  if (o.as_json)
    std::cout << json{{"truncation", base.order}, {"rows", rows}}.dump(2) << "\n";
  else
    std::cout << csv.str();
  return 0;
}

int cmd_heisenberg_demo(const CommonOpts &o, const std::string &h_arg) {
  EngineConfig c = resolve_config(o, 3);
  Fun H = dqio::fun_from(read_json_arg(h_arg));
  if (H.dim() != c.dim || H.order() != c.order) throw std::invalid_argument("hamiltonian dim or truncation does not match the configuration");
  for (const auto &[m, coeff] : H.coeffs())
    if (!is_zero_mode(m) && !coeff.coeff(0).is_zero())
      throw std::invalid_argument("hamiltonian must vanish at order zero away from the zero mode");
  auto data = dqio::make_data(c);
  PathGenerator gen = quasi_inner_path(data, H.map_scalars([](const FormalScalar &s) { return TimeFun::constant(s); }));
  Automorphism end = heisenberg_flow(gen).endpoint();
  std::vector<Mode> probes;
  for (int d = 1; d <= c.dim; ++d) {
    Mode m = zero_mode(c.dim);
    m[static_cast<size_t>(d - 1)] = 1;
    probes.push_back(m);
  }
  probes.push_back(Mode(static_cast<size_t>(c.dim), 1));
  json rows = json::array();
  std::ostringstream text;
  for (const Mode &m : probes) {
    Fun image = end.apply(Fun::basis_mode(c.dim, c.order, m));
    rows.push_back(json{{"m", m}, {"image", dqio::fun_json(image)}});
    text << "e(";
    for (size_t k = 0; k < m.size(); ++k) text << (k ? "," : "") << m[k];
    text << ") ->";
    for (const auto &[mm, coeff] : image.coeffs()) {
      text << "  (";
      for (size_t k = 0; k < mm.size(); ++k) text << (k ? "," : "") << mm[k];
      text << "): " << dqio::scalar_text(coeff);
    }
    text << "\n";
  }
  if (o.as_json)
    std::cout << json{{"truncation", c.order}, {"probes", rows}}.dump(2) << "\n";
  else
    std::cout << text.str();
  return 0;
}

int cmd_equiv_check(const CommonOpts &o, const std::string &t_file, const std::string &loop_arg) {
  EngineConfig c = resolve_config(o, 3);
  json tj = read_json_arg(t_file);
  if (tj.contains("dim") && tj.at("dim").get<int>() != c.dim) throw std::invalid_argument("transport dim does not match the configuration");
  if (tj.contains("truncation") && tj.at("truncation").get<int>() != c.order)
    throw std::invalid_argument("transport truncation does not match the configuration");
  EquivalenceOperator T(c.dim, c.order);
  for (const json &term : tj.at("terms"))
    T.add_term(term.at("r").get<int>(), term.at("alpha").get<std::vector<int>>(), dqio::fun_from(term.at("coeff")));
  std::vector<int> v = parse_int_list(loop_arg);
  auto data = dqio::make_data(c);
  H1Class base = flux_def_of_loop({data, v});
  H1Class transported = flux_transported_loop(data, T, v);
  bool match = base == transported;
  if (o.as_json)
    std::cout << json{{"base", dqio::h1_json(base)}, {"transported", dqio::h1_json(transported)}, {"match", match}}.dump(2)
              << "\n";
  else
    std::cout << "base:        " << h1_text(base) << "\ntransported: " << h1_text(transported) << "\n"
              << (match ? "flux is transport invariant" : "flux moved under the transport") << "\n";
  return match ? 0 : 2;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"exact deformation quantization engine for standard symplectic tori"};
  app.require_subcommand(1);

  CommonOpts assoc_opts;
  int assoc_count = 100;
  unsigned long assoc_seed = dqacc::kDefaultSeed;
  int assoc_bound = 2;
  CLI::App *assoc = app.add_subcommand("associativity-check", "seeded associativity sweep on both products");
  add_common(assoc, assoc_opts);
  assoc->add_option("--count", assoc_count, "number of random triples");
  assoc->add_option("--seed", assoc_seed, "seed for the triple generator");
  assoc->add_option("--max-mode", assoc_bound, "mode sup-norm bound");

  CommonOpts table_opts;
  std::string table_pairs;
  std::string table_product = "moyal";
  CLI::App *table = app.add_subcommand("star-table", "cochain tables for listed mode pairs, as JSON");
  add_common(table, table_opts);
  table->add_option("--pairs", table_pairs, "mode pairs m1,m2:n1,n2;... (empty for an empty table)");
  table->add_option("--product", table_product, "moyal or fedosov");

  CommonOpts gate_opts;
  int gate_bound = 2;
  CLI::App *gate = app.add_subcommand("fedosov-vs-moyal", "flat zero-curvature product against the closed-form oracle");
  add_common(gate, gate_opts);
  gate->add_option("--modes", gate_bound, "mode sup-norm bound for the pair sweep");

  CommonOpts flux_opts;
  std::string flux_v;
  CLI::App *flux = app.add_subcommand("flux-rotation", "classical and deformed flux of a rotation loop");
  add_common(flux, flux_opts);
  flux->add_option("--v", flux_v, "integer winding vector, e.g. 1,0")->required();

  CommonOpts gamma_opts;
  std::string gamma_sweep;
  CLI::App *gamma = app.add_subcommand("gamma-table", "generator classes per curvature datum, as CSV");
  add_common(gamma, gamma_opts);
  gamma->add_option("--omega-sweep", gamma_sweep, "JSON file with a list of curvature coefficient lists");

  CommonOpts heis_opts;
  std::string heis_h;
  CLI::App *heis = app.add_subcommand("heisenberg-demo", "endpoint action of an inner hamiltonian flow on probes");
  add_common(heis, heis_opts);
  heis->add_option("--H", heis_h, "hamiltonian as inline JSON or a file path")->required();

  CommonOpts equiv_opts;
  std::string equiv_t;
  std::string equiv_loop = "1,0";
  CLI::App *equiv = app.add_subcommand("equiv-check", "loop flux invariance under an equivalence transport");
  add_common(equiv, equiv_opts);
  equiv->add_option("--T", equiv_t, "transport operator JSON (inline or file)")->required();
  equiv->add_option("--loop", equiv_loop, "integer winding vector of the loop");

  int acc_order = 3;
  unsigned long acc_seed = dqacc::kDefaultSeed;
  CLI::App *acc = app.add_subcommand("acceptance", "run the full golden-value suite");
  acc->add_option("--K", acc_order, "truncation order for the flux criteria (minimum 3)");
  acc->add_option("--seed", acc_seed, "seed for the randomized sweeps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  try {
    if (assoc->parsed()) return cmd_associativity(assoc_opts, assoc_count, assoc_seed, assoc_bound);
    if (table->parsed()) return cmd_star_table(table_opts, table_pairs, table_product);
    if (gate->parsed()) return cmd_oracle_gate(gate_opts, gate_bound);
    if (flux->parsed()) return cmd_flux_rotation(flux_opts, flux_v);
    if (gamma->parsed()) return cmd_gamma_table(gamma_opts, gamma_sweep);
    if (heis->parsed()) return cmd_heisenberg_demo(heis_opts, heis_h);
    if (equiv->parsed()) return cmd_equiv_check(equiv_opts, equiv_t, equiv_loop);
    if (acc->parsed()) {
      if (acc_order < 3) throw std::invalid_argument("the acceptance suite needs --K of at least 3");
      return dqacc::run_acceptance_suite(std::cout, acc_order, acc_seed) == 0 ? 0 : 2;
    }
  } catch (const std::invalid_argument &e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception &e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

#include "hormander/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <boost/math/tools/roots.hpp>

#include "hormander/chebyshev.hpp"
#include "hormander/darwin.hpp"
#include "hormander/index.hpp"
#include "hormander/io.hpp"
#include "hormander/maslov.hpp"
#include "hormander/orbit.hpp"
#include "hormander/rng.hpp"

namespace hormander {

namespace {

using io::Json;

struct Common {
  std::uint64_t seed = 1;
  double tol = 0;
  std::string output;
};

Json header(const char* command, const Common& c) {
  Json j;
  j["v"] = io::kSchemaVersion;
  j["version"] = io::kVersion;
  j["command"] = command;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  return j;
}

Json error_json(const Error& e) {
  return Json{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
}

std::optional<IndexMethod> method_from_string(const std::string& s) {
  if (s == "formula") return IndexMethod::Formula;
  if (s == "qform") return IndexMethod::QuadraticForm;
  if (s == "path") return IndexMethod::PathDifference;
  return std::nullopt;
}

std::vector<IndexMethod> parse_methods(const std::vector<std::string>& names) {
  std::vector<IndexMethod> out;
  for (const auto& name : names) {
    const auto m = method_from_string(name);
    if (!m) throw Error(ErrorCode::MalformedInput, "unknown method '" + name + "'");
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  return out;
}

// One index evaluation; phi_k is the k-th power of the assembled blocks.
IndexResult evaluate(IndexMethod method, const ReturnMapBlocks& blocks, const Matrix& phi_k, int k,
                     std::uint64_t seed) {
  IndexResult r;
  switch (method) {
    case IndexMethod::Formula: return hormander_index_formula(blocks, k);
    case IndexMethod::QuadraticForm: r = hormander_index_quadratic_form(phi_k); break;
    case IndexMethod::PathDifference: r = hormander_via_paths(phi_k, seed); break;
  }
  r.k = k;
  return r;
}

// Entries {k, method, nondegenerate, s | error} for k = 1..k_max.
Json index_table(const ReturnMapBlocks& blocks, int k_max, const std::vector<IndexMethod>& methods,
                 std::uint64_t seed, bool& any_error) {
  const NondegeneracyReport nd = nondegeneracy_check(blocks, k_max);
  const Matrix phi = blocks.assemble();
  Matrix phi_k = Matrix::Identity(phi.rows(), phi.cols());
  Json results = Json::array();
  for (int k = 1; k <= k_max; ++k) {
    phi_k = phi_k * phi;
    for (IndexMethod m : methods) {
      Json entry;
      entry["k"] = k;
      entry["method"] = std::string(to_string(m));
      entry["nondegenerate"] = static_cast<bool>(nd.nondegenerate[k - 1]);
      if (nd.nondegenerate[k - 1]) {
        try {
          const IndexResult r = evaluate(m, blocks, phi_k, k, mix_seed(seed, k));
          entry["s"] = io::to_json(r.s);
          if (m != IndexMethod::PathDifference) entry["inertia"] = io::to_json(r.inertia);
        } catch (const Error& e) {
          entry["error"] = error_json(e);
          any_error = true;
        }
      }
      results.push_back(std::move(entry));
    }
  }
  return results;
}

Json nondegeneracy_json(const NondegeneracyReport& nd) {
  Json j;
  j["det"] = nd.det_values;
  j["threshold"] = nd.thresholds;
  j["det_c"] = nd.det_c;
  j["c_invertible"] = nd.c_invertible;
  j["inconsistent"] = nd.inconsistent;
  return j;
}

std::string read_all(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string read_input(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") return read_all(in);
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::MalformedInput, "cannot open input file '" + path + "'");
  return read_all(f);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---- subcommands ----------------------------------------------------------

struct IndexArgs {
  std::string input = "-";
  int k_max = 6;
  std::string method = "both";
};

int cmd_index(const IndexArgs& a, const Common& c, std::istream& in, std::ostream& out) {
  std::vector<IndexMethod> methods;
  if (a.method == "both") {
    methods = {IndexMethod::Formula, IndexMethod::QuadraticForm};
  } else if (a.method == "all") {
    methods = {IndexMethod::Formula, IndexMethod::QuadraticForm, IndexMethod::PathDifference};
  } else {
    methods = parse_methods({a.method});
  }
  const ReturnMapBlocks blocks = io::parse_blocks(read_input(a.input, in), c.tol);
  bool any_error = false;
  Json doc = header("index", c);
  doc["n"] = blocks.n();
  doc["k_max"] = a.k_max;
  doc["nondegeneracy"] = nondegeneracy_json(nondegeneracy_check(blocks, a.k_max));
  doc["results"] = index_table(blocks, a.k_max, methods, c.seed, any_error);
  out << doc.dump(2) << '\n';
  return kExitOk;
}

struct VerifyArgs {
  int n = 2;
  int trials = 100;
  int k_max = 6;
  double scale = 0.5;
  unsigned threads = 1;
  std::vector<std::string> methods = {"formula", "qform", "path"};
};

struct TrialOutcome {
  int checks = 0;
  int degenerate = 0;
  int agreements = 0;
  Json disagreements = Json::array();
};

TrialOutcome run_trial(const VerifyArgs& a, const std::vector<IndexMethod>& methods,
                       const Common& c, int trial) {
  TrialOutcome out;
  const std::uint64_t seed = mix_seed(c.seed, static_cast<std::uint64_t>(trial));
  const ReturnMapBlocks blocks = random_return_map(a.n, seed, a.scale);
  const NondegeneracyReport nd = nondegeneracy_check(blocks, a.k_max);
  const Matrix phi = blocks.assemble();
  Matrix phi_k = Matrix::Identity(phi.rows(), phi.cols());
  for (int k = 1; k <= a.k_max; ++k) {
    phi_k = phi_k * phi;
    if (!nd.nondegenerate[k - 1]) {
      ++out.degenerate;
      continue;
    }
    ++out.checks;
    Json values;
    std::optional<HalfInteger> first;
    bool agree = true;
    for (IndexMethod m : methods) {
      const std::string name(to_string(m));
      try {
        const IndexResult r = evaluate(m, blocks, phi_k, k, mix_seed(seed, k));
        values[name] = io::to_json(r.s);
        if (!first) first = r.s;
        agree = agree && *first == r.s;
      } catch (const Error& e) {
        values[name] = Json{{"error", error_json(e)}};
        agree = false;
      }
    }
    if (agree) {
      ++out.agreements;
    } else {
      Json d;
      d["trial"] = trial;
      d["seed"] = seed;
      d["k"] = k;
      d["blocks"] = io::blocks_to_json(blocks);
      d["values"] = std::move(values);
      out.disagreements.push_back(std::move(d));
    }
  }
  return out;
}

int cmd_verify(const VerifyArgs& a, const Common& c, std::ostream& out) {
  const std::vector<IndexMethod> methods = parse_methods(a.methods);
  if (methods.size() < 2) {
    throw Error(ErrorCode::MalformedInput, "verify needs at least two distinct methods");
  }
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(a.trials));
  std::atomic<int> next{0};
  std::vector<std::string> failures(outcomes.size());
  auto worker = [&] {
    for (int t = next++; t < a.trials; t = next++) {
      try {
        outcomes[static_cast<std::size_t>(t)] = run_trial(a, methods, c, t);
      } catch (const std::exception& e) {
        failures[static_cast<std::size_t>(t)] = e.what();
      }
    }
  };
  const unsigned workers = std::clamp<unsigned>(a.threads, 1, static_cast<unsigned>(a.trials));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& f : failures) {
    if (!f.empty()) throw Error(ErrorCode::MalformedInput, "trial failed: " + f);
  }

  Json doc = header("verify", c);
  doc["n"] = a.n;
  doc["k_max"] = a.k_max;
  doc["scale"] = a.scale;
  Json names = Json::array();
  for (IndexMethod m : methods) names.push_back(std::string(to_string(m)));
  doc["methods"] = std::move(names);
  int checks = 0, degenerate = 0, agreements = 0;
  Json disagreements = Json::array();
  for (auto& o : outcomes) {
    checks += o.checks;
    degenerate += o.degenerate;
    agreements += o.agreements;
    for (auto& d : o.disagreements) disagreements.push_back(std::move(d));
  }
  doc["trials"] = a.trials;
  doc["checks"] = checks;
  doc["degenerate"] = degenerate;
  doc["agreements"] = agreements;
  doc["disagreements"] = disagreements;
  out << doc.dump(2) << '\n';
  return disagreements.empty() ? kExitOk : kExitDisagreement;
}

struct ChebArgs {
  std::optional<int> k;
  std::optional<int> k_max;
  int points = 21;
};

int cmd_cheb(const ChebArgs& a, const Common& c, std::ostream& out) {
  int k_lo = 0, k_hi = 0;
  if (a.k) {
    k_lo = k_hi = *a.k;
  } else {
    k_hi = a.k_max.value_or(4);
  }
  out << "# hormander cheb v=" << io::kSchemaVersion << " version=" << io::kVersion
      << " seed=" << c.seed << " tol=" << format_double(c.tol) << '\n';
  out << "k,x,T,U\n";
  for (int k = k_lo; k <= k_hi; ++k) {
    for (int i = 0; i < a.points; ++i) {
      const double x = a.points == 1 ? 0.0 : -1.0 + 2.0 * i / (a.points - 1);
      out << k << ',' << format_double(x) << ',' << format_double(cheb_scalar(ChebKind::First, k, x))
          << ',' << format_double(cheb_scalar(ChebKind::Second, k, x)) << '\n';
    }
  }
  return kExitOk;
}

struct OrbitArgs {
  std::string system;
  std::string seed_point;
  double half_period = std::numbers::pi;
  int k_max = 6;
  std::vector<std::string> methods = {"formula", "qform", "path"};
};

std::vector<double> split_numbers(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ':')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedInput, what + ": '" + part + "' is not a number");
    }
  }
  return out;
}

// Turning point q2 > 0 of the vertical Henon-Heiles orbit: q^2/2 - q^3/3 = e.
double henon_heiles_turning_point(double e) {
  auto f = [e](double q) { return 0.5 * q * q - q * q * q / 3.0 - e; };
  auto done = [](double lo, double hi) { return hi - lo < 1e-16; };
  const auto [lo, hi] = boost::math::tools::bisect(f, 0.0, 1.0, done);
  return 0.5 * (lo + hi);
}

int cmd_orbit(const OrbitArgs& a, const Common& c, std::ostream& out) {
  const std::vector<IndexMethod> methods = parse_methods(a.methods);
  const auto colon = a.system.find(':');
  const std::string kind = a.system.substr(0, colon);
  const std::vector<double> params =
      colon == std::string::npos ? std::vector<double>{}
                                 : split_numbers(a.system.substr(colon + 1), "--system");

  HamiltonianSystem sys;
  Vector seed(4);
  if (kind == "oscillator") {
    if (params.size() != 2) {
      throw Error(ErrorCode::MalformedInput, "--system oscillator:w1:w2 needs two frequencies");
    }
    sys = HamiltonianSystem::oscillator(params[0], params[1]);
    seed << 1.0, 0.0, 0.0, 0.0;
  } else if (kind == "henon-heiles") {
    if (params.size() != 1) {
      throw Error(ErrorCode::MalformedInput, "--system henon-heiles:energy needs one energy");
    }
    const double e = params[0];
    if (!(e > 0 && e < 1.0 / 6.0)) {
      throw Error(ErrorCode::MalformedInput, "Henon-Heiles energy must lie in (0, 1/6)");
    }
    sys = HamiltonianSystem::henon_heiles();
    seed << 0.0, henon_heiles_turning_point(e), 0.0, 0.0;
    if (!a.seed_point.empty()) {
      const Vector given = io::parse_vector(a.seed_point, "--seed-point");
      if (given.size() == 4 && std::abs(sys.hamiltonian(given) - e) > 1e-9 * std::max(1.0, e)) {
        throw Error(ErrorCode::MalformedInput, "--seed-point does not lie on the requested energy");
      }
    }
  } else {
    throw Error(ErrorCode::MalformedInput, "unknown system '" + kind + "'");
  }
  if (!a.seed_point.empty()) {
    seed = io::parse_vector(a.seed_point, "--seed-point");
    if (seed.size() != sys.dim) {
      throw Error(ErrorCode::MalformedInput, "--seed-point needs " + std::to_string(sys.dim) +
                                                 " coordinates");
    }
  }
  validate_system(sys, c.seed);

  const SymmetricOrbit orbit = find_symmetric_orbit(sys, seed, a.half_period, c.tol);
  const TransverseSection section = build_transverse_section(sys, orbit, c.seed);
  const ReducedMonodromy red = reduced_monodromy(sys, orbit, section);

  Json doc = header("orbit", c);
  doc["system"] = Json{{"name", sys.name}, {"parameters", params}};
  Json o;
  o["x"] = io::vector_to_json(orbit.x);
  o["eta"] = orbit.eta;
  o["energy"] = orbit.energy;
  o["residual"] = orbit.residual;
  o["iterations"] = orbit.iterations;
  doc["orbit"] = std::move(o);
  doc["section"] = Json{{"attempts", section.attempts},
                        {"residual", check_section(sys, orbit, section).max_residual()}};
  doc["blocks"] = io::blocks_to_json(red.blocks);
  doc["darwin_residual"] = validate_darwin(red.blocks, 1e-6).max_residual();
  doc["k_max"] = a.k_max;
  doc["nondegeneracy"] = nondegeneracy_json(nondegeneracy_check(red.blocks, a.k_max));
  bool any_error = false;
  doc["indices"] = index_table(red.blocks, a.k_max, methods, c.seed, any_error);
  out << doc.dump(2) << '\n';
  return kExitOk;
}

void add_common(CLI::App* sub, Common& c, double default_tol) {
  c.tol = default_tol;
  sub->add_option("--seed", c.seed, "64-bit random seed")->capture_default_str();
  sub->add_option("--tol", c.tol, "tolerance")->capture_default_str()->check(
      CLI::PositiveNumber);
  sub->add_option("-o,--output", c.output, "write the document to this file");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Hormander indices of symmetric periodic orbits"};
  app.require_subcommand(1);

  Common c_index, c_verify, c_cheb, c_orbit;

  IndexArgs ia;
  auto* index = app.add_subcommand("index", "indices of the iterates of a return map");
  index->add_option("input", ia.input, "blocks JSON file, '-' for standard input");
  index->add_option("--k-max", ia.k_max)->capture_default_str()->check(CLI::PositiveNumber);
  index->add_option("--method", ia.method)
      ->capture_default_str()
      ->check(CLI::IsMember({"formula", "qform", "path", "both", "all"}));
  add_common(index, c_index, 1e-8);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "cross-check the index oracles on random maps");
  verify->add_option("--n", va.n)->capture_default_str()->check(CLI::Range(1, 8));
  verify->add_option("--trials", va.trials)->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--k-max", va.k_max)->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--scale", va.scale)->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--threads", va.threads)->capture_default_str()->check(CLI::Range(1u, 256u));
  verify->add_option("--methods", va.methods)
      ->delimiter(',')
      ->check(CLI::IsMember({"formula", "qform", "path"}));
  add_common(verify, c_verify, 1e-8);

  ChebArgs ca;
  auto* cheb = app.add_subcommand("cheb", "Chebyshev table as CSV");
  auto* opt_k = cheb->add_option("--k", ca.k, "single degree")->check(CLI::NonNegativeNumber);
  auto* opt_kmax =
      cheb->add_option("--k-max", ca.k_max, "degrees 0..k-max")->check(CLI::NonNegativeNumber);
  opt_k->excludes(opt_kmax);
  cheb->add_option("--points", ca.points)->capture_default_str()->check(CLI::Range(1, 100000));
  add_common(cheb, c_cheb, 1e-12);

  OrbitArgs oa;
  auto* orbit = app.add_subcommand("orbit", "symmetric orbit, reduced return map and indices");
  orbit->add_option("--system", oa.system, "oscillator:w1:w2 or henon-heiles:energy")->required();
  orbit->add_option("--seed-point", oa.seed_point, "JSON array on the fixed set");
  orbit->add_option("--half-period", oa.half_period, "initial guess")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  orbit->add_option("--k-max", oa.k_max)->capture_default_str()->check(CLI::PositiveNumber);
  orbit->add_option("--methods", oa.methods)
      ->delimiter(',')
      ->check(CLI::IsMember({"formula", "qform", "path"}));
  add_common(orbit, c_orbit, 1e-10);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  const Common& c = index->parsed()    ? c_index
                    : verify->parsed() ? c_verify
                    : cheb->parsed()   ? c_cheb
                                       : c_orbit;
  const char* name = index->parsed()    ? "index"
                     : verify->parsed() ? "verify"
                     : cheb->parsed()   ? "cheb"
                                        : "orbit";

  std::ostringstream doc;
  int code = kExitOk;
  try {
    if (index->parsed()) code = cmd_index(ia, c, in, doc);
    if (verify->parsed()) code = cmd_verify(va, c, doc);
    if (cheb->parsed()) code = cmd_cheb(ca, c, doc);
    if (orbit->parsed()) code = cmd_orbit(oa, c, doc);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    Json j = header(name, c);
    j["error"] = error_json(e);
    doc.str("");
    doc << j.dump(2) << '\n';
    code = kExitInputError;
  }

  if (c.output.empty()) {
    out << doc.str();
  } else {
    std::ofstream f(c.output, std::ios::binary);
    if (!f || !(f << doc.str())) {
      err << "error: cannot write '" << c.output << "'\n";
      return kExitInputError;
    }
  }
  return code;
}

}  // namespace hormander

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kcenter/kcenter.hpp"

namespace {

using json = nlohmann::ordered_json;
using kcenter::Rational;
using kcenter::Variant;

constexpr int kExitMismatch = 1;
constexpr int kExitIo = 2;
constexpr int kExitParams = 3;

struct Failure {
  int code;
  std::string message;
};

std::string read_all(std::istream& in) { return {std::istreambuf_iterator<char>(in), {}}; }

std::string read_input(const std::string& path, bool use_stdin) {
  if (use_stdin) return read_all(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitIo, "cannot open '" + path + "'"};
  return read_all(in);
}

Variant parse_variant(const std::string& s) { return s == "discrete" ? Variant::discrete : Variant::continuous; }

template <class S>
json scalar_json(const S& v) {
  return {{"fraction", kcenter::ScalarTraits<S>::fraction(v)}, {"decimal", kcenter::decimal17(v)}};
}

template <class S>
json solve_report(const std::string& text, const std::string& source, long long k_override, Variant var,
                  const std::string& scalar) {
  kcenter::Instance<S> inst;
  try {
    inst = kcenter::parse_instance<S>(text);
  } catch (const kcenter::ParseError& e) {
    throw Failure{kExitIo, std::string("parse error: ") + e.what()};
  }
  if (k_override != 0) inst.k = k_override;
  if (inst.k < 1) throw Failure{kExitParams, "k must be at least 1"};

  kcenter::SolverConfig cfg;
  cfg.variant = var;
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = kcenter::solve(inst.tree, inst.k, cfg);
  const double total = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  json centers = json::array();
  for (const auto& c : res.centers) {
    json p = {{"vertex", c.vertex + 1}, {"toward", nullptr}, {"offset", kcenter::format_scalar(c.offset)}};
    if (c.toward >= 0) p["toward"] = c.toward + 1;
    centers.push_back(std::move(p));
  }
  const auto& st = res.stats;
  return {
      {"instance", {{"source", source}, {"n", inst.tree.n}, {"k", inst.k}}},
      {"mode", kcenter::to_string(var)},
      {"scalar", scalar},
      {"lambda_star", scalar_json(res.lambda_star)},
      {"centers", std::move(centers)},
      {"feasibility_tests",
       {{"preprocess", st.tests_preprocess},
        {"phase0", st.tests_phase0},
        {"phase1", st.tests_phase1},
        {"phase2", st.tests_phase2},
        {"total", st.feasibility_tests()}}},
      {"wall_ms",
       {{"preprocess", st.ms_preprocess},
        {"phase0", st.ms_phase0},
        {"phase1", st.ms_phase1},
        {"phase2", st.ms_phase2},
        {"total", total}}},
  };
}

void print_text(const json& r) {
  std::cout << "instance: " << r["instance"]["source"].get<std::string>() << " (n=" << r["instance"]["n"]
            << ", k=" << r["instance"]["k"] << ")\n"
            << "mode: " << r["mode"].get<std::string>() << ", scalar: " << r["scalar"].get<std::string>() << '\n'
            << "lambda_star: " << r["lambda_star"]["fraction"].get<std::string>() << " ("
            << r["lambda_star"]["decimal"].get<std::string>() << ")\n"
            << "centers:";
  for (const auto& c : r["centers"]) {
    std::cout << ' ' << c["vertex"];
    if (!c["toward"].is_null()) std::cout << "->" << c["toward"] << '@' << c["offset"].get<std::string>();
  }
  const auto& ft = r["feasibility_tests"];
  std::cout << "\nfeasibility tests: " << ft["total"] << " (preprocess " << ft["preprocess"] << ", phase0 "
            << ft["phase0"] << ", phase1 " << ft["phase1"] << ", phase2 " << ft["phase2"] << ")\n"
            << "wall ms: " << r["wall_ms"]["total"] << '\n';
}

// Instance drawn for a verify seed: n in [2, nmax], weights [0, 20], lengths [1, 20], k in [1, n].
kcenter::Instance<Rational> verify_instance(std::uint64_t seed, int nmax) {
  std::mt19937_64 rng(seed);
  const int n = std::uniform_int_distribution<int>(2, std::max(2, nmax))(rng);
  kcenter::RandomTreeSpec spec{n, rng(), 0, 20, 1, 20, kcenter::Shape::uniform_attach};
  kcenter::Instance<Rational> inst{kcenter::random_tree<Rational>(spec), 1};
  inst.k = std::uniform_int_distribution<long long>(1, n)(rng);
  return inst;
}

std::pair<long long, long long> parse_seed_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      long long v = std::stoll(s);
      return {v, v};
    }
    long long a = std::stoll(s.substr(0, dots)), b = std::stoll(s.substr(dots + 2));
    if (a > b) throw Failure{kExitParams, "empty seed range '" + s + "'"};
    return {a, b};
  } catch (const std::logic_error&) {
    throw Failure{kExitParams, "bad seed range '" + s + "'"};
  }
}

int cmd_verify(const std::string& seeds, int nmax, Variant var, const std::string& dump_dir, bool inject_fault) {
  if (nmax < 2 || nmax > 2000) throw Failure{kExitParams, "--nmax must lie in [2, 2000]"};
  const auto [a, b] = parse_seed_range(seeds);
  long long mismatches = 0, checked = 0;
  for (long long seed = a; seed <= b; ++seed) {
    const auto inst = verify_instance(static_cast<std::uint64_t>(seed), nmax);
    kcenter::SolverConfig cfg;
    cfg.variant = var;
    cfg.cross_check = true;
    const auto res = kcenter::solve(inst.tree, inst.k, cfg);
    const Rational expected = kcenter::oracle_solve(inst.tree, inst.k, var);
    bool same = res.lambda_star == expected && res.stats.fast_mismatches == 0;
    if (inject_fault) same = !same;
    ++checked;
    if (same) continue;
    ++mismatches;
    std::filesystem::create_directories(dump_dir);
    const auto path = std::filesystem::path(dump_dir) /
                      ("mismatch_" + std::string(kcenter::to_string(var)) + "_seed" + std::to_string(seed) + ".tree");
    std::ofstream(path) << kcenter::serialize(inst);
    std::cout << json{{"seed", seed},
                      {"n", inst.tree.n},
                      {"k", inst.k},
                      {"mode", kcenter::to_string(var)},
                      {"solver", res.lambda_star.fraction()},
                      {"oracle", expected.fraction()},
                      {"fast_test_mismatches", res.stats.fast_mismatches},
                      {"dump", path.string()}}
                     .dump()
              << '\n';
  }
  std::cout << json{{"checked", checked}, {"mismatches", mismatches}, {"mode", kcenter::to_string(var)}}.dump()
            << '\n';
  return mismatches == 0 ? 0 : kExitMismatch;
}

// Sizes as a comma list; each entry is an integer or "2^e".
std::vector<int> parse_sizes(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      long long v;
      if (auto caret = tok.find('^'); caret != std::string::npos) {
        v = 1;
        for (long long e = std::stoll(tok.substr(caret + 1)), base = std::stoll(tok.substr(0, caret)); e > 0; --e) {
          v *= base;
          if (v > (1LL << 26)) break;
        }
      } else {
        v = std::stoll(tok);
      }
      if (v < 1 || v > (1LL << 26)) throw Failure{kExitParams, "size out of range: '" + tok + "'"};
      out.push_back(static_cast<int>(v));
    } catch (const std::logic_error&) {
      throw Failure{kExitParams, "bad size '" + tok + "'"};
    }
  }
  if (out.empty()) throw Failure{kExitParams, "no sizes given"};
  return out;
}

int cmd_bench(const std::string& sizes, int repeats, const std::string& csv_path, Variant var) {
  if (repeats < 1) throw Failure{kExitParams, "--repeats must be positive"};
  const auto ns = parse_sizes(sizes);
  std::ofstream csv;
  if (!csv_path.empty()) {
    csv.open(csv_path, std::ios::binary);
    if (!csv) throw Failure{kExitIo, "cannot write '" + csv_path + "'"};
  }
  const std::string header = "n,mode,mean_ms,feasibility_tests,tests_phase0,tests_phase1,tests_phase2\n";
  std::cout << header;
  if (csv) csv << header;
  double prev = 0;
  for (int n : ns) {
    kcenter::RandomTreeSpec spec{n, 0x5eed0000ULL + static_cast<std::uint64_t>(n), 1, 100, 1, 100,
                                 kcenter::Shape::uniform_attach};
    const auto tree = kcenter::random_tree<double>(spec);
    const long long k = std::max(1, n / 64);
    kcenter::SolverConfig cfg;
    cfg.variant = var;
    double sum = 0;
    kcenter::SolveStats stats;
    for (int rep = 0; rep < repeats; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      stats = kcenter::solve(tree, k, cfg).stats;
      sum += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    const double mean = sum / repeats;
    std::ostringstream row;
    row << n << ',' << kcenter::to_string(var) << ',' << mean << ',' << stats.feasibility_tests() << ','
        << stats.tests_phase0 << ',' << stats.tests_phase1 << ',' << stats.tests_phase2 << '\n';
    std::cout << row.str();
    if (csv) csv << row.str();
    if (prev > 0) std::cerr << "n=" << n << ": time ratio to previous size " << mean / prev << '\n';
    prev = mean;
  }
  if (csv && !csv.flush()) throw Failure{kExitIo, "write to '" + csv_path + "' failed"};
  return 0;
}

kcenter::Shape parse_shape(const std::string& s) {
  if (s == "path") return kcenter::Shape::path;
  if (s == "star") return kcenter::Shape::star;
  if (s == "caterpillar") return kcenter::Shape::caterpillar;
  return kcenter::Shape::uniform_attach;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted k-center on trees"};
  app.require_subcommand(1);
  const std::vector<std::string> modes{"continuous", "discrete"};

  auto* solve = app.add_subcommand("solve", "Solve one instance");
  std::string input;
  bool use_stdin = false;
  std::string mode = "continuous", scalar = "exact", out = "json";
  long long k_override = 0;
  auto* in_opt = solve->add_option("--input", input, "Tree file");
  auto* stdin_opt = solve->add_flag("--stdin", use_stdin, "Read the tree from standard input");
  in_opt->excludes(stdin_opt);
  solve->add_option("--mode", mode)->check(CLI::IsMember(modes));
  solve->add_option("--k", k_override, "Number of centers, overriding the file");
  solve->add_option("--scalar", scalar)->check(CLI::IsMember({"exact", "float"}));
  solve->add_option("--out", out)->check(CLI::IsMember({"json", "text"}));

  auto* verify = app.add_subcommand("verify", "Compare the solver against the oracle over a seed range");
  std::string seeds = "1..100", dump_dir = ".";
  int nmax = 150;
  bool inject_fault = false;
  verify->add_option("--seeds", seeds, "Seed range A..B");
  verify->add_option("--nmax", nmax);
  verify->add_option("--mode", mode)->check(CLI::IsMember(modes));
  verify->add_option("--dump-dir", dump_dir, "Directory for mismatching instances");
  verify->add_flag("--inject-fault", inject_fault, "Invert every comparison (harness self-test)")->group("");

  auto* bench = app.add_subcommand("bench", "Time float-mode solves on random trees");
  std::string sizes = "2^14,2^16,2^18,2^20", csv_path;
  int repeats = 1;
  bench->add_option("--sizes", sizes, "Comma list of sizes; entries may be written 2^e");
  bench->add_option("--repeats", repeats);
  bench->add_option("--csv", csv_path);
  bench->add_option("--mode", mode)->check(CLI::IsMember(modes));

  auto* generate = app.add_subcommand("generate", "Write a random instance");
  int gen_n = 10;
  long long gen_k = 1, wmin = 0, wmax = 20, lmin = 1, lmax = 20;
  std::uint64_t gen_seed = 1;
  std::string shape = "uniform", gen_out;
  generate->add_option("--n", gen_n);
  generate->add_option("--k", gen_k);
  generate->add_option("--seed", gen_seed);
  generate->add_option("--wmin", wmin);
  generate->add_option("--wmax", wmax);
  generate->add_option("--lmin", lmin);
  generate->add_option("--lmax", lmax);
  generate->add_option("--shape", shape)->check(CLI::IsMember({"uniform", "path", "star", "caterpillar"}));
  generate->add_option("--out", gen_out, "Output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParams;
  }

  try {
    if (*solve) {
      if (!use_stdin && input.empty()) throw Failure{kExitParams, "one of --input or --stdin is required"};
      if (solve->count("--k") && k_override < 1) throw Failure{kExitParams, "k must be at least 1"};
      const std::string text = read_input(input, use_stdin);
      const std::string source = use_stdin ? "stdin" : input;
      const json report = scalar == "exact"
                              ? solve_report<Rational>(text, source, k_override, parse_variant(mode), scalar)
                              : solve_report<double>(text, source, k_override, parse_variant(mode), scalar);
      if (out == "json") {
        std::cout << report.dump(2) << '\n';
      } else {
        print_text(report);
      }
      return 0;
    }
    if (*verify) return cmd_verify(seeds, nmax, parse_variant(mode), dump_dir, inject_fault);
    if (*bench) return cmd_bench(sizes, repeats, csv_path, parse_variant(mode));
    if (*generate) {
      if (gen_n < 1 || gen_k < 1) throw Failure{kExitParams, "--n and --k must be positive"};
      kcenter::Instance<Rational> inst;
      try {
        inst.tree = kcenter::random_tree<Rational>({gen_n, gen_seed, wmin, wmax, lmin, lmax, parse_shape(shape)});
      } catch (const std::invalid_argument& e) {
        throw Failure{kExitParams, e.what()};
      }
      inst.k = gen_k;
      const std::string text = kcenter::serialize(inst);
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(gen_out, std::ios::binary);
        if (!(f << text)) throw Failure{kExitIo, "cannot write '" + gen_out + "'"};
      }
      return 0;
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParams;
  }
  return 0;
}

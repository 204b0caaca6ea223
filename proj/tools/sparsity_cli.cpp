// Command-line front end: exact ranks, testers, generators and query benchmarks.
// Every command prints one JSON report on stdout.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsity/generators.hpp"
#include "sparsity/graph.hpp"
#include "sparsity/orientability.hpp"
#include "sparsity/pebble.hpp"
#include "sparsity/rank_estimator.hpp"
#include "sparsity/rng.hpp"
#include "sparsity/types.hpp"

namespace {

using nlohmann::json;
using namespace sparsity;

constexpr int kSchemaVersion = 1;

enum Exit : int { kAccept = 0, kReject = 1, kUsage = 2, kRefused = 3 };

struct Refused : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

struct Input {
  std::string path;
  std::string digest;
  Graph graph;
};

Input load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  return {path, fnv1a_hex(text), read_graph(text)};
}

json describe(const Input& in) {
  return {{"path", in.path}, {"digest", in.digest}, {"n", in.graph.n()}, {"m", in.graph.m()}, {"d", in.graph.d()}};
}

Family parse_family(std::string name) {
  std::ranges::replace(name, '-', '_');
  return family_from_string(name);
}

struct Common {
  int k = 2;
  int l = 3;
  double epsilon = 0.1;
  std::uint64_t seed = 1;
};

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--k", c.k, "Sparsity parameter k")->capture_default_str();
  cmd.add_option("--l", c.l, "Sparsity parameter l")->capture_default_str();
  cmd.add_option("--epsilon", c.epsilon, "Accuracy parameter")->check(CLI::Range(1e-9, 1.0))->capture_default_str();
  cmd.add_option("--seed", c.seed, "Master seed")->capture_default_str();
}

json params_of(const Common& c) { return {{"k", c.k}, {"l", c.l}, {"epsilon", c.epsilon}, {"seed", c.seed}}; }

// ---- rank -----------------------------------------------------------------

struct RankArgs {
  Common c;
  std::string file;
  std::string mode = "exact";
  bool force = false;
  std::size_t guard = 20000;
};

int run_rank(const RankArgs& a, json& report) {
  const Input in = load(a.file);
  const SparsityParams p{a.c.k, a.c.l};
  p.require_matroidal();
  report["input"] = describe(in);
  report["params"] = params_of(a.c);
  report["params"]["mode"] = a.mode;
  report["seed"] = a.c.seed;
  if (a.mode == "exact") {
    if (in.graph.m() > a.guard && !a.force) {
      throw Refused("exact rank refused for m=" + std::to_string(in.graph.m()) + " > " + std::to_string(a.guard) +
                    " (pass --force)");
    }
    const Classification cl = classify(in.graph, p);
    std::ostringstream summary;
    summary << "rank=" << cl.rank << " full=" << std::boolalpha << cl.full << " tight=" << cl.tight;
    report["result"] = {{"rank", cl.rank},     {"full", cl.full},    {"tight", cl.tight},
                        {"sparse", cl.sparse}, {"summary", summary.str()}};
    report["query_count"] = nullptr;
    return kAccept;
  }
  OracleHandle oracle(in.graph);
  const RankEstimate est = approx_rank_kl(oracle, p, a.c.epsilon, a.c.seed);
  report["result"] = {{"estimate", est.value}, {"pruning_t", est.t}, {"samples", est.samples}, {"exact", est.exact}};
  report["query_count"] = oracle.query_count();
  return kAccept;
}

// ---- test -----------------------------------------------------------------

struct TrialResult {
  std::uint64_t seed = 0;
  TestVerdict verdict;
  std::uint64_t queries = 0;
};

TrialResult run_trial(const Graph& g, const std::string& property, const Common& c, std::uint64_t seed) {
  OracleHandle oracle(g);
  TestVerdict v;
  if (property == "fullness") {
    v = test_fullness(oracle, {c.k, c.l}, c.epsilon, seed);
  } else if (property == "fullness1sided") {
    v = test_fullness_one_sided(oracle, c.l, c.epsilon, seed);
  } else {
    v = test_orientability(oracle, c.k, c.l, c.epsilon, seed);
  }
  return {seed, v, oracle.query_count()};
}

std::vector<TrialResult> run_trials(const Graph& g, const std::string& property, const Common& c, std::size_t trials) {
  std::vector<std::future<TrialResult>> jobs;
  jobs.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const std::uint64_t s = derive_seed(c.seed, i);
    jobs.push_back(std::async(std::launch::async, [&g, &property, &c, s] { return run_trial(g, property, c, s); }));
  }
  std::vector<TrialResult> out;
  out.reserve(trials);
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

void validate_property(const std::string& property, const Common& c) {
  if (property == "fullness1sided") {
    if (c.k != 1 || (c.l != 0 && c.l != 1)) throw InvalidParams("fullness1sided needs k=1 and l in {0,1}");
  } else {
    SparsityParams{c.k, c.l}.require_matroidal();
  }
}

struct TestArgs {
  Common c;
  std::string file;
  std::string property = "fullness";
  std::size_t trials = 5;
};

int run_test(const TestArgs& a, json& report) {
  validate_property(a.property, a.c);
  const Input in = load(a.file);
  report["input"] = describe(in);
  report["params"] = params_of(a.c);
  report["params"]["property"] = a.property;
  report["params"]["trials"] = a.trials;
  report["seed"] = a.c.seed;

  const auto results = run_trials(in.graph, a.property, a.c, a.trials);
  json rows = json::array();
  std::size_t accepts = 0;
  std::uint64_t total = 0;
  for (const auto& r : results) {
    accepts += r.verdict.accept ? 1 : 0;
    total += r.queries;
    rows.push_back({{"seed", r.seed},
                    {"accept", r.verdict.accept},
                    {"estimate", r.verdict.estimate},
                    {"threshold", r.verdict.threshold},
                    {"exact", r.verdict.exact},
                    {"query_count", r.queries}});
  }
  const bool majority = 2 * accepts > a.trials;
  report["result"] = {{"trials", rows}, {"accepts", accepts}, {"verdict", majority ? "accept" : "reject"}};
  report["query_count"] = total;
  return majority ? kAccept : kReject;
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
  Common c;
  std::string family;
  std::size_t n = 0;
  std::size_t d = 4;
  std::string out;
  std::string manifest;
};

int run_gen(const GenArgs& a, json& report) {
  GenSpec spec;
  spec.family = parse_family(a.family);
  spec.n = a.n;
  spec.params = {a.c.k, a.c.l};
  spec.d = a.d;
  spec.epsilon = a.c.epsilon;
  spec.seed = a.c.seed;
  const Generated gen = generate(spec);
  const std::string text = write_graph(gen.graph);
  const std::string line = manifest_line(spec, gen);

  std::ofstream(a.out, std::ios::binary) << text;
  const std::string manifest_path = a.manifest.empty() ? a.out + ".manifest.jsonl" : a.manifest;
  std::ofstream(manifest_path, std::ios::app) << line << '\n';

  report["params"] = params_of(a.c);
  report["params"]["family"] = to_string(spec.family);
  report["params"]["n"] = a.n;
  report["params"]["d"] = a.d;
  report["seed"] = a.c.seed;
  report["result"] = {{"out", a.out},
                      {"manifest", manifest_path},
                      {"digest", fnv1a_hex(text)},
                      {"entry", json::parse(line)}};
  report["query_count"] = nullptr;
  return kAccept;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  Common c;
  std::string family;
  std::vector<std::size_t> sizes;
  std::string property = "fullness";
  std::size_t d = 4;
  std::size_t trials = 5;
  std::size_t exact_limit = 2000;
};

std::optional<bool> expected_verdict(Family f, const std::string& property) {
  if (property == "fullness" && f == Family::Tight) return true;
  if (property == "fullness" && f == Family::FarFromFull) return false;
  if (property == "orientability" && f == Family::Tight) return true;
  if (property == "orientability" && f == Family::FarFromOrientable) return false;
  return std::nullopt;
}

int run_bench(const BenchArgs& a, json& report) {
  if (a.sizes.empty()) throw InvalidParams("--sizes must list at least one size");
  if (a.property != "rank") validate_property(a.property, a.c);
  const Family family = parse_family(a.family);
  const SparsityParams p{a.c.k, a.c.l};

  json rows = json::array();
  double lo = 0, hi = 0;
  std::size_t good_rows = 0, judged_rows = 0;
  for (std::size_t idx = 0; idx < a.sizes.size(); ++idx) {
    GenSpec spec{family, a.sizes[idx], p, a.d, a.c.epsilon, derive_seed(a.c.seed, 1000 + idx)};
    const Generated gen = generate(spec);
    json row{{"n", spec.n}, {"m", gen.graph.m()}};
    double mean = 0;
    if (a.property == "rank") {
      std::optional<std::size_t> exact;
      if (spec.n <= a.exact_limit) exact = rank(gen.graph, p);
      std::size_t within = 0;
      for (std::size_t t = 0; t < a.trials; ++t) {
        OracleHandle oracle(gen.graph);
        const RankEstimate est = approx_rank_kl(oracle, p, a.c.epsilon, derive_seed(a.c.seed, t));
        mean += static_cast<double>(oracle.query_count());
        if (exact) {
          const double err = std::abs(static_cast<double>(est.value) - static_cast<double>(*exact));
          within += err <= a.c.epsilon * static_cast<double>(spec.n) ? 1 : 0;
        }
      }
      if (exact) {
        const double acc = static_cast<double>(within) / static_cast<double>(a.trials);
        row["exact_rank"] = *exact;
        row["accuracy"] = acc;
        ++judged_rows;
        good_rows += 3 * within >= 2 * a.trials ? 1 : 0;
      } else {
        row["accuracy"] = nullptr;
      }
    } else {
      Common c = a.c;
      const auto results = run_trials(gen.graph, a.property, c, a.trials);
      std::size_t agree = 0;
      const auto expect = expected_verdict(family, a.property);
      for (const auto& r : results) {
        mean += static_cast<double>(r.queries);
        if (expect && r.verdict.accept == *expect) ++agree;
      }
      if (expect) {
        row["accuracy"] = static_cast<double>(agree) / static_cast<double>(a.trials);
        ++judged_rows;
        good_rows += 3 * agree >= 2 * a.trials ? 1 : 0;
      } else {
        row["accuracy"] = nullptr;
      }
    }
    mean /= static_cast<double>(a.trials);
    row["mean_query_count"] = mean;
    lo = idx == 0 ? mean : std::min(lo, mean);
    hi = idx == 0 ? mean : std::max(hi, mean);
    rows.push_back(row);
  }
  const double ratio = lo > 0 ? hi / lo : (hi > 0 ? INFINITY : 1.0);
  const bool violation = ratio >= 2.0;
  report["params"] = params_of(a.c);
  report["params"]["family"] = to_string(family);
  report["params"]["property"] = a.property;
  report["params"]["d"] = a.d;
  report["params"]["trials"] = a.trials;
  report["params"]["sizes"] = a.sizes;
  report["seed"] = a.c.seed;
  report["result"] = {{"rows", rows},
                      {"query_ratio", std::isfinite(ratio) ? json(ratio) : json(nullptr)},
                      {"constancy_violation", violation},
                      {"rows_accurate", good_rows},
                      {"rows_judged", judged_rows}};
  report["query_count"] = nullptr;
  return violation ? kReject : kAccept;
}

std::string echo(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparsity matroid ranks, property testers and instance generators"};
  app.require_subcommand(1);
  std::string format = "json";
  app.add_option("--format", format, "json, or text for a one-line summary")
      ->check(CLI::IsMember({"json", "text"}));

  RankArgs ra;
  auto* rank_cmd = app.add_subcommand("rank", "Exact or estimated (k,l)-rank of a graph file");
  rank_cmd->add_option("file", ra.file, "Graph file")->required();
  add_common(*rank_cmd, ra.c);
  rank_cmd->add_option("--mode", ra.mode)->check(CLI::IsMember({"exact", "approx"}))->capture_default_str();
  rank_cmd->add_flag("--force", ra.force, "Run exact mode past the size guard");
  rank_cmd->add_option("--guard", ra.guard, "Edge count above which exact mode needs --force")->capture_default_str();

  TestArgs ta;
  auto* test_cmd = app.add_subcommand("test", "Run a property tester for several trials");
  test_cmd->add_option("file", ta.file, "Graph file")->required();
  add_common(*test_cmd, ta.c);
  test_cmd->add_option("--property", ta.property)
      ->check(CLI::IsMember({"fullness", "fullness1sided", "orientability"}))
      ->capture_default_str();
  test_cmd->add_option("--trials", ta.trials)->check(CLI::PositiveNumber)->capture_default_str();

  GenArgs ga;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance and append a manifest line");
  gen_cmd->add_option("family", ga.family, "tight, regular, far-from-full, far-from-orientable, lowerbound-adversary")
      ->required();
  add_common(*gen_cmd, ga.c);
  gen_cmd->add_option("--n", ga.n)->required();
  gen_cmd->add_option("--d", ga.d)->capture_default_str();
  gen_cmd->add_option("--out", ga.out, "Graph output path")->required();
  gen_cmd->add_option("--manifest", ga.manifest, "Manifest path (default: <out>.manifest.jsonl)");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Mean query counts across instance sizes");
  bench_cmd->add_option("family", ba.family)->required();
  add_common(*bench_cmd, ba.c);
  bench_cmd->add_option("--sizes", ba.sizes, "Comma-separated vertex counts")->delimiter(',')->check(CLI::PositiveNumber);
  bench_cmd->add_option("--property", ba.property)
      ->check(CLI::IsMember({"rank", "fullness", "orientability"}))
      ->capture_default_str();
  bench_cmd->add_option("--d", ba.d)->capture_default_str();
  bench_cmd->add_option("--trials", ba.trials)->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--exact-limit", ba.exact_limit, "Largest n compared against the exact rank")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kAccept : kUsage;
  }

  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = echo(argc, argv);
  const auto start = std::chrono::steady_clock::now();
  int code = kAccept;
  try {
    if (*rank_cmd) {
      code = run_rank(ra, report);
    } else if (*test_cmd) {
      code = run_test(ta, report);
    } else if (*gen_cmd) {
      code = run_gen(ga, report);
    } else {
      code = run_bench(ba, report);
    }
  } catch (const Refused& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kRefused;
  } catch (const TooLarge& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kRefused;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;
  report["wall_ms"] = std::chrono::duration<double, std::milli>(elapsed).count();

  if (format == "text" && report["result"].contains("summary")) {
    std::cout << report["result"]["summary"].get<std::string>() << '\n';
  } else if (format == "text" && report["result"].contains("verdict")) {
    std::cout << report["result"]["verdict"].get<std::string>() << '\n';
  } else {
    std::cout << report.dump(2) << '\n';
  }
  return code;
}

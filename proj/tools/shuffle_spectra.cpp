// shuffle-spectra: command-line front end over the shuffle_spectra library.
//
// Exit codes: 0 success, 1 numeric failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <shuffle_spectra/shuffle_spectra.hpp>

namespace ss = shuffle_spectra;
using nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "shuffle-spectra/1";
constexpr std::uint64_t kDefaultSeed = 0x5eed5eed5eedULL;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::size_t n = 0;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = ss::default_thread_count();
  std::string out;
  std::string format = "csv";
  bool quiet = false;
};

// Output goes to --out when given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path, bool binary = false) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, binary ? std::ios::binary : std::ios::out);
    if (!*file_) throw UsageError("cannot open output file " + path);
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string header_line(const std::string& sub) { return std::string("# ") + kSchema + " " + sub; }

void add_common(CLI::App* app, Common& c, bool with_seed, bool with_format) {
  app->add_option("--threads", c.threads, "worker threads (default: SHUFFLE_SPECTRA_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "output path (default: standard output)");
  if (with_seed) app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  if (with_format)
    app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

ordered_json config_json(const std::string& sub, const Common& c) {
  ordered_json j;
  j["schema"] = kSchema;
  j["subcommand"] = sub;
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["format"] = c.format;
  return j;
}

ss::ShuffleKind parse_kind(const std::string& s) {
  const auto k = ss::parse_shuffle_kind(s);
  if (!k) throw UsageError("unknown shuffle kind '" + s + "'");
  return *k;
}

// Progress to stderr in 10% steps.
std::function<void(std::size_t, std::size_t)> progress(const char* what, bool quiet) {
  if (quiet) return {};
  return [what, last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
    const std::size_t pct = done * 10 / total;
    if (pct != last || done == total) {
      last = pct;
      std::fprintf(stderr, "%s: %zu/%zu\n", what, done, total);
    }
  };
}

// ---------------------------------------------------------------------------

struct GcurveArgs {
  std::string b_list = "0.3,0.5,0.7,0.9";
  std::size_t samples = 101;
  std::string svg;
};

std::vector<double> parse_b_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss_(s);
  std::string cell;
  while (std::getline(ss_, cell, ',')) {
    if (cell.empty()) continue;
    std::size_t used = 0;
    double b = 0.0;
    try {
      b = std::stod(cell, &used);
    } catch (const std::exception&) {
      throw UsageError("bad b value '" + cell + "'");
    }
    if (used != cell.size() || !(b >= 0.0 && b <= 1.0)) throw UsageError("b values must lie in [0,1], got '" + cell + "'");
    out.push_back(b);
  }
  if (out.empty()) throw UsageError("empty b list");
  return out;
}

int cmd_gcurve(const GcurveArgs& a, const Common& c) {
  const auto bs = parse_b_list(a.b_list);
  if (a.samples < 2) throw UsageError("--samples must be at least 2");
  const auto u_at = [&](std::size_t i) { return static_cast<double>(i) / static_cast<double>(a.samples - 1); };
  Sink sink(c.out);
  auto& os = sink.os();
  os << header_line("gcurve") << '\n' << "b,u,g\n";
  for (double b : bs) {
    const ss::IdealMap map(b);
    for (std::size_t i = 0; i < a.samples; ++i) {
      const double u = u_at(i);
      os << ss::format_double(b) << ',' << ss::format_double(u) << ',' << ss::format_double(map(u)) << '\n';
    }
  }
  if (!a.svg.empty()) {
    std::ofstream svg(a.svg);
    if (!svg) throw UsageError("cannot open " + a.svg);
    const double size = 400.0;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n";
    svg << "<rect width=\"400\" height=\"400\" fill=\"white\" stroke=\"black\"/>\n";
    for (double b : bs) {
      const ss::IdealMap map(b);
      svg << "<polyline fill=\"none\" stroke=\"black\" points=\"";
      for (std::size_t i = 0; i < a.samples; ++i) {
        const double u = u_at(i);
        svg << (i ? " " : "") << ss::format_double(u * size) << ',' << ss::format_double((1.0 - map(u)) * size);
      }
      svg << "\"><title>b=" << ss::format_double(b) << "</title></polyline>\n";
    }
    svg << "</svg>\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct KernelArgs {
  std::string convention = "endpoint";
  double tol = 1e-12;
};

ss::KernelOptions kernel_options(const KernelArgs& a, const Common& c) {
  ss::KernelOptions o;
  o.convention = a.convention == "cell" ? ss::GridConvention::CellAverage : ss::GridConvention::Endpoint;
  o.tol = a.tol;
  o.threads = c.threads;
  return o;
}

int cmd_kernel(const KernelArgs& a, const Common& c) {
  if (c.n == 0) throw UsageError("--n must be positive");
  if (c.format == "binary" && (c.out.empty() || c.out == "-")) throw UsageError("binary output needs --out");
  const auto k = ss::build_kernel(c.n, kernel_options(a, c));
  Sink sink(c.out, c.format == "binary");
  if (c.format == "binary") {
    ss::write_kernel_binary(sink.os(), k);
  } else {
    sink.os() << header_line("kernel") << " n=" << c.n << " convention=" << a.convention << '\n';
    ss::write_kernel_csv(sink.os(), k);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct EigenArgs {
  std::string op = "S";
  double tol = 1e-10;
  std::size_t max_iterations = 100000;
  bool matrix_free = false;
  KernelArgs kernel;
};

ordered_json estimate_json(const ss::EigenEstimate& e) {
  ordered_json j;
  j["operator"] = ss::to_string(e.op);
  j["n"] = e.n;
  j["value_re"] = e.value.real();
  j["value_im"] = e.value.imag();
  j["abs_value"] = std::abs(e.value);
  j["residual"] = e.residual;
  j["norm_convention"] = ss::to_string(e.convention);
  j["iterations"] = e.iterations;
  j["converged"] = e.converged;
  j["certified"] = e.certified;
  j["complex_pair"] = e.complex_pair;
  return j;
}

ss::EigenEstimate solve(const std::string& op, std::size_t n, const EigenArgs& a, const Common& c) {
  ss::PowerOptions po;
  po.tol = a.tol;
  po.max_iterations = a.max_iterations;
  const auto ko = kernel_options(a.kernel, c);
  if (a.matrix_free) {
    if (op == "S") return ss::second_eig_sym(ss::matrix_free_sym_operator(n, ko), po);
    if (op == "D") return ss::skew_norm(ss::matrix_free_skew_operator(n, ko), po);
    throw UsageError("--matrix-free supports operators S and D only");
  }
  const auto k = ss::build_kernel(n, ko);
  if (op == "S") return ss::second_eig_sym(ss::sym_operator(k, c.threads), po);
  if (op == "D") return ss::skew_norm(ss::skew_operator(k, c.threads), po);
  return ss::second_eig_b(ss::kernel_operator(k, c.threads), ss::transpose_operator(k, c.threads), po);
}

int cmd_eigen(const EigenArgs& a, Common c) {
  if (c.n < 2) throw UsageError("--n must be at least 2");
  c.format = "json";
  const auto e = solve(a.op, c.n, a, c);
  ordered_json j = estimate_json(e);
  auto cfg = config_json("eigen", c);
  cfg["operator"] = a.op;
  cfg["tol"] = a.tol;
  cfg["max_iterations"] = a.max_iterations;
  cfg["matrix_free"] = a.matrix_free;
  cfg["convention"] = a.kernel.convention;
  j["config"] = cfg;
  Sink sink(c.out);
  sink.os() << j.dump(2) << '\n';
  return e.converged || e.complex_pair ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string kind = "ccrr";
  std::size_t rounds = 5;
  std::size_t reps = 1000;
  std::string stat = "S";
  std::string op = "B";
  std::size_t fit_rounds = 5;
  std::size_t card = 1;
  std::string summary;
};

int simulate_s(const SimulateArgs& a, const Common& c) {
  if (parse_kind(a.kind) != ss::ShuffleKind::CCRR) throw UsageError("--stat S is defined for the ccrr shuffle only");
  if (c.n < 2) throw UsageError("--n must be at least 2");
  if (a.op != "S" && a.op != "B") throw UsageError("--operator must be S or B for the test statistic");
  EigenArgs ea;
  const auto e = solve(a.op, c.n, ea, c);
  if (!e.converged) {
    std::fprintf(stderr, "eigenvector did not converge\n");
    return 1;
  }
  auto phi = e.real_vector();
  // Orient phi so that S_0 > 0.
  if (ss::TestStatistic(phi).evaluate(ss::FastDeck(c.n)) < 0.0)
    for (double& x : phi) x = -x;
  ss::ExperimentOptions eo;
  eo.seed = c.seed;
  eo.threads = c.threads;
  eo.fit_rounds = a.fit_rounds;
  eo.progress = progress("simulate", c.quiet);
  const double lambda = e.value.real();
  const auto tr = ss::run_lower_bound_experiment(c.n, a.rounds, a.reps, phi, lambda, eo);

  ordered_json summary;
  summary["lambda"] = lambda;
  summary["lambda_operator"] = a.op;
  summary["s0"] = tr.s0;
  summary["s0_constant"] = tr.s0_constant;
  summary["fit_rounds"] = tr.fit_rounds;
  summary["r_hat"] = tr.r_hat;
  summary["r_hat_regression"] = tr.r_hat_regression;
  summary["tau"] = tr.tau;
  summary["separation"] = tr.separation;
  summary["stationary_mean"] = tr.stationary.mean;
  summary["stationary_var"] = tr.stationary.variance;
  auto cfg = config_json("simulate", c);
  cfg["kind"] = a.kind;
  cfg["stat"] = a.stat;
  cfg["rounds"] = a.rounds;
  cfg["reps"] = a.reps;

  Sink sink(c.out);
  auto& os = sink.os();
  if (c.format == "json") {
    ordered_json j;
    j["config"] = cfg;
    j["summary"] = summary;
    j["rounds"] = ordered_json::array();
    for (const auto& r : tr.rounds)
      j["rounds"].push_back({{"round", r.round}, {"mean_abs_S", r.mean_abs}, {"mean_S", r.mean}, {"var_S", r.variance},
                             {"reps", r.reps}});
    os << j.dump(2) << '\n';
  } else {
    os << header_line("simulate") << '\n' << "round,mean_abs_S,mean_S,var_S,reps\n";
    for (const auto& r : tr.rounds)
      os << r.round << ',' << ss::format_double(r.mean_abs) << ',' << ss::format_double(r.mean) << ','
         << ss::format_double(r.variance) << ',' << r.reps << '\n';
  }
  if (!a.summary.empty()) {
    std::ofstream f(a.summary);
    if (!f) throw UsageError("cannot open " + a.summary);
    ordered_json j;
    j["config"] = cfg;
    j["summary"] = summary;
    f << j.dump(2) << '\n';
  }
  return 0;
}

int simulate_positions(const SimulateArgs& a, const Common& c) {
  const auto kind = parse_kind(a.kind);
  if (c.n == 0) throw UsageError("--n must be positive");
  if (a.card < 1 || a.card > c.n) throw UsageError("--card must lie in 1..n");
  // pos[t * reps + r]: position of the tracked card after t rounds in replicate r
  std::vector<double> pos((a.rounds + 1) * a.reps);
  ss::parallel_chunks(a.reps, c.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      ss::RngStream rng(c.seed, r);
      ss::FastDeck deck(c.n);
      pos[r] = static_cast<double>(a.card);
      for (std::size_t t = 1; t <= a.rounds; ++t) {
        ss::run_round(deck, kind, rng, t);
        pos[t * a.reps + r] = static_cast<double>(deck.position_of(a.card));
      }
    }
  });
  Sink sink(c.out);
  auto& os = sink.os();
  const double nn = static_cast<double>(c.n);
  std::vector<ss::RoundStats> rows;
  for (std::size_t t = 0; t <= a.rounds; ++t) {
    std::vector<double> x(pos.begin() + static_cast<std::ptrdiff_t>(t * a.reps),
                          pos.begin() + static_cast<std::ptrdiff_t>((t + 1) * a.reps));
    for (double& v : x) v /= nn;
    rows.push_back(ss::detail::summarize(t, x));
  }
  if (c.format == "json") {
    ordered_json j;
    auto cfg = config_json("simulate", c);
    cfg["kind"] = a.kind;
    cfg["stat"] = a.stat;
    cfg["card"] = a.card;
    cfg["rounds"] = a.rounds;
    cfg["reps"] = a.reps;
    j["config"] = cfg;
    j["rounds"] = ordered_json::array();
    for (const auto& r : rows)
      j["rounds"].push_back({{"round", r.round}, {"mean_position", r.mean}, {"var_position", r.variance}, {"reps", r.reps}});
    os << j.dump(2) << '\n';
  } else {
    os << header_line("simulate") << " stat=positions card=" << a.card << '\n' << "round,mean_position,var_position,reps\n";
    for (const auto& r : rows)
      os << r.round << ',' << ss::format_double(r.mean) << ',' << ss::format_double(r.variance) << ',' << r.reps << '\n';
  }
  return 0;
}

int cmd_simulate(const SimulateArgs& a, const Common& c) {
  if (a.reps == 0) throw UsageError("--reps must be positive");
  return a.stat == "S" ? simulate_s(a, c) : simulate_positions(a, c);
}

// ---------------------------------------------------------------------------

struct ExactArgs {
  std::string kind = "ccrr";
  std::size_t rounds = 6;
};

int cmd_exact(const ExactArgs& a, const Common& c) {
  const auto kind = parse_kind(a.kind);
  if (c.n < 1 || c.n > ss::kMaxExactDeck) throw UsageError("--n must lie in 1..7 for exact tables");
  std::vector<ss::Rational> exact;
  std::vector<double> approx;
  try {
    exact = ss::exact_tv_table_rational(c.n, kind, a.rounds);
  } catch (const ss::capability_error&) {
    approx = ss::exact_tv_table(c.n, kind, a.rounds);  // counts overflow 128 bits: double table
  }
  Sink sink(c.out);
  auto& os = sink.os();
  if (c.format == "json") {
    ordered_json j;
    auto cfg = config_json("exact", c);
    cfg["kind"] = a.kind;
    cfg["rounds"] = a.rounds;
    j["config"] = cfg;
    j["rounds"] = ordered_json::array();
    for (std::size_t t = 1; t <= a.rounds; ++t) {
      ordered_json row{{"round", t}};
      if (!exact.empty()) {
        row["tv"] = exact[t].to_double();
        row["tv_exact"] = ss::to_string(exact[t].num) + "/" + ss::to_string(exact[t].den);
      } else {
        row["tv"] = approx[t];
      }
      j["rounds"].push_back(row);
    }
    os << j.dump(2) << '\n';
    return 0;
  }
  os << header_line("exact") << " kind=" << a.kind << " n=" << c.n << '\n';
  os << (exact.empty() ? "round,tv\n" : "round,tv,tv_exact\n");
  for (std::size_t t = 1; t <= a.rounds; ++t) {
    if (!exact.empty())
      os << t << ',' << ss::format_double(exact[t].to_double()) << ',' << ss::to_string(exact[t].num) << '/'
         << ss::to_string(exact[t].den) << '\n';
    else
      os << t << ',' << ss::format_double(approx[t]) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct SingleCardArgs {
  std::optional<double> a;
  std::optional<std::size_t> card;
  std::size_t reps = 100000;
  std::size_t buckets = 50;
};

int cmd_singlecard(const SingleCardArgs& a, const Common& c) {
  if (c.n == 0) throw UsageError("--n must be positive");
  if (a.reps == 0) throw UsageError("--reps must be positive");
  std::size_t card = c.n / 2;
  if (a.card) card = *a.card;
  if (a.a) {
    if (!(*a.a > 0.0 && *a.a <= 1.0)) throw UsageError("--a must lie in (0,1]");
    card = static_cast<std::size_t>(std::llround(*a.a * static_cast<double>(c.n)));
  }
  if (card < 1 || card > c.n) throw UsageError("card must lie in 1..n");
  if (!c.quiet) std::fprintf(stderr, "singlecard: %zu replicates\n", a.reps);
  const auto st = ss::empirical_single_card(c.n, card, a.reps, {.buckets = a.buckets, .seed = c.seed, .threads = c.threads});
  Sink sink(c.out);
  auto& os = sink.os();
  if (c.format == "json") {
    ordered_json j;
    auto cfg = config_json("singlecard", c);
    cfg["card"] = card;
    cfg["a"] = st.a();
    cfg["reps"] = a.reps;
    cfg["buckets"] = a.buckets;
    j["config"] = cfg;
    j["buckets"] = ordered_json::array();
    for (const auto& b : st.buckets)
      j["buckets"].push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}, {"mean_z", b.mean_z}, {"mean_g", b.mean_g},
                              {"mean_residual", b.mean_residual}, {"var_residual", b.var_residual},
                              {"se_mean", b.se_mean}, {"se_var", b.se_var},
                              {"mean_ok", ss::conditional_mean_ok(b, c.n)},
                              {"var_ok", ss::conditional_variance_ok(b, c.n)}});
    os << j.dump(2) << '\n';
    return 0;
  }
  os << header_line("singlecard") << " n=" << c.n << " card=" << card << '\n';
  os << "lo,hi,count,mean_z,mean_g,mean_residual,var_residual,se_mean,se_var,mean_ok,var_ok\n";
  for (const auto& b : st.buckets)
    os << ss::format_double(b.lo) << ',' << ss::format_double(b.hi) << ',' << b.count << ','
       << ss::format_double(b.mean_z) << ',' << ss::format_double(b.mean_g) << ','
       << ss::format_double(b.mean_residual) << ',' << ss::format_double(b.var_residual) << ','
       << ss::format_double(b.se_mean) << ',' << ss::format_double(b.se_var) << ','
       << ss::conditional_mean_ok(b, c.n) << ',' << ss::conditional_variance_ok(b, c.n) << '\n';
  return 0;
}

std::string kinds_help() {
  std::string s;
  for (auto k : ss::kAllShuffleKinds) s += (s.empty() ? "" : ", ") + std::string(ss::to_string(k));
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shuffle-spectra: card-cyclic-to-random shuffles, the idealized single-card round kernel, "
               "its spectrum, and the eigenvector lower-bound experiment."};
  app.require_subcommand(1);
  app.set_version_flag("--version", kSchema);

  Common common;

  GcurveArgs ga;
  auto* gc = app.add_subcommand("gcurve", "Idealized one-round landing position G_b(u) of a card starting at b, "
                                          "reinserted at u (default curves b = 0.3, 0.5, 0.7, 0.9).");
  gc->add_option("--b", ga.b_list, "comma-separated starting positions in [0,1]")->capture_default_str();
  gc->add_option("--samples", ga.samples, "u grid points per curve, u = i/(samples-1)")->capture_default_str();
  gc->add_option("--svg", ga.svg, "also write an SVG polyline plot to this path");
  add_common(gc, common, false, false);

  KernelArgs ka;
  auto* kc = app.add_subcommand("kernel", "Discretized single-card round kernel B(n): row i is the law of the "
                                          "landing cell of a card starting at i/n.");
  kc->add_option("--n", common.n, "grid size")->required();
  kc->add_option("--format", common.format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}))->capture_default_str();
  kc->add_option("--convention", ka.convention, "grid convention: endpoint or cell")
      ->check(CLI::IsMember({"endpoint", "cell"}))->capture_default_str();
  kc->add_option("--tol", ka.tol, "Newton tolerance for inverting G")->capture_default_str();
  add_common(kc, common, false, false);

  EigenArgs ea;
  auto* ec = app.add_subcommand("eigen", "Spectral estimates of the kernel: second eigenvalue of S = (B+B^T)/2, "
                                         "operator norm of D = (B-B^T)/2, or second eigenvalue of B, "
                                         "with a residual certificate (JSON).");
  ec->add_option("--n", common.n, "grid size")->required();
  ec->add_option("--operator", ea.op, "S, D or B")->check(CLI::IsMember({"S", "D", "B"}))->capture_default_str();
  ec->add_option("--tol", ea.tol, "relative change tolerance of the power iteration")->capture_default_str();
  ec->add_option("--max-iterations", ea.max_iterations, "iteration cap")->capture_default_str();
  ec->add_flag("--matrix-free", ea.matrix_free, "apply S or D without storing B (for very large n)");
  ec->add_option("--convention", ea.kernel.convention, "grid convention: endpoint or cell")
      ->check(CLI::IsMember({"endpoint", "cell"}))->capture_default_str();
  add_common(ec, common, false, false);

  SimulateArgs sa;
  auto* sc = app.add_subcommand("simulate", "Monte Carlo rounds of a shuffle. --stat S tracks the eigenvector test "
                                            "statistic S_t of the lower-bound experiment (decay rate r_hat, "
                                            "round tau, separation from stationarity); --stat positions tracks one card.");
  sc->add_option("--kind", sa.kind, kinds_help())->capture_default_str();
  sc->add_option("--n", common.n, "deck size")->required();
  sc->add_option("--rounds", sa.rounds, "rounds per replicate")->capture_default_str();
  sc->add_option("--reps", sa.reps, "independent replicates")->capture_default_str();
  sc->add_option("--stat", sa.stat, "S or positions")->check(CLI::IsMember({"S", "positions"}))->capture_default_str();
  sc->add_option("--operator", sa.op, "eigenvector source for S: B or S")->capture_default_str();
  sc->add_option("--fit-rounds", sa.fit_rounds, "rounds used for the decay fit")->capture_default_str();
  sc->add_option("--card", sa.card, "tracked card for --stat positions")->capture_default_str();
  sc->add_option("--summary", sa.summary, "write the JSON summary to this path");
  sc->add_flag("--quiet", common.quiet, "no progress on standard error");
  add_common(sc, common, true, true);

  ExactArgs xa;
  auto* xc = app.add_subcommand("exact", "Exact total variation distance to uniform after each round, by "
                                         "enumerating S_n (n <= 7).");
  xc->add_option("--kind", xa.kind, kinds_help())->capture_default_str();
  xc->add_option("--n", common.n, "deck size, 1..7")->required();
  xc->add_option("--rounds", xa.rounds, "rounds")->capture_default_str();
  add_common(xc, common, false, true);

  SingleCardArgs ca;
  auto* cc = app.add_subcommand("singlecard", "One CCRR round from the sorted deck, tracking one card: conditional "
                                              "mean of Z against G_a(U) and the conditional variance bound "
                                              "Var(Z | U = u) < 9/n, per U-bucket.");
  cc->add_option("--n", common.n, "deck size")->required();
  auto* a_opt = cc->add_option("--a", ca.a, "starting position a in (0,1]; card = round(a n)");
  cc->add_option("--card", ca.card, "tracked card (default n/2)")->excludes(a_opt);
  cc->add_option("--reps", ca.reps, "independent rounds")->capture_default_str();
  cc->add_option("--buckets", ca.buckets, "U buckets")->capture_default_str()->check(CLI::PositiveNumber);
  cc->add_flag("--quiet", common.quiet, "no progress on standard error");
  add_common(cc, common, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gc) return cmd_gcurve(ga, common);
    if (*kc) return cmd_kernel(ka, common);
    if (*ec) return cmd_eigen(ea, common);
    if (*sc) return cmd_simulate(sa, common);
    if (*xc) return cmd_exact(xa, common);
    if (*cc) return cmd_singlecard(ca, common);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ss::capability_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 1;
  }
  return 2;
}

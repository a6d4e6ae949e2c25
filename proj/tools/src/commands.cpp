#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "embsp/csv_io.hpp"
#include "embsp/errors.hpp"
#include "embsp/experiments.hpp"
#include "embsp/priors.hpp"
#include "embsp/sampler.hpp"
#include "embsp/selection.hpp"
#include "embsp/summary.hpp"
#include "embsp/theory_checks.hpp"

namespace embsp::cli {
namespace fs = std::filesystem;
using Eigen::Index;
using Eigen::MatrixXd;

namespace {

struct FitOptions {
  std::string x_path;
  std::string y_path;
  std::string out;
  std::string family = "horseshoe";
  std::string tau = "auto";
  std::string fast_path = "auto";
  std::string response_cols;
  std::string a_n = "auto";
  long iterations = 15000;
  long burn_in = 5000;
  long thinning = 1;
  std::uint64_t seed = 0;
  double nu = 0.0;
  double level = 0.95;
  double cutoff = 0.5;
  long s0 = 0;
  double m0 = 1.0;
  double c0 = 0.0;
  double u = 0.5;
  bool center = false;
  bool timing = false;
  bool no_draws = false;
};

struct SimulateOptions {
  int experiment = 1;
  long n = 0;
  long p = 0;
  long q = 0;
  long s0 = 0;
  double sigma2 = 2.0;
  double rho = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

struct ExperimentOptions {
  std::string ids = "1-6";
  long replicates = 20;
  long iterations = 3000;
  long burn_in = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
  bool timing = false;
  bool quiet = false;
};

struct CheckOptions {
  std::string family = "horseshoe";
  std::string tau = "auto";
  long n = 0;
  long p = 0;
  long q = 1;
  long s0 = 1;
  double u = 0.5;
  double m0 = 1.0;
  double c0 = 0.0;
  double a_n = 0.0;
  double ceiling = 10.0;
  std::string out;
};

struct SelectOptions {
  std::string draws;
  std::string a_n = "auto";
  double cutoff = 0.5;
  long n = 0;
  std::string out;
};

std::string num(double v, int digits = 10) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

class KeyValueWriter {
 public:
  template <typename T>
  KeyValueWriter& add(const std::string& key, const T& value) {
    os_ << key << " = " << value << '\n';
    return *this;
  }
  KeyValueWriter& add(const std::string& key, double value) {
    os_ << key << " = " << num(value, 17) << '\n';
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t value, std::string& source) {
  if (opt->count() > 0) {
    source = "flag";
    return value;
  }
  source = "entropy";
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

MixingFamily family_or_usage(const std::string& spec) {
  try {
    return parse_family(spec);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
}

double positive_real(const std::string& text, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw UsageError(std::string(what) + " must be 'auto' or a positive number, got '" + text + "'");
  }
  return v;
}

FastPath parse_fast_path(const std::string& s) {
  if (s == "auto") return FastPath::Auto;
  if (s == "always") return FastPath::Always;
  if (s == "never") return FastPath::Never;
  throw UsageError("--fast-path must be auto, always or never");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

CsvTable load_table(const std::string& path) {
  if (!fs::exists(path)) throw DataError("input file not found: " + path);
  try {
    return read_csv(path);
  } catch (const ParseError& e) {
    throw DataError(e.what());
  }
}

std::vector<std::string> draw_header(const std::string& prefix, Index rows, Index cols) {
  std::vector<std::string> h;
  for (Index j = 1; j <= rows; ++j) {
    for (Index k = 1; k <= cols; ++k) h.push_back(prefix + "_" + std::to_string(j) + "_" + std::to_string(k));
  }
  return h;
}

std::string selection_csv(const SelectionResult& sel) {
  std::ostringstream os;
  os << "row_index,inclusion_probability,selected\n";
  std::vector<bool> chosen(static_cast<std::size_t>(sel.inclusion_probability.size()), false);
  for (Index j : sel.selected) chosen[static_cast<std::size_t>(j)] = true;
  for (Index j = 0; j < sel.inclusion_probability.size(); ++j) {
    os << (j + 1) << ',' << num(sel.inclusion_probability(j)) << ',' << (chosen[static_cast<std::size_t>(j)] ? 1 : 0)
       << '\n';
  }
  return os.str();
}

std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

// ---------------------------------------------------------------- fit

int fit_command(const FitOptions& o, const CLI::Option* seed_opt) {
  const MixingFamily family = family_or_usage(o.family);
  SamplerConfig sc;
  sc.iterations = o.iterations;
  sc.burn_in = o.burn_in;
  sc.thinning = o.thinning;
  sc.fast_path = parse_fast_path(o.fast_path);
  try {
    sc.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  if (!(o.level > 0.0 && o.level < 1.0)) throw UsageError("--level must lie in (0, 1)");
  if (!(o.cutoff > 0.0 && o.cutoff < 1.0)) throw UsageError("--cutoff must lie in (0, 1)");
  std::optional<double> tau_value;
  if (o.tau != "auto") tau_value = positive_real(o.tau, "--tau");
  std::optional<double> a_n_value;
  if (o.a_n != "auto") a_n_value = positive_real(o.a_n, "--a-n");

  const CsvTable xt = load_table(o.x_path);
  CsvTable yt = load_table(o.y_path);
  if (!o.response_cols.empty()) {
    std::vector<long> cols;
    try {
      cols = parse_column_list(o.response_cols, static_cast<long>(yt.values.cols()));
    } catch (const UsageError& e) {
      throw DataError(e.what());
    }
    MatrixXd picked(yt.values.rows(), static_cast<Index>(cols.size()));
    std::vector<std::string> names;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      picked.col(static_cast<Index>(c)) = yt.values.col(cols[c] - 1);
      names.push_back(yt.header[static_cast<std::size_t>(cols[c] - 1)]);
    }
    yt.values = picked;
    yt.header = names;
  }
  MatrixXd X = xt.values;
  MatrixXd Y = yt.values;
  if (X.rows() != Y.rows()) {
    throw DataError("X has " + std::to_string(X.rows()) + " rows but Y has " + std::to_string(Y.rows()));
  }
  if (X.rows() < 2) throw DataError("at least two observations are required");
  if (X.cols() < 2) throw DataError("at least two predictors are required");
  if (o.center) {
    X.rowwise() -= X.colwise().mean();
    Y.rowwise() -= Y.colwise().mean();
  }
  std::optional<RegressionData> data;
  try {
    data.emplace(X, Y);
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
  const Index n = data->n(), p = data->p(), q = data->q();

  HyperParams hp = HyperParams::defaults(q, family);
  if (o.nu > 0.0) hp.nu = o.nu;
  if (tau_value) hp.tau = GlobalScale::fixed(*tau_value);
  try {
    hp.validate(q);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  std::string seed_source;
  sc.seed = resolve_seed(seed_opt, o.seed, seed_source);

  const fs::path out(o.out);
  ensure_dir(out);

  const PosteriorSamples samples = run_chain(*data, hp, sc);
  for (const auto& w : samples.warnings) std::cerr << "warning: " << w << '\n';
  if (samples.states.empty()) throw UsageError("no retained draws; increase --iters or lower --burnin");
  const PosteriorSummary summary = posterior_summary(samples, o.level);
  const double a_n = a_n_value ? *a_n_value : default_threshold(static_cast<long>(n), static_cast<long>(p));
  const SelectionResult sel = select(samples, a_n, o.cutoff);

  ConditionInputs ci;
  ci.family = family;
  ci.tau = samples.tau;
  ci.n = static_cast<long>(n);
  ci.p = static_cast<long>(p);
  ci.q = static_cast<long>(q);
  ci.s0 = o.s0 > 0 ? o.s0 : std::max<long>(1, static_cast<long>(sel.selected.size()));
  ci.u = o.u;
  ci.m0 = o.m0;
  ci.sigma = summary.Sigma_mean;
  MatrixXd B_plugin = MatrixXd::Zero(p, q);
  if (!sel.selected.empty()) {
    MatrixXd rows(static_cast<Index>(sel.selected.size()), q);
    for (std::size_t i = 0; i < sel.selected.size(); ++i) {
      rows.row(static_cast<Index>(i)) = summary.B_mean.row(sel.selected[i]);
      B_plugin.row(sel.selected[i]) = summary.B_mean.row(sel.selected[i]);
    }
    ci.support_rows = rows;
  }
  if (o.c0 > 0.0 && ci.support_rows) ci.c0 = o.c0;
  ConditionReport report = build_condition_report(ci);
  Rng audit_rng(sc.seed, 0x5eed0a0d17ULL);
  report.assumptions = check_assumptions(*data, B_plugin, summary.Sigma_mean, ci.s0, 200, audit_rng);
  report.notes.push_back("assumption flags use the posterior mean restricted to selected rows and the posterior mean of Sigma as plug-in truth");

  const auto& yh = yt.header;
  write_matrix(out / "b_hat.csv", yh, summary.B_mean);
  write_matrix(out / "sigma_hat.csv", yh, summary.Sigma_mean, 6);
  {
    std::ostringstream os;
    os << "block,row,col,mean,lower,upper\n";
    for (Index j = 0; j < p; ++j) {
      for (Index k = 0; k < q; ++k) {
        os << "B," << j + 1 << ',' << k + 1 << ',' << num(summary.B_mean(j, k), 17) << ','
           << num(summary.B_lower(j, k), 17) << ',' << num(summary.B_upper(j, k), 17) << '\n';
      }
    }
    for (Index i = 0; i < q; ++i) {
      for (Index k = 0; k < q; ++k) {
        os << "Sigma," << i + 1 << ',' << k + 1 << ',' << num(summary.Sigma_mean(i, k), 17) << ','
           << num(summary.Sigma_lower(i, k), 17) << ',' << num(summary.Sigma_upper(i, k), 17) << '\n';
      }
    }
    write_file_atomic(out / "intervals.csv", os.str());
  }
  write_file_atomic(out / "selection.csv", selection_csv(sel));
  write_file_atomic(out / "conditions.txt", report.to_key_value());

  if (!o.no_draws) {
    const auto draws = static_cast<Index>(samples.states.size());
    MatrixXd bd(draws, p * q), sd(draws, q * q), xd(draws, p);
    for (Index t = 0; t < draws; ++t) {
      const auto& s = samples.states[static_cast<std::size_t>(t)];
      for (Index j = 0; j < p; ++j) {
        for (Index k = 0; k < q; ++k) bd(t, j * q + k) = s.B(j, k);
      }
      for (Index i = 0; i < q; ++i) {
        for (Index k = 0; k < q; ++k) sd(t, i * q + k) = s.Sigma(i, k);
      }
      xd.row(t) = s.xi.transpose();
    }
    write_matrix(out / "draws_B.csv", draw_header("B", p, q), bd);
    write_matrix(out / "draws_Sigma.csv", draw_header("Sigma", q, q), sd);
    write_matrix(out / "draws_xi.csv", numbered_header("xi", p), xd);
  }

  KeyValueWriter meta;
  meta.add("command", "fit")
      .add("x", o.x_path)
      .add("y", o.y_path)
      .add("response_cols", o.response_cols.empty() ? std::string("all") : o.response_cols)
      .add("center", o.center ? "true" : "false")
      .add("n", n)
      .add("p", p)
      .add("q", q)
      .add("family", family.to_string())
      .add("tau", samples.tau)
      .add("nu", hp.nu)
      .add("seed", sc.seed)
      .add("seed_source", seed_source)
      .add("chain_id", sc.chain_id)
      .add("config_digest", samples.config_digest)
      .add("iterations", sc.iterations)
      .add("burn_in", sc.burn_in)
      .add("thinning", sc.thinning)
      .add("retained", samples.states.size())
      .add("b_path", samples.b_path == BPath::Fast ? "fast" : "naive")
      .add("a_n", a_n)
      .add("cutoff", o.cutoff)
      .add("credible_level", o.level)
      .add("selected", sel.selected.size())
      .add("slice_calls", samples.slice.calls)
      .add("slice_capped", samples.slice.capped);
  if (o.timing) {
    meta.add("wall_seconds", samples.wall_seconds);
  } else {
    meta.add("wall_seconds", "not_recorded");
  }
  for (std::size_t i = 0; i < samples.warnings.size(); ++i) meta.add("warning_" + std::to_string(i + 1), samples.warnings[i]);
  write_file_atomic(out / "run_meta.txt", meta.str());
  return kOk;
}

// ---------------------------------------------------------------- simulate

int simulate_command(const SimulateOptions& o, const CLI::Option* seed_opt) {
  ExperimentConfig cfg;
  try {
    cfg = ExperimentConfig::standard(o.experiment);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  if (o.n > 0) cfg.n = o.n;
  if (o.p > 0) cfg.p = o.p;
  if (o.q > 0) cfg.q = o.q;
  if (o.s0 > 0) cfg.s0 = o.s0;
  cfg.sigma2 = o.sigma2;
  cfg.rho = o.rho;
  std::string seed_source;
  cfg.seed = resolve_seed(seed_opt, o.seed, seed_source);
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const fs::path out(o.out);
  ensure_dir(out);
  Rng rng(cfg.seed, 0);
  const SyntheticDataset ds = generate_synthetic(cfg, rng);
  write_matrix(out / "X.csv", numbered_header("x", cfg.p), ds.data.X());
  write_matrix(out / "Y.csv", numbered_header("y", cfg.q), ds.data.Y());
  write_matrix(out / "B0.csv", numbered_header("y", cfg.q), ds.B0);
  write_matrix(out / "Sigma0.csv", numbered_header("y", cfg.q), ds.Sigma0);
  MatrixXd support(static_cast<Index>(ds.support.size()), 1);
  for (std::size_t i = 0; i < ds.support.size(); ++i) support(static_cast<Index>(i), 0) = static_cast<double>(ds.support[i] + 1);
  write_matrix(out / "support.csv", {"row_index"}, support);
  KeyValueWriter meta;
  meta.add("command", "simulate")
      .add("experiment", cfg.id)
      .add("n", cfg.n)
      .add("p", cfg.p)
      .add("q", cfg.q)
      .add("s0", cfg.s0)
      .add("sigma2", cfg.sigma2)
      .add("rho", cfg.rho)
      .add("seed", cfg.seed)
      .add("seed_source", seed_source);
  write_file_atomic(out / "run_meta.txt", meta.str());
  return kOk;
}

// ---------------------------------------------------------------- experiment

int experiment_command(const ExperimentOptions& o, const CLI::Option* seed_opt) {
  SuiteOptions so;
  try {
    so.ids = parse_experiment_ids(o.ids);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  if (o.replicates < 1) throw UsageError("--replicates must be positive");
  if (o.iterations < 1 || o.burn_in < 0 || o.burn_in >= o.iterations) {
    throw UsageError("need 0 <= --burnin < --iters");
  }
  so.replicates = o.replicates;
  so.iterations = o.iterations;
  so.burn_in = o.burn_in;
  so.threads = o.threads;
  std::string seed_source;
  so.seed = resolve_seed(seed_opt, o.seed, seed_source);
  const fs::path out(o.out);
  ensure_dir(out);
  if (!o.quiet) {
    so.on_record = [](const MetricsRecord& r) {
      std::cerr << "experiment " << r.experiment << " replicate " << r.replicate
                << (r.failed ? " failed: " + r.error : " done") << '\n';
    };
  }
  const SuiteResult res = run_experiment_suite(so);
  write_file_atomic(out / "metrics.csv", metrics_csv(res.records, o.timing));
  write_file_atomic(out / "medians.csv", medians_csv(res.medians));
  KeyValueWriter meta;
  meta.add("command", "experiment")
      .add("ids", o.ids)
      .add("replicates", o.replicates)
      .add("iterations", o.iterations)
      .add("burn_in", o.burn_in)
      .add("seed", so.seed)
      .add("seed_source", seed_source);
  long failures = 0;
  for (const auto& r : res.records) failures += r.failed ? 1 : 0;
  meta.add("failures", failures);
  write_file_atomic(out / "run_meta.txt", meta.str());
  for (const auto& r : res.records) {
    if (r.failed) std::cerr << "experiment " << r.experiment << " replicate " << r.replicate << ": " << r.error << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- check-prior

int check_prior_command(const CheckOptions& o) {
  const MixingFamily family = family_or_usage(o.family);
  if (o.n < 2 || o.p < 2 || o.q < 1 || o.s0 < 1) throw UsageError("need --n >= 2, --p >= 2, --q >= 1, --s0 >= 1");
  if (!(o.u > 0.0) || !(o.m0 > 0.0)) throw UsageError("--u and --m0 must be positive");
  ConditionInputs ci;
  ci.family = family;
  ci.n = o.n;
  ci.p = o.p;
  ci.q = o.q;
  ci.s0 = o.s0;
  ci.u = o.u;
  ci.m0 = o.m0;
  ci.floor_ceiling = o.ceiling;
  if (o.a_n > 0.0) ci.a_n = o.a_n;
  if (o.c0 > 0.0) ci.c0 = o.c0;
  const double a_n = o.a_n > 0.0 ? o.a_n : contraction_rate(o.n, o.p, o.q, o.s0) / static_cast<double>(o.p);
  if (o.tau == "auto") {
    ci.tau = default_tau(o.n, o.p);
  } else if (o.tau == "theory") {
    ci.tau = theoretical_tau_max(a_n, o.p, tail_exponent(family), o.u);
  } else {
    ci.tau = positive_real(o.tau, "--tau");
  }
  const ConditionReport rep = build_condition_report(ci);
  if (o.out.empty()) {
    std::cout << rep.to_key_value() << '\n' << rep.to_csv();
  } else {
    const fs::path out(o.out);
    ensure_dir(out);
    write_file_atomic(out / "conditions.txt", rep.to_key_value());
    write_file_atomic(out / "conditions.csv", rep.to_csv());
  }
  return kOk;
}

// ---------------------------------------------------------------- select

int select_command(const SelectOptions& o) {
  if (!(o.cutoff > 0.0 && o.cutoff < 1.0)) throw UsageError("--cutoff must lie in (0, 1)");
  const fs::path dir(o.draws);
  const CsvTable bt = load_table((dir / "draws_B.csv").string());
  const CsvTable st = load_table((dir / "draws_Sigma.csv").string());
  const auto q = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(st.values.cols()))));
  if (q < 1 || q * q != st.values.cols() || bt.values.cols() % q != 0) {
    throw DataError("draw files have inconsistent column counts");
  }
  const Index p = bt.values.cols() / q;
  if (bt.header != draw_header("B", p, q) || st.header != draw_header("Sigma", q, q)) {
    throw DataError("draw file headers must be B_<j>_<k> and Sigma_<i>_<k>");
  }
  if (bt.values.rows() != st.values.rows() || bt.values.rows() == 0) {
    throw DataError("draw files must have the same, nonzero number of rows");
  }
  double a_n = 0.0;
  if (o.a_n == "auto") {
    long n = o.n;
    if (n <= 0) {
      const auto kv = read_key_values(dir / "run_meta.txt");
      const auto it = kv.find("n");
      if (it == kv.end()) throw UsageError("--a-n auto needs --n or a run_meta.txt with n");
      n = std::stol(it->second);
    }
    a_n = default_threshold(n, static_cast<long>(p));
  } else {
    a_n = positive_real(o.a_n, "--a-n");
  }
  MatrixXd scores(bt.values.rows(), p);
  for (Index t = 0; t < bt.values.rows(); ++t) {
    MatrixXd B(p, q), S(q, q);
    for (Index j = 0; j < p; ++j) {
      for (Index k = 0; k < q; ++k) B(j, k) = bt.values(t, j * q + k);
    }
    for (Index i = 0; i < q; ++i) {
      for (Index k = 0; k < q; ++k) S(i, k) = st.values(t, i * q + k);
    }
    try {
      scores.row(t) = row_scores(B, S).transpose();
    } catch (const NumericalError& e) {
      throw DataError("draw " + std::to_string(t + 1) + ": " + e.what());
    }
  }
  const SelectionResult sel = select_from_scores(scores, a_n, o.cutoff);
  const fs::path out = o.out.empty() ? dir / "selection.csv" : fs::path(o.out);
  write_file_atomic(out, selection_csv(sel));
  return kOk;
}

}  // namespace

std::vector<long> parse_column_list(const std::string& text, long available) {
  auto parse = [&](const std::string& tok) {
    long v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
      throw UsageError("column list: '" + tok + "' is not an integer");
    }
    if (v < 1 || v > available) {
      throw UsageError("column " + std::to_string(v) + " is outside 1.." + std::to_string(available));
    }
    return v;
  };
  std::vector<long> cols;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const long lo = parse(text.substr(0, colon));
    const long hi = parse(text.substr(colon + 1));
    if (lo > hi) throw UsageError("column range '" + text + "' is empty");
    for (long c = lo; c <= hi; ++c) cols.push_back(c);
    return cols;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) cols.push_back(parse(tok));
  if (cols.empty()) throw UsageError("empty column list");
  return cols;
}

int run(int argc, char** argv) {
  CLI::App app{"Multivariate Bayesian regression with global-local shrinkage priors", "embsp"};
  app.set_config("--config", "", "Read options from a key = value file with one [section] per subcommand");
  app.require_subcommand(1);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Run the Gibbs sampler on CSV data and write estimates and reports");
  fit_cmd->add_option("--x", fit.x_path, "Design matrix CSV (header row, n x p)")->required();
  fit_cmd->add_option("--y", fit.y_path, "Response matrix CSV (header row, n x q)")->required();
  fit_cmd->add_option("--out", fit.out, "Output directory")->required();
  fit_cmd->add_option("--family", fit.family, "Mixing family, e.g. horseshoe, tpbn:u=0.5,a=0.5, gdp:a=1,eta=1")
      ->capture_default_str();
  fit_cmd->add_option("--tau", fit.tau, "Global scale: auto or a positive number")->capture_default_str();
  fit_cmd->add_option("--iters", fit.iterations, "Gibbs iterations")->capture_default_str();
  fit_cmd->add_option("--burnin", fit.burn_in, "Burn-in iterations")->capture_default_str();
  fit_cmd->add_option("--thin", fit.thinning, "Keep every k-th post-burn-in state")->capture_default_str();
  auto* fit_seed = fit_cmd->add_option("--seed", fit.seed, "Random seed (default: fresh entropy, recorded in run_meta.txt)");
  fit_cmd->add_option("--nu", fit.nu, "Inverse-Wishart degrees of freedom (default q + 2)");
  fit_cmd->add_option("--fast-path", fit.fast_path, "B update: auto, always or never")->capture_default_str();
  fit_cmd->add_option("--response-cols", fit.response_cols, "Use a subset of Y columns, e.g. 1:4 or 1,3");
  fit_cmd->add_flag("--center", fit.center, "Center X and Y columns before fitting");
  fit_cmd->add_option("--level", fit.level, "Credible interval level")->capture_default_str();
  fit_cmd->add_option("--a-n", fit.a_n, "Selection threshold: auto or a positive number")->capture_default_str();
  fit_cmd->add_option("--cutoff", fit.cutoff, "Inclusion probability cutoff")->capture_default_str();
  fit_cmd->add_option("--s0", fit.s0, "Sparsity used in the condition report (default: number selected)");
  fit_cmd->add_option("--u", fit.u, "Tail exponent u in the condition report")->capture_default_str();
  fit_cmd->add_option("--m0", fit.m0, "Radius M0 for the density floor")->capture_default_str();
  fit_cmd->add_option("--c0", fit.c0, "Ball radius multiplier for l_n (omit to skip)");
  fit_cmd->add_flag("--timing", fit.timing, "Record wall time in run_meta.txt");
  fit_cmd->add_flag("--no-draws", fit.no_draws, "Do not write draws_*.csv");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic data set");
  sim_cmd->add_option("--experiment", sim.experiment, "Base settings from experiment 1..6")->capture_default_str();
  sim_cmd->add_option("--n", sim.n, "Override n");
  sim_cmd->add_option("--p", sim.p, "Override p");
  sim_cmd->add_option("--q", sim.q, "Override q");
  sim_cmd->add_option("--s0", sim.s0, "Override s0");
  sim_cmd->add_option("--sigma2", sim.sigma2, "Error variance scale")->capture_default_str();
  sim_cmd->add_option("--rho", sim.rho, "AR(1) correlation")->capture_default_str();
  auto* sim_seed = sim_cmd->add_option("--seed", sim.seed, "Random seed");
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();

  ExperimentOptions ex;
  auto* ex_cmd = app.add_subcommand("experiment", "Run the simulation experiments and write metrics.csv and medians.csv");
  ex_cmd->add_option("--ids", ex.ids, "Experiment ids, e.g. 1-6 or 1,3")->capture_default_str();
  ex_cmd->add_option("--replicates", ex.replicates, "Replicates per experiment")->capture_default_str();
  ex_cmd->add_option("--iters", ex.iterations, "Gibbs iterations")->capture_default_str();
  ex_cmd->add_option("--burnin", ex.burn_in, "Burn-in iterations")->capture_default_str();
  auto* ex_seed = ex_cmd->add_option("--seed", ex.seed, "Master seed");
  ex_cmd->add_option("--threads", ex.threads, "Worker threads (0 = all cores)")->capture_default_str();
  ex_cmd->add_option("--out", ex.out, "Output directory")->required();
  ex_cmd->add_flag("--timing", ex.timing, "Fill the seconds column (makes output run-dependent)");
  ex_cmd->add_flag("--quiet", ex.quiet, "No progress messages");

  CheckOptions ck;
  auto* ck_cmd = app.add_subcommand("check-prior", "Evaluate the prior conditions for a configuration");
  ck_cmd->add_option("--family", ck.family, "Mixing family")->capture_default_str();
  ck_cmd->add_option("--tau", ck.tau, "auto, theory or a positive number")->capture_default_str();
  ck_cmd->add_option("--n", ck.n, "Sample size")->required();
  ck_cmd->add_option("--p", ck.p, "Number of predictors")->required();
  ck_cmd->add_option("--q", ck.q, "Number of responses")->capture_default_str();
  ck_cmd->add_option("--s0", ck.s0, "Number of nonzero rows")->capture_default_str();
  ck_cmd->add_option("--u", ck.u, "Exponent u in the tail bound p^-(1+u)")->capture_default_str();
  ck_cmd->add_option("--m0", ck.m0, "Radius M0 for the density floor")->capture_default_str();
  ck_cmd->add_option("--c0", ck.c0, "Ball radius multiplier for l_n (omit to skip)");
  ck_cmd->add_option("--a-n", ck.a_n, "Tail radius (default eps_n / p)");
  ck_cmd->add_option("--floor-ceiling", ck.ceiling, "Ceiling for the density-floor ratio")->capture_default_str();
  ck_cmd->add_option("--out", ck.out, "Write conditions.txt and conditions.csv here instead of stdout");

  SelectOptions se;
  auto* se_cmd = app.add_subcommand("select", "Variable selection from persisted posterior draws");
  se_cmd->add_option("--draws", se.draws, "Directory with draws_B.csv and draws_Sigma.csv")->required();
  se_cmd->add_option("--a-n", se.a_n, "Threshold: auto or a positive number")->capture_default_str();
  se_cmd->add_option("--cutoff", se.cutoff, "Inclusion probability cutoff")->capture_default_str();
  se_cmd->add_option("--n", se.n, "Sample size for --a-n auto (default: from run_meta.txt)");
  se_cmd->add_option("--out", se.out, "Output CSV (default: <draws>/selection.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (fit_cmd->parsed()) return fit_command(fit, fit_seed);
    if (sim_cmd->parsed()) return simulate_command(sim, sim_seed);
    if (ex_cmd->parsed()) return experiment_command(ex, ex_seed);
    if (ck_cmd->parsed()) return check_prior_command(ck);
    if (se_cmd->parsed()) return select_command(se);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace embsp::cli

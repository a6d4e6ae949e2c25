#include "embsp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "embsp/errors.hpp"
#include "embsp/selection.hpp"

namespace embsp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Setting {
  long n, p, q, s0;
};

constexpr Setting kSettings[] = {
    {25, 125, 3, 2}, {50, 354, 3, 3}, {75, 650, 3, 4}, {100, 1000, 3, 5}, {125, 1398, 3, 6}, {150, 1837, 3, 7},
};

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 1 || p < 1 || q < 1 || s0 < 1) throw ConfigError("experiment: n, p, q, s0 must be positive");
  if (s0 > p) throw ConfigError("experiment: s0 must not exceed p");
  if (!(sigma2 > 0.0)) throw ConfigError("experiment: sigma2 must be positive");
  if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("experiment: rho must lie in (-1, 1)");
  if (!(coef_lo > 0.0) || coef_lo > coef_hi) throw ConfigError("experiment: need 0 < lo <= hi");
  if (replicates < 1) throw ConfigError("experiment: replicates must be positive");
  sampler.validate();
}

ExperimentConfig ExperimentConfig::standard(int id) {
  if (id < 1 || id > 6) throw ConfigError("experiment id must be in 1..6, got " + std::to_string(id));
  const Setting& s = kSettings[id - 1];
  ExperimentConfig cfg;
  cfg.id = id;
  cfg.n = s.n;
  cfg.p = s.p;
  cfg.q = s.q;
  cfg.s0 = s.s0;
  cfg.sampler.iterations = 3000;
  cfg.sampler.burn_in = 1000;
  return cfg;
}

MatrixXd ar1_matrix(Index dim, double rho, double scale) {
  MatrixXd m(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) m(i, j) = scale * std::pow(rho, static_cast<double>(std::abs(i - j)));
  }
  return m;
}

MatrixXd symmetric_sqrt(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw NumericalError("symmetric_sqrt: matrix is not positive definite");
  }
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

SyntheticDataset generate_synthetic(const ExperimentConfig& cfg, Rng& rng) {
  cfg.validate();
  const Index n = cfg.n;
  const Index p = cfg.p;
  const Index q = cfg.q;

  MatrixXd X(n, p);
  const double innov = std::sqrt(1.0 - cfg.rho * cfg.rho);
  for (Index i = 0; i < n; ++i) {
    double prev = rng.normal();
    X(i, 0) = prev;
    for (Index j = 1; j < p; ++j) {
      prev = cfg.rho * prev + innov * rng.normal();
      X(i, j) = prev;
    }
  }

  std::vector<Index> perm(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) perm[static_cast<std::size_t>(j)] = j;
  for (long i = 0; i < cfg.s0; ++i) {
    const auto span = static_cast<double>(p - i);
    auto k = static_cast<Index>(i) + static_cast<Index>(std::floor(rng.uniform() * span));
    k = std::min(k, p - 1);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(k)]);
  }
  std::vector<Index> support(perm.begin(), perm.begin() + cfg.s0);
  std::sort(support.begin(), support.end());

  MatrixXd B0 = MatrixXd::Zero(p, q);
  for (Index j : support) {
    for (Index k = 0; k < q; ++k) {
      const double mag = cfg.coef_lo + (cfg.coef_hi - cfg.coef_lo) * rng.uniform();
      B0(j, k) = rng.uniform() < 0.5 ? -mag : mag;
    }
  }

  MatrixXd Sigma0 = ar1_matrix(q, cfg.rho, cfg.sigma2);
  MatrixXd E(n, q);
  for (Index k = 0; k < q; ++k) {
    for (Index i = 0; i < n; ++i) E(i, k) = rng.normal();
  }
  MatrixXd Y = X * B0 + E * symmetric_sqrt(Sigma0);
  return SyntheticDataset{RegressionData(std::move(X), std::move(Y)), std::move(B0), std::move(Sigma0),
                          std::move(support)};
}

CovarianceMetrics covariance_metrics(const MatrixXd& Sigma_hat, const MatrixXd& Sigma0, const MatrixXd& B_hat,
                                     const MatrixXd& B0) {
  if (Sigma_hat.rows() != Sigma0.rows() || Sigma_hat.cols() != Sigma0.cols() || Sigma0.rows() != Sigma0.cols()) {
    throw ConfigError("covariance_metrics: covariance dimensions differ");
  }
  if (B_hat.rows() != B0.rows() || B_hat.cols() != B0.cols() || B0.cols() != Sigma0.rows()) {
    throw ConfigError("covariance_metrics: coefficient dimensions differ");
  }
  CovarianceMetrics m;
  const MatrixXd diff = Sigma_hat - Sigma0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (diff + diff.transpose()), Eigen::EigenvaluesOnly);
  m.spectral_error = es.eigenvalues().cwiseAbs().maxCoeff();
  m.frobenius_error = diff.norm();
  // ||(B_hat - B0) Sigma0^{-1/2}||_F = ||L^{-1} (B_hat - B0)'||_F for Sigma0 = L L'.
  Eigen::LLT<MatrixXd> llt(Sigma0);
  if (llt.info() != Eigen::Success) throw NumericalError("covariance_metrics: Sigma0 is not positive definite");
  const MatrixXd w = llt.matrixL().solve((B_hat - B0).transpose());
  m.coefficient_error = w.norm();
  return m;
}

ConjugatePosterior conjugate_oracle(const RegressionData& data, const HyperParams& hp, double xi_fixed) {
  if (!(xi_fixed > 0.0)) throw DomainError("conjugate_oracle: xi_fixed must be positive");
  hp.validate(data.q());
  const double tau = hp.tau.resolve(static_cast<long>(data.n()), static_cast<long>(data.p()));
  const MatrixXd& X = data.X();
  const MatrixXd& Y = data.Y();
  MatrixXd A = X.transpose() * X;
  A.diagonal().array() += 1.0 / (tau * xi_fixed);
  Eigen::LDLT<MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw NumericalError("conjugate_oracle: A is not positive definite");
  ConjugatePosterior out;
  out.B_mean = ldlt.solve(X.transpose() * Y);
  out.df = hp.nu + static_cast<double>(data.n());
  const MatrixXd s = hp.Phi + Y.transpose() * Y - Y.transpose() * X * out.B_mean;
  out.scale = 0.5 * (s + s.transpose());
  const double denom = out.df - static_cast<double>(data.q()) - 1.0;
  if (denom > 0.0) out.Sigma_mean = out.scale / denom;
  return out;
}

std::uint64_t replicate_stream(int experiment, long replicate) {
  return (static_cast<std::uint64_t>(experiment) << 32) | static_cast<std::uint64_t>(replicate);
}

MetricsRecord run_replicate(const ExperimentConfig& cfg, long replicate, double probability_cutoff) {
  MetricsRecord rec;
  rec.experiment = cfg.id;
  rec.replicate = replicate;
  const auto start = std::chrono::steady_clock::now();
  try {
    const std::uint64_t stream = replicate_stream(cfg.id, replicate);
    Rng data_rng(cfg.seed, 2 * stream);
    const SyntheticDataset ds = generate_synthetic(cfg, data_rng);

    HyperParams hp = HyperParams::defaults(cfg.q);
    SamplerConfig sc = cfg.sampler;
    sc.seed = cfg.seed;
    sc.chain_id = 2 * stream + 1;

    const double a_n = default_threshold(cfg.n, cfg.p);
    MatrixXd B_sum = MatrixXd::Zero(cfg.p, cfg.q);
    MatrixXd S_sum = MatrixXd::Zero(cfg.q, cfg.q);
    VectorXd hits = VectorXd::Zero(cfg.p);
    long draws = 0;
    run_chain(ds.data, hp, sc, [&](const ChainState& s) {
      B_sum += s.B;
      S_sum += s.Sigma;
      hits += (row_scores(s.B, s.Sigma).array() > a_n).cast<double>().matrix();
      ++draws;
    });
    if (draws == 0) throw ConfigError("experiment: no retained draws");
    const double inv = 1.0 / static_cast<double>(draws);
    rec.metrics = covariance_metrics(S_sum * inv, ds.Sigma0, B_sum * inv, ds.B0);

    std::vector<Index> selected;
    for (Index j = 0; j < cfg.p; ++j) {
      if (hits(j) * inv > probability_cutoff) selected.push_back(j);
    }
    for (Index j : selected) {
      if (std::binary_search(ds.support.begin(), ds.support.end(), j)) {
        ++rec.true_positives;
      } else {
        ++rec.false_positives;
      }
    }
    rec.exact_recovery = selected == ds.support;
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

SuiteResult run_experiment_suite(const SuiteOptions& options) {
  if (options.ids.empty()) throw ConfigError("experiment suite: no experiment ids");
  if (options.replicates < 1) throw ConfigError("experiment suite: replicates must be positive");

  std::vector<ExperimentConfig> configs;
  for (int id : options.ids) {
    ExperimentConfig cfg = ExperimentConfig::standard(id);
    cfg.replicates = options.replicates;
    cfg.sampler.iterations = options.iterations;
    cfg.sampler.burn_in = options.burn_in;
    cfg.seed = options.seed;
    cfg.validate();
    configs.push_back(cfg);
  }

  struct Task {
    std::size_t config;
    long replicate;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (long r = 0; r < options.replicates; ++r) tasks.push_back({c, r});
  }
  // Largest problems first so the pool drains evenly; results are stored by index.
  std::vector<std::size_t> order(tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return configs[tasks[a].config].p > configs[tasks[b].config].p;
  });

  std::vector<MetricsRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= order.size()) return;
      const Task& t = tasks[order[k]];
      records[order[k]] = run_replicate(configs[t.config], t.replicate, options.probability_cutoff);
      if (options.on_record) {
        std::lock_guard<std::mutex> lock(report_mutex);
        options.on_record(records[order[k]]);
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SuiteResult out;
  out.records = std::move(records);
  std::sort(out.records.begin(), out.records.end(), [](const MetricsRecord& a, const MetricsRecord& b) {
    return a.experiment != b.experiment ? a.experiment < b.experiment : a.replicate < b.replicate;
  });
  std::vector<int> ids = options.ids;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (int id : ids) {
    const auto& cfg = *std::find_if(configs.begin(), configs.end(), [id](const auto& c) { return c.id == id; });
    ExperimentMedians m;
    m.experiment = id;
    m.n = cfg.n;
    m.p = cfg.p;
    m.q = cfg.q;
    m.s0 = cfg.s0;
    std::vector<double> spec, frob, coef;
    long exact = 0, zero_fp = 0;
    for (const auto& r : out.records) {
      if (r.experiment != id) continue;
      ++m.replicates;
      if (r.failed) {
        ++m.failures;
        continue;
      }
      spec.push_back(r.metrics.spectral_error);
      frob.push_back(r.metrics.frobenius_error);
      coef.push_back(r.metrics.coefficient_error);
      exact += r.exact_recovery ? 1 : 0;
      zero_fp += r.false_positives == 0 ? 1 : 0;
    }
    m.spectral_error = median(spec);
    m.frobenius_error = median(frob);
    m.coefficient_error = median(coef);
    const double ok = static_cast<double>(spec.size());
    m.exact_recovery_rate = ok > 0 ? static_cast<double>(exact) / ok : std::nan("");
    m.zero_fp_rate = ok > 0 ? static_cast<double>(zero_fp) / ok : std::nan("");
    out.medians.push_back(m);
  }
  return out;
}

std::vector<int> parse_experiment_ids(std::string_view text) {
  auto parse_one = [&](std::string_view tok) {
    int v = 0;
    const auto* end = tok.data() + tok.size();
    const auto res = std::from_chars(tok.data(), end, v);
    if (tok.empty() || res.ec != std::errc{} || res.ptr != end || v < 1 || v > 6) {
      throw ParseError("experiment ids: '" + std::string(tok) + "' is not an id in 1..6");
    }
    return v;
  };
  std::vector<int> ids;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view tok = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    const std::size_t dash = tok.find('-');
    if (dash != std::string_view::npos) {
      const int lo = parse_one(tok.substr(0, dash));
      const int hi = parse_one(tok.substr(dash + 1));
      if (lo > hi) throw ParseError("experiment ids: empty range '" + std::string(tok) + "'");
      for (int v = lo; v <= hi; ++v) ids.push_back(v);
    } else {
      ids.push_back(parse_one(tok));
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::string metrics_csv(const std::vector<MetricsRecord>& records, bool with_timing) {
  std::ostringstream os;
  os << "experiment,replicate,spectral_error,frobenius_error,coef_error,exact_recovery,tp,fp,seconds\n";
  for (const auto& r : records) {
    os << r.experiment << ',' << r.replicate << ',';
    if (r.failed) {
      os << "NA,NA,NA,NA,NA,NA,";
    } else {
      os << num(r.metrics.spectral_error) << ',' << num(r.metrics.frobenius_error) << ','
         << num(r.metrics.coefficient_error) << ',' << (r.exact_recovery ? 1 : 0) << ',' << r.true_positives << ','
         << r.false_positives << ',';
    }
    os << (with_timing ? num(r.seconds) : std::string("NA")) << '\n';
  }
  return os.str();
}

std::string medians_csv(const std::vector<ExperimentMedians>& medians) {
  std::ostringstream os;
  os << "experiment,n,p,q,s0,replicates,failures,median_spectral_error,median_frobenius_error,median_coef_error,"
        "exact_recovery_rate,zero_fp_rate\n";
  for (const auto& m : medians) {
    os << m.experiment << ',' << m.n << ',' << m.p << ',' << m.q << ',' << m.s0 << ',' << m.replicates << ','
       << m.failures << ',' << num(m.spectral_error) << ',' << num(m.frobenius_error) << ','
       << num(m.coefficient_error) << ',' << num(m.exact_recovery_rate) << ',' << num(m.zero_fp_rate) << '\n';
  }
  return os.str();
}

}  // namespace embsp

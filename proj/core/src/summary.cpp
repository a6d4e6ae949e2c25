#include "embsp/summary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "embsp/errors.hpp"
#include "embsp/selection.hpp"

namespace embsp {

std::pair<long, long> credible_positions(long draws, double level) {
  if (draws < 1) throw std::logic_error("credible_positions: no draws");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("credible level must lie in (0, 1)");
  const double alpha = 1.0 - level;
  const double last = static_cast<double>(draws - 1);
  // The slack keeps 0.05 * 500 from landing on 24.999...
  const long lo = static_cast<long>(std::floor(0.5 * alpha * last + 1e-9));
  const long hi = static_cast<long>(std::ceil((1.0 - 0.5 * alpha) * last - 1e-9));
  return {std::clamp(lo, 0L, draws - 1), std::clamp(hi, 0L, draws - 1)};
}

PosteriorSummary posterior_summary(const PosteriorSamples& samples, double level) {
  if (samples.states.empty()) throw std::logic_error("posterior_summary: no posterior draws");
  const auto& first = samples.states.front();
  const Eigen::Index p = first.B.rows();
  const Eigen::Index q = first.B.cols();
  const long draws = static_cast<long>(samples.states.size());
  const auto [lo, hi] = credible_positions(draws, level);

  PosteriorSummary s;
  s.level = level;
  s.draws = draws;
  s.B_mean = Eigen::MatrixXd::Zero(p, q);
  s.Sigma_mean = Eigen::MatrixXd::Zero(q, q);
  s.xi_mean = Eigen::VectorXd::Zero(p);
  s.row_score_mean = Eigen::VectorXd::Zero(p);
  for (const auto& st : samples.states) {
    s.B_mean += st.B;
    s.Sigma_mean += st.Sigma;
    s.xi_mean += st.xi;
    s.row_score_mean += row_scores(st.B, st.Sigma);
  }
  const double inv = 1.0 / static_cast<double>(draws);
  s.B_mean *= inv;
  s.Sigma_mean = (0.5 * inv * (s.Sigma_mean + s.Sigma_mean.transpose())).eval();
  s.xi_mean *= inv;
  s.row_score_mean *= inv;

  std::vector<double> buf(static_cast<std::size_t>(draws));
  auto interval = [&](auto&& get, double& lower, double& upper) {
    for (long i = 0; i < draws; ++i) buf[static_cast<std::size_t>(i)] = get(samples.states[static_cast<std::size_t>(i)]);
    std::nth_element(buf.begin(), buf.begin() + lo, buf.end());
    lower = buf[static_cast<std::size_t>(lo)];
    std::nth_element(buf.begin(), buf.begin() + hi, buf.end());
    upper = buf[static_cast<std::size_t>(hi)];
  };
  s.B_lower.resize(p, q);
  s.B_upper.resize(p, q);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = 0; k < q; ++k) {
      interval([&](const ChainState& st) { return st.B(j, k); }, s.B_lower(j, k), s.B_upper(j, k));
    }
  }
  s.Sigma_lower.resize(q, q);
  s.Sigma_upper.resize(q, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index k = 0; k < q; ++k) {
      interval([&](const ChainState& st) { return st.Sigma(i, k); }, s.Sigma_lower(i, k), s.Sigma_upper(i, k));
    }
  }
  return s;
}

}  // namespace embsp

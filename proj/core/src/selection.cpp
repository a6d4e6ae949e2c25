#include "embsp/selection.hpp"

#include <cmath>
#include <stdexcept>

#include "embsp/errors.hpp"

namespace embsp {

Eigen::VectorXd row_scores(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Sigma) {
  if (Sigma.rows() != B.cols() || Sigma.cols() != B.cols()) throw ConfigError("row_scores: Sigma must be q x q");
  Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
  if (llt.info() != Eigen::Success) throw NumericalError("row_scores: Sigma is not positive definite");
  const Eigen::MatrixXd w = llt.matrixL().solve(B.transpose());
  return w.colwise().norm().transpose();
}

double default_threshold(long n, long p) {
  if (n < 2 || p < 2) throw DomainError("default_threshold requires n >= 2 and p >= 2");
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  return std::sqrt(std::log(pd) / nd) / (pd * std::log(nd));
}

SelectionResult select_from_scores(const Eigen::MatrixXd& scores, double a_n, double probability_cutoff) {
  if (scores.rows() == 0) throw std::logic_error("select: no posterior draws");
  if (!(a_n > 0.0)) throw DomainError("select: threshold a_n must be positive");
  if (!(probability_cutoff > 0.0 && probability_cutoff < 1.0)) throw DomainError("select: cutoff must lie in (0, 1)");
  SelectionResult out;
  out.threshold = a_n;
  out.probability_cutoff = probability_cutoff;
  out.inclusion_probability = (scores.array() > a_n).cast<double>().colwise().mean().transpose();
  for (Eigen::Index j = 0; j < out.inclusion_probability.size(); ++j) {
    if (out.inclusion_probability(j) > probability_cutoff) out.selected.push_back(j);
  }
  return out;
}

SelectionResult select(const PosteriorSamples& samples, double a_n, double probability_cutoff) {
  if (samples.states.empty()) throw std::logic_error("select: no posterior draws");
  const auto p = samples.states.front().B.rows();
  Eigen::MatrixXd scores(static_cast<Eigen::Index>(samples.states.size()), p);
  for (std::size_t i = 0; i < samples.states.size(); ++i) {
    scores.row(static_cast<Eigen::Index>(i)) = row_scores(samples.states[i].B, samples.states[i].Sigma).transpose();
  }
  return select_from_scores(scores, a_n, probability_cutoff);
}

}  // namespace embsp

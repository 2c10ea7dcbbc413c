#include "agentsim/trainer/elo.hpp"

#include <cmath>

namespace agentsim::trainer {

double elo_expected(double r_a, double r_b) {
  return 1.0 / (1.0 + std::pow(10.0, (r_b - r_a) / 400.0));
}

double elo_quantize(double rating) { return std::ldexp(std::round(std::ldexp(rating, 30)), -30); }

std::pair<double, double> elo_update(double r_a, double r_b, double score_a, double k) {
  const double delta = elo_quantize(k * (score_a - elo_expected(r_a, r_b)));
  return {r_a + delta, r_b - delta};
}

double score_from_return(double episode_return) {
  if (episode_return > 0.0) return 1.0;
  if (episode_return < 0.0) return 0.0;
  return 0.5;
}

}  // namespace agentsim::trainer

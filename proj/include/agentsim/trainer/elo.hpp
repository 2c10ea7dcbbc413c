#pragma once

#include <utility>

namespace agentsim::trainer {

inline constexpr double kInitialElo = 1200.0;
inline constexpr double kEloK = 16.0;

// Expected score of a against b.
double elo_expected(double r_a, double r_b);

// score_a in {0, 0.5, 1}. The delta is rounded to a multiple of 2^-30 and
// added to a, taken from b. Ratings on that grid below 2^22 sum exactly.
std::pair<double, double> elo_update(double r_a, double r_b, double score_a, double k = kEloK);

// Nearest rating on the 2^-30 grid.
double elo_quantize(double rating);

// Win/draw/loss score from a signed episode return.
double score_from_return(double episode_return);

}  // namespace agentsim::trainer

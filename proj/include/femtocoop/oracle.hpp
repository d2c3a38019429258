/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef FEMTOCOOP_ORACLE_HPP
#define FEMTOCOOP_ORACLE_HPP

#include "femtocoop/coalition.hpp"

#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace femtocoop {

/// Exhaustive search asked for more players than the cap allows.
class oracle_refused : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Result of the exhaustive search over the full player set.
struct core_result
{
    std::vector<outcome> core;     ///< undominated outcomes
    std::vector<outcome> feasible; ///< every outcome reachable by accepted joins
    int states = 0;                ///< residual games solved
};

/// Recursive core by memoized recursion over residual games. Outcomes of a
/// residual game are the ways its players can group given the arrangement
/// already fixed outside it; leases come from joins negotiated in FUE id
/// order, members in discovery order. An outcome is dominated through S
/// when S can form and some outcome of the game left after S (core if
/// nonempty, all outcomes otherwise) pays S strictly better.
core_result recursive_core_oracle(const game_model& g, int max_players = 8);

/// Same coalitions (as player sets) in both partitions.
bool same_structure(const partition& a, const partition& b);

struct core_match
{
    bool member = false;    ///< same structure as, or payoff-equal to, a core outcome
    double shortfall = 0.0; ///< mean relative payoff shortfall vs the closest core outcome
    int index = -1;         ///< that core outcome
};

core_match match_core(const outcome& x, const core_result& core, double rel_tol = 1e-6);

/// Singleton and pairwise deviations from `x`, each evaluated with the rest
/// of the partition left in place.
stability_report check_small_deviations(const game_model& g, const outcome& x);

/// `{"core": [...], "feasible": [...]}` with partitions and payoff vectors.
void write_core_json(std::ostream& os, const core_result& r);

} // namespace femtocoop

#endif

/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef FEMTOCOOP_COALITION_HPP
#define FEMTOCOOP_COALITION_HPP

#include "femtocoop/channel.hpp"
#include "femtocoop/config.hpp"
#include "femtocoop/leaseopt.hpp"
#include "femtocoop/topology.hpp"
#include "femtocoop/traffic.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace femtocoop {

/// A relay FUE with its serviced MUEs, or a lone player. Lease terms run
/// parallel to mue_ids, in join order.
struct coalition
{
    int relay_fue = -1;
    std::vector<int> mue_ids;
    std::vector<lease_terms> lease;

    bool cooperative() const { return relay_fue >= 0 && !mue_ids.empty(); }
    int size() const { return static_cast<int>(mue_ids.size()) + (relay_fue >= 0 ? 1 : 0); }

    static coalition lone_mue(int m) { return {-1, {m}, {}}; }
    static coalition lone_fue(int l) { return {l, {}, {}}; }
};

struct partition
{
    std::vector<coalition> coalitions;

    static partition singletons(int n_mues, int n_fues);
};

/// An MUE admitted by a FAP under open access, moved to `subchannel`.
struct guest
{
    int mue = -1;
    int fap = -1;
    int subchannel = -1;
};

/// Per-player payoffs; players are MUEs 0..M-1 followed by FUEs.
struct outcome
{
    std::vector<payoff> payoffs;
    partition part;
};

/// x >_S y: no member of S worse off and at least one strictly better.
bool dominates(const std::vector<double>& x, const std::vector<double>& y, const std::vector<int>& s);

/// One round of the game: layout, frozen link gains and per-player
/// quantities that do not depend on the partition.
class game_model
{
  public:
    game_model(const network_topology& topo,
               const channel_model& channel,
               const scenario_config& cfg,
               bool interference = true);

    const network_topology& topology() const { return *topo_; }
    const channel_model& channel() const { return *channel_; }
    const scenario_config& config() const { return cfg_; }
    const model_params& params() const { return params_; }
    bool interference() const { return interference_; }

    int n_mues() const { return static_cast<int>(topo_->mues.size()); }
    int n_fues() const { return static_cast<int>(topo_->fues.size()); }
    int n_players() const { return n_mues() + n_fues(); }
    int mue_player(int m) const { return m; }
    int fue_player(int l) const { return n_mues() + l; }

    double mue_power(int m) const { return mue_power_[m]; }
    double fue_power(int l) const { return fue_power_[l]; }
    double gain(node_ref a, node_ref b) const;

    bool in_d2d_range(int m, int l) const;
    /// MUE power on the D2D hop: enough for the target SNR, capped at P_max.
    double d2d_power(int m, int l) const;
    /// mu_m^R, noise-limited.
    double d2d_rate(int m, int l) const;

    /// lambda~_m on the MBS link; also the offered load when relayed.
    double mue_arrival(int m) const { return mue_arrival_[m]; }
    /// Payoff of each player in the all-singleton partition.
    const payoff& noncoop_payoff(int player) const { return noncoop_[player]; }

  private:
    const network_topology* topo_;
    const channel_model* channel_;
    scenario_config cfg_;
    model_params params_;
    bool interference_;
    std::vector<double> mue_power_;
    std::vector<double> fue_power_;
    std::vector<double> mue_arrival_;
    std::vector<payoff> noncoop_;
};

/// Macro-tier transmissions per subchannel under one partition: singleton
/// and guest MUEs at full power, cooperating MUEs at D2D power for their
/// (1 - alpha) share and relay FUEs at their average leased power. Native
/// femto transmissions are tracked separately since they only reach the MBS.
class emitter_map
{
  public:
    emitter_map(const game_model& g, const partition& part, const std::vector<guest>& guests = {});

    /// Interference at `rx` on `subchannel` from macro-tier emitters, except
    /// those owned by FUE `skip_owner` or belonging to `skip_mues`.
    std::vector<double> at(node_ref rx,
                           int subchannel,
                           int skip_owner,
                           const std::vector<int>& skip_mues) const;
    /// Native femto emitters received at the MBS on `subchannel`.
    std::vector<double> native_at_mbs(int subchannel) const;

    bool native_active(int l) const { return native_active_[l]; }

  private:
    struct emitter
    {
        node_ref node;
        double power;
        int owner; ///< relay FUE of the emitting coalition, -1 for singletons
        int mue;   ///< MUE the transmission belongs to
    };
    const game_model* g_;
    std::unordered_map<int, std::vector<emitter>> macro_;
    std::unordered_map<int, std::vector<int>> native_;
    std::vector<bool> native_active_;
};

/// Coalition inputs for FUE `l` serving `members` (with `terms`) against the
/// rest of the partition as captured by `em`.
coalition_inputs make_coalition_inputs(const game_model& g,
                                       const emitter_map& em,
                                       int l,
                                       const std::vector<int>& members,
                                       const std::vector<lease_terms>& terms);

/// Throws structural_error if the partition does not cover every player
/// exactly once or has a coalition shape outside the game.
void check_partition(const game_model& g, const partition& part);

outcome evaluate_partition(const game_model& g,
                           const partition& part,
                           const std::vector<guest>& guests = {});

std::vector<double> payoff_values(const outcome& o);

/// Ranked D2D candidates by descending received power; ties by lower id.
struct discovery
{
    struct candidate
    {
        int id;
        double rssi; ///< W
        bool cochannel;
    };
    std::vector<std::vector<candidate>> fue_candidates; ///< per FUE: MUEs
    std::vector<std::vector<candidate>> mue_candidates; ///< per MUE: FUEs
};

discovery interferer_discovery(const game_model& g);

/// A join that both sides accept, with the negotiated lease.
struct join_offer
{
    int fue = -1;
    int mue = -1;
    lease_result lease;
};

/// Negotiated leases keyed by a hash of the lease problem.
using lease_cache = std::unordered_map<std::uint64_t, lease_result>;

/// Mutable formation state with a negotiation cache. Shared by
/// form_coalitions, is_stable and the oracle.
class coalition_state
{
  public:
    coalition_state(const game_model& g,
                    const partition& part,
                    std::shared_ptr<lease_cache> cache = nullptr);

    const partition& current() const { return part_; }
    const outcome& evaluated() const { return outcome_; }
    int owner_of(int m) const { return owner_[m]; }
    const std::vector<int>& members(int l) const { return members_[l]; }

    /// Payoff of FUE `l` if its coalition dissolved into singletons.
    double fue_revert_payoff(int l) const;

    /// Negotiates `m` joining FUE `l`'s coalition with `m` first detached
    /// from its current coalition. The lease must strictly improve both on
    /// their current payoffs and leave existing members no worse.
    std::optional<join_offer> try_join(int l, int m);
    /// Same, against explicit reference payoffs.
    std::optional<join_offer> try_join(int l, int m, double mue_ref, double fue_ref);

    void apply_join(const join_offer& offer);
    void remove_mue(int m);
    void dissolve(int l);

  private:
    void refresh();
    /// Partition of the current state with MUE `detach` (if any) alone.
    partition build(int detach) const;

    const game_model* g_;
    partition part_;
    outcome outcome_;
    std::vector<int> owner_;            ///< FUE serving each MUE, -1 if alone
    std::vector<int> coalition_of_fue_; ///< index into part_.coalitions
    std::vector<std::vector<int>> members_;
    std::vector<std::vector<lease_terms>> terms_;
    std::shared_ptr<lease_cache> cache_;
};

struct formation_result
{
    outcome result;
    int iterations = 0;
    bool converged = false;
};

formation_result form_coalitions(const game_model& g);

struct stability_report
{
    bool stable = true;
    std::string kind; ///< mue_exit, fue_exit, join or pair
    int mue = -1;
    int fue = -1;
};

/// Checks individual rationality against reverting to singletons and every
/// single MUE move to another FUE's coalition.
stability_report is_stable(const game_model& g, const partition& part);

/// `coalition_id,fue_id,mue_ids,alpha,beta` rows for cooperative coalitions.
void write_partition_csv(std::ostream& os, const partition& part);

} // namespace femtocoop

#endif

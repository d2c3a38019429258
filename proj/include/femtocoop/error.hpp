/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef FEMTOCOOP_ERROR_HPP
#define FEMTOCOOP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace femtocoop {

/// Malformed or out-of-range scenario configuration. Carries the offending
/// key and, when known, the 1-based line of the config file.
class config_error : public std::runtime_error
{
  public:
    config_error(std::string key, const std::string& what, int line = 0)
        : std::runtime_error(what),
          key_(std::move(key)),
          line_(line)
    {
    }

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

  private:
    std::string key_;
    int line_;
};

/// Subchannel pool cannot satisfy the disjointness constraints.
class infeasible_assignment : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Lease terms violate the relay power budget, or no feasible lease exists.
class infeasible_lease : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Partition does not cover the player set exactly once, or contains a
/// coalition shape outside the game (zero or several relay FUEs).
class structural_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace femtocoop

#endif

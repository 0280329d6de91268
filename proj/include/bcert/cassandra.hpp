#pragma once

#include <iosfwd>
#include <string>

#include "bcert/pomdp.hpp"

namespace bcert {

// Cassandra-style .pomdp text format (states/actions/observations either as a
// count or as names; start:, T:, O: stanzas in matrix, row, or triple form;
// `uniform` / `identity` keywords; `*` action wildcards) plus the extension
// stanza `Tcol: true|false` declaring whether T matrix blocks are written
// column-stochastic (default true).
Pomdp parse_pomdp(std::istream& in);
Pomdp parse_pomdp_file(const std::string& path);
std::string write_pomdp(const Pomdp& p);

// Plain-text policy: one `region <poly> -> <action>` line per region
// (region = {guard <= 0}, first match wins), final `default -> <action>`.
PolicyPartition parse_policy(std::istream& in, const Pomdp& model);
PolicyPartition parse_policy_file(const std::string& path, const Pomdp& model);

}  // namespace bcert

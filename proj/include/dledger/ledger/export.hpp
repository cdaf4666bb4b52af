#pragma once

#include "dledger/ledger/ledger_state.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dledger {

/// Graphviz rendering: one node per stored record (label: generator, short
/// hash, weight, status), one edge per approval pointing at the approved record.
void write_dot(std::ostream& out, const LedgerState& ledger);

/// Everything a verifier needs besides the records themselves.
struct DumpHeader
{
  std::string scheme;
  Bytes scheme_seed;
  std::vector<Certificate> roots;
  std::size_t n = 2;
  std::uint32_t w_confirm = 1;
  std::uint32_t w_contribution = 1;
  bool count_self_indirect = false;
  double time = 0.0;
};

DumpHeader header_for(const LedgerState& ledger, const Bytes& scheme_seed, double time);

/// First line "# " + JSON header, then one hex-encoded wire record per line in
/// admission order.
void write_dump(std::ostream& out, const DumpHeader& header,
                const std::vector<std::shared_ptr<const Record>>& records);

struct Dump
{
  DumpHeader header;
  std::vector<std::string> lines;
};

/// Throws DecodeError on a missing or malformed header.
Dump read_dump(std::istream& in);

struct VerifyResult
{
  bool valid = true;
  std::size_t records = 0;
  // Set when invalid.
  std::size_t line = 0;
  std::optional<RecordName> name;
  std::string reason;
};

/// Replays the dump from genesis through the admission pipeline and reports
/// the first record that does not go in cleanly.
VerifyResult verify_dump(const Dump& dump);

} // namespace dledger

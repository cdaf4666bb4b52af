#include "dledger/ledger/export.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>

namespace dledger {

namespace {

std::string short_hash(const RecordName& name)
{
  return to_hex(ByteView(name.digest).first(4));
}

} // namespace

void write_dot(std::ostream& out, const LedgerState& ledger)
{
  out << "digraph dledger {\n  rankdir=RL;\n  node [shape=box, fontsize=10];\n";
  auto records = ledger.records_in_order();
  for (const auto& r : records) {
    const char* status = ledger.is_genesis(r->name)     ? "genesis"
                         : ledger.is_confirmed(r->name) ? "confirmed"
                                                        : "unconfirmed";
    out << "  \"" << r->name.to_uri() << "\" [label=\"" << r->generator().str() << "\\n"
        << short_hash(r->name) << "\\nw=" << ledger.weight(r->name) << " " << status
        << "\", gen=\"" << r->generator().str() << "\", status=\"" << status << "\"";
    if (!ledger.is_confirmed(r->name))
      out << ", style=dashed";
    out << "];\n";
  }
  for (const auto& r : records)
    for (const auto& a : r->approved())
      if (ledger.contains(a))
        out << "  \"" << r->name.to_uri() << "\" -> \"" << a.to_uri() << "\";\n";
  out << "}\n";
}

DumpHeader header_for(const LedgerState& ledger, const Bytes& scheme_seed, double time)
{
  DumpHeader h;
  h.scheme = ledger.scheme().name();
  h.scheme_seed = scheme_seed;
  h.roots = ledger.trust().roots();
  h.n = ledger.config().approvals_per_record;
  h.w_confirm = ledger.config().w_confirm;
  h.w_contribution = ledger.config().w_contribution;
  h.count_self_indirect = ledger.config().count_self_indirect;
  h.time = time;
  return h;
}

void write_dump(std::ostream& out, const DumpHeader& header,
                const std::vector<std::shared_ptr<const Record>>& records)
{
  nlohmann::ordered_json j;
  j["format"] = "dledger-dump/1";
  j["scheme"] = header.scheme;
  j["scheme_seed"] = to_hex(header.scheme_seed);
  auto roots = nlohmann::ordered_json::array();
  for (const auto& r : header.roots)
    roots.push_back(to_hex(encode_certificate(r)));
  j["roots"] = roots;
  j["n"] = header.n;
  j["w_confirm"] = header.w_confirm;
  j["w_contribution"] = header.w_contribution;
  j["count_self_indirect"] = header.count_self_indirect;
  j["time"] = header.time;
  out << "# " << j.dump() << '\n';
  for (const auto& r : records)
    out << to_hex(encode_record(*r)) << '\n';
}

Dump read_dump(std::istream& in)
{
  Dump dump;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw DecodeError("dump header line missing");
  try {
    auto j = nlohmann::json::parse(line.substr(2));
    if (j.at("format").get<std::string>() != "dledger-dump/1")
      throw DecodeError("unsupported dump format");
    auto& h = dump.header;
    h.scheme = j.at("scheme").get<std::string>();
    h.scheme_seed = from_hex(j.at("scheme_seed").get<std::string>());
    for (const auto& r : j.at("roots"))
      h.roots.push_back(decode_certificate(from_hex(r.get<std::string>())));
    h.n = j.at("n").get<std::size_t>();
    h.w_confirm = j.at("w_confirm").get<std::uint32_t>();
    h.w_contribution = j.at("w_contribution").get<std::uint32_t>();
    h.count_self_indirect = j.at("count_self_indirect").get<bool>();
    h.time = j.at("time").get<double>();
  }
  catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("bad dump header: ") + e.what());
  }
  catch (const std::invalid_argument& e) {
    throw DecodeError(std::string("bad dump header: ") + e.what());
  }
  while (std::getline(in, line))
    if (!line.empty())
      dump.lines.push_back(line);
  return dump;
}

VerifyResult verify_dump(const Dump& dump)
{
  const auto& h = dump.header;
  LedgerConfig config;
  config.approvals_per_record = h.n;
  config.w_confirm = h.w_confirm;
  config.w_contribution = h.w_contribution;
  config.count_self_indirect = h.count_self_indirect;
  config.max_payload = SIZE_MAX;
  TrustStore trust;
  for (const auto& r : h.roots)
    trust.add_root(r);
  LedgerState ledger(config, std::move(trust), make_signature_scheme(h.scheme, h.scheme_seed));

  VerifyResult result;
  auto fail = [&](std::size_t line, std::optional<RecordName> name, std::string reason) {
    result.valid = false;
    result.line = line;
    result.name = std::move(name);
    result.reason = std::move(reason);
    return result;
  };

  for (std::size_t i = 0; i < dump.lines.size(); ++i) {
    std::size_t line = i + 2;
    std::shared_ptr<const Record> rec;
    try {
      rec = std::make_shared<const Record>(decode_record(from_hex(dump.lines[i]), SIZE_MAX));
    }
    catch (const std::exception& e) {
      return fail(line, std::nullopt, std::string("Malformed: ") + e.what());
    }
    if (rec->kind() == PayloadKind::Genesis) {
      try {
        ledger.inject_genesis(rec, 0.0);
      }
      catch (const std::exception& e) {
        return fail(line, rec->name, std::string("InvalidGenesis: ") + e.what());
      }
    }
    else {
      auto verdict = ledger.admit(rec, Arrival::Backfill, h.time).verdict;
      if (verdict.is_pending())
        return fail(line, rec->name, "MissingApproved: " + verdict.missing.front().to_uri());
      if (verdict.is_rejected())
        return fail(line, rec->name, to_string(verdict.reason));
    }
    ++result.records;
  }
  return result;
}

} // namespace dledger

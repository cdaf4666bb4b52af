#include "dledger/sim/metrics.hpp"

#include <fmt/format.h>

#include <fstream>

namespace dledger::sim {

namespace {

std::string opt(const std::optional<double>& v)
{
  return v ? fmt::format("{:.6f}", *v) : std::string();
}

// Detail strings may carry commas; quote them CSV-style.
std::string quote(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

} // namespace

std::string MetricsLog::samples_csv() const
{
  std::string out = "time,peer,unconfirmed,tailing,stored,pending,depth\n";
  for (const auto& s : samples)
    out += fmt::format("{:.6f},{},{},{},{},{},{}\n", s.time, s.peer, s.unconfirmed, s.tailing, s.stored,
                       s.pending, s.depth);
  return out;
}

std::string MetricsLog::records_csv() const
{
  std::string out = "name,generator,published,visible_all,confirmed_local,confirmed_all\n";
  for (const auto& r : records)
    out += fmt::format("{},{},{:.6f},{},{},{}\n", r.name, r.generator, r.published, opt(r.visible_all),
                       opt(r.confirmed_local), opt(r.confirmed_all));
  return out;
}

std::string MetricsLog::links_csv() const
{
  std::string out = "a,b,interests_ab,interests_ba,data_ab,data_ba,dropped\n";
  for (const auto& l : links)
    out += fmt::format("{},{},{},{},{},{},{}\n", l.a, l.b, l.interests_ab, l.interests_ba, l.data_ab,
                       l.data_ba, l.dropped);
  return out;
}

std::string MetricsLog::rejections_csv() const
{
  std::string out = "peer,reason,count\n";
  for (const auto& [peer, reasons] : rejections)
    for (const auto& [reason, count] : reasons)
      out += fmt::format("{},{},{}\n", peer, reason, count);
  return out;
}

std::string MetricsLog::security_csv() const
{
  std::string out = "time,peer,kind,detail\n";
  for (const auto& e : security)
    out += fmt::format("{:.6f},{},{},{}\n", e.time, e.peer, e.kind, quote(e.detail));
  return out;
}

std::string MetricsLog::summary_csv() const
{
  std::string out = "key,value\n";
  for (const auto& [k, v] : summary)
    out += fmt::format("{},{}\n", k, quote(v));
  return out;
}

void MetricsLog::write_csv(const std::filesystem::path& dir) const
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  auto put = [&](const char* file, const std::string& body) {
    std::ofstream out(dir / file, std::ios::binary);
    out << body;
    if (!out)
      throw IoError("cannot write " + (dir / file).string());
  };
  put("samples.csv", samples_csv());
  put("records.csv", records_csv());
  put("links.csv", links_csv());
  put("rejections.csv", rejections_csv());
  put("security.csv", security_csv());
  put("summary.csv", summary_csv());
}

std::vector<double> MetricsLog::sample_times() const
{
  std::vector<double> out;
  for (const auto& s : samples)
    if (out.empty() || out.back() != s.time)
      out.push_back(s.time);
  return out;
}

std::vector<double> MetricsLog::series(std::size_t PeerSample::*field) const
{
  std::vector<double> out;
  double current = -1.0;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : samples) {
    if (count > 0 && s.time != current) {
      out.push_back(sum / static_cast<double>(count));
      sum = 0.0;
      count = 0;
    }
    current = s.time;
    sum += static_cast<double>(s.*field);
    ++count;
  }
  if (count > 0)
    out.push_back(sum / static_cast<double>(count));
  return out;
}

} // namespace dledger::sim

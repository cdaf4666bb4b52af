#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dledger::sim {

/// One periodic observation of one honest peer.
struct PeerSample
{
  double time = 0.0;
  std::string peer;
  std::size_t unconfirmed = 0;
  std::size_t tailing = 0;
  std::size_t stored = 0;
  std::size_t pending = 0;
  std::size_t depth = 0; // longest unconfirmed approval chain
};

/// Life of one honestly published record.
struct RecordTimeline
{
  std::string name;
  std::string generator;
  double published = 0.0;
  std::size_t stored_by = 0;
  std::optional<double> visible_all;     // stored by every honest peer
  std::optional<double> confirmed_local; // confirmed at its generator
  std::size_t confirmed_by = 0;
  std::optional<double> confirmed_all;
};

struct LinkTotals
{
  std::string a;
  std::string b;
  std::uint64_t interests_ab = 0;
  std::uint64_t interests_ba = 0;
  std::uint64_t data_ab = 0;
  std::uint64_t data_ba = 0;
  std::uint64_t dropped = 0;
};

struct SecurityEvent
{
  double time = 0.0;
  std::string peer;
  std::string kind;
  std::string detail;
};

/// Append-only record of a run. CSV files written by write_csv():
///   samples.csv     time,peer,unconfirmed,tailing,stored,pending,depth
///   records.csv     name,generator,published,visible_all,confirmed_local,confirmed_all
///   links.csv       a,b,interests_ab,interests_ba,data_ab,data_ba,dropped
///   rejections.csv  peer,reason,count
///   security.csv    time,peer,kind,detail
///   summary.csv     key,value
/// Missing times are written as empty fields.
struct MetricsLog
{
  std::vector<PeerSample> samples;
  std::vector<RecordTimeline> records;
  std::vector<LinkTotals> links;
  std::map<std::string, std::map<std::string, std::uint64_t>> rejections;
  std::vector<SecurityEvent> security;
  std::vector<std::pair<std::string, std::string>> summary;

  std::string samples_csv() const;
  std::string records_csv() const;
  std::string links_csv() const;
  std::string rejections_csv() const;
  std::string security_csv() const;
  std::string summary_csv() const;

  /// Throws std::runtime_error (IoError) when a file cannot be written.
  void write_csv(const std::filesystem::path& dir) const;

  /// Per sample time, the mean over peers of a sample field.
  std::vector<double> series(std::size_t PeerSample::*field) const;
  std::vector<double> sample_times() const;
};

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace dledger::sim

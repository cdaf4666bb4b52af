#pragma once

#include "dledger/record/types.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <unordered_map>
#include <vector>

namespace dledger {

/// Destination for confirmed records moved out of the working DAG. Archived
/// records stay resolvable, so certificates can still be looked up.
class ArchiveSink
{
public:
  virtual ~ArchiveSink() = default;
  virtual void store(std::shared_ptr<const Record> record) = 0;
  virtual std::shared_ptr<const Record> find(const RecordName& name) const = 0;
  virtual std::size_t size() const = 0;

  virtual bool contains(const RecordName& name) const { return find(name) != nullptr; }
};

class MemoryArchive final : public ArchiveSink
{
public:
  void store(std::shared_ptr<const Record> record) override;
  std::shared_ptr<const Record> find(const RecordName& name) const override;
  std::size_t size() const override { return records_.size(); }

private:
  std::unordered_map<RecordName, std::shared_ptr<const Record>, RecordNameHash> records_;
};

/// Appends one hex-encoded wire record per line and keeps only file offsets in memory.
class FileArchive final : public ArchiveSink
{
public:
  explicit FileArchive(std::filesystem::path path);

  void store(std::shared_ptr<const Record> record) override;
  std::shared_ptr<const Record> find(const RecordName& name) const override;
  std::size_t size() const override { return offsets_.size(); }
  bool contains(const RecordName& name) const override { return offsets_.contains(name); }

  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
  mutable std::fstream file_;
  std::unordered_map<RecordName, std::streamoff, RecordNameHash> offsets_;
};

} // namespace dledger

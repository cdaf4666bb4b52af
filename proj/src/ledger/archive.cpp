#include "dledger/ledger/archive.hpp"

#include "dledger/record/encoding.hpp"

#include <stdexcept>
#include <string>

namespace dledger {

void MemoryArchive::store(std::shared_ptr<const Record> record)
{
  auto name = record->name;
  records_.emplace(std::move(name), std::move(record));
}

std::shared_ptr<const Record> MemoryArchive::find(const RecordName& name) const
{
  auto it = records_.find(name);
  return it == records_.end() ? nullptr : it->second;
}

FileArchive::FileArchive(std::filesystem::path path)
  : path_(std::move(path))
{
  file_.open(path_, std::ios::in | std::ios::out | std::ios::trunc | std::ios::binary);
  if (!file_)
    throw std::runtime_error("cannot open archive file " + path_.string());
}

void FileArchive::store(std::shared_ptr<const Record> record)
{
  if (offsets_.contains(record->name))
    return;
  file_.seekp(0, std::ios::end);
  auto offset = static_cast<std::streamoff>(file_.tellp());
  file_ << to_hex(encode_record(*record)) << '\n';
  file_.flush();
  if (!file_)
    throw std::runtime_error("write to archive file " + path_.string() + " failed");
  offsets_.emplace(record->name, offset);
}

std::shared_ptr<const Record> FileArchive::find(const RecordName& name) const
{
  auto it = offsets_.find(name);
  if (it == offsets_.end())
    return nullptr;
  file_.seekg(it->second);
  std::string line;
  std::getline(file_, line);
  if (!file_)
    throw std::runtime_error("read from archive file " + path_.string() + " failed");
  return std::make_shared<const Record>(decode_record(from_hex(line), SIZE_MAX));
}

} // namespace dledger

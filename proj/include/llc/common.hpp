#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace llc {

// Malformed or contract-violating input data. Carries enough context
// (row / feature / zone identifiers) to point at the offending record.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A file that cannot be opened or read at all.
class FileError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad command line or config file usage.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Failure while writing an output artifact.
class WriteError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Counted, non-fatal anomalies. Counts are always exact; retained message
// text is capped per code so million-row inputs cannot blow up memory.
class WarningLog {
public:
  static constexpr std::size_t kMaxRetainedPerCode = 20;

  void add(std::string_view code, std::string message) {
    auto& entry = entries_[std::string(code)];
    entry.count++;
    if (entry.messages.size() < kMaxRetainedPerCode) {
      entry.messages.push_back(std::move(message));
    }
  }

  std::uint64_t count(std::string_view code) const {
    auto it = entries_.find(std::string(code));
    return it == entries_.end() ? 0 : it->second.count;
  }

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (const auto& [code, e] : entries_) n += e.count;
    return n;
  }

  std::map<std::string, std::uint64_t> counts() const {
    std::map<std::string, std::uint64_t> out;
    for (const auto& [code, e] : entries_) out[code] = e.count;
    return out;
  }

  std::vector<std::string> messages(std::string_view code) const {
    auto it = entries_.find(std::string(code));
    if (it == entries_.end()) return {};
    return it->second.messages;
  }

  std::vector<std::string> all_messages() const {
    std::vector<std::string> out;
    for (const auto& [code, e] : entries_) {
      for (const auto& m : e.messages) out.push_back(code + ": " + m);
      if (e.count > e.messages.size()) {
        out.push_back(code + ": ... and " +
                      std::to_string(e.count - e.messages.size()) + " more");
      }
    }
    return out;
  }

  bool empty() const { return entries_.empty(); }

private:
  struct Entry {
    std::uint64_t count = 0;
    std::vector<std::string> messages;
  };
  std::map<std::string, Entry, std::less<>> entries_;
};

// FNV-1a 64-bit, used for content checksums in ledgers and tests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex(std::uint64_t v);

// Fixed output formatting for CSV emission: 6 significant digits for free
// values, fixed decimals for table-shaped summaries.
std::string format_sig6(double v);
std::string format_fixed(double v, int decimals);

// Shortest representation that round-trips the exact double.
std::string format_shortest(double v);

// Round half away from zero at the given number of decimals.
double round_decimals(double v, int decimals);

// Chunked parallel map over [0, n). fn(i) must only touch slot i of any
// shared output so results are independent of scheduling.
void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t)>& fn);

unsigned default_jobs();

}  // namespace llc

#include "sentinel/trace.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

namespace sentinel {

JsonlWriter::JsonlWriter(const std::string& config_hash, std::uint64_t seed, std::string_view stream) {
  write({{"type", "header"},
         {"stream", stream},
         {"config_hash", config_hash},
         {"seed", seed},
         {"schema_version", kTraceSchemaVersion}});
}

void JsonlWriter::write(const Json& line) {
  text_ += line.dump();
  text_ += '\n';
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::ios_base::failure("short write to " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_trace_set(const TraceSet& t, const std::filesystem::path& dir) {
  namespace p = trace_paths;
  write_text_file(dir / p::kConfig, t.config);
  write_text_file(dir / p::kEvents, t.events);
  write_text_file(dir / p::kCollector, t.collector);
  write_text_file(dir / p::kVerdicts, t.verdicts);
  write_text_file(dir / p::kReactions, t.reactions);
  write_text_file(dir / p::kSealedStore,
                  std::string_view(reinterpret_cast<const char*>(t.sealed_store.data()), t.sealed_store.size()));
  write_text_file(dir / p::kBlocklist, t.blocklist);
  write_text_file(dir / p::kDetectorSnapshot, t.detector_snapshot);
}

TraceSet read_trace_set(const std::filesystem::path& dir) {
  namespace p = trace_paths;
  TraceSet t;
  t.config = read_text_file(dir / p::kConfig);
  t.events = read_text_file(dir / p::kEvents);
  t.collector = read_text_file(dir / p::kCollector);
  t.verdicts = read_text_file(dir / p::kVerdicts);
  t.reactions = read_text_file(dir / p::kReactions);
  const auto sealed = read_text_file(dir / p::kSealedStore);
  t.sealed_store.assign(sealed.begin(), sealed.end());
  t.blocklist = read_text_file(dir / p::kBlocklist);
  t.detector_snapshot = read_text_file(dir / p::kDetectorSnapshot);
  return t;
}

std::vector<Json> parse_jsonl(const std::string& text) {
  std::vector<Json> out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw TraceMismatch("malformed JSONL at line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::map<std::string, std::string> trace_hashes(const TraceSet& t) {
  namespace p = trace_paths;
  return {{p::kConfig, sha256_hex(t.config)},
          {p::kEvents, sha256_hex(t.events)},
          {p::kCollector, sha256_hex(t.collector)},
          {p::kVerdicts, sha256_hex(t.verdicts)},
          {p::kReactions, sha256_hex(t.reactions)},
          {p::kSealedStore, sha256_hex(t.sealed_store)},
          {p::kBlocklist, sha256_hex(t.blocklist)},
          {p::kDetectorSnapshot, sha256_hex(t.detector_snapshot)}};
}

}  // namespace sentinel

#include <openssl/evp.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "litrev/errors.hpp"
#include "litrev/gateway.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace litrev::gateway {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(Errc::FatalStorageError, "sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

CacheStore::CacheStore(std::string dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(Errc::FatalStorageError, "cannot create cache dir " + dir_);
  }
}

std::optional<CompletionRecord> CacheStore::disk_lookup(const std::string& key) const {
  if (dir_.empty()) return std::nullopt;
  const fs::path path = fs::path(dir_) / (key + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return std::nullopt;  // torn write; refetch
  CompletionRecord rec;
  rec.cache_key = key;
  rec.raw_output = j.value("raw_output", std::string());
  rec.created_unix = j.value("created_unix", 0LL);
  if (j.contains("token_usage")) {
    TokenUsage u;
    u.prompt_tokens = j["token_usage"].value("prompt_tokens", 0L);
    u.completion_tokens = j["token_usage"].value("completion_tokens", 0L);
    rec.token_usage = u;
  }
  return rec;
}

void CacheStore::disk_store(const CompletionRecord& rec, const std::string& key_material) const {
  if (dir_.empty()) return;
  json j;
  j["key_material"] = key_material;
  j["raw_output"] = rec.raw_output;
  j["created_unix"] = rec.created_unix;
  if (rec.token_usage) {
    j["token_usage"] = {{"prompt_tokens", rec.token_usage->prompt_tokens},
                        {"completion_tokens", rec.token_usage->completion_tokens}};
  }
  const fs::path final_path = fs::path(dir_) / (rec.cache_key + ".json");
  const fs::path tmp_path = fs::path(dir_) / (rec.cache_key + ".tmp");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::FatalStorageError, "cannot write cache file");
    out << j.dump();
  }
  std::error_code ec;
  fs::rename(tmp_path, final_path, ec);
  if (ec) throw Error(Errc::FatalStorageError, "cannot finalize cache file");
}

CompletionRecord CacheStore::get_or_fetch(const std::string& key_material,
                                          const std::function<FetchResult()>& fetch) {
  const std::string key = sha256_hex(key_material);

  std::shared_future<CompletionRecord> waiter;
  std::promise<CompletionRecord> promise;
  {
    std::unique_lock lock(mu_);
    if (auto it = mem_.find(key); it != mem_.end()) return it->second;
    if (auto it = inflight_.find(key); it != inflight_.end()) {
      waiter = it->second;
    } else {
      waiter = {};
      inflight_[key] = promise.get_future().share();
    }
  }
  if (waiter.valid()) return waiter.get();  // rethrows the fetcher's failure

  try {
    CompletionRecord rec;
    if (auto cached = disk_lookup(key)) {
      rec = std::move(*cached);
    } else {
      FetchResult fetched = fetch();
      {
        std::unique_lock lock(mu_);
        ++fetches_;
      }
      rec.cache_key = key;
      rec.raw_output = std::move(fetched.raw_output);
      rec.token_usage = fetched.token_usage;
      rec.created_unix = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
      disk_store(rec, key_material);
    }
    {
      std::unique_lock lock(mu_);
      mem_[key] = rec;
      inflight_.erase(key);
    }
    promise.set_value(rec);
    return rec;
  } catch (...) {
    {
      std::unique_lock lock(mu_);
      inflight_.erase(key);
    }
    promise.set_exception(std::current_exception());
    throw;
  }
}

uint64_t CacheStore::network_fetches() const {
  std::unique_lock lock(mu_);
  return fetches_;
}

}  // namespace litrev::gateway

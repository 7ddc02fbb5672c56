#pragma once

// Self-healing locator store. Each locator key remembers the fingerprint of
// the element it last resolved to; healing re-localizes that fingerprint on a
// new page and records the fresh snapshot.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "relocator/metrics.hpp"

namespace relocator {

struct CacheEntry {
  std::string locator;
  ElementSnapshot element;
  // Overlap group of the element on its page, used by VON and hybrid healing.
  std::optional<OverlapGroup> group;
  std::string version_date;
  std::optional<double> last_score;
};

class FingerprintStore {
 public:
  virtual ~FingerprintStore() = default;
  virtual std::optional<CacheEntry> get(const std::string& locator) const = 0;
  virtual void put(CacheEntry entry) = 0;
  virtual std::vector<std::string> keys() const = 0;
};

// Holds an exclusive advisory lock on `<path>.lock` for its lifetime; a
// second writer fails fast instead of waiting.
class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path) : lock_path_(path.string() + ".lock") {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    fd_ = ::open(lock_path_.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) throw Error("cannot open lock file " + lock_path_);
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error("cache " + path.string() + " is locked by another process");
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  std::string lock_path_;
  int fd_ = -1;
};

// {"entries": {"<locator>": {"element": {...}, "group": [{...}] | null,
//                            "version_date": "...", "last_score": 0.93 | null}}}
class JsonFingerprintCache : public FingerprintStore {
 public:
  explicit JsonFingerprintCache(std::filesystem::path path) : path_(std::move(path)), lock_(path_) {
    if (std::filesystem::exists(path_)) load();
  }

  std::optional<CacheEntry> get(const std::string& locator) const override {
    auto it = entries_.find(locator);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void put(CacheEntry entry) override {
    const std::string key = entry.locator;
    entries_[key] = std::move(entry);
  }

  std::vector<std::string> keys() const override {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
  }

  // Writes to a temporary file and renames it over the cache.
  void save() const {
    OrderedJson entries = OrderedJson::object();
    for (const auto& [key, e] : entries_) {
      OrderedJson j;
      j["element"] = element_to_json(e.element);
      if (e.group) {
        OrderedJson members = OrderedJson::array();
        for (const auto& m : e.group->members) members.push_back(element_to_json(m));
        j["group"] = std::move(members);
      } else {
        j["group"] = nullptr;
      }
      j["version_date"] = e.version_date;
      j["last_score"] = e.last_score ? OrderedJson(*e.last_score) : OrderedJson(nullptr);
      entries[key] = std::move(j);
    }
    OrderedJson root;
    root["entries"] = std::move(entries);
    const auto tmp = std::filesystem::path(path_.string() + ".tmp");
    write_file(tmp, root.dump(1) + "\n");
    std::filesystem::rename(tmp, path_);
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  void load() {
    Json root;
    try {
      root = Json::parse(read_file(path_));
    } catch (const Json::parse_error& err) {
      throw ParseError(path_.string() + ":$", std::string("invalid JSON: ") + err.what());
    }
    const Json& entries = detail::require(root, "entries", "$");
    if (!entries.is_object()) throw ParseError("$.entries", "expected object");
    for (const auto& [key, j] : entries.items()) {
      const std::string path = "$.entries." + key;
      CacheEntry e;
      e.locator = key;
      e.element = parse_element(detail::require(j, "element", path), path + ".element");
      if (auto g = j.find("group"); g != j.end() && !g->is_null()) {
        if (!g->is_array()) throw ParseError(path + ".group", "expected array or null");
        OverlapGroup group;
        group.anchor_id = e.element.element_id;
        for (std::size_t i = 0; i < g->size(); ++i)
          group.members.push_back(parse_element((*g)[i], path + ".group[" + std::to_string(i) + "]"));
        if (!group.contains(group.anchor_id)) throw IntegrityError(path + ": group does not contain the element");
        sort_members(group.members);
        e.group = std::move(group);
      }
      e.version_date = detail::require_string(j, "version_date", path);
      if (auto s = j.find("last_score"); s != j.end() && !s->is_null()) e.last_score = s->get<double>();
      entries_[key] = std::move(e);
    }
  }

  std::filesystem::path path_;
  FileLock lock_;
  std::map<std::string, CacheEntry> entries_;
};

// Seeds an entry from an element of a page.
inline CacheEntry make_cache_entry(const std::string& locator, const PageSnapshot& page,
                                   std::string_view element_id, const VonConfig& von) {
  const ElementSnapshot* e = page.find(element_id);
  if (!e) throw IntegrityError("element '" + std::string(element_id) + "' not in page");
  return {locator, *e, overlap_group(element_id, page, von), page.version_date, std::nullopt};
}

struct HealResult {
  std::string element_id;
  std::string absolute_xpath;
  double score = 0.0;  // normalized score of the chosen element
  bool low_score = false;
  std::string previous_version_date;
  std::string version_date;
};

// Localizes the stored fingerprint of `locator` on `new_page` and stores the
// chosen element's fresh snapshot.
inline HealResult heal(FingerprintStore& store, const std::string& locator, const PageSnapshot& new_page,
                       const Localizer& loc, std::optional<double> warn_below = std::nullopt) {
  const auto entry = store.get(locator);
  if (!entry) throw UsageError("unknown locator '" + locator + "'");
  const OverlapGroup group = entry->group ? *entry->group : singleton_group(entry->element);

  LocalizationResult result;
  switch (loc.kind) {
    case Algorithm::Similo: result = localize(entry->element, new_page, loc.config); break;
    case Algorithm::Von: result = von_localize(group, new_page, loc.config); break;
    case Algorithm::Hybrid:
      result = hybrid_localize_detailed(group, entry->element, new_page, loc.hybrid_config()).result;
      break;
  }
  HealResult out;
  out.element_id = result.chosen;
  out.absolute_xpath = result.ranked.front().absolute_xpath;
  out.score = result.ranked.front().normalized_score;
  out.low_score = warn_below && out.score < *warn_below;
  out.previous_version_date = entry->version_date;
  out.version_date = new_page.version_date;

  CacheEntry updated = make_cache_entry(locator, new_page, result.chosen, loc.config.von);
  updated.last_score = out.score;
  store.put(std::move(updated));
  return out;
}

}  // namespace relocator

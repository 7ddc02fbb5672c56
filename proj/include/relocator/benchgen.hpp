#pragma once

// Seeded synthetic benchmark generator. Each site starts from a small page
// (header navigation, content sections, footer) and evolves through a chain
// of versions by random edits drawn from common web-evolution patterns:
// attribute edits, tag swaps, relocations, re-nesting, id removal, text
// changes, and inserted decoys. Tracked widgets become benchmark cases whose
// labels are computed with classify_change / classify_locator.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "relocator/metrics.hpp"
#include "relocator/random.hpp"
#include "relocator/snapshot_io.hpp"

namespace relocator {

// Per-widget probabilities of each edit between consecutive versions.
struct MutationProfile {
  double class_edit = 0.10;
  double href_edit = 0.06;
  double tag_swap = 0.05;
  double text_change = 0.08;
  double nudge = 0.20;         // shift by at most 8 px
  double resize_small = 0.10;  // at most 4 px
  double resize_large = 0.03;
  double relocate = 0.04;  // move to another container
  double renest = 0.05;    // wrap in a new div
  double id_remove = 0.05;
  double aria_change = 0.03;
  double name_change = 0.02;
  double decoy_insert = 0.6;  // per container
  double decoy_remove = 0.1;  // per untracked widget

  static MutationProfile standard() { return {}; }

  // Tag and visible text degrade often; aria-label, name and type never
  // change.
  static MutationProfile degrade_tag_and_text() {
    MutationProfile p;
    p.tag_swap = 0.45;
    p.text_change = 0.5;
    p.aria_change = 0.0;
    p.name_change = 0.0;
    return p;
  }
};

inline MutationProfile profile_by_name(std::string_view name) {
  if (name == "standard") return MutationProfile::standard();
  if (name == "degrade-tag-text") return MutationProfile::degrade_tag_and_text();
  throw UsageError("unknown mutation profile '" + std::string(name) + "' (expected standard|degrade-tag-text)");
}

struct GeneratorOptions {
  std::uint64_t seed = 0;
  std::size_t sites = 2;
  std::size_t versions = 3;
  std::size_t elements_per_site = 5;  // tracked widgets per site
  std::size_t max_page_elements = 50;
  std::int64_t neighbor_margin = 50;
  MutationProfile profile;
};

namespace gen {

enum class NodeKind { Block, Widget, Inner, Wrapper };

struct Node {
  int uid = 0;
  NodeKind kind = NodeKind::Block;
  std::string tag;
  std::map<std::string, std::string> attrs;
  std::optional<std::string> text;  // own text (leaf widgets and inner nodes)
  std::int64_t width = 0, height = 0;
  std::int64_t margin_left = 0;
  std::vector<int> children;  // uids
  int parent = -1;
  Rect rect;
  bool tracked = false;
};

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {
      "Sign",    "up",       "Log",      "in",      "Join",     "Pricing",   "Blog",     "About",   "Contact",
      "Help",    "Search",   "Products", "Solutions", "Resources", "Careers", "Support",  "Download", "Learn",
      "more",    "Get",      "started",  "Free",    "Trial",    "Plans",     "Features", "News",    "Shop",
      "Cart",    "Account",  "Settings", "Docs",    "Community", "Partners", "Events",   "Press",   "Privacy",
      "Terms",   "Security", "Status",   "Home",    "Explore",  "Watch",     "Listen",   "Read",    "Subscribe",
      "Follow",  "Share",    "Save",     "Send",    "Continue", "Next",      "Start",    "Try",     "now",
      "today",   "Deals",    "Orders",   "Gift",    "Cards",    "Stores",    "Weather",  "Maps",    "Video"};
  return words;
}

inline std::string phrase(SeededRng& rng, int min_words = 1, int max_words = 3) {
  const auto n = rng.uniform(min_words, max_words);
  std::string out;
  for (std::int64_t i = 0; i < n; ++i) {
    if (!out.empty()) out += ' ';
    out += rng.pick(vocabulary());
  }
  return out;
}

inline std::string slug(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!out.empty() && out.back() != '-')
      out += '-';
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

class SiteModel {
 public:
  SiteModel(std::string site, SeededRng& rng, const GeneratorOptions& opts)
      : site_(std::move(site)), rng_(rng), opts_(opts) {}

  void build_initial() {
    html_ = add(NodeKind::Block, "html", -1);
    body_ = add(NodeKind::Block, "body", html_);
    const int header = add(NodeKind::Block, "header", body_);
    nodes_[header].attrs["id"] = "header";
    nav_ = add(NodeKind::Block, "nav", header);
    nodes_[nav_].attrs["class"] = "nav";
    const int main = add(NodeKind::Block, "main", body_);
    nodes_[main].attrs["id"] = "main";
    const auto section_count = rng_.uniform(2, 3);
    for (std::int64_t s = 0; s < section_count; ++s) {
      const int sec = add(NodeKind::Block, "section", main);
      if (rng_.chance(0.5)) nodes_[sec].attrs["id"] = "section-" + std::to_string(s + 1);
      nodes_[sec].attrs["class"] = "section";
      sections_.push_back(sec);
    }
    footer_ = add(NodeKind::Block, "footer", body_);
    nodes_[footer_].attrs["class"] = "footer";

    const std::size_t extra = std::max<std::size_t>(3, opts_.elements_per_site / 2);
    std::vector<int> roots;
    for (std::size_t i = 0; i < opts_.elements_per_site + extra; ++i) roots.push_back(add_widget(pick_container()));
    rng_.shuffle(roots);
    for (std::size_t i = 0; i < opts_.elements_per_site && i < roots.size(); ++i) {
      nodes_[roots[i]].tracked = true;
      tracked_.push_back(roots[i]);
    }
    std::sort(tracked_.begin(), tracked_.end());
  }

  void mutate() {
    const MutationProfile& p = opts_.profile;
    std::vector<int> widgets = widget_roots();
    for (int uid : widgets) {
      if (!nodes_.count(uid)) continue;
      Node& n = nodes_.at(uid);
      if (!n.tracked && rng_.chance(p.decoy_remove)) {
        remove_subtree(uid);
        continue;
      }
      if (rng_.chance(p.class_edit)) edit_class(n);
      if (n.attrs.count("href") && rng_.chance(p.href_edit)) n.attrs["href"] += "?ref=" + slug(phrase(rng_, 1, 1));
      if (rng_.chance(p.tag_swap)) swap_tag(uid);
      if (rng_.chance(p.text_change)) change_text(uid);
      if (rng_.chance(p.nudge)) nodes_.at(uid).margin_left = std::max<std::int64_t>(0, nodes_.at(uid).margin_left + rng_.uniform(-8, 8));
      if (rng_.chance(p.resize_small)) resize(uid, rng_.uniform(-4, 4), rng_.uniform(-2, 2));
      if (rng_.chance(p.resize_large)) resize(uid, rng_.uniform(20, 80), rng_.uniform(4, 16));
      if (rng_.chance(p.relocate)) relocate(uid);
      if (rng_.chance(p.renest) && element_count() < opts_.max_page_elements) renest(uid);
      Node& m = nodes_.at(uid);
      if (m.attrs.count("id") && rng_.chance(p.id_remove)) m.attrs.erase("id");
      if (m.attrs.count("aria-label") && rng_.chance(p.aria_change)) m.attrs["aria-label"] = phrase(rng_, 1, 2);
      if (m.attrs.count("name") && rng_.chance(p.name_change)) m.attrs["name"] = slug(phrase(rng_, 1, 2));
    }
    std::vector<int> containers = sections_;
    containers.push_back(nav_);
    containers.push_back(footer_);
    for (int c : containers) {
      if (rng_.chance(p.decoy_insert) && element_count() + 2 <= opts_.max_page_elements) {
        const int w = add_widget(c);
        // Inserted at a random position among the container's children.
        auto& ch = nodes_.at(c).children;
        ch.pop_back();
        ch.insert(ch.begin() + static_cast<std::ptrdiff_t>(rng_.index(ch.size() + 1)), w);
      }
    }
  }

  PageSnapshot snapshot(const std::string& version_date) {
    layout();
    PageSnapshot page;
    page.site = site_;
    page.version_date = version_date;
    page.viewport = {1280, nodes_.at(body_).rect.height};
    std::vector<int> order;
    preorder(html_, order);
    std::map<int, std::string> xpaths;
    for (int uid : order) xpaths[uid] = xpath_of(uid);
    for (int uid : order) {
      if (uid == html_ || uid == body_) continue;
      page.elements.push_back(element_of(uid, xpaths));
    }
    fill_neighbor_text(page, order);
    return page;
  }

  const std::vector<int>& tracked() const { return tracked_; }
  std::string element_id(int uid) const { return site_ + "-n" + std::to_string(uid); }

 private:
  int add(NodeKind kind, std::string tag, int parent) {
    Node n;
    n.uid = next_uid_++;
    n.kind = kind;
    n.tag = std::move(tag);
    n.parent = parent;
    nodes_[n.uid] = n;
    if (parent >= 0) nodes_.at(parent).children.push_back(n.uid);
    return n.uid;
  }

  int pick_container() {
    const auto r = rng_.uniform(0, 9);
    if (r < 3) return nav_;
    if (r < 8) return sections_[rng_.index(sections_.size())];
    return footer_;
  }

  std::size_t element_count() const { return nodes_.size() - 2; }

  int add_widget(int container) {
    const auto kind = rng_.uniform(0, 6);
    const std::string text = phrase(rng_, 1, 2);
    int root = 0;
    switch (kind) {
      case 0: {  // navigation link
        root = add(NodeKind::Widget, "a", container);
        Node& n = nodes_.at(root);
        n.attrs["href"] = "/" + slug(text);
        n.attrs["class"] = "nav-link";
        n.text = text;
        if (rng_.chance(0.7)) n.attrs["aria-label"] = text + " " + rng_.pick(vocabulary());
        size_for_text(n, text, 8, 32);
        break;
      }
      case 1: {  // call-to-action link styled as a button, label in a span
        root = add(NodeKind::Widget, "a", container);
        Node& n = nodes_.at(root);
        n.attrs["href"] = "/" + slug(text);
        n.attrs["class"] = rng_.chance(0.5) ? "btn btn-primary" : "btn btn-secondary";
        n.attrs["aria-label"] = text + " " + rng_.pick(vocabulary());
        size_for_text(n, text, 24, 40);
        add_inner(root, "span", text);
        break;
      }
      case 2: {  // button with a text span
        root = add(NodeKind::Widget, "button", container);
        Node& n = nodes_.at(root);
        n.attrs["type"] = rng_.chance(0.5) ? "submit" : "button";
        n.attrs["class"] = "button";
        if (rng_.chance(0.8)) n.attrs["aria-label"] = text + " " + rng_.pick(vocabulary());
        size_for_text(n, text, 24, 40);
        add_inner(root, "span", text);
        break;
      }
      case 3: {  // text input
        root = add(NodeKind::Widget, "input", container);
        Node& n = nodes_.at(root);
        static const std::vector<std::string> types = {"text", "email", "search", "password"};
        n.attrs["type"] = rng_.pick(types);
        n.attrs["name"] = slug(text) + std::to_string(next_uid_);
        n.attrs["placeholder"] = text;
        if (rng_.chance(0.8)) n.attrs["aria-label"] = text + " field";
        n.width = rng_.uniform(160, 260);
        n.height = 36;
        break;
      }
      case 4: {  // image
        root = add(NodeKind::Widget, "img", container);
        Node& n = nodes_.at(root);
        n.attrs["alt"] = text;
        n.attrs["src"] = "/img/" + slug(text) + ".png";
        n.width = rng_.uniform(48, 160);
        n.height = rng_.uniform(32, 96);
        break;
      }
      case 5: {  // icon button
        root = add(NodeKind::Widget, "button", container);
        Node& n = nodes_.at(root);
        n.attrs["aria-label"] = text;
        n.attrs["class"] = "icon-button";
        n.width = n.height = rng_.uniform(32, 44);
        add_inner(root, "i", std::nullopt);
        nodes_.at(nodes_.at(root).children.back()).attrs["class"] = "icon icon-" + slug(text);
        break;
      }
      default: {  // heading
        root = add(NodeKind::Widget, "h2", container);
        Node& n = nodes_.at(root);
        n.text = phrase(rng_, 2, 3);
        size_for_text(n, *n.text, 12, 36);
        break;
      }
    }
    Node& n = nodes_.at(root);
    if (n.tag != "h2" && n.tag != "img" && rng_.chance(0.4)) n.attrs["id"] = slug(text) + "-" + std::to_string(root);
    n.margin_left = rng_.uniform(0, 12);
    return root;
  }

  void size_for_text(Node& n, const std::string& text, std::int64_t pad, std::int64_t height) {
    n.width = static_cast<std::int64_t>(text.size()) * 8 + pad;
    n.height = height;
  }

  void add_inner(int parent, const std::string& tag, std::optional<std::string> text) {
    const int c = add(NodeKind::Inner, tag, parent);
    nodes_.at(c).text = std::move(text);
  }

  std::vector<int> widget_roots() const {
    std::vector<int> out;
    for (const auto& [uid, n] : nodes_)
      if (n.kind == NodeKind::Widget) out.push_back(uid);
    return out;
  }

  void remove_subtree(int uid) {
    std::vector<int> stack{uid};
    const int parent = nodes_.at(uid).parent;
    auto& siblings = nodes_.at(parent).children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), uid));
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int c : nodes_.at(u).children) stack.push_back(c);
      nodes_.erase(u);
    }
    // A wrapper left empty goes too.
    if (nodes_.at(parent).kind == NodeKind::Wrapper && nodes_.at(parent).children.empty()) remove_subtree(parent);
  }

  void edit_class(Node& n) {
    static const std::vector<std::string> tokens = {"active", "highlight", "v2", "compact", "lg", "rounded"};
    auto it = n.attrs.find("class");
    if (it == n.attrs.end()) {
      n.attrs["class"] = rng_.pick(tokens);
    } else {
      it->second += " " + rng_.pick(tokens);
    }
  }

  // Label text lives on the root or its inner span.
  void change_text(int uid) {
    Node& n = nodes_.at(uid);
    const std::string text = phrase(rng_, 1, 2);
    if (n.tag == "input") {
      n.attrs["placeholder"] = text;
      return;
    }
    if (n.tag == "img") {
      n.attrs["alt"] = text;
      return;
    }
    if (n.text) {
      n.text = text;
      size_for_text(n, text, 8, n.height);
      return;
    }
    for (int c : n.children) {
      if (nodes_.at(c).text) {
        nodes_.at(c).text = text;
        size_for_text(n, text, 24, n.height);
      }
    }
  }

  void swap_tag(int uid) {
    Node& n = nodes_.at(uid);
    if (n.tag == "a") {
      n.tag = "button";
      n.attrs.erase("href");
      n.attrs["type"] = "button";
    } else if (n.tag == "button" && !(n.attrs.count("class") && n.attrs["class"] == "icon-button")) {
      n.tag = "a";
      n.attrs.erase("type");
      n.attrs["href"] = "/" + slug(n.attrs.count("aria-label") ? n.attrs["aria-label"] : phrase(rng_, 1, 1));
    }
  }

  void resize(int uid, std::int64_t dw, std::int64_t dh) {
    Node& n = nodes_.at(uid);
    n.width = std::max<std::int64_t>(8, n.width + dw);
    n.height = std::max<std::int64_t>(8, n.height + dh);
  }

  // Moves the widget (with its wrapper, if any) into another container.
  void relocate(int uid) {
    int moving = uid;
    if (nodes_.at(nodes_.at(uid).parent).kind == NodeKind::Wrapper) moving = nodes_.at(uid).parent;
    const int from = nodes_.at(moving).parent;
    int to = pick_container();
    if (to == from) return;
    auto& src = nodes_.at(from).children;
    src.erase(std::find(src.begin(), src.end(), moving));
    auto& dst = nodes_.at(to).children;
    dst.insert(dst.begin() + static_cast<std::ptrdiff_t>(rng_.index(dst.size() + 1)), moving);
    nodes_.at(moving).parent = to;
  }

  void renest(int uid) {
    const int parent = nodes_.at(uid).parent;
    if (nodes_.at(parent).kind == NodeKind::Wrapper) return;
    Node w;
    w.uid = next_uid_++;
    w.kind = NodeKind::Wrapper;
    w.tag = "div";
    w.attrs["class"] = "wrapper";
    w.parent = parent;
    w.children = {uid};
    auto& siblings = nodes_.at(parent).children;
    *std::find(siblings.begin(), siblings.end(), uid) = w.uid;
    nodes_.at(uid).parent = w.uid;
    w.margin_left = nodes_.at(uid).margin_left;
    nodes_.at(uid).margin_left = 0;
    nodes_[w.uid] = w;
  }

  // ---- layout ----

  std::pair<std::int64_t, std::int64_t> inline_size(int uid) {
    Node& n = nodes_.at(uid);
    if (n.kind == NodeKind::Wrapper) return inline_size(n.children.front());
    return {n.width, n.height};
  }

  void place_inline(int uid, std::int64_t x, std::int64_t y) {
    Node& n = nodes_.at(uid);
    const auto [w, h] = inline_size(uid);
    n.rect = {x, y, w, h};
    if (n.kind == NodeKind::Wrapper) {
      place_inline(n.children.front(), x, y);
      return;
    }
    for (int c : n.children) nodes_.at(c).rect = {x + 1, y + 1, std::max<std::int64_t>(0, w - 2), std::max<std::int64_t>(0, h - 2)};
  }

  // Lays out a block at (x, y) with the given width; returns its height.
  std::int64_t layout_block(int uid, std::int64_t x, std::int64_t y, std::int64_t width) {
    constexpr std::int64_t pad = 10, gap = 16;
    std::int64_t cursor_x = x + pad, cursor_y = y + pad, row_h = 0;
    const std::int64_t right = x + width - pad;
    for (int c : nodes_.at(uid).children) {
      if (nodes_.at(c).kind == NodeKind::Block) {
        if (row_h > 0) {
          cursor_y += row_h + gap;
          row_h = 0;
        }
        cursor_x = x + pad;
        cursor_y += layout_block(c, x + pad, cursor_y, width - 2 * pad) + gap;
        continue;
      }
      const auto [w, h] = inline_size(c);
      const std::int64_t start = cursor_x + nodes_.at(c).margin_left;
      if (start + w > right && cursor_x > x + pad) {
        cursor_y += row_h + gap;
        cursor_x = x + pad;
        row_h = 0;
      }
      const std::int64_t px = cursor_x + nodes_.at(c).margin_left;
      place_inline(c, px, cursor_y);
      cursor_x = px + w + gap;
      row_h = std::max(row_h, h);
    }
    const std::int64_t height = std::max<std::int64_t>(cursor_y + row_h + pad - y, 2 * pad);
    nodes_.at(uid).rect = {x, y, width, height};
    return height;
  }

  void layout() { layout_block(html_, 0, 0, 1280); }

  // ---- snapshot ----

  void preorder(int uid, std::vector<int>& out) const {
    out.push_back(uid);
    for (int c : nodes_.at(uid).children) preorder(c, out);
  }

  std::string segment(int uid) const {
    const Node& n = nodes_.at(uid);
    if (n.parent < 0) return n.tag + "[1]";
    int index = 0;
    for (int s : nodes_.at(n.parent).children) {
      if (nodes_.at(s).tag == n.tag) ++index;
      if (s == uid) break;
    }
    return n.tag + "[" + std::to_string(index) + "]";
  }

  std::string xpath_of(int uid) const {
    std::vector<std::string> segs;
    for (int u = uid; u >= 0; u = nodes_.at(u).parent) segs.push_back(segment(u));
    std::string out;
    for (auto it = segs.rbegin(); it != segs.rend(); ++it) out += "/" + *it;
    return out;
  }

  std::optional<std::string> id_xpath_of(int uid) const {
    std::vector<std::string> below;
    for (int u = uid; u >= 0; u = nodes_.at(u).parent) {
      const Node& n = nodes_.at(u);
      if (auto it = n.attrs.find("id"); it != n.attrs.end()) {
        std::string out = "//*[@id=\"" + it->second + "\"]";
        for (auto s = below.rbegin(); s != below.rend(); ++s) out += "/" + *s;
        return out;
      }
      below.push_back(segment(u));
    }
    return std::nullopt;
  }

  std::optional<std::string> inner_text(int uid) const {
    const Node& n = nodes_.at(uid);
    if (n.kind == NodeKind::Block || n.kind == NodeKind::Wrapper) return std::nullopt;
    std::string out = n.text.value_or("");
    for (int c : n.children) {
      if (auto t = inner_text(c); t && !t->empty()) {
        if (!out.empty()) out += ' ';
        out += *t;
      }
    }
    if (out.empty()) return std::nullopt;
    return out;
  }

  ElementSnapshot element_of(int uid, const std::map<int, std::string>& xpaths) const {
    const Node& n = nodes_.at(uid);
    ElementSnapshot e;
    e.element_id = element_id(uid);
    e.tag = n.tag;
    auto attr = [&](const char* k) -> std::optional<std::string> {
      auto it = n.attrs.find(k);
      return it == n.attrs.end() ? std::nullopt : std::optional<std::string>(it->second);
    };
    e.class_attr = attr("class");
    e.name_attr = attr("name");
    e.id_attr = attr("id");
    e.href = attr("href");
    e.alt = attr("alt");
    e.type_attr = attr("type");
    e.aria_label = attr("aria-label");
    e.absolute_xpath = xpaths.at(uid);
    e.id_xpath = id_xpath_of(uid);
    e.x = n.rect.x;
    e.y = n.rect.y;
    e.width = n.rect.width;
    e.height = n.rect.height;
    // value, then inner text, then placeholder
    e.visible_text = attr("value");
    if (!e.visible_text) e.visible_text = inner_text(uid);
    if (!e.visible_text) e.visible_text = attr("placeholder");
    e.attributes = n.attrs;
    e.is_button = compute_is_button(e);
    return e;
  }

  bool related(int a, int b) const {
    for (int u = a; u >= 0; u = nodes_.at(u).parent)
      if (u == b) return true;
    for (int u = b; u >= 0; u = nodes_.at(u).parent)
      if (u == a) return true;
    return false;
  }

  // Words of leaf texts inside each element's rectangle grown by the margin,
  // excluding the element's own subtree and ancestors.
  void fill_neighbor_text(PageSnapshot& page, const std::vector<int>& order) const {
    std::vector<int> uids;
    for (int uid : order)
      if (uid != html_ && uid != body_) uids.push_back(uid);
    std::vector<std::pair<int, Rect>> leaves;
    for (int uid : uids) {
      const Node& n = nodes_.at(uid);
      if (n.children.empty() && inner_text(uid)) leaves.emplace_back(uid, n.rect);
    }
    const std::int64_t m = opts_.neighbor_margin;
    for (std::size_t i = 0; i < uids.size(); ++i) {
      const Rect r = nodes_.at(uids[i]).rect;
      const Rect grown{r.x - m, r.y - m, r.width + 2 * m, r.height + 2 * m};
      std::vector<std::string> words;
      std::set<std::string> seen;
      for (const auto& [leaf, rect] : leaves) {
        if (related(leaf, uids[i]) || intersection_area(grown, rect) == 0) continue;
        for (const auto& w : sim::lowercase_words(*inner_text(leaf)))
          if (seen.insert(w).second) words.push_back(w);
      }
      page.elements[i].neighbor_text = std::move(words);
    }
  }

  std::string site_;
  SeededRng& rng_;
  const GeneratorOptions& opts_;
  std::map<int, Node> nodes_;
  int next_uid_ = 0;
  int html_ = -1, body_ = -1, nav_ = -1, footer_ = -1;
  std::vector<int> sections_;
  std::vector<int> tracked_;
};

inline std::string version_date(std::size_t version) {
  // Four months apart, starting September 2018.
  const std::size_t months = 8 + 4 * version;
  const std::size_t year = 2018 + months / 12;
  const std::size_t month = months % 12 + 1;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04zu-%02zu-01", year, month);
  return buf;
}

}  // namespace gen

inline Benchmark generate_benchmark(const GeneratorOptions& opts) {
  if (opts.sites == 0 || opts.versions < 2 || opts.elements_per_site == 0)
    throw UsageError("bench-gen needs sites >= 1, versions >= 2, elements >= 1");
  Benchmark bench;
  bench.name = "synthetic-seed" + std::to_string(opts.seed);
  SeededRng rng(opts.seed);
  for (std::size_t s = 0; s < opts.sites; ++s) {
    char name[32];
    std::snprintf(name, sizeof name, "site%02zu", s + 1);
    gen::SiteModel model(name, rng, opts);
    model.build_initial();
    std::shared_ptr<const PageSnapshot> previous =
        std::make_shared<const PageSnapshot>(model.snapshot(gen::version_date(0)));
    for (std::size_t v = 1; v < opts.versions; ++v) {
      model.mutate();
      auto current = std::make_shared<const PageSnapshot>(model.snapshot(gen::version_date(v)));
      for (int uid : model.tracked()) {
        const std::string id = model.element_id(uid);
        BenchmarkCase c;
        c.case_id = std::string(name) + "-v" + std::to_string(v) + "-n" + std::to_string(uid);
        c.target = *previous->find(id);
        c.old_page = previous;
        c.new_page = current;
        c.ground_truth_id = id;
        c.change_class = classify_change(c.target, c.truth());
        c.locator_class = classify_locator(c.target, *current, id);
        bench.cases.push_back(std::move(c));
      }
      previous = current;
    }
  }
  return bench;
}

}  // namespace relocator

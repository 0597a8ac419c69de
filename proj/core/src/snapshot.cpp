#include "cpref/snapshot.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "cpref/csv.hpp"

namespace cpref {

namespace {

[[noreturn]] void bad_row(std::size_t line_no, std::string_view what) {
  throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no) + ": " + std::string(what));
}

std::string join_names(std::span<const std::string> names, std::string_view what) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].find('|') != std::string::npos) {
      throw Error(ErrorKind::MalformedRow, std::string(what) + " name '" + names[i] + "' contains '|'");
    }
    if (i) out += '|';
    out += names[i];
  }
  return out;
}

std::vector<std::string> split_bar(std::string_view text) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  while (true) {
    const auto bar = text.find('|');
    out.emplace_back(text.substr(0, bar));
    if (bar == std::string_view::npos) break;
    text.remove_prefix(bar + 1);
  }
  return out;
}

std::shared_ptr<const AttributeUniverse> universe_from(const ArtifactText& text) {
  if (!text.header) throw Error(ErrorKind::SchemaMismatch, "artifact has no header block");
  auto names = text.header->get("universe");
  if (!names) throw Error(ErrorKind::SchemaMismatch, "artifact header lacks the universe line");
  return std::make_shared<const AttributeUniverse>(split_bar(*names));
}

Itemset items_from(std::string_view cell, const AttributeUniverse& universe) {
  Itemset out(universe.size());
  for (const auto& name : split_bar(cell)) out.insert(universe.index_of(name));
  return out;
}

double rating_from(std::string_view cell, std::size_t line_no) {
  auto v = csv::parse_double(cell);
  if (!v) bad_row(line_no, "rating '" + std::string(cell) + "' is not a number");
  return *v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::optional<std::string> ArtifactHeader::get(std::string_view key) const {
  for (const auto& [k, v] : extra) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void write_header(std::ostream& out, const ArtifactHeader& header) {
  out << "# kind: " << header.kind << '\n';
  out << "# schema: " << header.schema << '\n';
  out << "# config: " << header.config_digest << '\n';
  for (const auto& [k, v] : header.extra) out << "# " << k << ": " << v << '\n';
}

ArtifactText read_artifact(std::istream& in, std::string_view expected_kind) {
  ArtifactText text;
  std::string line;
  std::size_t line_no = 0;
  bool in_header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (in_header && line.rfind("# ", 0) == 0) {
      if (!text.header) text.header.emplace();
      const auto colon = line.find(": ");
      const std::string key = line.substr(2, colon == std::string::npos ? std::string::npos : colon - 2);
      const std::string value = colon == std::string::npos ? std::string() : line.substr(colon + 2);
      if (key == "kind") {
        text.header->kind = value;
      } else if (key == "schema") {
        auto v = csv::parse_int(value);
        if (!v) throw Error(ErrorKind::SchemaMismatch, "unreadable schema version '" + value + "'");
        text.header->schema = static_cast<int>(*v);
      } else if (key == "config") {
        text.header->config_digest = value;
      } else {
        text.header->extra.emplace_back(key, value);
      }
      continue;
    }
    if (in_header) {
      in_header = false;
      text.first_line = line_no;
    }
    if (csv::trim(line).empty()) continue;
    text.lines.push_back(line);
  }
  if (text.header) {
    if (text.header->kind != expected_kind) {
      throw Error(ErrorKind::SchemaMismatch,
                  "expected a '" + std::string(expected_kind) + "' artifact, found '" + text.header->kind + "'");
    }
    if (text.header->schema != kSchemaVersion) {
      throw Error(ErrorKind::SchemaMismatch, "schema version " + std::to_string(text.header->schema) +
                                                 " is not supported (expected " + std::to_string(kSchemaVersion) +
                                                 ")");
    }
  }
  return text;
}

// ---------------------------------------------------------------------------

void write_transactions(std::ostream& out, const ArtifactHeader& header, const LoadedRatings& loaded) {
  ArtifactHeader h = header;
  h.kind = "transactions";
  h.extra.emplace_back("universe", join_names(loaded.universe->names(), "attribute"));
  write_header(out, h);
  out << "id,user,rating,items\n";
  for (const auto& tx : loaded.transactions) {
    csv::write_row(out, {tx.id, tx.user, csv::format_double(tx.rating),
                         join_names(decode_itemset(tx.items, *loaded.universe), "attribute")});
  }
}

LoadedRatings read_transactions(std::istream& in) {
  const auto text = read_artifact(in, "transactions");
  LoadedRatings out;
  out.universe = universe_from(text);
  for (std::size_t i = 0; i < text.lines.size(); ++i) {
    const std::size_t line_no = text.first_line + i;
    auto f = csv::split(text.lines[i]);
    if (i == 0 && !f.empty() && f[0] == "id") continue;
    if (f.size() != 4) bad_row(line_no, "expected id,user,rating,items");
    out.transactions.push_back({f[0], f[1], items_from(f[3], *out.universe), rating_from(f[2], line_no)});
  }
  return out;
}

// ---------------------------------------------------------------------------

void write_preferences(std::ostream& out, const ArtifactHeader& header, const PreferenceSnapshot& snapshot) {
  ArtifactHeader h = header;
  h.kind = "preferences";
  h.extra.emplace_back("universe", join_names(snapshot.universe->names(), "attribute"));
  write_header(out, h);
  for (const auto& u : snapshot.users) {
    for (const auto& tx : u.train->transactions()) {
      csv::write_row(out, {"T", tx.id, tx.user, csv::format_double(tx.rating),
                           join_names(decode_itemset(tx.items, *snapshot.universe), "attribute")});
    }
    auto write_pairs = [&](const PreferenceDatabase& db, const char* label) {
      for (const auto& p : db.pairs()) {
        csv::write_row(out, {"P", u.user, label, db.transaction(p.preferred).id, db.transaction(p.dominated).id});
      }
    };
    write_pairs(*u.train, "train");
    write_pairs(*u.test, "test");
  }
}

PreferenceSnapshot read_preferences(std::istream& in) {
  const auto text = read_artifact(in, "preferences");
  PreferenceSnapshot snap;
  snap.universe = universe_from(text);

  struct Building {
    std::vector<Transaction> txs;
    std::unordered_map<std::string, TxIndex> by_id;
    std::vector<PreferencePair> train;
    std::vector<PreferencePair> test;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Building> users;
  for (std::size_t i = 0; i < text.lines.size(); ++i) {
    const std::size_t line_no = text.first_line + i;
    auto f = csv::split(text.lines[i]);
    if (f[0] == "T") {
      if (f.size() != 5) bad_row(line_no, "expected T,id,user,rating,items");
      auto [it, fresh] = users.try_emplace(f[2]);
      if (fresh) order.push_back(f[2]);
      auto& b = it->second;
      if (!b.by_id.emplace(f[1], static_cast<TxIndex>(b.txs.size())).second) {
        bad_row(line_no, "duplicate transaction id " + f[1]);
      }
      b.txs.push_back({f[1], f[2], items_from(f[4], *snap.universe), rating_from(f[3], line_no)});
    } else if (f[0] == "P") {
      if (f.size() != 5) bad_row(line_no, "expected P,user,split,preferred,dominated");
      auto it = users.find(f[1]);
      if (it == users.end()) throw Error(ErrorKind::DanglingPair, "pair for user " + f[1] + " without transactions");
      auto& b = it->second;
      auto t = b.by_id.find(f[3]);
      auto u = b.by_id.find(f[4]);
      if (t == b.by_id.end() || u == b.by_id.end()) {
        throw Error(ErrorKind::DanglingPair, "line " + std::to_string(line_no) + ": unknown transaction id");
      }
      if (f[2] == "train") {
        b.train.push_back({t->second, u->second});
      } else if (f[2] == "test") {
        b.test.push_back({t->second, u->second});
      } else {
        bad_row(line_no, "split must be train or test");
      }
    } else {
      bad_row(line_no, "unknown record type '" + f[0] + "'");
    }
  }
  for (const auto& user : order) {
    auto& b = users.at(user);
    auto train = std::make_shared<const PreferenceDatabase>(snap.universe, std::move(b.txs), std::move(b.train));
    auto test = std::make_shared<const PreferenceDatabase>(train->with_pairs(std::move(b.test)));
    snap.users.push_back({user, std::move(train), std::move(test)});
  }
  return snap;
}

// ---------------------------------------------------------------------------

void write_rules(std::ostream& out, const ArtifactHeader& header, std::span<const RuleRow> rows,
                 const AttributeUniverse& universe, bool with_user) {
  ArtifactHeader h = header;
  h.kind = "rules";
  write_header(out, h);
  out << (with_user ? "user,i_plus,i_minus,context,support,confidence\n" : "i_plus,i_minus,context,support,confidence\n");
  for (const auto& r : rows) {
    std::vector<std::string> f;
    if (with_user) f.push_back(r.user);
    f.push_back(slot_text(r.rule.plus(), universe));
    f.push_back(slot_text(r.rule.minus(), universe));
    f.push_back(r.rule.context().empty() ? "NULL" : slot_text(r.rule.context(), universe));
    f.push_back(csv::format_double(r.support));
    f.push_back(csv::format_optional(r.confidence));
    csv::write_row(out, f);
  }
}

std::vector<RuleRow> read_rules(std::istream& in, const AttributeUniverse& universe) {
  const auto text = read_artifact(in, "rules");
  std::vector<RuleRow> out;
  if (text.lines.empty()) return out;
  const char sep = text.lines[0].find(',') == std::string::npos && text.lines[0].find('\t') != std::string::npos
                       ? '\t'
                       : ',';
  const auto head = csv::split(text.lines[0], sep);
  auto column = [&](std::initializer_list<std::string_view> names) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < head.size(); ++i) {
      const auto h = lower(csv::trim(head[i]));
      for (auto n : names) {
        if (h == n) return i;
      }
    }
    return std::nullopt;
  };
  const auto c_plus = column({"i_plus", "i^+", "plus"});
  const auto c_minus = column({"i_minus", "i^-", "minus"});
  const auto c_ctx = column({"context"});
  const auto c_supp = column({"support"});
  const auto c_conf = column({"confidence"});
  const auto c_user = column({"user"});
  if (!c_plus || !c_minus || !c_ctx) bad_row(text.first_line, "ruleset header needs i_plus, i_minus and context");

  for (std::size_t i = 1; i < text.lines.size(); ++i) {
    const std::size_t line_no = text.first_line + i;
    const auto f = csv::split(text.lines[i], sep);
    auto cell = [&](std::optional<std::size_t> c) -> std::string_view {
      if (!c) return {};
      if (*c >= f.size()) bad_row(line_no, "row has fewer columns than the header");
      return csv::trim(f[*c]);
    };
    RuleRow row{std::string(cell(c_user)),
                Rule(parse_slot(cell(c_plus), universe), parse_slot(cell(c_minus), universe),
                     parse_slot(cell(c_ctx), universe)),
                0.0, std::nullopt};
    if (c_supp) {
      auto v = csv::parse_double(cell(c_supp));
      if (!v) bad_row(line_no, "support is not a number");
      row.support = *v;
    }
    if (c_conf && cell(c_conf) != "NA") {
      auto v = csv::parse_double(cell(c_conf));
      if (!v) bad_row(line_no, "confidence is not a number");
      row.confidence = *v;
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace cpref

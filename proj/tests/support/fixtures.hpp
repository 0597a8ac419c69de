#pragma once

#include <memory>
#include <string>

#include <cpref/model.hpp>

namespace cpref::testing {

inline std::string data_path(const std::string& name) { return std::string(CPREF_TEST_DATA_DIR) + "/" + name; }

// Five rated transactions over attributes A..E and the five pairs derived
// from them with high = 8, gap = 1:
//   t1 {A,B,D} 9.5   t2 {B,C,E} 7.4   t3 {B,C} 6.4   t4 {D,E} 8.6   t5 {B,E} 7.9
//   p1 <t1,t2>  p2 <t1,t3>  p3 <t1,t5>  p4 <t4,t2>  p5 <t4,t3>
inline std::shared_ptr<const AttributeUniverse> five_attr_universe() {
  return std::make_shared<const AttributeUniverse>(std::vector<std::string>{"A", "B", "C", "D", "E"});
}

inline std::shared_ptr<const PreferenceDatabase> sample_db() {
  auto u = five_attr_universe();
  std::vector<Transaction> txs{
      {"u1:t1", "u1", encode_itemset({"A", "B", "D"}, *u), 9.5},
      {"u1:t2", "u1", encode_itemset({"B", "C", "E"}, *u), 7.4},
      {"u1:t3", "u1", encode_itemset({"B", "C"}, *u), 6.4},
      {"u1:t4", "u1", encode_itemset({"D", "E"}, *u), 8.6},
      {"u1:t5", "u1", encode_itemset({"B", "E"}, *u), 7.9},
  };
  std::vector<PreferencePair> pairs{{0, 1}, {0, 2}, {0, 4}, {3, 1}, {3, 2}};
  return std::make_shared<const PreferenceDatabase>(u, std::move(txs), std::move(pairs));
}

inline Rule R(std::initializer_list<std::string_view> plus, std::initializer_list<std::string_view> minus,
              std::initializer_list<std::string_view> ctx, const AttributeUniverse& u) {
  return Rule::from_names(plus, minus, ctx, u);
}

}  // namespace cpref::testing

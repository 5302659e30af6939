#include "qlam/cpm.hpp"

#include <algorithm>

namespace qlam::cpm {

namespace {

LabelPtr make(LabelKind kind, std::vector<LabelPtr> items) {
  std::string key;
  auto join = [&](char open, char close) {
    key += open;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) key += ',';
      key += items[i]->key;
    }
    key += close;
  };
  switch (kind) {
    case LabelKind::Star: key = "*"; break;
    case LabelKind::Lft: key = "L(" + items[0]->key + ")"; break;
    case LabelKind::Rgt: key = "R(" + items[0]->key + ")"; break;
    case LabelKind::Pair: join('(', ')'); break;
    case LabelKind::MSet: join('[', ']'); break;
    case LabelKind::List: join('<', '>'); break;
  }
  return std::make_shared<const Label>(Label{kind, std::move(items), std::move(key)});
}

struct KeyParser {
  const std::string& s;
  std::size_t pos = 0;

  [[noreturn]] void fail() const { throw CpmError("malformed web label: " + s); }
  void expect(char c) {
    if (pos >= s.size() || s[pos] != c) fail();
    ++pos;
  }
  bool peek(char c) const { return pos < s.size() && s[pos] == c; }

  std::vector<LabelPtr> seq(char close) {
    std::vector<LabelPtr> items;
    if (peek(close)) {
      ++pos;
      return items;
    }
    for (;;) {
      items.push_back(label());
      if (peek(',')) {
        ++pos;
        continue;
      }
      expect(close);
      return items;
    }
  }

  LabelPtr label() {
    if (pos >= s.size()) fail();
    char c = s[pos++];
    switch (c) {
      case '*': return lbl::star();
      case 'L':
      case 'R': {
        expect('(');
        LabelPtr a = label();
        expect(')');
        return c == 'L' ? lbl::lft(a) : lbl::rgt(a);
      }
      case '(': {
        auto items = seq(')');
        if (items.size() != 2) fail();
        return lbl::pair(items[0], items[1]);
      }
      case '[': return lbl::mset(seq(']'));
      case '<': return lbl::list(seq('>'));
      default: fail();
    }
  }
};

}  // namespace

namespace lbl {

LabelPtr star() {
  static const LabelPtr s = make(LabelKind::Star, {});
  return s;
}
LabelPtr lft(LabelPtr a) { return make(LabelKind::Lft, {std::move(a)}); }
LabelPtr rgt(LabelPtr a) { return make(LabelKind::Rgt, {std::move(a)}); }
LabelPtr pair(LabelPtr a, LabelPtr b) { return make(LabelKind::Pair, {std::move(a), std::move(b)}); }
LabelPtr mset(std::vector<LabelPtr> items) {
  std::stable_sort(items.begin(), items.end(), label_less);
  return make(LabelKind::MSet, std::move(items));
}
LabelPtr list(std::vector<LabelPtr> items) { return make(LabelKind::List, std::move(items)); }

LabelPtr parse(const std::string& key) {
  KeyParser p{key};
  LabelPtr l = p.label();
  if (p.pos != key.size()) p.fail();
  return l;
}

}  // namespace lbl

const std::vector<LabelPtr>& mset_items(const Label& l) {
  if (l.kind != LabelKind::MSet) throw CpmError("not a multiset label: " + l.key);
  return l.items;
}

}  // namespace qlam::cpm

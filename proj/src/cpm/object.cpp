#include "qlam/cpm.hpp"

#include <sstream>

namespace qlam::cpm {

Object::Object(std::vector<WebElement> elems, Truncation t) : elems_(std::move(elems)), trunc_(t) {
  for (std::size_t i = 0; i < elems_.size(); ++i) {
    const auto& e = elems_[i];
    if (!e.label || !e.group) throw CpmError("web element without label or group");
    if (e.group->degree() != e.dim) throw CpmError("group degree differs from dimension at " + e.label->key);
    if (!index_.emplace(e.label->key, static_cast<int>(i)).second)
      throw CpmError("duplicate web label " + e.label->key);
  }
}

int Object::find(const Label& l) const { return find(l.key); }

int Object::find(const std::string& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? -1 : it->second;
}

std::string Object::summary() const {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < elems_.size(); ++i) {
    if (i) os << ", ";
    os << elems_[i].label->key << ":(" << elems_[i].dim << "," << elems_[i].group->order() << ")";
  }
  os << "}";
  return os.str();
}

bool object_equal(const Object& a, const Object& b) {
  if (&a == &b) return true;
  if (a.size() != b.size()) return false;
  if (a.truncation().list_max != b.truncation().list_max || a.truncation().bang_max != b.truncation().bang_max)
    return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].label->key != b[i].label->key || a[i].dim != b[i].dim) return false;
    if (!group_equal(*a[i].group, *b[i].group)) return false;
  }
  return true;
}

Truncation merge_truncation(const Truncation& a, const Truncation& b) {
  auto pick = [](int x, int y) {
    if (x >= 0 && y >= 0 && x != y) throw CpmError("objects built with different truncation bounds");
    return x >= 0 ? x : y;
  };
  return {pick(a.list_max, b.list_max), pick(a.bang_max, b.bang_max)};
}

ObjPtr make_object(std::vector<WebElement> elems, Truncation t) {
  return std::make_shared<const Object>(std::move(elems), t);
}

ObjPtr unit_object() {
  static const ObjPtr u = make_object({{lbl::star(), 1, PermGroup::trivial(1)}});
  return u;
}

ObjPtr qubit_object() {
  static const ObjPtr q = make_object({{lbl::star(), 2, PermGroup::trivial(2)}});
  return q;
}

}  // namespace qlam::cpm

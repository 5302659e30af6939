#include "qlam/cpm.hpp"

#include <json.hpp>

#include <limits>
#include <optional>
#include <set>

namespace qlam::cpm {

namespace {

using json = nlohmann::json;

json object_json(const Object& o) {
  json web = json::array();
  for (const auto& e : o.elements()) {
    json factors = json::array();
    for (const auto& f : e.group->factors())
      factors.push_back({{"stride", f.stride}, {"dim", f.dim}, {"order", f.order}, {"elems", f.elems}});
    web.push_back({{"label", e.label->key}, {"dim", e.dim}, {"group", factors}});
  }
  return {{"web", web}, {"list_max", o.truncation().list_max}, {"bang_max", o.truncation().bang_max}};
}

ObjPtr object_from_json(const json& j) {
  std::vector<WebElement> es;
  for (const auto& w : j.at("web")) {
    std::vector<GroupFactor> fs;
    for (const auto& f : w.at("group"))
      fs.push_back({f.at("stride").get<std::int64_t>(), f.at("dim").get<int>(), f.at("order").get<int>(),
                    f.at("elems").get<std::vector<int>>()});
    const auto dim = w.at("dim").get<std::int64_t>();
    es.push_back({lbl::parse(w.at("label").get<std::string>()), dim, std::make_shared<const PermGroup>(dim, std::move(fs))});
  }
  return make_object(std::move(es), Truncation{j.at("list_max").get<int>(), j.at("bang_max").get<int>()});
}

}  // namespace

std::string serialize(const Morphism& f) {
  json entries = json::array();
  for (const auto& [k, s] : f.entries()) {
    CMatrix d = s.dense();
    json rows = json::array();
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < d.cols(); ++c) row.push_back({d(r, c).real(), d(r, c).imag()});
      rows.push_back(std::move(row));
    }
    entries.push_back({{"src", (*f.src())[static_cast<std::size_t>(k.first)].label->key},
                       {"tgt", (*f.tgt())[static_cast<std::size_t>(k.second)].label->key},
                       {"in_dim", s.in_dim()},
                       {"out_dim", s.out_dim()},
                       {"matrix", std::move(rows)}});
  }
  json j = {{"source", object_json(*f.src())}, {"target", object_json(*f.tgt())}, {"entries", std::move(entries)}};
  return j.dump(1);
}

Morphism deserialize(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw CpmError(std::string("malformed morphism file: ") + e.what());
  }
  try {
    ObjPtr src = object_from_json(j.at("source")), tgt = object_from_json(j.at("target"));
    Morphism m(src, tgt);
    for (const auto& e : j.at("entries")) {
      const auto in = e.at("in_dim").get<std::int64_t>(), out = e.at("out_dim").get<std::int64_t>();
      CMatrix d(out * out, in * in);
      const auto& rows = e.at("matrix");
      if (static_cast<std::int64_t>(rows.size()) != out * out) throw CpmError("matrix row count mismatch");
      for (Eigen::Index r = 0; r < d.rows(); ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (static_cast<std::int64_t>(row.size()) != in * in) throw CpmError("matrix column count mismatch");
        for (Eigen::Index c = 0; c < d.cols(); ++c) {
          const auto& z = row[static_cast<std::size_t>(c)];
          d(r, c) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
        }
      }
      int a = src->find(e.at("src").get<std::string>()), b = tgt->find(e.at("tgt").get<std::string>());
      if (a < 0 || b < 0) throw CpmError("entry label not in web");
      m.set(a, b, Superop::from_dense(in, out, d));
    }
    return m;
  } catch (const json::exception& e) {
    throw CpmError(std::string("malformed morphism file: ") + e.what());
  }
}

std::vector<EntryDiff> diff(const Morphism& a, const Morphism& b) {
  std::set<std::pair<std::string, std::string>> keys;
  auto collect = [&](const Morphism& m) {
    for (const auto& [k, s] : m.entries())
      keys.emplace((*m.src())[static_cast<std::size_t>(k.first)].label->key,
                   (*m.tgt())[static_cast<std::size_t>(k.second)].label->key);
  };
  collect(a);
  collect(b);
  std::vector<EntryDiff> out;
  for (const auto& [s, t] : keys) {
    auto lookup = [&](const Morphism& m) -> std::optional<Superop> {
      int i = m.src()->find(s), j = m.tgt()->find(t);
      if (i < 0 || j < 0) return std::nullopt;
      return m.at(i, j);
    };
    auto x = lookup(a), y = lookup(b);
    double d;
    if (x && y && x->in_dim() == y->in_dim() && x->out_dim() == y->out_dim())
      d = superop_distance(*x, *y);
    else if (x && !y)
      d = x->max_abs();
    else if (y && !x)
      d = y->max_abs();
    else
      d = std::numeric_limits<double>::infinity();
    out.push_back({s, t, d});
  }
  return out;
}

}  // namespace qlam::cpm

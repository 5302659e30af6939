#include "qlam/machine.hpp"

#include <algorithm>
#include <random>

namespace qlam {

Closure make_closure(TermPtr closed_term) {
  Closure c{QState(), {}, std::move(closed_term)};
  check_linking(c);
  return c;
}

void check_linking(const Closure& c, bool total) {
  VarSet fv = free_vars(*c.term);
  const bool absorbed = contains_omega(*c.term);
  const int n = c.state.num_qubits();
  std::vector<bool> seen(static_cast<size_t>(n) + 1, false);
  for (const auto& [x, idx] : c.linking) {
    // A qubit whose variable was absorbed by Omega stays in the state.
    if (!fv.count(x) && !absorbed) throw MachineError("ErroneousLinking: '" + x + "' is linked but not free");
    if (idx < 1 || idx > n) throw MachineError("ErroneousLinking: index of '" + x + "' out of range");
    if (seen[static_cast<size_t>(idx)]) throw MachineError("ErroneousLinking: linking is not injective");
    seen[static_cast<size_t>(idx)] = true;
  }
  for (const auto& x : fv)
    if (!c.linking.count(x)) throw MachineError("ErroneousLinking: free variable '" + x + "' is not linked");
  if (total && static_cast<int>(c.linking.size()) != n)
    throw MachineError("ErroneousLinking: closure is not total");
}

Context closure_context(const Closure& c) {
  std::vector<std::pair<int, std::string>> order;
  for (const auto& [x, idx] : c.linking) order.push_back({idx, x});
  std::sort(order.begin(), order.end());
  std::vector<Binding> b;
  for (const auto& [idx, x] : order) b.push_back({x, Type::qubit()});
  return Context(std::move(b));
}

std::string to_string(const Closure& c) {
  std::vector<std::pair<int, std::string>> order;
  for (const auto& [x, idx] : c.linking) order.push_back({idx, x});
  std::sort(order.begin(), order.end());
  std::string l;
  for (const auto& [idx, x] : order) l += (l.empty() ? "" : " ") + x;
  return "[" + c.state.to_string() + "; |" + l + ">; " + pretty(*c.term) + "]";
}

std::string FreshNames::next(const std::map<std::string, int>& avoid) {
  for (;;) {
    std::string name = "_q" + std::to_string(++counter_);
    if (!avoid.count(name)) return name;
  }
}

TermStatus term_status(const Term& m) {
  if (is_value(m)) return TermStatus::Value;
  switch (m.kind) {
    case TermKind::Omega: return TermStatus::Blocked;
    case TermKind::App:
      if (!is_value(*m.t1)) return term_status(*m.t1);
      if (!is_value(*m.t2)) return term_status(*m.t2);
      return TermStatus::Reducible;
    case TermKind::Tensor:
      if (!is_value(*m.t1)) return term_status(*m.t1);
      return term_status(*m.t2);
    case TermKind::InL:
    case TermKind::InR: return term_status(*m.t1);
    case TermKind::LetUnit:
    case TermKind::LetTensor:
    case TermKind::Match:
      if (!is_value(*m.t1)) return term_status(*m.t1);
      return TermStatus::Reducible;
    default: return TermStatus::Reducible;
  }
}

namespace {

struct Branch {
  double prob;
  QState state;
  std::map<std::string, int> linking;
  TermPtr term;
  std::string rule;
};

// Simultaneous substitution n{v/x, w/y}.
TermPtr subst2(const TermPtr& n, const TermPtr& v, const std::string& x, const TermPtr& w, const std::string& y) {
  TermPtr body = n;
  std::string y2 = y;
  if (free_vars(*v).count(y)) {
    VarSet avoid = all_names(*n);
    VarSet a = free_vars(*v), b = free_vars(*w);
    avoid.insert(a.begin(), a.end());
    avoid.insert(b.begin(), b.end());
    avoid.insert(x);
    y2 = fresh_name(y, avoid);
    body = substitute(body, mk::var(y2), y);
  }
  return substitute(substitute(body, v, x), w, y2);
}

void collect_tensor_vars(const Term& v, std::vector<std::string>& out) {
  if (v.kind == TermKind::Var) {
    out.push_back(v.var);
  } else if (v.kind == TermKind::Tensor) {
    collect_tensor_vars(*v.t1, out);
    collect_tensor_vars(*v.t2, out);
  } else {
    throw MachineError("StuckNonValue: gate argument is not a tuple of qubit variables");
  }
}

[[noreturn]] void stuck(const Term& m) { throw MachineError("StuckNonValue: " + pretty(m)); }

Branch classical(const Closure& c, TermPtr t, const char* rule) { return {1.0, c.state, c.linking, std::move(t), rule}; }

std::vector<Branch> redex(const Closure& c, const TermPtr& mp, FreshNames& fresh) {
  const Term& m = *mp;
  switch (m.kind) {
    case TermKind::App: {
      const Term& f = *m.t1;
      const TermPtr& v = m.t2;
      switch (f.kind) {
        case TermKind::Abs: return {classical(c, substitute(f.t1, v, f.var), "beta")};
        case TermKind::Split: return {classical(c, v, "split")};
        case TermKind::Meas: {
          if (v->kind != TermKind::Var) stuck(m);
          int pos = c.linking.at(v->var);
          MeasureResult r = measure(c.state, pos);
          std::map<std::string, int> l;
          for (const auto& [x, idx] : c.linking)
            if (x != v->var) l[x] = idx > pos ? idx - 1 : idx;
          std::vector<Branch> out;
          if (r.outcome0.used) out.push_back({r.outcome0.prob, r.outcome0.state, l, mk::inl(mk::unit()), "meas0"});
          if (r.outcome1.used) out.push_back({r.outcome1.prob, r.outcome1.state, l, mk::inr(mk::unit()), "meas1"});
          return out;
        }
        case TermKind::New: {
          if ((v->kind != TermKind::InL && v->kind != TermKind::InR) || v->t1->kind != TermKind::UnitVal) stuck(m);
          int b = v->kind == TermKind::InR ? 1 : 0;
          std::string y = fresh.next(c.linking);
          auto l = c.linking;
          l[y] = c.state.num_qubits() + 1;
          return {{1.0, append_qubit(c.state, b), l, mk::var(y), b ? "new1" : "new0"}};
        }
        case TermKind::Gate: {
          std::vector<std::string> xs;
          collect_tensor_vars(*v, xs);
          if (static_cast<int>(xs.size()) != f.gate->arity) stuck(m);
          std::vector<int> pos;
          for (const auto& x : xs) pos.push_back(c.linking.at(x));
          return {{1.0, apply_unitary(c.state, f.gate->matrix, pos), c.linking, v, "gate"}};
        }
        default: stuck(m);
      }
    }
    case TermKind::LetUnit:
      if (m.t1->kind != TermKind::UnitVal) stuck(m);
      return {classical(c, m.t2, "let-unit")};
    case TermKind::LetTensor:
      if (m.t1->kind != TermKind::Tensor) stuck(m);
      return {classical(c, subst2(m.t2, m.t1->t1, m.var, m.t1->t2, m.var2), "let-tensor")};
    case TermKind::Match:
      if (m.t1->kind == TermKind::InL) return {classical(c, substitute(m.t2, m.t1->t1, m.var), "match-inl")};
      if (m.t1->kind == TermKind::InR) return {classical(c, substitute(m.t3, m.t1->t1, m.var2), "match-inr")};
      stuck(m);
    case TermKind::LetRec: {
      TermPtr unfold = mk::abs(m.var2, m.type, mk::letrec(m.var, m.type, m.type2, m.var2, m.t1, m.t1));
      return {classical(c, substitute(m.t2, unfold, m.var), "letrec")};
    }
    case TermKind::LetRecN: {
      TermPtr unfold =
          m.bound == 0
              ? mk::abs(m.var2, m.type, mk::omega(m.type2))
              : mk::abs(m.var2, m.type, mk::letrec_n(m.bound - 1, m.var, m.type, m.type2, m.var2, m.t1, m.t1));
      return {classical(c, substitute(m.t2, unfold, m.var), m.bound == 0 ? "letrec0" : "letrecN")};
    }
    default: stuck(m);
  }
}

// Find the redex in evaluation position and rebuild the term around each branch.
std::vector<Branch> reduce(const Closure& c, const TermPtr& mp, FreshNames& fresh) {
  const Term& m = *mp;
  auto under = [&](const TermPtr& sub, auto rebuild) {
    std::vector<Branch> bs = reduce(c, sub, fresh);
    for (auto& b : bs) b.term = rebuild(b.term);
    return bs;
  };
  switch (m.kind) {
    case TermKind::App:
      if (!is_value(*m.t1)) return under(m.t1, [&](TermPtr t) { return mk::app(t, m.t2); });
      if (!is_value(*m.t2)) return under(m.t2, [&](TermPtr t) { return mk::app(m.t1, t); });
      return redex(c, mp, fresh);
    case TermKind::Tensor:
      if (!is_value(*m.t1)) return under(m.t1, [&](TermPtr t) { return mk::tensor(t, m.t2); });
      return under(m.t2, [&](TermPtr t) { return mk::tensor(m.t1, t); });
    case TermKind::InL: return under(m.t1, [](TermPtr t) { return mk::inl(t); });
    case TermKind::InR: return under(m.t1, [](TermPtr t) { return mk::inr(t); });
    case TermKind::LetUnit:
    case TermKind::LetTensor:
    case TermKind::Match:
      if (!is_value(*m.t1)) return under(m.t1, [&](TermPtr t) { return with_children(m, t, m.t2, m.t3); });
      return redex(c, mp, fresh);
    case TermKind::LetRec:
    case TermKind::LetRecN: return redex(c, mp, fresh);
    default: stuck(m);
  }
}

}  // namespace

std::vector<Transition> step(const Closure& c, FreshNames& fresh) {
  if (term_status(*c.term) != TermStatus::Reducible) return {};
  std::vector<Branch> bs = reduce(c, c.term, fresh);
  std::vector<Transition> out;
  out.reserve(bs.size());
  for (auto& b : bs) {
    Closure next{std::move(b.state), std::move(b.linking), std::move(b.term)};
    check_linking(next);
    out.push_back({b.prob, std::move(next), std::move(b.rule)});
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void first_occurrence(const Term& t, const std::map<std::string, int>& linking, std::vector<std::string>& order,
                      std::multiset<std::string>& bound) {
  if (t.kind == TermKind::Var) {
    if (!bound.count(t.var) && linking.count(t.var) &&
        std::find(order.begin(), order.end(), t.var) == order.end())
      order.push_back(t.var);
    return;
  }
  // Binders never capture linked names in closures produced by the machine,
  // but respect shadowing anyway.
  std::vector<std::string> names;
  if (!t.var.empty() && t.kind != TermKind::Var) names.push_back(t.var);
  if (!t.var2.empty()) names.push_back(t.var2);
  for (const auto& x : names) bound.insert(x);
  for (const TermPtr& ch : {t.t1, t.t2, t.t3})
    if (ch) first_occurrence(*ch, linking, order, bound);
  for (const auto& x : names) bound.erase(bound.find(x));
}

}  // namespace

Closure canonicalize(const Closure& c) {
  std::vector<std::string> order;
  std::multiset<std::string> bound;
  first_occurrence(*c.term, c.linking, order, bound);
  for (const auto& [x, idx] : c.linking)
    if (std::find(order.begin(), order.end(), x) == order.end()) order.push_back(x);
  std::vector<int> perm;
  std::map<std::string, int> l;
  VarSet new_names;
  for (size_t i = 0; i < order.size(); ++i) {
    perm.push_back(c.linking.at(order[i]));
    new_names.insert("q" + std::to_string(i + 1));
  }
  // Rename binders out of the way first, then the free variables.
  VarSet avoid = new_names;
  for (const auto& x : order) avoid.insert(x);
  TermPtr t = rename_apart(c.term, avoid);
  std::vector<std::string> tmp;
  VarSet used = all_names(*t);
  used.insert(new_names.begin(), new_names.end());
  for (const auto& x : order) {
    std::string h = fresh_name("_tmp", used);
    used.insert(h);
    tmp.push_back(h);
    t = substitute(t, mk::var(h), x);
  }
  for (size_t i = 0; i < order.size(); ++i) {
    std::string q = "q" + std::to_string(i + 1);
    t = substitute(t, mk::var(q), tmp[i]);
    l[q] = static_cast<int>(i) + 1;
  }
  return Closure{permute_qubits(c.state, perm), l, t};
}

bool closure_equivalent(const Closure& a, const Closure& b, double tol) {
  Closure ca = canonicalize(a), cb = canonicalize(b);
  if (!alpha_equal(ca.term, cb.term)) return false;
  return equal_up_to_phase(ca.state, cb.state, tol);
}

double OutcomeDistribution::total_value_mass() const {
  double s = 0;
  for (const auto& o : outcomes) s += o.prob;
  return s;
}

OutcomeDistribution eval_distribution(const Closure& c, const EvalOptions& opts, const TraceFn& trace) {
  OutcomeDistribution dist;
  FreshNames fresh;
  struct Item {
    Closure c;
    double prob;
    std::size_t depth;
  };
  std::vector<Item> stack{{c, 1.0, 0}};
  std::vector<std::string> keys;
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    TermStatus st = term_status(*it.c.term);
    if (st == TermStatus::Value) {
      Closure canon = canonicalize(it.c);
      std::string key = pretty(*alpha_canonical(canon.term));
      bool merged = false;
      for (size_t i = 0; i < dist.outcomes.size(); ++i) {
        if (keys[i] == key && equal_up_to_phase(dist.outcomes[i].closure.state, canon.state)) {
          dist.outcomes[i].prob += it.prob;
          merged = true;
          break;
        }
      }
      if (!merged) {
        dist.outcomes.push_back({canon, it.prob});
        keys.push_back(key);
      }
      continue;
    }
    if (st == TermStatus::Blocked) {
      dist.blocked += it.prob;
      continue;
    }
    if (it.depth >= opts.max_steps) {
      dist.residual += it.prob;
      continue;
    }
    std::vector<Transition> ts = step(it.c, fresh);
    ++dist.steps_explored;
    // Push in reverse so outcome 0 is explored first.
    for (auto t = ts.rbegin(); t != ts.rend(); ++t) {
      double p = it.prob * t->prob;
      if (trace) trace(it.depth + 1, p, t->rule, t->next);
      if (p < opts.prune_eps) {
        dist.residual += p;
        continue;
      }
      stack.push_back({std::move(t->next), p, it.depth + 1});
    }
  }
  return dist;
}

SampleResult sample(const Closure& c, std::uint64_t seed, std::size_t max_steps, const TraceFn& trace) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  FreshNames fresh;
  Closure cur = c;
  double path_prob = 1.0;
  for (std::size_t n = 0;; ++n) {
    TermStatus st = term_status(*cur.term);
    if (st == TermStatus::Value) return {SampleStatus::Value, cur, n};
    if (st == TermStatus::Blocked) return {SampleStatus::Blocked, cur, n};
    if (n >= max_steps) return {SampleStatus::Timeout, cur, n};
    std::vector<Transition> ts = step(cur, fresh);
    size_t pick = 0;
    if (ts.size() > 1) {
      double u = unif(rng), acc = 0;
      pick = ts.size() - 1;
      for (size_t i = 0; i < ts.size(); ++i) {
        acc += ts[i].prob;
        if (u < acc) {
          pick = i;
          break;
        }
      }
    }
    path_prob *= ts[pick].prob;
    if (trace) trace(n + 1, path_prob, ts[pick].rule, ts[pick].next);
    cur = std::move(ts[pick].next);
  }
}

HaltBounds halt_probability(const Closure& c, std::size_t max_steps, double prune_eps) {
  OutcomeDistribution d = eval_distribution(c, {max_steps, prune_eps});
  return {d.total_value_mass(), d.residual};
}

}  // namespace qlam

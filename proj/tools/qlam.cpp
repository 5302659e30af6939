// qlam: check, run, denote and cross-validate quantum lambda programs.
//
// Exit codes: 0 success, 1 type error, 2 parse or usage error,
// 3 runtime or verification failure.

#include "qlam/adequacy.hpp"
#include "qlam/denote.hpp"
#include "qlam/machine.hpp"
#include "qlam/syntax.hpp"
#include "qlam/typing.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace qlam;

enum Exit { kOk = 0, kTypeError = 1, kUsage = 2, kFailure = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  Program program;
  DerivationPtr derivation;
};

Loaded load(const std::string& path) {
  Loaded l;
  l.program = parse_program(read_file(path));
  l.derivation = typecheck(Context(), l.program.term, l.program.declared_type);
  return l;
}

std::string fmt(double x) {
  std::ostringstream ss;
  ss << std::setprecision(12) << x;
  return ss.str();
}

double env_tol(double fallback) {
  const char* s = std::getenv("QLAM_TOL");
  if (!s || !*s) return fallback;
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || !(v > 0)) throw UsageError(std::string("QLAM_TOL is not a positive number: ") + s);
  return v;
}

std::string closure_line(const Closure& c, const Type& type) {
  std::string out = show_value(*c.term, type);
  if (c.state.num_qubits() > 0) out += "  state " + to_string(c);
  return out;
}

int cmd_check(const std::string& file, bool derivation) {
  Loaded l = load(file);
  std::cout << "|- " << pretty(l.program.term) << " : " << to_string(l.derivation->type) << "\n";
  if (derivation) std::cout << print_derivation(*l.derivation);
  return kOk;
}

struct RunFlags {
  std::string mode = "distribution";
  std::uint64_t seed = 0;
  std::size_t max_steps = 10000;
  double prune_eps = 1e-12;
  bool trace = false;
};

int cmd_run(const std::string& file, const RunFlags& f) {
  Loaded l = load(file);
  const Type& type = *l.derivation->type;
  Closure start = make_closure(l.program.term);
  TraceFn trace;
  if (f.trace)
    trace = [](std::size_t depth, double prob, const std::string& rule, const Closure& c) {
      std::cout << "step depth=" << depth << " prob=" << fmt(prob) << " rule=" << rule << " " << to_string(c) << "\n";
    };
  if (f.mode == "sample") {
    SampleResult r = sample(start, f.seed, f.max_steps, trace);
    switch (r.status) {
      case SampleStatus::Value: std::cout << "outcome " << closure_line(r.closure, type) << "\n"; break;
      case SampleStatus::Blocked: std::cout << "blocked\n"; break;
      case SampleStatus::Timeout: std::cout << "note TIMEOUT after " << r.steps << " steps\n"; break;
    }
    std::cout << "steps " << r.steps << "\n";
    return kOk;
  }
  if (f.mode != "distribution") throw UsageError("--mode must be 'distribution' or 'sample'");
  OutcomeDistribution d = eval_distribution(start, {f.max_steps, f.prune_eps}, trace);
  for (const auto& o : d.outcomes) std::cout << "outcome " << fmt(o.prob) << " " << closure_line(o.closure, type) << "\n";
  std::cout << "blocked " << fmt(d.blocked) << "\n";
  std::cout << "residual " << fmt(d.residual) << "\n";
  if (d.residual > 0) std::cout << "note TIMEOUT: mass cut at max-steps " << f.max_steps << " or pruned\n";
  return kOk;
}

int cmd_denote(const std::string& file, const TruncationConfig& t, const std::string& out) {
  Loaded l = load(file);
  Denotation d = denote_term(*l.derivation, t);
  std::cout << "type " << to_string(l.derivation->type) << "\n";
  std::cout << "source " << d.morphism.src()->summary() << "\n";
  std::cout << "target " << d.morphism.tgt()->summary() << "\n";
  std::cout << "entries " << d.morphism.entries().size() << "\n";
  std::cout << "converged " << (d.converged ? "yes" : "no") << " fix_iterations " << d.max_fix_iterations << "\n";
  if (out.empty()) {
    for (const auto& [k, s] : d.morphism.entries()) {
      std::cout << "entry " << (*d.morphism.src())[static_cast<std::size_t>(k.first)].label->key << " -> "
                << (*d.morphism.tgt())[static_cast<std::size_t>(k.second)].label->key << "\n";
      // A map out of a one-dimensional space is printed as its image of 1.
      const cpm::CMatrix shown = s.in_dim() == 1 ? s.apply(cpm::CMatrix::Identity(1, 1)) : s.dense();
      std::cout << shown.format(Eigen::IOFormat(6, 0, " ", "\n", "  ")) << "\n";
    }
  } else {
    std::ofstream os(out);
    if (!os) throw UsageError("cannot write '" + out + "'");
    os << cpm::serialize(d.morphism) << "\n";
    std::cout << "wrote " << out << "\n";
  }
  return kOk;
}

void print_report(const AdequacyReport& r) {
  std::cout << "hash=" << r.source_hash << " denot=" << fmt(r.denot) << " halt_lower=" << fmt(r.halt_lower)
            << " residual=" << fmt(r.residual) << " finitary=" << (r.finitary ? "yes" : "no")
            << " verdict=" << to_string(r.verdict) << "\n";
}

struct AdequacyFlags {
  std::string file;
  int fuzz = 0;
  bool letrec = false;
  std::uint64_t seed = 0;
  int budget = 10;
  AdequacyOptions opts;
};

int cmd_adequacy(const AdequacyFlags& f, TruncationConfig t, bool explicit_bounds) {
  if (f.fuzz <= 0) {
    if (f.file.empty()) throw UsageError("adequacy needs a file or --fuzz N");
    Program p = parse_program(read_file(f.file));
    if (!explicit_bounds && is_finitary(*p.term)) t = static_truncation(p.term, t);
    AdequacyReport r = check_adequacy(p.term, t, f.opts);
    print_report(r);
    return r.verdict == Verdict::Pass ? kOk : kFailure;
  }
  int passed = 0;
  for (int i = 0; i < f.fuzz; ++i) {
    const std::uint64_t s = f.seed + static_cast<std::uint64_t>(i);
    TermPtr m = f.letrec ? random_letrec_program(s, f.budget) : random_finitary_program(s, f.budget);
    AdequacyReport r = check_adequacy(m, explicit_bounds ? t : static_truncation(m, t), f.opts);
    std::cout << "seed=" << s << " ";
    print_report(r);
    if (r.verdict == Verdict::Pass) ++passed;
  }
  std::cout << "summary " << passed << "/" << f.fuzz << " PASS\n";
  return passed == f.fuzz ? kOk : kFailure;
}

int cmd_compare(const std::string& a, const std::string& b, double tol) {
  auto diffs = cpm::diff(cpm::deserialize(read_file(a)), cpm::deserialize(read_file(b)));
  double worst = 0;
  for (const auto& d : diffs) {
    std::cout << "entry " << d.src << " -> " << d.tgt << " max_norm=" << fmt(d.max_norm) << "\n";
    worst = std::max(worst, d.max_norm);
  }
  std::cout << "max " << fmt(worst) << " tol " << fmt(tol) << " " << (worst <= tol ? "EQUAL" : "DIFFERENT") << "\n";
  return worst <= tol ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum lambda calculus: type checker, QRAM machine and CPM denotations"};
  app.require_subcommand(1);

  std::string file, out, file_b;
  bool derivation = false;
  auto* check = app.add_subcommand("check", "Typecheck a program and print its judgement");
  check->add_option("file", file, "Program (.qlam)")->required();
  check->add_flag("--derivation", derivation, "Also print the derivation tree");

  RunFlags rf;
  auto* run = app.add_subcommand("run", "Run a closed program on the QRAM machine");
  run->add_option("file", file, "Program (.qlam)")->required();
  run->add_option("--mode", rf.mode, "distribution or sample")->check(CLI::IsMember({"distribution", "sample"}));
  run->add_option("--seed", rf.seed, "Seed for sample mode");
  run->add_option("--max-steps", rf.max_steps, "Reduction depth bound");
  run->add_option("--prune-eps", rf.prune_eps, "Drop branches below this probability");
  run->add_flag("--trace", rf.trace, "Print every reduction step");

  TruncationConfig tc;
  auto add_bounds = [&](CLI::App* c) {
    c->add_option("--list-max", tc.list_max, "Longest list kept in the web");
    c->add_option("--bang-max", tc.bang_max, "Largest multiset kept in !A");
    c->add_option("--fix-iters", tc.fix_iters, "Iteration cap for letrec fixpoints");
  };
  auto* denote = app.add_subcommand("denote", "Interpret a program as a CPM morphism");
  denote->add_option("file", file, "Program (.qlam)")->required();
  add_bounds(denote);
  denote->add_option("--out", out, "Write the serialized morphism here");

  AdequacyFlags af;
  auto* adequacy = app.add_subcommand("adequacy", "Compare denotation and halting probability of unit programs");
  adequacy->add_option("file", af.file, "Program (.qlam) of type unit");
  adequacy->add_option("--fuzz", af.fuzz, "Check N generated programs instead of a file");
  adequacy->add_flag("--letrec", af.letrec, "Generate programs with unbounded letrec");
  adequacy->add_option("--seed", af.seed, "First seed for --fuzz");
  adequacy->add_option("--budget", af.budget, "Size budget of generated programs");
  adequacy->add_option("--max-steps", af.opts.max_steps, "Reduction depth bound");
  adequacy->add_option("--tol", af.opts.tol, "Comparison tolerance");
  add_bounds(adequacy);

  auto* compare = app.add_subcommand("compare", "Diff two serialized morphisms entry by entry");
  compare->add_option("a", file, "First morphism file")->required();
  compare->add_option("b", file_b, "Second morphism file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    tc.matrix_tol = env_tol(tc.matrix_tol);
    if (*check) return cmd_check(file, derivation);
    if (*run) return cmd_run(file, rf);
    if (*denote) return cmd_denote(file, tc, out);
    if (*adequacy) {
      bool explicit_bounds = adequacy->count("--list-max") + adequacy->count("--bang-max") > 0;
      return cmd_adequacy(af, tc, explicit_bounds);
    }
    if (*compare) return cmd_compare(file, file_b, tc.matrix_tol);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const TypeError& e) {
    std::cerr << "type error: " << e.what() << "\n";
    return kTypeError;
  } catch (const NotUnitType& e) {
    std::cerr << "NotUnitType: " << e.what() << "\n";
    return kFailure;
  } catch (const NotClosed& e) {
    std::cerr << "NotClosed: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

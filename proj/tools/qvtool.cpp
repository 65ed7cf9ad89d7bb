// qvtool: batch front end for saturations, complement operators, word
// problems, Pi01 conversion, quasiperiodicity tables and the verify suites.
//
// Exit codes: 0 success (decide: Equal), 1 failure (decide: NotEqual,
// verify: a suite failed), 2 usage or parse error, 3 guard violation,
// 4 Undecided, 5 Pi01 precondition failure.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qv/engine.hpp"
#include "qv/finite.hpp"
#include "qv/group.hpp"
#include "qv/ideal.hpp"
#include "qv/operators.hpp"
#include "qv/subshift.hpp"
#include "qv/text.hpp"
#include "qv/verify.hpp"

namespace {

using namespace qv;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitGuard = 3;
constexpr int kExitUndecided = 4;
constexpr int kExitPrecondition = 5;

constexpr std::uint64_t kGroupBudget = 1u << 16;
constexpr std::uint64_t kGroupEffort = 8;
constexpr std::uint64_t kIdealEffort = 64;
constexpr std::size_t kSubshiftLength = 6;
constexpr std::size_t kGroupLength = 4;
constexpr std::size_t kIdealHeight = 4;

const char* kPolyGrammar =
    "Polynomial literals (no spaces):\n"
    "  poly := \"0\" | [\"-\"] term ((\"+\" | \"-\") term)*\n"
    "  term := coef | [coef] \"t\" [\"^\" digits]\n"
    "  coef := digits [\"/\" digits]\n"
    "  e.g. 3/2t^2-1t+4, t^2+1, -t\n";

class UsageError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

struct Global {
  std::optional<std::uint64_t> budget;
  std::optional<std::uint64_t> cap;
  bool steps = false;
  std::uint64_t seed = 0;
  bool porcelain = false;
};

class Printer {
 public:
  explicit Printer(const Global& g) : g_(g) {}

  void header(const std::string& key, const std::string& value) const {
    if (g_.porcelain)
      std::cout << "#\t" << key << '\t' << value << '\n';
    else
      std::cout << "# " << key << ": " << value << '\n';
  }
  void record(const std::vector<std::string>& fields) const {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) std::cout << (g_.porcelain ? '\t' : ' ');
      std::cout << fields[i];
    }
    std::cout << '\n';
  }
  void atoms(const AtomEnumeration& e, const std::function<std::string(AtomId)>& show) const {
    for (const auto& em : e.log()) {
      if (g_.steps || g_.porcelain)
        record({show(em.atom), std::to_string(em.step)});
      else
        record({show(em.atom)});
    }
  }

 private:
  const Global& g_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A loaded instance: its rule stream, atom display and the defaults used
/// when no flag overrides them.
struct Instance {
  std::string kind;
  RuleStreamPtr stream;
  OperatorPtr presentation_op;
  std::function<std::string(AtomId)> show;
  std::function<AtomId(const std::string&)> read;
  std::function<std::vector<AtomId>(std::size_t)> candidates;
  AtomSet file_presentation;  // relators, forbidden words
  std::vector<AtomId> top;     // presents I
  std::uint64_t budget = 0;
  std::uint64_t effort = 0;
  std::size_t length = 0;      // candidate length or height
  std::optional<finite::FiniteQuasivariety> finite;
  std::size_t group_k = 0;
};

std::string header_kind(const std::string& content) {
  std::istringstream in(content);
  text::LineReader reader(in);
  auto h = reader.next_header();
  if (h.size() < 2 || h[0] != "universe")
    throw ParseError("expected 'universe <kind> ...'", reader.line());
  return h[1];
}

std::vector<AtomId> finite_top(const finite::FiniteQuasivariety& q) {
  finite::Subset full = finite::full_set(q.n);
  finite::Subset a = full;
  for (std::size_t i = 0; i < q.n; ++i) {
    finite::Subset t = a & ~(finite::Subset{1} << i);
    if (finite::brute_closure(q, t) == full) a = t;
  }
  if (a == 0) a = 1;
  auto s = finite::from_mask(a);
  return {s.begin(), s.end()};
}

Instance load_file(const std::string& path, std::optional<std::size_t> length) {
  std::string content = read_file(path);
  std::string kind = header_kind(content);
  std::istringstream in(content);
  Instance inst;
  inst.kind = kind;
  if (kind == "finite") {
    auto q = finite::parse_rule_file(in);
    std::size_t n = q.n;
    inst.stream = q.stream();
    inst.show = [](AtomId a) { return a.index.str(); };
    inst.read = [n](const std::string& s) {
      auto v = text::parse_u64(s, 0);
      if (v >= n) throw ParseError("atom " + s + " outside the universe");
      return AtomId(v);
    };
    inst.candidates = [n](std::size_t) {
      std::vector<AtomId> v;
      for (std::size_t i = 0; i < n; ++i) v.emplace_back(i);
      return v;
    };
    inst.top = finite_top(q);
    inst.budget = q.rules.size();
    inst.effort = q.rules.size() + 1;
    inst.length = n;
    inst.finite = std::move(q);
  } else if (kind == "subshift") {
    auto p = subshift::parse_sft_file(in);
    std::size_t s = p.alphabet.size();
    auto alphabet = p.alphabet;
    inst.length = length.value_or(kSubshiftLength);
    inst.stream = subshift::subshift_rules(s);
    inst.show = [alphabet, s](AtomId a) { return alphabet.format(subshift::word_of(a, s)); };
    inst.read = [alphabet, s](const std::string& w) {
      return subshift::atom_of(alphabet.parse(w), s);
    };
    inst.candidates = [s](std::size_t len) {
      std::vector<AtomId> v;
      for (const auto& w : subshift::words_upto(s, len)) v.push_back(subshift::atom_of(w, s));
      return v;
    };
    for (const auto& w : p.forbidden) inst.file_presentation.insert(subshift::atom_of(w, s));
    inst.top = {subshift::atom_of(subshift::Word{}, s)};
    inst.budget = subshift::sft_closure_budget(s, subshift::max_forbidden_length(p), inst.length);
    inst.effort = inst.length + 2;
  } else if (kind == "group") {
    auto p = group::parse_group_file(in);
    std::size_t k = p.k;
    inst.group_k = k;
    inst.length = length.value_or(kGroupLength);
    inst.stream = group::group_rules(k);
    inst.show = [k](AtomId a) { return group::format_word(group::word_of(a, k)); };
    inst.read = [k](const std::string& w) { return group::atom_of(group::parse_word(w, k), k); };
    inst.candidates = [k](std::size_t len) {
      std::vector<AtomId> v;
      for (const auto& w : group::ball(k, len)) v.push_back(group::atom_of(w, k));
      return v;
    };
    for (const auto& r : p.relators) inst.file_presentation.insert(group::atom_of(r, k));
    for (std::size_t i = 0; i < k; ++i)
      inst.top.push_back(group::atom_of(group::ReducedWord::generator(i), k));
    inst.budget = kGroupBudget;
    inst.effort = kGroupEffort;
  } else {
    throw ParseError("unknown universe kind '" + kind + "'", 1);
  }
  inst.presentation_op = presentation_operator(inst.stream);
  return inst;
}

Instance load_ideal(const std::string& literal, std::optional<std::size_t> height) {
  Instance inst;
  inst.kind = "ideal";
  ideal::Poly p = ideal::parse_poly(literal);
  inst.length = height.value_or(kIdealHeight);
  inst.stream = ideal::ideal_rules();
  inst.presentation_op = ideal::ideal_operator();
  inst.show = [](AtomId a) { return ideal::format_poly(ideal::poly_of(a)); };
  inst.read = [](const std::string& s) { return ideal::atom_of(ideal::parse_poly(s)); };
  inst.candidates = [](std::size_t h) {
    std::vector<AtomId> v;
    for (const auto& q : ideal::polys_upto(h)) v.push_back(ideal::atom_of(q));
    return v;
  };
  inst.file_presentation = {ideal::atom_of(p)};
  inst.top = {ideal::atom_of(ideal::Poly::constant(1))};
  inst.budget = ideal_closure_budget(p, 2);
  inst.effort = kIdealEffort;
  return inst;
}

struct Source {
  std::string file;
  std::string ideal;
  std::optional<std::size_t> length;
  std::vector<std::string> present;
  bool present_given = false;
};

Instance load(const Source& src) {
  if (!src.ideal.empty()) {
    if (!src.file.empty()) throw UsageError("give either an instance file or --ideal");
    return load_ideal(src.ideal, src.length);
  }
  if (src.file.empty()) throw UsageError("an instance file or --ideal is required");
  return load_file(src.file, src.length);
}

AtomSet presentation_of(const Instance& inst, const Source& src) {
  if (!src.present_given) return inst.file_presentation;
  AtomSet r;
  for (const auto& tok : src.present)
    for (const auto& t : text::split_ws(tok)) r.insert(inst.read(t));
  return r;
}

void add_source_options(CLI::App* cmd, Source& src) {
  cmd->add_option("file", src.file, "Instance file (universe finite|subshift|group)");
  cmd->add_option("--ideal", src.ideal, "Ideal instance: the generator p of (p) in Q[t]");
  cmd->add_option("--length", src.length,
                  "Longest candidate word (subshift, group) or largest height (ideal)");
  cmd->add_option("--present", src.present,
                  "Presentation atoms (default: none for finite files, the file's "
                  "forbidden words or relators, p for --ideal)")
      ->each([&src](const std::string&) { src.present_given = true; });
}

void print_instance_header(const Printer& out, const Instance& inst, std::uint64_t budget) {
  out.header("instance", inst.kind);
  out.header("budget", std::to_string(budget) +
                           (budget == inst.budget ? " (default)" : ""));
}

// ---------------------------------------------------------------------------

int cmd_saturate(const Global& g, const Source& src) {
  Instance inst = load(src);
  Printer out(g);
  std::uint64_t budget = g.budget.value_or(inst.budget);
  print_instance_header(out, inst, budget);
  auto res = closure(presentation_of(inst, src), *inst.stream, budget);
  out.header("fixpoint", res.fixpoint_certified ? "certified" : "not certified");
  out.atoms(res.derived, inst.show);
  return 0;
}

struct ComplementFlags {
  std::string witness;
  bool uniform = false;
  std::string family;
  std::vector<std::string> discriminator;
  bool discriminator_given = false;
  std::optional<std::uint64_t> effort;
};

int cmd_complement(const Global& g, const Source& src, const ComplementFlags& c) {
  Instance inst = load(src);
  if (inst.kind == "ideal") ideal::check_irreducible(ideal::parse_poly(src.ideal));
  Printer out(g);
  std::uint64_t budget = g.budget.value_or(inst.budget);
  std::uint64_t effort = c.effort.value_or(inst.effort);
  int chosen = !c.witness.empty() + c.uniform + !c.family.empty() + c.discriminator_given;
  if (chosen > 1) throw UsageError("choose one of --witness, --uniform, --family, --discriminator");

  OperatorPtr op;
  std::string label;
  if (!c.witness.empty()) {
    op = complement_op_maximal(inst.presentation_op, inst.read(c.witness));
    label = "maximal, witness " + c.witness;
  } else if (!c.family.empty()) {
    if (c.family != "z") throw UsageError("unknown family '" + c.family + "' (known: z)");
    if (inst.kind != "group" || inst.group_k != 1)
      throw UsageError("--family z needs a 1-generator group file");
    op = complement_op_below_family(inst.presentation_op, group::z_family(), group::kZFamilyProbe);
    if (!c.effort) effort = group::kZFamilyEffort;
    label = "below family z";
  } else if (c.discriminator_given) {
    AtomEnumeration d;
    std::uint64_t step = 0;
    for (const auto& tok : c.discriminator)
      for (const auto& t : text::split_ws(tok)) d.emit(inst.read(t), step++);
    if (d.empty()) throw UsageError("--discriminator needs at least one atom");
    op = complement_op_discriminated(inst.presentation_op, d);
    label = "discriminated";
  } else if (inst.kind == "ideal" && !c.uniform) {
    op = complement_op_maximal(inst.presentation_op, inst.top.front());
    label = "maximal, witness 1";
  } else {
    op = complement_op_uniform(inst.presentation_op, inst.top);
    std::string tops;
    for (auto a : inst.top) tops += (tops.empty() ? "" : " ") + inst.show(a);
    label = "uniform, top presentation " + tops;
  }

  print_instance_header(out, inst, budget);
  out.header("operator", label);
  out.header("effort", std::to_string(effort));
  out.header(inst.kind == "ideal" ? "max height" : "candidates up to",
             std::to_string(inst.length));
  auto source = closure(presentation_of(inst, src), *inst.stream, budget).derived;
  auto cands = inst.candidates(inst.length);
  auto res = apply_operator_guided(*op, source, cands, effort);
  out.atoms(res.emitted, inst.show);
  return 0;
}

int cmd_decide(const Global& g, const std::string& file, const std::string& word) {
  auto content = read_file(file);
  std::istringstream in(content);
  if (header_kind(content) != "group") throw UsageError("decide needs a group file");
  auto p = group::parse_group_file(in);
  group::ReducedWord w = group::parse_word(word, p.k);
  std::uint64_t cap = g.cap.value_or(group::kDefaultDecideCap);
  Printer out(g);
  out.header("cap", std::to_string(cap) + (g.cap ? "" : " (default)"));
  auto d = group::decide_word_simple(p, w, cap);
  out.record({group::to_string(d.verdict), "ticks", std::to_string(d.ticks)});
  switch (d.verdict) {
    case group::Verdict::kEqual: return 0;
    case group::Verdict::kNotEqual: return kExitFail;
    case group::Verdict::kUndecided: return kExitUndecided;
  }
  return kExitUndecided;
}

int cmd_pi01(const Global& g, const std::string& file, bool verify_points,
             const std::string& output) {
  auto content = read_file(file);
  std::istringstream in(content);
  auto fam = finite::parse_partial_map_file(in);
  auto diag = finite::diagnose_class(fam);
  if (!diag.ok) throw PreconditionError("precondition failed: " + diag.reason);
  auto q = finite::pi01_to_rules(fam);
  std::string rules = finite::format_rule_file(q);
  if (!output.empty()) {
    std::ofstream os(output);
    if (!os) throw UsageError("cannot write " + output);
    os << rules;
  } else {
    std::cout << rules;
  }
  if (verify_points) {
    std::vector<finite::Subset> cls;
    for (finite::Subset x = 0; x <= finite::full_set(fam.n); ++x)
      if (fam.in_class(x)) cls.push_back(x);
    bool eq = finite::all_points(q) == cls;
    Printer(g).record({eq ? "EQUAL" : "DIFFERENT"});
    if (!eq) return kExitFail;
  }
  return 0;
}

int cmd_quasiperiodicity(const Global& g, const std::string& file, const std::string& substitution,
                         std::size_t max_n) {
  subshift::Language lang;
  std::string name;
  if (!substitution.empty()) {
    if (!file.empty()) throw UsageError("give either an SFT file or --substitution");
    if (substitution != "fibonacci")
      throw UsageError("unknown substitution '" + substitution + "' (known: fibonacci)");
    lang = subshift::SubstitutionShift::fibonacci().language();
    name = "substitution fibonacci";
  } else {
    if (file.empty()) throw UsageError("an SFT file or --substitution is required");
    auto content = read_file(file);
    std::istringstream in(content);
    auto p = subshift::parse_sft_file(in);
    if (!subshift::is_minimal_sft(p)) throw Error("not minimal: the SFT is not a single periodic orbit");
    lang = subshift::sft_language(p);
    name = "sft " + file;
  }
  std::uint64_t cap = g.cap.value_or(2 * max_n + 16);
  Printer out(g);
  out.header("source", name);
  out.header("cap", std::to_string(cap) + (g.cap ? "" : " (default)"));
  for (std::size_t n = 1; n <= max_n; ++n) {
    auto v = subshift::quasiperiodicity(lang, n, cap);
    out.record({std::to_string(n), v ? std::to_string(*v) : ">cap"});
  }
  return 0;
}

finite::Subset parse_subset(const std::string& text, std::size_t n) {
  std::string s;
  for (char c : text) s += (c == '{' || c == '}' || c == ',') ? ' ' : c;
  finite::Subset m = 0;
  for (const auto& t : text::split_ws(s)) {
    auto v = text::parse_u64(t, 0);
    if (v >= n) throw UsageError("atom " + t + " outside the universe");
    m |= finite::Subset{1} << v;
  }
  return m;
}

int cmd_lattice(const Global& g, const std::string& file, const std::string& xs,
                const std::string& ys) {
  auto content = read_file(file);
  std::istringstream in(content);
  auto q = finite::parse_rule_file(in);
  auto x = parse_subset(xs, q.n), y = parse_subset(ys, q.n);
  Printer out(g);
  out.record({"meet", finite::format_subset(finite::meet(q, x, y))});
  out.record({"join", finite::format_subset(finite::join(q, x, y))});
  return 0;
}

int cmd_verify(const Global& g, const std::vector<std::string>& selected, bool timing) {
  const auto& names = verify::suite_names();
  std::vector<std::string> run = selected.empty() ? names : selected;
  for (const auto& s : run)
    if (std::find(names.begin(), names.end(), s) == names.end())
      throw UsageError("unknown suite '" + s + "'");
  Printer out(g);
  out.header("seed", std::to_string(g.seed));
  bool all = true;
  for (const auto& s : run) {
    auto rep = *verify::run_suite(s, {g.seed});
    all = all && rep.passed();
    std::vector<std::string> rec = {s, rep.passed() ? "PASS" : "FAIL",
                                    "checks=" + std::to_string(rep.checks),
                                    "failures=" + std::to_string(rep.failure_count)};
    if (timing) {
      std::ostringstream t;
      t.precision(3);
      t << std::fixed << rep.seconds << "s";
      rec.push_back(t.str());
    }
    out.record(rec);
    if (!g.porcelain) {
      for (const auto& n : rep.notes) std::cout << "    " << n << '\n';
      for (const auto& f : rep.failures) std::cout << "    failure: " << f << '\n';
    }
  }
  return all ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasivariety saturations, complement operators and their oracles"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--budget", g.budget, "Rule-stream index budget (default per instance)");
  app.add_option("--cap", g.cap, "Tick cap for decide, length cap for quasiperiodicity");
  app.add_flag("--steps", g.steps, "Append the emission step to every atom");
  app.add_option("--seed", g.seed, "Seed for randomized suites")->default_val(0);
  app.add_flag("--porcelain", g.porcelain, "Tab-separated records");

  Source src;
  auto* sat = app.add_subcommand("saturate", "Print the closure of a presentation");
  add_source_options(sat, src);
  sat->footer(kPolyGrammar);

  ComplementFlags cf;
  auto* comp = app.add_subcommand("complement", "Print certified complement atoms");
  add_source_options(comp, src);
  comp->add_option("--witness", cf.witness, "Maximal point: an atom outside X");
  comp->add_flag("--uniform", cf.uniform, "Uniform operator over the instance top presentation");
  comp->add_option("--family", cf.family, "Maximal below a family (z: powers of a, k = 1)");
  comp->add_option("--discriminator", cf.discriminator, "Discriminator atoms in order")
      ->each([&cf](const std::string&) { cf.discriminator_given = true; });
  comp->add_option("--effort", cf.effort, "Witness search effort (default per instance)");
  comp->footer(kPolyGrammar);

  std::string dfile, dword;
  auto* dec = app.add_subcommand("decide", "Word problem of a simple group (exit 0/1/4)");
  dec->add_option("file", dfile, "Group presentation file")->required();
  dec->add_option("word", dword, "Word, e.g. abAB")->required();

  std::string pfile, pout;
  bool pverify = false;
  auto* pi = app.add_subcommand("pi01", "Convert a partial-map family to rules");
  pi->add_option("file", pfile, "Partial-map file")->required();
  pi->add_flag("--verify", pverify, "Compare the point sets exhaustively");
  pi->add_option("-o,--output", pout, "Write the rule file here instead of stdout");

  std::string qfile, qsub;
  std::size_t qmax = 4;
  auto* qp = app.add_subcommand("quasiperiodicity", "Table of n, g(n)");
  qp->add_option("file", qfile, "Minimal SFT file");
  qp->add_option("--substitution", qsub, "Built-in substitution (fibonacci)");
  qp->add_option("--max-n", qmax, "Largest n")->default_val(4);

  std::string lfile, lx, ly;
  auto* lat = app.add_subcommand("lattice", "Meet and join of two points");
  lat->add_option("file", lfile, "Finite rule file")->required();
  lat->add_option("x", lx, "Point, e.g. {0,2}")->required();
  lat->add_option("y", ly, "Point")->required();

  std::vector<std::string> suites;
  bool timing = false;
  auto* ver = app.add_subcommand("verify", "Run the verification suites");
  ver->add_option("--suite", suites, "Run only these suites");
  ver->add_flag("--timing", timing, "Report wall-clock seconds per suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sat) return cmd_saturate(g, src);
    if (*comp) return cmd_complement(g, src, cf);
    if (*dec) return cmd_decide(g, dfile, dword);
    if (*pi) return cmd_pi01(g, pfile, pverify, pout);
    if (*qp) return cmd_quasiperiodicity(g, qfile, qsub, qmax);
    if (*lat) return cmd_lattice(g, lfile, lx, ly);
    if (*ver) return cmd_verify(g, suites, timing);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const GuardError& e) {
    std::cerr << "guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const RangeError& e) {
    std::cerr << "guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const PreconditionError& e) {
    std::cerr << e.what() << '\n';
    return kExitPrecondition;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return 0;
}

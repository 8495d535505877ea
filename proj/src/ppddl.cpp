#include "clap/ppddl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace clap::ppddl {

namespace {
constexpr double kProbTolerance = 1e-9;
}

ParseError::ParseError(const std::string& msg, int line_, int col_)
    : std::runtime_error("parse error at " + std::to_string(line_) + ":" + std::to_string(col_) +
                         ": " + msg),
      line(line_),
      col(col_) {}

std::string to_string(const Atom& a) {
  std::string out = a.pred + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    out += a.args[i];
  }
  out += ")";
  return out;
}

void Effect::normalize() {
  auto norm = [](std::vector<Atom>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  norm(del);
  norm(add);
  for (const auto& a : add)
    if (std::binary_search(del.begin(), del.end(), a))
      throw ValidationError("effect adds and deletes the same atom: " + to_string(a));
}

void ActionSchema::normalize() {
  for (auto& e : eff) e.normalize();
  std::sort(pre.begin(), pre.end());
  pre.erase(std::unique(pre.begin(), pre.end()), pre.end());
  if (prob.size() != eff.size())
    throw ValidationError("action " + name + ": |prob| != |eff|");
  double sum = 0.0;
  for (double p : prob) {
    if (p < 0.0 || p > 1.0)
      throw ValidationError("action " + name + ": probability out of [0,1]");
    sum += p;
  }
  if (!eff.empty() && std::fabs(sum - 1.0) > kProbTolerance)
    throw ValidationError("action " + name + ": effect probabilities sum to " +
                          std::to_string(sum) + ", expected 1");
}

void TypeHierarchy::declare(const std::string& type, const std::string& par) {
  if (type == "object") return;
  parent[type] = par;
}

bool TypeHierarchy::known(const std::string& type) const {
  return type == "object" || parent.count(type) > 0;
}

bool TypeHierarchy::is_subtype(const std::string& sub, const std::string& super) const {
  std::string t = sub;
  while (true) {
    if (t == super) return true;
    if (t == "object") return false;
    auto it = parent.find(t);
    if (it == parent.end()) return false;
    t = it->second;
  }
}

const PredicateSchema* LiftedDomain::find_predicate(const std::string& n) const {
  for (const auto& p : predicates)
    if (p.name == n) return &p;
  return nullptr;
}

const ActionSchema* LiftedDomain::find_action(const std::string& n) const {
  for (const auto& a : actions)
    if (a.name == n) return &a;
  return nullptr;
}

ActionSchema* LiftedDomain::find_action(const std::string& n) {
  for (auto& a : actions)
    if (a.name == n) return &a;
  return nullptr;
}

namespace {

// Resolves the type of a term within an action schema scope.
std::string term_type(const std::string& term, const std::vector<TypedVar>& params) {
  for (const auto& p : params)
    if (p.name == term) return p.type;
  return "";
}

void validate_atom(const LiftedDomain& d, const Atom& atom, const std::vector<TypedVar>& params,
                   const std::string& ctx) {
  const PredicateSchema* ps = d.find_predicate(atom.pred);
  if (!ps) throw ValidationError(ctx + ": undeclared predicate " + atom.pred);
  if (atom.args.size() != ps->arity())
    throw ValidationError(ctx + ": arity mismatch for " + to_string(atom));
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (is_variable(atom.args[i])) {
      std::string t = term_type(atom.args[i], params);
      if (t.empty())
        throw ValidationError(ctx + ": unbound variable " + atom.args[i] + " in " + to_string(atom));
      if (!d.types.is_subtype(t, ps->params[i].type))
        throw ValidationError(ctx + ": type mismatch for " + to_string(atom));
    }
  }
}

}  // namespace

void LiftedDomain::validate() const {
  std::set<std::string> names;
  for (const auto& p : predicates)
    if (!names.insert(p.name).second)
      throw ValidationError("duplicate predicate " + p.name);
  for (const auto& p : predicates) {
    std::set<std::string> pn;
    for (const auto& v : p.params) {
      if (!pn.insert(v.name).second)
        throw ValidationError("predicate " + p.name + ": duplicate parameter " + v.name);
      if (!types.known(v.type))
        throw ValidationError("predicate " + p.name + ": unknown type " + v.type);
    }
  }
  std::set<std::string> anames;
  for (const auto& a : actions) {
    if (!anames.insert(a.name).second) throw ValidationError("duplicate action " + a.name);
    std::set<std::string> pn;
    for (const auto& v : a.params) {
      if (!pn.insert(v.name).second)
        throw ValidationError("action " + a.name + ": duplicate parameter " + v.name);
      if (!types.known(v.type))
        throw ValidationError("action " + a.name + ": unknown type " + v.type);
    }
    for (const auto& l : a.pre) validate_atom(*this, l.atom, a.params, "action " + a.name);
    for (const auto& e : a.eff) {
      for (const auto& at : e.del) validate_atom(*this, at, a.params, "action " + a.name);
      for (const auto& at : e.add) validate_atom(*this, at, a.params, "action " + a.name);
    }
    ActionSchema copy = a;
    copy.normalize();
  }
}

// ---------------------------------------------------------------------------
// S-expression reader
// ---------------------------------------------------------------------------

namespace {

struct Sexp {
  // leaf iff children empty and !list
  bool list = false;
  std::string token;
  std::vector<Sexp> children;
  int line = 0, col = 0;

  bool is_symbol() const { return !list; }
  const std::string& head() const {
    static const std::string empty;
    if (list && !children.empty() && children[0].is_symbol()) return children[0].token;
    return empty;
  }
};

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  std::vector<Sexp> read_all() {
    std::vector<Sexp> out;
    skip_ws();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_ws();
    }
    return out;
  }

 private:
  Sexp read() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, col_);
    if (text_[pos_] == '(') {
      Sexp s;
      s.list = true;
      s.line = line_;
      s.col = col_;
      advance();
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        s.children.push_back(read());
        skip_ws();
      }
      if (pos_ >= text_.size()) throw ParseError("missing ')'", s.line, s.col);
      advance();
      return s;
    }
    if (text_[pos_] == ')') throw ParseError("unexpected ')'", line_, col_);
    Sexp s;
    s.line = line_;
    s.col = col_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';') {
      s.token += text_[pos_];
      advance();
    }
    return s;
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

[[noreturn]] void fail(const Sexp& s, const std::string& msg) {
  throw ParseError(msg, s.line, s.col);
}

// Parses a PDDL typed list: (?x ?y - t ?z - u) or (a b - t).
std::vector<TypedVar> parse_typed_list(const Sexp& list, std::size_t from = 0) {
  std::vector<TypedVar> out;
  std::vector<std::string> pending;
  for (std::size_t i = from; i < list.children.size(); ++i) {
    const Sexp& c = list.children[i];
    if (!c.is_symbol()) fail(c, "expected symbol in typed list");
    if (c.token == "-") {
      if (i + 1 >= list.children.size()) fail(c, "missing type after '-'");
      const std::string& t = list.children[i + 1].token;
      for (auto& n : pending) out.push_back({n, t});
      pending.clear();
      ++i;
    } else {
      pending.push_back(c.token);
    }
  }
  for (auto& n : pending) out.push_back({n, "object"});
  return out;
}

Atom parse_atom(const Sexp& s) {
  if (!s.list || s.children.empty() || !s.children[0].is_symbol())
    fail(s, "expected atom");
  Atom a;
  a.pred = s.children[0].token;
  for (std::size_t i = 1; i < s.children.size(); ++i) {
    if (!s.children[i].is_symbol()) fail(s.children[i], "expected term");
    a.args.push_back(s.children[i].token);
  }
  return a;
}

const std::set<std::string> kUnsupported = {"when",     "forall", "oneof",
                                            "increase", "assign", "decrease",
                                            "exists"};

Literal parse_literal(const Sexp& s) {
  if (s.list && kUnsupported.count(s.head()))
    fail(s, "unsupported construct: " + s.head());
  if (s.list && s.head() == "not") {
    if (s.children.size() != 2) fail(s, "malformed (not ...)");
    return {parse_atom(s.children[1]), false};
  }
  return {parse_atom(s), true};
}

std::vector<Literal> parse_conjunction(const Sexp& s) {
  std::vector<Literal> out;
  if (s.list && s.head() == "and") {
    for (std::size_t i = 1; i < s.children.size(); ++i) out.push_back(parse_literal(s.children[i]));
  } else if (s.list && s.children.empty()) {
    // () = empty conjunction
  } else {
    out.push_back(parse_literal(s));
  }
  return out;
}

Effect parse_effect_conjunct(const Sexp& s) {
  Effect e;
  auto add_one = [&](const Sexp& c) {
    if (c.list && kUnsupported.count(c.head()))
      fail(c, "unsupported construct in effect: " + c.head());
    Literal l = parse_literal(c);
    if (l.positive)
      e.add.push_back(l.atom);
    else
      e.del.push_back(l.atom);
  };
  if (s.list && s.head() == "and") {
    for (std::size_t i = 1; i < s.children.size(); ++i) add_one(s.children[i]);
  } else if (s.list && s.children.empty()) {
    // empty effect
  } else {
    add_one(s);
  }
  return e;
}

void parse_action_effect(const Sexp& s, ActionSchema& a) {
  if (s.list && s.head() == "probabilistic") {
    if ((s.children.size() - 1) % 2 != 0) fail(s, "probabilistic expects prob/effect pairs");
    for (std::size_t i = 1; i + 1 < s.children.size(); i += 2) {
      const Sexp& ps = s.children[i];
      if (!ps.is_symbol()) fail(ps, "expected probability");
      char* end = nullptr;
      double p = std::strtod(ps.token.c_str(), &end);
      if (end == ps.token.c_str() || *end != '\0') fail(ps, "bad probability " + ps.token);
      a.prob.push_back(p);
      a.eff.push_back(parse_effect_conjunct(s.children[i + 1]));
    }
  } else {
    // deterministic effect -> single-entry probabilistic list
    if (s.list && kUnsupported.count(s.head()))
      fail(s, "unsupported construct in effect: " + s.head());
    a.prob.push_back(1.0);
    a.eff.push_back(parse_effect_conjunct(s));
  }
}

ActionSchema parse_action(const Sexp& s) {
  ActionSchema a;
  if (s.children.size() < 2 || !s.children[1].is_symbol()) fail(s, "malformed :action");
  a.name = s.children[1].token;
  bool have_effect = false;
  for (std::size_t i = 2; i < s.children.size(); ++i) {
    const Sexp& key = s.children[i];
    if (!key.is_symbol()) fail(key, "expected keyword in action body");
    if (i + 1 >= s.children.size()) fail(key, "missing value after " + key.token);
    const Sexp& val = s.children[++i];
    if (key.token == ":parameters") {
      a.params = parse_typed_list(val);
    } else if (key.token == ":precondition") {
      for (const auto& lit_src : parse_conjunction(val)) a.pre.push_back(lit_src);
      if (val.list && kUnsupported.count(val.head()))
        fail(val, "unsupported construct in precondition: " + val.head());
    } else if (key.token == ":effect") {
      parse_action_effect(val, a);
      have_effect = true;
    } else {
      fail(key, "unsupported action keyword " + key.token);
    }
  }
  if (!have_effect) {
    // an action with no effect clause behaves as a deterministic no-op
    a.prob.push_back(1.0);
    a.eff.push_back(Effect{});
  }
  a.normalize();
  return a;
}

const Sexp& expect_list(const Sexp& s, const std::string& what) {
  if (!s.list) fail(s, "expected list for " + what);
  return s;
}

}  // namespace

LiftedDomain parse_domain(const std::string& text) {
  Reader reader(text);
  auto top = reader.read_all();
  if (top.size() != 1 || top[0].head() != "define")
    throw ParseError("expected a single (define (domain ...)) form", 1, 1);
  const Sexp& def = top[0];
  LiftedDomain d;
  if (def.children.size() < 2 || def.children[1].head() != "domain" ||
      def.children[1].children.size() != 2)
    fail(def, "expected (domain NAME)");
  d.name = def.children[1].children[1].token;

  for (std::size_t i = 2; i < def.children.size(); ++i) {
    const Sexp& sec = expect_list(def.children[i], "domain section");
    const std::string& h = sec.head();
    if (h == ":requirements") {
      static const std::set<std::string> supported = {
          ":typing", ":probabilistic-effects", ":negative-preconditions", ":strips",
          ":equality"};
      for (std::size_t j = 1; j < sec.children.size(); ++j)
        if (!supported.count(sec.children[j].token))
          fail(sec.children[j], "unsupported requirement " + sec.children[j].token);
    } else if (h == ":types") {
      std::vector<std::string> pending;
      for (std::size_t j = 1; j < sec.children.size(); ++j) {
        const std::string& tok = sec.children[j].token;
        if (tok == "-") {
          if (j + 1 >= sec.children.size()) fail(sec, "missing parent type");
          const std::string& par = sec.children[j + 1].token;
          for (auto& t : pending) d.types.declare(t, par);
          pending.clear();
          ++j;
          d.types.declare(par);
        } else {
          pending.push_back(tok);
        }
      }
      for (auto& t : pending) d.types.declare(t);
    } else if (h == ":predicates") {
      for (std::size_t j = 1; j < sec.children.size(); ++j) {
        const Sexp& ps = expect_list(sec.children[j], "predicate");
        PredicateSchema p;
        if (ps.children.empty() || !ps.children[0].is_symbol()) fail(ps, "malformed predicate");
        p.name = ps.children[0].token;
        p.params = parse_typed_list(ps, 1);
        d.predicates.push_back(p);
      }
    } else if (h == ":action") {
      d.actions.push_back(parse_action(sec));
    } else if (h == ":functions" || h == ":constants") {
      fail(sec, "unsupported domain section " + h);
    } else {
      fail(sec, "unknown domain section " + h);
    }
  }
  d.validate();
  return d;
}

namespace {

ExistsConjunct parse_exists(const Sexp& s, const LiftedDomain& d) {
  if (s.children.size() != 3) fail(s, "malformed (exists (vars) body)");
  ExistsConjunct e;
  e.vars = parse_typed_list(expect_list(s.children[1], "exists variables"));
  const Sexp& body = s.children[2];
  if (body.list && body.head() == "and") {
    for (std::size_t i = 1; i < body.children.size(); ++i)
      e.body.push_back(parse_literal(body.children[i]));
  } else {
    e.body.push_back(parse_literal(body));
  }
  for (const auto& l : e.body) validate_atom(d, l.atom, e.vars, "goal exists");
  return e;
}

}  // namespace

TaskSpec parse_problem(const std::string& text, const LiftedDomain& domain) {
  Reader reader(text);
  auto top = reader.read_all();
  if (top.size() != 1 || top[0].head() != "define")
    throw ParseError("expected a single (define (problem ...)) form", 1, 1);
  const Sexp& def = top[0];
  TaskSpec t;
  if (def.children.size() < 2 || def.children[1].head() != "problem" ||
      def.children[1].children.size() != 2)
    fail(def, "expected (problem NAME)");
  t.name = def.children[1].children[1].token;

  auto object_type = [&](const std::string& o) -> std::string {
    for (const auto& [name, type] : t.objects)
      if (name == o) return type;
    return "";
  };
  auto check_ground_atom = [&](const Atom& a, const std::string& ctx) {
    const PredicateSchema* ps = domain.find_predicate(a.pred);
    if (!ps) throw ValidationError(ctx + ": undeclared predicate " + a.pred);
    if (a.args.size() != ps->arity())
      throw ValidationError(ctx + ": arity mismatch for " + to_string(a));
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      std::string ot = object_type(a.args[i]);
      if (ot.empty()) throw ValidationError(ctx + ": undeclared object " + a.args[i]);
      if (!domain.types.is_subtype(ot, ps->params[i].type))
        throw ValidationError(ctx + ": type mismatch for " + to_string(a));
    }
  };

  for (std::size_t i = 2; i < def.children.size(); ++i) {
    const Sexp& sec = expect_list(def.children[i], "problem section");
    const std::string& h = sec.head();
    if (h == ":domain") {
      if (sec.children.size() != 2) fail(sec, "malformed :domain");
      t.domain_name = sec.children[1].token;
      if (t.domain_name != domain.name)
        throw ValidationError("problem references domain " + t.domain_name + ", expected " +
                              domain.name);
    } else if (h == ":objects") {
      for (const auto& tv : parse_typed_list(sec, 1)) {
        if (!domain.types.known(tv.type))
          throw ValidationError("object " + tv.name + ": unknown type " + tv.type);
        t.objects.emplace_back(tv.name, tv.type);
      }
    } else if (h == ":init") {
      for (std::size_t j = 1; j < sec.children.size(); ++j) {
        Atom a = parse_atom(sec.children[j]);
        check_ground_atom(a, "init");
        t.init.push_back(a);
      }
    } else if (h == ":goal") {
      if (sec.children.size() != 2) fail(sec, "malformed :goal");
      const Sexp& g = sec.children[1];
      std::vector<const Sexp*> conjuncts;
      if (g.list && g.head() == "and") {
        for (std::size_t j = 1; j < g.children.size(); ++j) conjuncts.push_back(&g.children[j]);
      } else if (g.list && g.children.empty()) {
        // empty goal: every state is a goal state
      } else {
        conjuncts.push_back(&g);
      }
      for (const Sexp* c : conjuncts) {
        if (c->list && c->head() == "exists") {
          t.goal.exists.push_back(parse_exists(*c, domain));
        } else {
          Literal l = parse_literal(*c);
          check_ground_atom(l.atom, "goal");
          t.goal.literals.push_back(l);
        }
      }
    } else {
      fail(sec, "unknown problem section " + h);
    }
  }
  std::sort(t.init.begin(), t.init.end());
  t.init.erase(std::unique(t.init.begin(), t.init.end()), t.init.end());
  return t;
}

LiftedDomain parse_domain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open domain file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_domain(ss.str());
}

TaskSpec parse_problem_file(const std::string& path, const LiftedDomain& domain) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open problem file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), domain);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

std::string atom_sexp(const Atom& a) {
  std::string s = "(" + a.pred;
  for (const auto& arg : a.args) s += " " + arg;
  return s + ")";
}

std::string literal_sexp(const Literal& l) {
  return l.positive ? atom_sexp(l.atom) : "(not " + atom_sexp(l.atom) + ")";
}

std::string typed_list(const std::vector<TypedVar>& vars) {
  std::string s;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) s += " ";
    s += vars[i].name + " - " + vars[i].type;
  }
  return s;
}

std::string effect_sexp(const Effect& e) {
  if (e.empty()) return "(and)";
  std::string s = "(and";
  for (const auto& a : e.del) s += " (not " + atom_sexp(a) + ")";
  for (const auto& a : e.add) s += " " + atom_sexp(a);
  return s + ")";
}

std::string format_prob(double p) {
  std::ostringstream os;
  os.precision(12);
  os << p;
  return os.str();
}

}  // namespace

std::string serialize_domain(const LiftedDomain& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  os << "  (:requirements :typing :probabilistic-effects :negative-preconditions)\n";
  if (!d.types.parent.empty()) {
    os << "  (:types";
    for (const auto& [t, par] : d.types.parent) os << " " << t << " - " << par;
    os << ")\n";
  }
  os << "  (:predicates";
  for (const auto& p : d.predicates) {
    os << "\n    (" << p.name;
    if (!p.params.empty()) os << " " << typed_list(p.params);
    os << ")";
  }
  os << ")\n";
  for (const auto& a : d.actions) {
    ActionSchema n = a;
    n.normalize();
    os << "  (:action " << n.name << "\n";
    os << "    :parameters (" << typed_list(n.params) << ")\n";
    os << "    :precondition (and";
    for (const auto& l : n.pre) os << " " << literal_sexp(l);
    os << ")\n";
    os << "    :effect (probabilistic";
    for (std::size_t i = 0; i < n.eff.size(); ++i)
      os << " " << format_prob(n.prob[i]) << " " << effect_sexp(n.eff[i]);
    os << "))\n";
  }
  os << ")\n";
  return os.str();
}

std::string serialize_problem(const TaskSpec& t, const LiftedDomain& d) {
  std::ostringstream os;
  os << "(define (problem " << t.name << ")\n";
  os << "  (:domain " << d.name << ")\n";
  os << "  (:objects";
  for (const auto& [o, ty] : t.objects) os << " " << o << " - " << ty;
  os << ")\n";
  os << "  (:init";
  for (const auto& a : t.init) os << " " << atom_sexp(a);
  os << ")\n";
  os << "  (:goal (and";
  for (const auto& l : t.goal.literals) os << " " << literal_sexp(l);
  for (const auto& e : t.goal.exists) {
    os << " (exists (" << typed_list(e.vars) << ") (and";
    for (const auto& l : e.body) os << " " << literal_sexp(l);
    os << "))";
  }
  os << ")))\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Grounding
// ---------------------------------------------------------------------------

bool State::contains(uint32_t id) const {
  return std::binary_search(atoms.begin(), atoms.end(), id);
}

void State::insert(uint32_t id) {
  auto it = std::lower_bound(atoms.begin(), atoms.end(), id);
  if (it == atoms.end() || *it != id) atoms.insert(it, id);
}

void State::erase(uint32_t id) {
  auto it = std::lower_bound(atoms.begin(), atoms.end(), id);
  if (it != atoms.end() && *it == id) atoms.erase(it);
}

std::string GroundAction::name() const {
  std::string s = schema + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ",";
    s += args[i];
  }
  return s + ")";
}

std::map<std::string, std::string> GroundAction::binding(const ActionSchema& s) const {
  std::map<std::string, std::string> b;
  for (std::size_t i = 0; i < s.params.size() && i < args.size(); ++i)
    b[s.params[i].name] = args[i];
  return b;
}

uint32_t GroundSpace::id_of(const Atom& a) const {
  auto it = atom_ids.find(a);
  if (it == atom_ids.end()) throw ValidationError("atom outside ground space: " + to_string(a));
  return it->second;
}

std::optional<uint32_t> GroundSpace::try_id(const Atom& a) const {
  auto it = atom_ids.find(a);
  if (it == atom_ids.end()) return std::nullopt;
  return it->second;
}

State GroundSpace::state_of(const std::vector<Atom>& ground_atoms) const {
  State s;
  for (const auto& a : ground_atoms) s.insert(id_of(a));
  return s;
}

std::vector<Atom> GroundSpace::atoms_of(const State& s) const {
  std::vector<Atom> out;
  out.reserve(s.atoms.size());
  for (uint32_t id : s.atoms) out.push_back(atoms.at(id));
  return out;
}

std::vector<std::string> GroundSpace::objects_of_type(const std::string& type,
                                                      const TypeHierarchy& types) const {
  std::vector<std::string> out;
  for (const auto& [o, t] : objects)
    if (types.is_subtype(t, type)) out.push_back(o);
  return out;
}

namespace {

// Enumerates all type-consistent assignments of objects to params.
void enumerate_bindings(const std::vector<TypedVar>& params, const GroundSpace& space,
                        const TypeHierarchy& types,
                        const std::function<void(const std::vector<std::string>&)>& fn) {
  std::vector<std::vector<std::string>> choices;
  for (const auto& p : params) choices.push_back(space.objects_of_type(p.type, types));
  std::vector<std::string> cur(params.size());
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == params.size()) {
      fn(cur);
      return;
    }
    for (const auto& o : choices[i]) {
      cur[i] = o;
      rec(i + 1);
    }
  };
  rec(0);
}

}  // namespace

GroundSpace ground(const LiftedDomain& domain, const ObjectSet& objects) {
  GroundSpace space;
  space.objects = objects;
  for (const auto& p : domain.predicates) {
    enumerate_bindings(p.params, space, domain.types, [&](const std::vector<std::string>& args) {
      Atom a{p.name, args};
      if (!space.atom_ids.count(a)) {
        space.atom_ids[a] = static_cast<uint32_t>(space.atoms.size());
        space.atoms.push_back(a);
      }
    });
  }
  // re-sort atoms for a canonical ordering independent of declaration order
  std::sort(space.atoms.begin(), space.atoms.end());
  space.atom_ids.clear();
  for (uint32_t i = 0; i < space.atoms.size(); ++i) space.atom_ids[space.atoms[i]] = i;

  for (const auto& a : domain.actions) {
    enumerate_bindings(a.params, space, domain.types, [&](const std::vector<std::string>& args) {
      space.actions.push_back({a.name, args});
    });
  }
  std::sort(space.actions.begin(), space.actions.end(),
            [](const GroundAction& x, const GroundAction& y) { return x.name() < y.name(); });
  return space;
}

namespace {

Atom substitute(const Atom& a, const std::map<std::string, std::string>& binding) {
  Atom out;
  out.pred = a.pred;
  out.args.reserve(a.args.size());
  for (const auto& arg : a.args) {
    if (is_variable(arg)) {
      auto it = binding.find(arg);
      if (it == binding.end()) throw ValidationError("unbound variable " + arg);
      out.args.push_back(it->second);
    } else {
      out.args.push_back(arg);
    }
  }
  return out;
}

}  // namespace

GroundOp ground_operator(const ActionSchema& schema, uint32_t action_index,
                         const GroundSpace& space) {
  const GroundAction& ga = space.actions.at(action_index);
  auto binding = ga.binding(schema);
  GroundOp op;
  op.action_index = action_index;
  for (const auto& l : schema.pre)
    op.pre.push_back({space.id_of(substitute(l.atom, binding)), l.positive});
  op.prob = schema.prob;
  for (const auto& e : schema.eff) {
    GroundEffect ge;
    for (const auto& a : e.del) ge.del.push_back(space.id_of(substitute(a, binding)));
    for (const auto& a : e.add) ge.add.push_back(space.id_of(substitute(a, binding)));
    std::sort(ge.del.begin(), ge.del.end());
    std::sort(ge.add.begin(), ge.add.end());
    op.eff.push_back(std::move(ge));
  }
  return op;
}

std::vector<GroundOp> ground_operators(const LiftedDomain& domain, const GroundSpace& space) {
  std::vector<GroundOp> ops;
  ops.reserve(space.actions.size());
  for (uint32_t i = 0; i < space.actions.size(); ++i) {
    const ActionSchema* schema = domain.find_action(space.actions[i].schema);
    if (!schema) throw ValidationError("no schema for ground action " + space.actions[i].name());
    ops.push_back(ground_operator(*schema, i, space));
  }
  return ops;
}

// ---------------------------------------------------------------------------
// Formula evaluation and effect application
// ---------------------------------------------------------------------------

bool holds(const State& s, const std::vector<GroundLit>& conjunction) {
  for (const auto& l : conjunction)
    if (s.contains(l.atom) != l.positive) return false;
  return true;
}

bool holds(const State& s, const Goal& goal, const GroundSpace& space,
           const TypeHierarchy& types) {
  for (const auto& l : goal.literals) {
    auto id = space.try_id(l.atom);
    bool present = id && s.contains(*id);
    if (present != l.positive) return false;
  }
  for (const auto& ex : goal.exists) {
    bool witness = false;
    enumerate_bindings(ex.vars, space, types, [&](const std::vector<std::string>& objs) {
      if (witness) return;
      std::map<std::string, std::string> binding;
      for (std::size_t i = 0; i < ex.vars.size(); ++i) binding[ex.vars[i].name] = objs[i];
      for (const auto& l : ex.body) {
        Atom ga = substitute(l.atom, binding);
        auto id = space.try_id(ga);
        bool present = id && s.contains(*id);
        if (present != l.positive) return;
      }
      witness = true;
    });
    if (!witness) return false;
  }
  return true;
}

State apply_effect(const State& s, const GroundEffect& e) {
  State out = s;
  for (uint32_t id : e.del) out.erase(id);
  for (uint32_t id : e.add) out.insert(id);
  return out;
}

}  // namespace clap::ppddl

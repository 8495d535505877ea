#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// PPDDL subset: typed predicates, actions with conjunctive literal
// preconditions (positive and negative) and flat probabilistic effect
// lists. Conditional/quantified effects and fluents are rejected at
// parse time.
namespace clap::ppddl {

struct ParseError : std::runtime_error {
  int line = 0;
  int col = 0;
  ParseError(const std::string& msg, int line_, int col_);
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TypedVar {
  std::string name;
  std::string type;
  auto operator<=>(const TypedVar&) const = default;
};

struct PredicateSchema {
  std::string name;
  std::vector<TypedVar> params;
  std::size_t arity() const { return params.size(); }
  auto operator<=>(const PredicateSchema&) const = default;
};

inline bool is_variable(const std::string& s) { return !s.empty() && s[0] == '?'; }

// Lifted or ground atom; arguments starting with '?' are variables.
struct Atom {
  std::string pred;
  std::vector<std::string> args;
  bool ground() const {
    for (const auto& a : args)
      if (is_variable(a)) return false;
    return true;
  }
  auto operator<=>(const Atom&) const = default;
};

std::string to_string(const Atom& a);

struct Literal {
  Atom atom;
  bool positive = true;
  auto operator<=>(const Literal&) const = default;
};

struct Effect {
  std::vector<Atom> del;  // Eff[i]-
  std::vector<Atom> add;  // Eff[i]+
  void normalize();       // sort + dedupe; throws ValidationError on del/add overlap
  bool empty() const { return del.empty() && add.empty(); }
  auto operator<=>(const Effect&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedVar> params;
  std::vector<Literal> pre;
  std::vector<double> prob;
  std::vector<Effect> eff;
  void normalize();  // normalizes effects, sorts preconditions, checks prob sum
  auto operator<=>(const ActionSchema&) const = default;
};

struct TypeHierarchy {
  // type name -> parent type; "object" is the implicit root
  std::map<std::string, std::string> parent;
  void declare(const std::string& type, const std::string& par = "object");
  bool known(const std::string& type) const;
  bool is_subtype(const std::string& sub, const std::string& super) const;
  auto operator<=>(const TypeHierarchy&) const = default;
};

struct LiftedDomain {
  std::string name;
  TypeHierarchy types;
  std::vector<PredicateSchema> predicates;
  std::vector<ActionSchema> actions;

  const PredicateSchema* find_predicate(const std::string& n) const;
  const ActionSchema* find_action(const std::string& n) const;
  ActionSchema* find_action(const std::string& n);
  void validate() const;  // declared names, arities, types, prob sums
  auto operator<=>(const LiftedDomain&) const = default;
};

// Ordered (object, type) pairs.
using ObjectSet = std::vector<std::pair<std::string, std::string>>;

// Canonical state: sorted vector of ground-atom ids w.r.t. a GroundSpace.
struct State {
  std::vector<uint32_t> atoms;
  bool contains(uint32_t id) const;
  void insert(uint32_t id);
  void erase(uint32_t id);
  auto operator<=>(const State&) const = default;
};

struct StateHash {
  std::size_t operator()(const State& s) const {
    std::size_t h = 1469598103934665603ull;
    for (uint32_t a : s.atoms) {
      h ^= a + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct GroundAction {
  std::string schema;              // action schema name
  std::vector<std::string> args;   // bound objects, schema parameter order
  std::string name() const;        // e.g. "pick-up(r1,l1,b1)"
  // sigma^-1: parameter name -> object
  std::map<std::string, std::string> binding(const ActionSchema& s) const;
  auto operator<=>(const GroundAction&) const = default;
};

struct GroundSpace {
  ObjectSet objects;
  std::vector<Atom> atoms;  // id = index
  std::map<Atom, uint32_t> atom_ids;
  std::vector<GroundAction> actions;  // sorted by name()

  uint32_t id_of(const Atom& a) const;  // throws ValidationError if unknown
  std::optional<uint32_t> try_id(const Atom& a) const;
  State state_of(const std::vector<Atom>& ground_atoms) const;
  std::vector<Atom> atoms_of(const State& s) const;
  std::vector<std::string> objects_of_type(const std::string& type, const TypeHierarchy&) const;
};

GroundSpace ground(const LiftedDomain& domain, const ObjectSet& objects);

struct GroundLit {
  uint32_t atom;
  bool positive;
};

struct GroundEffect {
  std::vector<uint32_t> del;
  std::vector<uint32_t> add;
};

// One action schema instantiated against a GroundSpace entry.
struct GroundOp {
  uint32_t action_index = 0;  // into GroundSpace::actions
  std::vector<GroundLit> pre;
  std::vector<double> prob;
  std::vector<GroundEffect> eff;
};

std::vector<GroundOp> ground_operators(const LiftedDomain& domain, const GroundSpace& space);
GroundOp ground_operator(const ActionSchema& schema, uint32_t action_index, const GroundSpace& space);

struct ExistsConjunct {
  std::vector<TypedVar> vars;
  std::vector<Literal> body;  // atoms over vars and objects
  auto operator<=>(const ExistsConjunct&) const = default;
};

struct Goal {
  std::vector<Literal> literals;  // ground conjuncts
  std::vector<ExistsConjunct> exists;
  bool empty() const { return literals.empty() && exists.empty(); }
  auto operator<=>(const Goal&) const = default;
};

struct TaskSpec {
  std::string name;
  std::string domain_name;
  ObjectSet objects;
  std::vector<Atom> init;
  Goal goal;
  double gamma = 0.9;
  int horizon = 40;
  auto operator<=>(const TaskSpec&) const = default;
};

LiftedDomain parse_domain(const std::string& text);
TaskSpec parse_problem(const std::string& text, const LiftedDomain& domain);
LiftedDomain parse_domain_file(const std::string& path);
TaskSpec parse_problem_file(const std::string& path, const LiftedDomain& domain);
std::string serialize_domain(const LiftedDomain& domain);
std::string serialize_problem(const TaskSpec& task, const LiftedDomain& domain);

bool holds(const State& s, const std::vector<GroundLit>& conjunction);
bool holds(const State& s, const Goal& goal, const GroundSpace& space, const TypeHierarchy& types);
State apply_effect(const State& s, const GroundEffect& e);

}  // namespace clap::ppddl

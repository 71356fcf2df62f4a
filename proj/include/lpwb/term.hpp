#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace lpwb {

using VarId = std::int64_t;

enum class TermKind : std::uint8_t { Var, Atom, Int, Compound };

/// Immutable first-order term. Copies share structure.
class Term {
public:
    Term();  // the atom []

    static Term var(VarId id, std::string name = {});
    static Term atom(std::string name);
    static Term integer(std::int64_t value);
    static Term compound(std::string functor, std::vector<Term> args);
    static Term list(std::span<const Term> items, std::optional<Term> tail = std::nullopt);
    static Term nil() { return atom("[]"); }

    TermKind kind() const { return node_->kind; }
    bool is_var() const { return kind() == TermKind::Var; }
    bool is_atom() const { return kind() == TermKind::Atom; }
    bool is_int() const { return kind() == TermKind::Int; }
    bool is_compound() const { return kind() == TermKind::Compound; }
    bool is_callable() const { return is_atom() || is_compound(); }
    bool is_atom(std::string_view name) const { return is_atom() && node_->name == name; }
    bool is_nil() const { return is_atom("[]"); }
    bool is_cons() const { return is_compound() && arity() == 2 && node_->name == "."; }

    VarId var_id() const { return node_->value; }
    /// Atom name, functor name, or the source name of a variable (may be empty).
    const std::string& name() const { return node_->name; }
    std::int64_t int_value() const { return node_->value; }
    std::span<const Term> args() const { return node_->args; }
    const Term& arg(std::size_t i) const { return node_->args[i]; }
    std::size_t arity() const { return node_->args.size(); }

    /// Identity of the shared node; equal nodes imply identical terms.
    const void* node_id() const { return node_.get(); }
    /// Largest variable id occurring in the term, -1 if ground.
    VarId max_var() const { return node_->max_var; }
    /// Whether another term or binding also holds this node.
    bool shared_node() const { return node_.use_count() > 1; }

private:
    struct Node {
        TermKind kind;
        std::int64_t value = 0;
        std::string name;
        std::vector<Term> args;
        VarId max_var = -1;
    };
    explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Structural identity (==). Variables compare by id.
bool identical(const Term& a, const Term& b);
/// Standard order of terms: Var < Int < Atom < Compound, then by value/name/arity/args.
int compare_terms(const Term& a, const Term& b);
std::size_t term_size(const Term& t);
bool is_ground(const Term& t);
/// Distinct variables in left-to-right first-occurrence order.
std::vector<Term> term_variables(std::span<const Term> terms);
VarId max_var_id(std::span<const Term> terms);

struct PredKey {
    std::string name;
    std::size_t arity = 0;
    bool operator==(const PredKey&) const = default;
    auto operator<=>(const PredKey&) const = default;
    std::string str() const { return name + "/" + std::to_string(arity); }
};

struct PredKeyHash {
    std::size_t operator()(const PredKey& k) const {
        return std::hash<std::string>{}(k.name) * 31 + k.arity;
    }
};

PredKey pred_key(const Term& callable);

/// Hands out fresh variable ids. Passed explicitly; never global.
class VarAllocator {
public:
    explicit VarAllocator(VarId next = 0) : next_(next) {}
    VarId next() { return next_++; }
    /// Reserves `count` consecutive ids and returns the first.
    VarId reserve(std::size_t count) {
        VarId base = next_;
        next_ += static_cast<VarId>(count);
        return base;
    }
    Term fresh(std::string name = {}) { return Term::var(next(), std::move(name)); }
    VarId peek() const { return next_; }

private:
    VarId next_;
};

/// Triangular variable bindings with an undo trail.
class Substitution {
public:
    const Term* lookup(VarId id) const;
    void bind(VarId id, Term value);
    bool empty() const { return trail_.empty(); }
    std::size_t size() const { return trail_.size(); }

    /// Dereferences variable chains at the top level only.
    Term walk(Term t) const;
    /// Fully applies the bindings.
    Term apply(const Term& t) const;
    std::vector<Term> apply(std::span<const Term> ts) const;
    /// Like apply, but each visited node consumes one unit of `budget`;
    /// gives up when it runs out.
    std::optional<Term> apply_bounded(const Term& t, std::size_t& budget) const;

    std::size_t mark() const { return trail_.size(); }
    /// Variables bound since the given mark.
    std::span<const VarId> bound_since(std::size_t mark) const {
        return std::span<const VarId>(trail_).subspan(mark);
    }
    void undo(std::size_t mark);

    /// Bindings as (variable, fully applied value), ordered by variable id.
    std::vector<std::pair<VarId, Term>> entries() const;
    /// Keeps only the given variables, with values fully applied.
    Substitution restricted(std::span<const Term> vars) const;

private:
    // indexed by variable id; ids come from allocators and stay dense
    std::vector<std::optional<Term>> slots_;
    std::vector<VarId> trail_;
};

/// A pending disequation. `soft` marks one that any injective grounding of the
/// remaining variables satisfies; it still fails when the sides become identical.
struct Disequation {
    Term lhs;
    Term rhs;
    bool soft = false;
};

class DifStore {
public:
    std::span<const Disequation> pending() const { return items_; }
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }
    bool has_hard() const;
    /// Whether some pending disequation contains the variable.
    bool mentions(VarId v) const { return vars_.contains(v); }
    void push(Disequation d);
    /// Replaces all pending disequations.
    void assign(std::vector<Disequation> items);

    /// Position in the undo log, for backtracking without copies.
    std::size_t mark() const { return log_.size(); }
    void undo(std::size_t mark);

private:
    using VarCounts = std::unordered_map<VarId, std::uint32_t>;
    struct Replaced {
        std::vector<Disequation> items;
        VarCounts vars;
    };
    // monostate: one push
    using LogEntry = std::variant<std::monostate, Replaced>;

    void count(const Disequation& d, int delta);

    std::vector<Disequation> items_;
    VarCounts vars_;  // occurrence counts per disequation
    std::vector<LogEntry> log_;
};

/// Unifies in place; on failure the substitution is restored. Occurs check on.
bool unify_in_place(const Term& a, const Term& b, Substitution& subst);
/// Head unification where variables from `fresh_from` on were created for
/// this call. Skips occurs checks that cannot fail.
bool unify_in_place(const Term& a, const Term& b, Substitution& subst, VarId fresh_from);
/// Nodes visited by unification and occurs checks on this thread so far.
std::uint64_t unification_work();


/// Rechecks every pending disequation: identical sides fail, non-unifiable
/// sides are dropped, the rest stay pending (stored with bindings applied).
bool recheck_difs(DifStore& difs, Substitution& subst);
/// Same, but only disequations mentioning a variable bound since `since` are
/// revisited. Requires every stored disequation to be fully applied.
bool recheck_difs(DifStore& difs, Substitution& subst, std::size_t since);

/// Adds dif(a, b) under subst. Returns false when already violated.
bool add_dif(const Term& a, const Term& b, bool soft, Substitution& subst, DifStore& difs);

struct Unifier {
    Substitution subst;
    DifStore difs;
};

/// Most general unifier extending `subst` that keeps every disequation satisfiable.
std::optional<Unifier> unify(const Term& a, const Term& b, Substitution subst, DifStore difs);

/// One-way matching: binds only pattern variables. `bindings` maps pattern var ids.
bool match(const Term& pattern, const Term& target, std::unordered_map<VarId, Term>& bindings);
Term instantiate(const Term& pattern, const std::unordered_map<VarId, Term>& bindings);

bool variant_of(const Term& a, const Term& b);
bool variant_of(std::span<const Term> a, std::span<const Term> b);
/// Hash that agrees on variants.
std::size_t variant_hash(const Term& t);

struct Grounding {
    Term goal;
    std::vector<std::pair<Term, Term>> bindings;  // (variable, any<k>)
    std::size_t next_index = 0;
};

/// Binds each free variable, in first-occurrence order, to any<k> with k from `start_index`.
Grounding ground_with_any(const Term& goal, std::size_t start_index = 0);

using TermPath = std::vector<std::size_t>;  // 1-based argument indices

struct Subterm {
    TermPath path;
    Term term;
};

/// Subterms of the goal's arguments in pre-order; the goal itself is excluded.
std::vector<Subterm> enumerate_subterms(const Term& goal);
Term replace_at(const Term& t, std::span<const std::size_t> path, const Term& replacement);
const Term& subterm_at(const Term& t, std::span<const std::size_t> path);

struct Clause {
    Term head;
    std::vector<Term> body;
    int source_line = 0;
    int last_line = 0;
};

/// Renames all variables of the clause to fresh unnamed ones, preserving sharing.
Clause rename_apart(const Clause& clause, VarAllocator& alloc);
/// Adds `offset` to every variable id; drops source names.
Term shift_vars(const Term& t, VarId offset);

/// Clause database with a predicate index. Source order is preserved.
class Program {
public:
    Program() = default;
    explicit Program(std::vector<Clause> clauses);

    std::span<const Clause> clauses() const { return clauses_; }
    /// Clause i with its variables renumbered 0..var_count(i)-1, names kept.
    const Clause& normalized(std::size_t i) const { return normalized_[i]; }
    std::size_t var_count(std::size_t i) const { return var_counts_[i]; }
    const Clause& clause(std::size_t i) const { return clauses_[i]; }
    std::size_t size() const { return clauses_.size(); }
    /// Clause positions for the predicate; empty when undefined.
    std::span<const std::size_t> lookup(const PredKey& key) const;
    bool defines(const PredKey& key) const { return index_.contains(key); }
    std::vector<PredKey> predicates() const;

private:
    std::vector<Clause> clauses_;
    std::vector<Clause> normalized_;
    std::vector<std::size_t> var_counts_;
    std::unordered_map<PredKey, std::vector<std::size_t>, PredKeyHash> index_;
};

}  // namespace lpwb

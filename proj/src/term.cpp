#include "lpwb/term.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <memory_resource>
#include <stdexcept>
#include <unordered_set>

namespace lpwb {

Term::Term() : Term(atom("[]")) {}

Term Term::var(VarId id, std::string name) {
    return Term(std::make_shared<const Node>(Node{TermKind::Var, id, std::move(name), {}, id}));
}

Term Term::atom(std::string name) {
    return Term(std::make_shared<const Node>(Node{TermKind::Atom, 0, std::move(name), {}}));
}

Term Term::integer(std::int64_t value) {
    return Term(std::make_shared<const Node>(Node{TermKind::Int, value, {}, {}}));
}

Term Term::compound(std::string functor, std::vector<Term> args) {
    if (args.empty()) {
        return atom(std::move(functor));
    }
    VarId top = -1;
    for (const Term& a : args) {
        top = std::max(top, a.max_var());
    }
    return Term(std::make_shared<const Node>(Node{TermKind::Compound, 0, std::move(functor), std::move(args), top}));
}

Term Term::list(std::span<const Term> items, std::optional<Term> tail) {
    Term result = tail ? *tail : nil();
    for (auto it = items.rbegin(); it != items.rend(); ++it) {
        result = compound(".", {*it, result});
    }
    return result;
}

bool identical(const Term& a, const Term& b) {
    if (a.node_id() == b.node_id()) {
        return true;
    }
    if (a.kind() != b.kind()) {
        return false;
    }
    switch (a.kind()) {
    case TermKind::Var: return a.var_id() == b.var_id();
    case TermKind::Int: return a.int_value() == b.int_value();
    case TermKind::Atom: return a.name() == b.name();
    case TermKind::Compound:
        if (a.arity() != b.arity() || a.name() != b.name()) {
            return false;
        }
        for (std::size_t i = 0; i < a.arity(); ++i) {
            if (!identical(a.arg(i), b.arg(i))) {
                return false;
            }
        }
        return true;
    }
    return false;
}

namespace {
int kind_rank(TermKind k) {
    switch (k) {
    case TermKind::Var: return 0;
    case TermKind::Int: return 1;
    case TermKind::Atom: return 2;
    case TermKind::Compound: return 3;
    }
    return 4;
}
}  // namespace

int compare_terms(const Term& a, const Term& b) {
    if (a.kind() != b.kind()) {
        return kind_rank(a.kind()) < kind_rank(b.kind()) ? -1 : 1;
    }
    switch (a.kind()) {
    case TermKind::Var: return a.var_id() < b.var_id() ? -1 : a.var_id() > b.var_id();
    case TermKind::Int: return a.int_value() < b.int_value() ? -1 : a.int_value() > b.int_value();
    case TermKind::Atom: return a.name().compare(b.name()) < 0 ? -1 : a.name() != b.name();
    case TermKind::Compound: {
        if (a.arity() != b.arity()) {
            return a.arity() < b.arity() ? -1 : 1;
        }
        if (int c = a.name().compare(b.name()); c != 0) {
            return c < 0 ? -1 : 1;
        }
        for (std::size_t i = 0; i < a.arity(); ++i) {
            if (int c = compare_terms(a.arg(i), b.arg(i)); c != 0) {
                return c;
            }
        }
        return 0;
    }
    }
    return 0;
}

std::size_t term_size(const Term& t) {
    std::size_t n = 1;
    for (const Term& a : t.args()) {
        n += term_size(a);
    }
    return n;
}

bool is_ground(const Term& t) {
    if (t.is_var()) {
        return false;
    }
    return std::all_of(t.args().begin(), t.args().end(), [](const Term& a) { return is_ground(a); });
}

namespace {
void collect_vars(const Term& t, std::unordered_set<VarId>& seen, std::vector<Term>& out) {
    if (t.is_var()) {
        if (seen.insert(t.var_id()).second) {
            out.push_back(t);
        }
        return;
    }
    for (const Term& a : t.args()) {
        collect_vars(a, seen, out);
    }
}

VarId max_var(const Term& t) { return t.max_var(); }
}  // namespace

std::vector<Term> term_variables(std::span<const Term> terms) {
    std::unordered_set<VarId> seen;
    std::vector<Term> out;
    for (const Term& t : terms) {
        collect_vars(t, seen, out);
    }
    return out;
}

VarId max_var_id(std::span<const Term> terms) {
    VarId m = -1;
    for (const Term& t : terms) {
        m = std::max(m, max_var(t));
    }
    return m;
}

PredKey pred_key(const Term& callable) {
    return PredKey{callable.name(), callable.is_compound() ? callable.arity() : 0};
}

// ---------------------------------------------------------------------------
// Substitution

const Term* Substitution::lookup(VarId id) const {
    const auto i = static_cast<std::size_t>(id);
    return id >= 0 && i < slots_.size() && slots_[i] ? &*slots_[i] : nullptr;
}

void Substitution::bind(VarId id, Term value) {
    if (id < 0) {
        throw std::invalid_argument("negative variable id");
    }
    const auto i = static_cast<std::size_t>(id);
    if (i >= slots_.size()) {
        slots_.resize(std::max(i + 1, slots_.size() * 2));
    }
    if (!slots_[i]) {
        trail_.push_back(id);
    }
    slots_[i] = std::move(value);
}

Term Substitution::walk(Term t) const {
    while (t.is_var()) {
        const Term* b = lookup(t.var_id());
        if (!b) {
            break;
        }
        t = *b;
    }
    return t;
}

Term Substitution::apply(const Term& t) const {
    if (trail_.empty()) {
        return t;
    }
    Term w = walk(t);
    if (!w.is_compound()) {
        return w;
    }
    std::vector<Term> args;
    args.reserve(w.arity());
    bool changed = false;
    for (const Term& a : w.args()) {
        args.push_back(apply(a));
        changed = changed || args.back().node_id() != a.node_id();
    }
    return changed ? Term::compound(w.name(), std::move(args)) : w;
}

namespace {

bool apply_counted(const Substitution& s, const Term& t, std::size_t& budget, Term& out) {
    if (budget == 0) {
        return false;
    }
    --budget;
    Term w = s.walk(t);
    if (!w.is_compound()) {
        out = w;
        return true;
    }
    std::vector<Term> args(w.arity());
    bool changed = false;
    for (std::size_t i = 0; i < w.arity(); ++i) {
        if (!apply_counted(s, w.arg(i), budget, args[i])) {
            return false;
        }
        changed = changed || args[i].node_id() != w.arg(i).node_id();
    }
    out = changed ? Term::compound(w.name(), std::move(args)) : w;
    return true;
}

}  // namespace

std::optional<Term> Substitution::apply_bounded(const Term& t, std::size_t& budget) const {
    Term out = t;
    if (!apply_counted(*this, t, budget, out)) {
        return std::nullopt;
    }
    return out;
}

std::vector<Term> Substitution::apply(std::span<const Term> ts) const {
    std::vector<Term> out;
    out.reserve(ts.size());
    for (const Term& t : ts) {
        out.push_back(apply(t));
    }
    return out;
}

void Substitution::undo(std::size_t mark) {
    while (trail_.size() > mark) {
        slots_[static_cast<std::size_t>(trail_.back())].reset();
        trail_.pop_back();
    }
}

std::vector<std::pair<VarId, Term>> Substitution::entries() const {
    std::vector<std::pair<VarId, Term>> out;
    out.reserve(trail_.size());
    for (VarId id : trail_) {
        out.emplace_back(id, apply(Term::var(id)));
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return out;
}

Substitution Substitution::restricted(std::span<const Term> vars) const {
    Substitution out;
    for (const Term& v : vars) {
        if (!v.is_var()) {
            continue;
        }
        Term value = apply(v);
        if (!(value.is_var() && value.var_id() == v.var_id())) {
            out.bind(v.var_id(), std::move(value));
        }
    }
    return out;
}

bool DifStore::has_hard() const {
    auto p = pending();
    return std::any_of(p.begin(), p.end(), [](const Disequation& d) { return !d.soft; });
}

void DifStore::count(const Disequation& d, int delta) {
    const Term sides[] = {d.lhs, d.rhs};
    for (const Term& v : term_variables(sides)) {
        if (delta > 0) {
            ++vars_[v.var_id()];
        } else if (auto it = vars_.find(v.var_id()); it != vars_.end() && --it->second == 0) {
            vars_.erase(it);
        }
    }
}

void DifStore::push(Disequation d) {
    count(d, 1);
    items_.push_back(std::move(d));
    log_.emplace_back(std::monostate{});
}

void DifStore::assign(std::vector<Disequation> items) {
    log_.emplace_back(Replaced{std::move(items_), std::move(vars_)});
    items_ = std::move(items);
    vars_.clear();
    for (const Disequation& d : items_) {
        count(d, 1);
    }
}

void DifStore::undo(std::size_t mark) {
    while (log_.size() > mark) {
        if (auto* r = std::get_if<Replaced>(&log_.back())) {
            items_ = std::move(r->items);
            vars_ = std::move(r->vars);
        } else {
            count(items_.back(), -1);
            items_.pop_back();
        }
        log_.pop_back();
    }
}

// ---------------------------------------------------------------------------
// Unification

namespace {
// Shared subterms can make the tree exponentially larger than the DAG, so
// after a few expansions both occurs and unify remember visited nodes.
constexpr std::size_t kMemoAfter = 64;

const Term& walk_ref(const Term& t, const Substitution& subst) {
    const Term* w = &t;
    while (w->is_var()) {
        const Term* b = subst.lookup(w->var_id());
        if (!b) {
            break;
        }
        w = b;
    }
    return *w;
}

thread_local std::uint64_t work_done = 0;

// Nothing is bound while this runs, so pointers into terms and bindings stay valid.
bool occurs(VarId id, const Term& t, const Substitution& subst) {
    std::array<std::byte, 4096> buffer;
    std::pmr::monotonic_buffer_resource arena(buffer.data(), buffer.size());
    std::pmr::vector<const Term*> stack(&arena);
    std::pmr::unordered_set<const void*> seen(&arena);
    stack.push_back(&t);
    std::size_t expanded = 0;
    while (!stack.empty()) {
        const Term& w = walk_ref(*stack.back(), subst);
        stack.pop_back();
        ++work_done;
        if (w.is_var()) {
            if (w.var_id() == id) {
                return true;
            }
            continue;
        }
        if (!w.is_compound()) {
            continue;
        }
        // a node with a single owner cannot be reached twice
        if (w.shared_node() && ++expanded > kMemoAfter && !seen.insert(w.node_id()).second) {
            continue;
        }
        for (const Term& a : w.args()) {
            stack.push_back(&a);
        }
    }
    return false;
}

struct PairHash {
    std::size_t operator()(const std::pair<const void*, const void*>& p) const {
        return std::hash<const void*>{}(p.first) * 31 + std::hash<const void*>{}(p.second);
    }
};
}  // namespace

std::uint64_t unification_work() { return work_done; }

bool unify_in_place(const Term& a, const Term& b, Substitution& subst) {
    return unify_in_place(a, b, subst, std::numeric_limits<VarId>::max());
}

bool unify_in_place(const Term& a, const Term& b, Substitution& subst, VarId fresh_from) {
    const std::size_t mark = subst.mark();
    // While only fresh variables are bound, a term without fresh variables
    // cannot reach one through the bindings.
    bool older_bound = false;
    auto bind = [&](VarId v, const Term& t) {
        older_bound |= v < fresh_from;
        subst.bind(v, t);
    };
    std::array<std::byte, 4096> buffer;
    std::pmr::monotonic_buffer_resource arena(buffer.data(), buffer.size());
    std::pmr::vector<std::pair<Term, Term>> stack(&arena);
    std::pmr::unordered_set<std::pair<const void*, const void*>, PairHash> seen(&arena);
    stack.emplace_back(a, b);
    std::size_t expanded = 0;
    while (!stack.empty()) {
        auto [x, y] = std::move(stack.back());
        stack.pop_back();
        x = subst.walk(x);
        y = subst.walk(y);
        ++work_done;
        if (x.node_id() == y.node_id()) {
            continue;
        }
        if (x.is_var() && y.is_var()) {
            if (x.var_id() == y.var_id()) {
                continue;
            }
            // Younger variables point at older ones, so answers keep query variables.
            if (x.var_id() > y.var_id()) {
                bind(x.var_id(), y);
            } else {
                bind(y.var_id(), x);
            }
            continue;
        }
        if (x.is_var() || y.is_var()) {
            const Term& v = x.is_var() ? x : y;
            const Term& t = x.is_var() ? y : x;
            const bool cannot_occur = !older_bound && v.var_id() >= fresh_from && t.max_var() < fresh_from;
            if (!cannot_occur && occurs(v.var_id(), t, subst)) {
                subst.undo(mark);
                return false;
            }
            bind(v.var_id(), t);
            continue;
        }
        if (x.kind() != y.kind()) {
            subst.undo(mark);
            return false;
        }
        switch (x.kind()) {
        case TermKind::Int:
            if (x.int_value() != y.int_value()) {
                subst.undo(mark);
                return false;
            }
            break;
        case TermKind::Atom:
            if (x.name() != y.name()) {
                subst.undo(mark);
                return false;
            }
            break;
        case TermKind::Compound:
            if (x.arity() != y.arity() || x.name() != y.name()) {
                subst.undo(mark);
                return false;
            }
            if (++expanded > kMemoAfter && !seen.emplace(x.node_id(), y.node_id()).second) {
                break;
            }
            for (std::size_t i = x.arity(); i-- > 0;) {
                stack.emplace_back(x.arg(i), y.arg(i));
            }
            break;
        case TermKind::Var: break;
        }
    }
    return true;
}

namespace {
enum class DifState { Violated, Entailed, Pending };

DifState classify(const Term& lhs, const Term& rhs, Substitution& subst) {
    const std::size_t mark = subst.mark();
    if (!unify_in_place(lhs, rhs, subst)) {
        return DifState::Entailed;
    }
    const bool no_bindings = subst.mark() == mark;
    subst.undo(mark);
    return no_bindings ? DifState::Violated : DifState::Pending;
}
}  // namespace

namespace {
bool mentions_any(const Term& t, std::span<const VarId> vars) {
    if (t.is_var()) {
        return std::find(vars.begin(), vars.end(), t.var_id()) != vars.end();
    }
    if (t.is_compound()) {
        for (const Term& a : t.args()) {
            if (mentions_any(a, vars)) {
                return true;
            }
        }
    }
    return false;
}
}  // namespace

bool recheck_difs(DifStore& difs, Substitution& subst, std::size_t since) {
    if (difs.empty() || subst.mark() <= since) {
        return true;
    }
    std::span<const VarId> bound = subst.bound_since(since);
    if (since > 0 && std::none_of(bound.begin(), bound.end(), [&](VarId v) { return difs.mentions(v); })) {
        return true;
    }
    auto touched = [&](const Disequation& d) { return mentions_any(d.lhs, bound) || mentions_any(d.rhs, bound); };
    std::vector<Disequation> kept;
    kept.reserve(difs.size());
    for (const Disequation& d : difs.pending()) {
        if (since > 0 && !touched(d)) {
            kept.push_back(d);
            continue;
        }
        switch (classify(d.lhs, d.rhs, subst)) {
        case DifState::Violated: return false;
        case DifState::Entailed: break;
        case DifState::Pending: kept.push_back(Disequation{subst.apply(d.lhs), subst.apply(d.rhs), d.soft}); break;
        }
    }
    difs.assign(std::move(kept));
    return true;
}

bool recheck_difs(DifStore& difs, Substitution& subst) {
    return recheck_difs(difs, subst, 0);
}

bool add_dif(const Term& a, const Term& b, bool soft, Substitution& subst, DifStore& difs) {
    switch (classify(a, b, subst)) {
    case DifState::Violated: return false;
    case DifState::Entailed: return true;
    case DifState::Pending: difs.push(Disequation{subst.apply(a), subst.apply(b), soft}); return true;
    }
    return true;
}

std::optional<Unifier> unify(const Term& a, const Term& b, Substitution subst, DifStore difs) {
    const std::size_t mark = subst.mark();
    if (!unify_in_place(a, b, subst)) {
        return std::nullopt;
    }
    if (!recheck_difs(difs, subst, mark)) {
        return std::nullopt;
    }
    return Unifier{std::move(subst), std::move(difs)};
}

bool match(const Term& pattern, const Term& target, std::unordered_map<VarId, Term>& bindings) {
    if (pattern.is_var()) {
        auto it = bindings.find(pattern.var_id());
        if (it == bindings.end()) {
            bindings.emplace(pattern.var_id(), target);
            return true;
        }
        return identical(it->second, target);
    }
    if (pattern.kind() != target.kind()) {
        return false;
    }
    switch (pattern.kind()) {
    case TermKind::Int: return pattern.int_value() == target.int_value();
    case TermKind::Atom: return pattern.name() == target.name();
    case TermKind::Compound:
        if (pattern.arity() != target.arity() || pattern.name() != target.name()) {
            return false;
        }
        for (std::size_t i = 0; i < pattern.arity(); ++i) {
            if (!match(pattern.arg(i), target.arg(i), bindings)) {
                return false;
            }
        }
        return true;
    case TermKind::Var: break;
    }
    return false;
}

Term instantiate(const Term& pattern, const std::unordered_map<VarId, Term>& bindings) {
    if (pattern.is_var()) {
        auto it = bindings.find(pattern.var_id());
        return it == bindings.end() ? pattern : it->second;
    }
    if (!pattern.is_compound()) {
        return pattern;
    }
    std::vector<Term> args;
    args.reserve(pattern.arity());
    for (const Term& a : pattern.args()) {
        args.push_back(instantiate(a, bindings));
    }
    return Term::compound(pattern.name(), std::move(args));
}

// ---------------------------------------------------------------------------
// Variants

namespace {
bool variant_rec(const Term& a, const Term& b, std::unordered_map<VarId, VarId>& fwd,
                 std::unordered_map<VarId, VarId>& bwd) {
    if (a.kind() != b.kind()) {
        return false;
    }
    switch (a.kind()) {
    case TermKind::Var: {
        auto f = fwd.find(a.var_id());
        auto r = bwd.find(b.var_id());
        if (f == fwd.end() && r == bwd.end()) {
            fwd.emplace(a.var_id(), b.var_id());
            bwd.emplace(b.var_id(), a.var_id());
            return true;
        }
        return f != fwd.end() && r != bwd.end() && f->second == b.var_id() && r->second == a.var_id();
    }
    case TermKind::Int: return a.int_value() == b.int_value();
    case TermKind::Atom: return a.name() == b.name();
    case TermKind::Compound:
        if (a.arity() != b.arity() || a.name() != b.name()) {
            return false;
        }
        for (std::size_t i = 0; i < a.arity(); ++i) {
            if (!variant_rec(a.arg(i), b.arg(i), fwd, bwd)) {
                return false;
            }
        }
        return true;
    }
    return false;
}

void hash_rec(const Term& t, std::unordered_map<VarId, std::size_t>& numbering, std::size_t& h) {
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(static_cast<std::size_t>(t.kind()));
    switch (t.kind()) {
    case TermKind::Var: {
        auto [it, _] = numbering.emplace(t.var_id(), numbering.size());
        mix(it->second);
        break;
    }
    case TermKind::Int: mix(std::hash<std::int64_t>{}(t.int_value())); break;
    case TermKind::Atom: mix(std::hash<std::string>{}(t.name())); break;
    case TermKind::Compound:
        mix(std::hash<std::string>{}(t.name()));
        mix(t.arity());
        for (const Term& a : t.args()) {
            hash_rec(a, numbering, h);
        }
        break;
    }
}
}  // namespace

bool variant_of(const Term& a, const Term& b) {
    std::unordered_map<VarId, VarId> fwd;
    std::unordered_map<VarId, VarId> bwd;
    return variant_rec(a, b, fwd, bwd);
}

bool variant_of(std::span<const Term> a, std::span<const Term> b) {
    if (a.size() != b.size()) {
        return false;
    }
    std::unordered_map<VarId, VarId> fwd;
    std::unordered_map<VarId, VarId> bwd;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!variant_rec(a[i], b[i], fwd, bwd)) {
            return false;
        }
    }
    return true;
}

std::size_t variant_hash(const Term& t) {
    std::unordered_map<VarId, std::size_t> numbering;
    std::size_t h = 0;
    hash_rec(t, numbering, h);
    return h;
}

// ---------------------------------------------------------------------------
// Grounding and subterms

Grounding ground_with_any(const Term& goal, std::size_t start_index) {
    Grounding out{goal, {}, start_index};
    std::unordered_map<VarId, Term> bindings;
    for (const Term& v : term_variables(std::span<const Term>(&goal, 1))) {
        Term constant = Term::atom("any" + std::to_string(out.next_index++));
        bindings.emplace(v.var_id(), constant);
        out.bindings.emplace_back(v, constant);
    }
    out.goal = instantiate(goal, bindings);
    return out;
}

namespace {
void subterms_rec(const Term& t, TermPath& path, std::vector<Subterm>& out) {
    for (std::size_t i = 0; i < t.arity(); ++i) {
        path.push_back(i + 1);
        out.push_back(Subterm{path, t.arg(i)});
        subterms_rec(t.arg(i), path, out);
        path.pop_back();
    }
}
}  // namespace

std::vector<Subterm> enumerate_subterms(const Term& goal) {
    std::vector<Subterm> out;
    TermPath path;
    subterms_rec(goal, path, out);
    return out;
}

const Term& subterm_at(const Term& t, std::span<const std::size_t> path) {
    if (path.empty()) {
        return t;
    }
    if (path.front() == 0 || path.front() > t.arity()) {
        throw std::out_of_range("subterm path out of range");
    }
    return subterm_at(t.arg(path.front() - 1), path.subspan(1));
}

Term replace_at(const Term& t, std::span<const std::size_t> path, const Term& replacement) {
    if (path.empty()) {
        return replacement;
    }
    if (path.front() == 0 || path.front() > t.arity()) {
        throw std::out_of_range("subterm path out of range");
    }
    std::vector<Term> args(t.args().begin(), t.args().end());
    args[path.front() - 1] = replace_at(args[path.front() - 1], path.subspan(1), replacement);
    return Term::compound(t.name(), std::move(args));
}

// ---------------------------------------------------------------------------
// Clauses and programs

namespace {
Term rename_rec(const Term& t, std::unordered_map<VarId, Term>& map, VarAllocator& alloc) {
    if (t.is_var()) {
        auto it = map.find(t.var_id());
        if (it == map.end()) {
            it = map.emplace(t.var_id(), alloc.fresh()).first;
        }
        return it->second;
    }
    if (!t.is_compound()) {
        return t;
    }
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const Term& a : t.args()) {
        args.push_back(rename_rec(a, map, alloc));
    }
    return Term::compound(t.name(), std::move(args));
}

Term renumber(const Term& t, std::unordered_map<VarId, VarId>& map) {
    if (t.is_var()) {
        auto [it, _] = map.emplace(t.var_id(), static_cast<VarId>(map.size()));
        return Term::var(it->second, t.name());
    }
    if (!t.is_compound()) {
        return t;
    }
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const Term& a : t.args()) {
        args.push_back(renumber(a, map));
    }
    return Term::compound(t.name(), std::move(args));
}
}  // namespace

Clause rename_apart(const Clause& clause, VarAllocator& alloc) {
    std::unordered_map<VarId, Term> map;
    Clause out{rename_rec(clause.head, map, alloc), {}, clause.source_line, clause.last_line};
    out.body.reserve(clause.body.size());
    for (const Term& g : clause.body) {
        out.body.push_back(rename_rec(g, map, alloc));
    }
    return out;
}

Term shift_vars(const Term& t, VarId offset) {
    if (t.is_var()) {
        return Term::var(t.var_id() + offset);
    }
    if (!t.is_compound()) {
        return t;
    }
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const Term& a : t.args()) {
        args.push_back(shift_vars(a, offset));
    }
    return Term::compound(t.name(), std::move(args));
}

Program::Program(std::vector<Clause> clauses) : clauses_(std::move(clauses)) {
    normalized_.reserve(clauses_.size());
    var_counts_.reserve(clauses_.size());
    for (std::size_t i = 0; i < clauses_.size(); ++i) {
        const Clause& c = clauses_[i];
        if (!c.head.is_callable()) {
            throw std::invalid_argument("clause head must be an atom or compound term");
        }
        std::unordered_map<VarId, VarId> map;
        Clause n{renumber(c.head, map), {}, c.source_line, c.last_line};
        for (const Term& g : c.body) {
            n.body.push_back(renumber(g, map));
        }
        normalized_.push_back(std::move(n));
        var_counts_.push_back(map.size());
        index_[pred_key(c.head)].push_back(i);
    }
}

std::span<const std::size_t> Program::lookup(const PredKey& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) {
        return {};
    }
    return it->second;
}

std::vector<PredKey> Program::predicates() const {
    std::vector<PredKey> out;
    for (const Clause& c : clauses_) {
        PredKey k = pred_key(c.head);
        if (std::find(out.begin(), out.end(), k) == out.end()) {
            out.push_back(std::move(k));
        }
    }
    return out;
}

}  // namespace lpwb

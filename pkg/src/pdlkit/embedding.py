"""The variable-free embedding and its two proof constructions.

Pipeline: normalize phi, translate it so every box guards its body with a
fresh marker variable (prime), conjoin the marker-propagation formula
(theta), then replace each variable p_i by a variable-free formula B_i
that can only hold at states pointing into the i-th gadget model
(ground). The result phi* is equisatisfiable with phi.

The two model surgeries realize the directions of that equivalence at
desk scale: prune_to_marked cuts a model of hat(phi) down to its marked
core, attach_gadgets extends a marked model so the grounded B_i mimic the
original valuation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import semantics
from .semantics import KripkeModel
from .syntax import (
    FALSUM,
    TOP,
    Atomic,
    Box,
    Choice,
    Dialect,
    Falsum,
    Formula,
    Implies,
    Inter,
    Par,
    Program,
    Seq,
    Special,
    Star,
    Test,
    Var,
    conj,
    diamond,
    metrics,
    neg,
    normalize_variables,
    validate,
)


class EmbeddingError(ValueError):
    """Input outside an operation's contract (bad index, wrong dialect, bad witness)."""


@dataclass(frozen=True)
class TranslationContext:
    """Vocabulary summary driving one embedding run.

    n: variable count, so p_{n+1} is the fresh marker.
    l: atomic program count (at least 1; see build_context).
    b: designated atom index used by gadgets and marker formulas.
    gamma: a1 u (a2 u ...) over atoms 1..l; None under PRSPDL.
    """

    n: int
    l: int
    b: int
    gamma: Optional[Program]
    dialect: Dialect

    @property
    def marker(self) -> Formula:
        return Var(self.n + 1)


def build_context(phi: Formula, dialect: Dialect) -> TranslationContext:
    """Context for a formula whose variables/atoms lie in 1..n / 1..l.

    A formula with no atomic programs gets l = 1 and b = 1 so gamma = a1
    stays well-formed; a1's relation may simply be empty.
    """
    validate(phi, dialect)
    m = metrics(phi)
    n = max(m.variables, default=0)
    l = max(m.atoms, default=0)
    if l == 0:
        l = 1
    b = min(m.atoms, default=1)
    gamma: Optional[Program] = None
    if dialect is not Dialect.PRSPDL:
        gamma = Atomic(l)
        for i in range(l - 1, 0, -1):
            gamma = Choice(Atomic(i), gamma)
    return TranslationContext(n, l, b, gamma, dialect)


# ---------------------------------------------------------------------------
# Translation

def prime(phi: Formula, ctx: TranslationContext) -> Formula:
    """Guard every box body with the marker: ([alpha]psi)' = [alpha'](p_{n+1} -> psi')."""
    match phi:
        case Var(index):
            if index > ctx.n:
                raise EmbeddingError(f"variable p{index} exceeds context n={ctx.n}")
            return phi
        case Falsum():
            return phi
        case Implies(left, right):
            return Implies(prime(left, ctx), prime(right, ctx))
        case Box(program, body):
            return Box(_prime_program(program, ctx), Implies(ctx.marker, prime(body, ctx)))
    raise TypeError(f"not a formula: {phi!r}")


def _prime_program(alpha: Program, ctx: TranslationContext) -> Program:
    match alpha:
        case Atomic(index):
            if index > ctx.l:
                raise EmbeddingError(f"atomic program a{index} exceeds context l={ctx.l}")
            return alpha
        case Special():
            return alpha
        case Test(formula):
            return Test(prime(formula, ctx))
        case Seq(left, right):
            return Seq(_prime_program(left, ctx), _prime_program(right, ctx))
        case Choice(left, right):
            return Choice(_prime_program(left, ctx), _prime_program(right, ctx))
        case Inter(left, right):
            return Inter(_prime_program(left, ctx), _prime_program(right, ctx))
        case Par(left, right):
            return Par(_prime_program(left, ctx), _prime_program(right, ctx))
        case Star(inner):
            return Star(_prime_program(inner, ctx))
    raise TypeError(f"not a program: {alpha!r}")


def nested_chains(phi: Formula) -> list[list[Program]]:
    """Maximal root-to-leaf chains of the modal-nesting tree of phi.

    A box's children are the outermost boxes of its body; boxes inside a
    program's test formulas count as further roots at the same level.
    Chains are listed in left-to-right textual order.
    """

    def top_boxes(node: Formula) -> list[tuple[Program, Formula]]:
        match node:
            case Var() | Falsum():
                return []
            case Implies(left, right):
                return top_boxes(left) + top_boxes(right)
            case Box(program, body):
                return [(program, body)] + test_boxes(program)
        raise TypeError(f"not a formula: {node!r}")

    def test_boxes(alpha: Program) -> list[tuple[Program, Formula]]:
        match alpha:
            case Atomic() | Special():
                return []
            case Test(formula):
                return top_boxes(formula)
            case Seq(left, right) | Choice(left, right) | Inter(left, right) | Par(left, right):
                return test_boxes(left) + test_boxes(right)
            case Star(inner):
                return test_boxes(inner)
        raise TypeError(f"not a program: {alpha!r}")

    def chains_from(boxes: list[tuple[Program, Formula]]) -> list[list[Program]]:
        chains = []
        for program, body in boxes:
            children = top_boxes(body)
            if not children:
                chains.append([program])
            else:
                chains.extend([program] + tail for tail in chains_from(children))
        return chains

    return chains_from(top_boxes(phi))


def theta(ctx: TranslationContext, phi: Formula) -> Formula:
    """Marker-propagation formula.

    PDL/IPDL: p_{n+1} and, along gamma* , a gamma-successor holding the
    marker forces the marker here too. PRSPDL has no choice operator, so
    the same demand is spelled out per nesting chain of phi: for every
    chain alpha_1..alpha_k and every j < k, a conjunct
    [alpha_1]..[alpha_j](<alpha_{j+1}>p_{n+1} -> p_{n+1}).
    """
    marker = ctx.marker
    if ctx.dialect is not Dialect.PRSPDL:
        assert ctx.gamma is not None
        propagate = Box(Star(ctx.gamma), Implies(diamond(ctx.gamma, marker), marker))
        return conj(marker, propagate)
    conjuncts = []
    for chain in nested_chains(phi):
        for j in range(1, len(chain)):
            body = Implies(diamond(chain[j], marker), marker)
            for program in reversed(chain[:j]):
                body = Box(program, body)
            conjuncts.append(body)
    if not conjuncts:
        return marker
    combined = conjuncts[-1]
    for part in reversed(conjuncts[:-1]):
        combined = conj(part, combined)
    return conj(marker, combined)


def hat(phi: Formula, ctx: TranslationContext) -> Formula:
    """theta(phi) and prime(phi) conjoined."""
    return conj(theta(ctx, phi), prime(phi, ctx))


# ---------------------------------------------------------------------------
# Gadgets and grounding

def gadget_model(m: int, b: int) -> KripkeModel:
    """The m-th gadget: root 0, looping hub 1, finite chain 2..m+1.

    R_b is the transitive closure of root->hub, hub->hub, root->2, and the
    chain edges; every other relation and every valuation is empty. The
    root is the unique state satisfying marker_formula_A(m, b).
    """
    if m < 1:
        raise EmbeddingError(f"gadget index must be >= 1, got {m}")
    base = {(0, 1), (1, 1), (0, 2)}
    base.update((1 + i, 2 + i) for i in range(1, m))
    return KripkeModel(m + 2, {b: semantics.transitive_closure(base)}, {})


def _diamonds(count: int, b: int, body: Formula) -> Formula:
    for _ in range(count):
        body = diamond(Atomic(b), body)
    return body


def marker_formula_A(m: int, b: int) -> Formula:
    """True exactly at the root of the m-th gadget.

    Reads: some b-path of length m ends in a dead end, no b-path of
    length m+1 does, and some b-successor starts an infinite b-path.
    """
    if m < 1:
        raise EmbeddingError(f"marker index must be >= 1, got {m}")
    dead_end = Box(Atomic(b), FALSUM)
    can_continue = diamond(Atomic(b), TOP)
    exact_depth = conj(_diamonds(m, b, dead_end), neg(_diamonds(m + 1, b, dead_end)))
    hub = diamond(Atomic(b), conj(can_continue, Box(Atomic(b), can_continue)))
    return conj(exact_depth, hub)


def marker_formula_B(m: int, b: int) -> Formula:
    """True exactly at states with a b-edge into the root of an m-th gadget."""
    return diamond(Atomic(b), marker_formula_A(m, b))


def ground(phi_hat: Formula, ctx: TranslationContext) -> Formula:
    """Simultaneously replace p_i by B_i for i = 1..n+1; output is variable-free."""
    table = {i: marker_formula_B(i, ctx.b) for i in range(1, ctx.n + 2)}

    def walk_formula(node: Formula) -> Formula:
        match node:
            case Var(index):
                if index not in table:
                    raise EmbeddingError(f"variable p{index} exceeds context n+1={ctx.n + 1}")
                return table[index]
            case Falsum():
                return node
            case Implies(left, right):
                return Implies(walk_formula(left), walk_formula(right))
            case Box(program, body):
                return Box(walk_program(program), walk_formula(body))
        raise TypeError(f"not a formula: {node!r}")

    def walk_program(alpha: Program) -> Program:
        match alpha:
            case Atomic() | Special():
                return alpha
            case Test(formula):
                return Test(walk_formula(formula))
            case Seq(left, right):
                return Seq(walk_program(left), walk_program(right))
            case Choice(left, right):
                return Choice(walk_program(left), walk_program(right))
            case Inter(left, right):
                return Inter(walk_program(left), walk_program(right))
            case Par(left, right):
                return Par(walk_program(left), walk_program(right))
            case Star(inner):
                return Star(walk_program(inner))
        raise TypeError(f"not a program: {alpha!r}")

    return walk_formula(phi_hat)


def embed(phi: Formula, dialect: Dialect) -> Formula:
    """Full pipeline: normalize, hat, ground. Output is variable-free and
    equisatisfiable with phi."""
    normalized, _, _ = normalize_variables(phi)
    ctx = build_context(normalized, dialect)
    return ground(hat(normalized, ctx), ctx)


# ---------------------------------------------------------------------------
# Model surgeries

def prune_to_marked(
    model: KripkeModel, s0: int, ctx: TranslationContext
) -> tuple[KripkeModel, dict[int, int]]:
    """Cut a model of hat(phi) down to its marked gamma-reachable core.

    Keeps the least state set containing s0 and closed under following
    gamma-edges into marker states; restricts relations and valuation and
    renumbers states in ascending order. Returns the submodel and the
    old-to-new state map. The marker is universally true in the result.

    Defined for PDL/IPDL only: under PRSPDL the composition function can
    manufacture relation pairs from unmarked states, so a marked submodel
    is not truth-preserving and there is no gamma to follow.
    """
    if ctx.dialect is Dialect.PRSPDL or ctx.gamma is None:
        raise EmbeddingError("pruning needs a gamma; it is defined for PDL and IPDL only")
    if s0 not in model.states:
        raise EmbeddingError(f"state {s0} not in the model")
    marked = semantics.truth_set(model, ctx.marker, ctx.dialect)
    if s0 not in marked:
        raise EmbeddingError(f"marker p{ctx.n + 1} does not hold at state {s0}")
    reach = semantics.relation_of(model, ctx.gamma, ctx.dialect)
    successors: dict[int, list[int]] = {}
    for s, t in reach:
        successors.setdefault(s, []).append(t)
    keep = {s0}
    frontier = [s0]
    while frontier:
        x = frontier.pop()
        for y in successors.get(x, ()):
            if y in marked and y not in keep:
                keep.add(y)
                frontier.append(y)
    remap = {old: new for new, old in enumerate(sorted(keep))}
    relations = {
        a: {(remap[s], remap[t]) for s, t in pairs if s in keep and t in keep}
        for a, pairs in model.relations.items()
    }
    valuation = {
        v: {remap[s] for s in states if s in keep}
        for v, states in model.valuation.items()
    }
    return KripkeModel(len(keep), relations, valuation), remap


def attach_gadgets(model: KripkeModel, ctx: TranslationContext) -> KripkeModel:
    """Extend a marker-universal model with gadgets 1..n+1 and wire them up.

    Gadget m's states are renumbered to follow the existing states (in
    order m = 1..n+1); each original state x gets a b-edge to gadget m's
    root exactly when p_m holds at x. Original states keep their ids, so the
    grounded formula can be checked at the original witness state.
    """
    marker_states = model.valuation.get(ctx.n + 1, frozenset())
    if set(marker_states) != set(model.states):
        raise EmbeddingError(f"marker p{ctx.n + 1} must hold at every state")
    relations = {a: set(pairs) for a, pairs in model.relations.items()}
    edges = relations.setdefault(ctx.b, set())
    offset = model.num_states
    for m in range(1, ctx.n + 2):
        gadget = gadget_model(m, ctx.b)
        edges.update(
            (offset + s, offset + t) for s, t in gadget.relations.get(ctx.b, ())
        )
        holds_pm = model.valuation.get(m, frozenset())
        edges.update((x, offset) for x in holds_pm)
        offset += gadget.num_states
    return KripkeModel(offset, relations, dict(model.valuation), model.star)

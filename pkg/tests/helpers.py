"""Shared fixtures, generators and independent oracles for the test suite."""

from __future__ import annotations

import random
from dataclasses import replace
from pathlib import Path

from gramforge.grammar.model import (
    Alternation,
    AssociationDecl,
    Cardinality,
    ConstantFlag,
    GrammarModel,
    NonterminalRef,
    Optional,
    Production,
    Repetition,
    Sequence,
    SimpleReferenceDecl,
    Terminal,
    TokenRef,
    lower_first,
    walk,
)

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

AUTOMATON_TEXT = (FIXTURES / "Automaton.mcg").read_text(encoding="utf-8")
PINGPONG_TEXT = (FIXTURES / "PingPong.aut").read_text(encoding="utf-8")

MEALY_TEXT = """\
grammar MealyAutomaton extends Automaton {
  Transition =
    from:IDENT "-" activate:IDENT ">" to:IDENT ("/" output:IDENT)? ";" ;
}
"""

GUARDED_HOST_TEXT = """\
grammar GuardedAutomaton extends Automaton {
  Transition = from:IDENT "-" activate:IDENT ">" to:IDENT ("[" Guard "]")? ";" ;
  external Guard;
}
"""

GUARD_FRAGMENT_TEXT = """\
grammar BoolExpr {
  Expr = Or ;
  Or = And ("|" And)* ;
  And = Atom ("&" Atom)* ;
  Atom = "!" Atom | "(" Expr ")" | name:IDENT ;
}
"""


# -- random grammars --------------------------------------------------------------

WORDS = ["alpha", "beta", "gamma", "delta", "kappa", "omega", "sigma", "zeta"]
PUNCTS = [";", ",", "(", ")", "[", "]", "{", "}", "::", ":", "=>", "<", ">", "<<", ">>", "-", "#", "%"]
KINDS = ["IDENT", "STRING", "INT"]


class _Labels:
    def __init__(self) -> None:
        self.n = 0

    def __call__(self, prefix: str) -> str:
        self.n += 1
        return f"{prefix}{self.n}"


def random_expr(rng: random.Random, depth: int, targets: list[str], labels: _Labels):
    """A random canonical expression (no single-item sequences or alternations)."""
    leaf = depth <= 0 or rng.random() < 0.35
    if leaf:
        pick = rng.randrange(5 if targets else 4)
        if pick == 0:
            return Terminal(rng.choice(WORDS + PUNCTS))
        if pick == 1:
            return TokenRef(rng.choice(KINDS), labels("a") if rng.random() < 0.8 else None)
        if pick == 2:
            return ConstantFlag(labels("f"), rng.choice(WORDS))
        if pick == 3:
            return Terminal(rng.choice(PUNCTS))
        target = rng.choice(targets)
        return NonterminalRef(target, labels("c") if rng.random() < 0.4 else None)
    pick = rng.randrange(4)
    if pick == 0:
        return Sequence(tuple(random_expr(rng, depth - 1, targets, labels) for _ in range(rng.randint(2, 4))))
    if pick == 1:
        alts = []
        while len(alts) < rng.randint(2, 3):
            alts.append(random_expr(rng, depth - 1, targets, labels))
        return Alternation(tuple(alts))
    if pick == 2:
        return Repetition(random_expr(rng, depth - 1, targets, labels), rng.randint(0, 1))
    return Optional(random_expr(rng, depth - 1, targets, labels))


def random_grammar(rng: random.Random, name: str = "G") -> GrammarModel:
    """A random grammar that passes all well-formedness checks by construction.

    References only point to later productions or externals, so there is no
    left recursion; labels are unique so roles never conflict.
    """
    n = rng.randint(1, 6)
    names = [f"P{i}" for i in range(n)]
    externals = [f"X{i}" for i in range(rng.randint(0, 2))]
    productions = []
    labels = _Labels()
    for i, pname in enumerate(names):
        targets = names[i + 1:] + externals
        head = TokenRef("IDENT", "name")
        body = random_expr(rng, rng.randint(0, 3), targets, labels)
        items = (head,) + (body.items if isinstance(body, Sequence) else (body,))
        productions.append(Production(pname, Sequence(items)))
    associations, simple_refs = [], []
    for k in range(rng.randint(0, 2) if n >= 2 else 0):
        left, right = rng.sample(names, 2)
        cards = ["*", "1", "0..1", "1..*", "2..5"]
        a = AssociationDecl(
            left, f"r{k}a", Cardinality.parse(rng.choice(cards)),
            right, f"r{k}b", Cardinality.parse(rng.choice(cards)),
        )
        associations.append(a)
        if rng.random() < 0.5:
            simple_refs.append(SimpleReferenceDecl(a.left_role, left, "name", right, "name"))
    return GrammarModel(
        name=name,
        productions=tuple(productions),
        externals=tuple(externals),
        associations=tuple(associations),
        simple_refs=tuple(simple_refs),
    )


# -- random inheritance hierarchies ------------------------------------------------


def random_hierarchy(rng: random.Random) -> tuple[GrammarModel, dict[str, GrammarModel]]:
    """A random inheritance DAG; returns (most-derived grammar, all grammars by name)."""
    pool = ["A", "B", "C", "D", "E"]
    grammars: dict[str, GrammarModel] = {}
    k = rng.randint(1, 6)
    for i in range(k):
        gname = f"G{i}"
        earlier = list(grammars)
        supers = tuple(rng.sample(earlier, rng.randint(0, min(3, len(earlier))))) if earlier else ()
        if i == k - 1 and earlier and not supers:
            supers = (earlier[-1],)
        prods = []
        for pname in rng.sample(pool, rng.randint(0 if supers else 1, 3)):
            body = Sequence((Terminal(f"g{i}"), Terminal(pname.lower())))
            prods.append(Production(pname, body))
        externals = ("Hole",) if rng.random() < 0.3 else ()
        assocs = ()
        if i == 0 and len(prods) >= 2:
            assocs = (AssociationDecl(prods[0].name, "fwd", Cardinality(0, None), prods[1].name, "bwd", Cardinality(1, 1)),)
        elif i > 0 and rng.random() < 0.3 and "G0" in grammars and grammars["G0"].associations:
            assocs = grammars["G0"].associations
        grammars[gname] = GrammarModel(
            name=gname,
            super_grammars=supers,
            productions=tuple(prods),
            externals=externals,
            associations=assocs,
        )
    return grammars[f"G{k - 1}"], grammars


def oracle_flatten(gm: GrammarModel, grammars: dict[str, GrammarModel]) -> dict[str, Production]:
    """Expected production per name: the last definition in DFS post-order."""
    order: list[str] = []

    def visit(name: str) -> None:
        if name in order:
            return
        for s in grammars[name].super_grammars:
            visit(s)
        order.append(name)

    visit(gm.name)
    result: dict[str, Production] = {}
    for name in order:
        for p in grammars[name].productions:
            result[p.name] = p
    return result


# -- host / fragment pairs sharing one lexer ------------------------------------------


class _LLGen:
    """Generates productions whose choices are decided by globally unique markers."""

    def __init__(self, rng: random.Random, markers: list[str]) -> None:
        self.rng = rng
        self.markers = markers
        self.labels = _Labels()

    def marker(self) -> Terminal:
        return Terminal(self.markers.pop())

    def body(self, depth: int, targets: list[str]):
        items = [self.item(depth, targets) for _ in range(self.rng.randint(1, 3))]
        return items[0] if len(items) == 1 else Sequence(tuple(items))

    def guarded(self, depth: int, targets: list[str]):
        rest = [self.item(depth, targets) for _ in range(self.rng.randint(0, 2))]
        return Sequence((self.marker(), *rest)) if rest else self.marker()

    def item(self, depth: int, targets: list[str]):
        rng = self.rng
        pick = rng.randrange(7 if depth > 0 else 4)
        if pick == 0:
            return TokenRef(rng.choice(KINDS), self.labels("a"))
        if pick == 1:
            return self.marker()
        if pick == 2:
            if not targets:
                return TokenRef("IDENT", self.labels("a"))
            return NonterminalRef(rng.choice(targets), None if rng.random() < 0.5 else self.labels("c"))
        if pick == 3:
            return Optional(Sequence((self.marker(), ConstantFlag(self.labels("f"), self.markers.pop()))))
        if pick == 4:
            return Optional(self.guarded(depth - 1, targets))
        if pick == 5:
            return Repetition(self.guarded(depth - 1, targets), rng.randint(0, 1))
        return Alternation(tuple(self.guarded(depth - 1, targets) for _ in range(rng.randint(2, 3))))


def _marker_pool(rng: random.Random) -> list[str]:
    pool = [f"k{i}" for i in range(200)] + ["::", "=>", "<<", ">>", "<", ">", "#", "%", "[", "]", "(", ")"]
    rng.shuffle(pool)
    return pool


def _terminals(gm: GrammarModel) -> set[str]:
    out = set()
    for p in gm.productions:
        for e in walk(p.body):
            if isinstance(e, Terminal):
                out.add(e.text)
            elif isinstance(e, ConstantFlag):
                out.add(e.keyword)
    return out


def _with_vocab(gm: GrammarModel, vocab: list[str]) -> GrammarModel:
    body = Sequence(tuple(Terminal(t) for t in vocab)) if len(vocab) > 1 else Terminal(vocab[0])
    return replace(gm, productions=gm.productions + (Production("Vocab", body),))


def rename_refs(e, mapping: dict[str, tuple[str, str | None]]):
    """Replace references by (new target, new label) pairs from ``mapping``."""
    if isinstance(e, NonterminalRef) and e.target in mapping:
        target, label = mapping[e.target]
        return NonterminalRef(target, e.label if e.label is not None else label)
    if isinstance(e, Sequence):
        return Sequence(tuple(rename_refs(i, mapping) for i in e.items))
    if isinstance(e, Alternation):
        return Alternation(tuple(rename_refs(a, mapping) for a in e.alts))
    if isinstance(e, Repetition):
        return Repetition(rename_refs(e.inner, mapping), e.min)
    if isinstance(e, Optional):
        return Optional(rename_refs(e.inner, mapping))
    return e


def random_host_fragment(rng: random.Random):
    """Return (host, fragment, merged) grammars sharing one terminal vocabulary.

    ``host`` declares ``external Hole`` and references it; ``fragment`` has
    start production ``Start``; ``merged`` is the host with ``Hole`` replaced
    by ``hole:Start`` and the fragment productions appended, renamed the way
    composition renames colliding names.
    """
    markers = _marker_pool(rng)
    gen = _LLGen(rng, markers)
    host_names = ["Root"] + rng.sample(["Item", "Part", "Node"], rng.randint(0, 2))
    frag_names = ["Start"] + rng.sample(["Item", "Piece", "Node"], rng.randint(0, 2))

    def productions(names, extra_targets):
        prods = []
        for i, n in enumerate(names):
            targets = names[i + 1:] + extra_targets
            prods.append(Production(n, gen.body(2, targets)))
        return prods

    host_prods = productions(host_names, ["Hole"])
    # make sure the hole is reachable from the root
    root = host_prods[0]
    hole_use = rng.choice([
        NonterminalRef("Hole"),
        Optional(Sequence((gen.marker(), NonterminalRef("Hole"), gen.marker()))),
        Repetition(Sequence((gen.marker(), NonterminalRef("Hole"))), 0),
    ])
    items = root.body.items if isinstance(root.body, Sequence) else (root.body,)
    host_prods[0] = Production("Root", Sequence((gen.marker(), hole_use, *items)))
    frag_prods = productions(frag_names, [])

    host = GrammarModel(name="Host", productions=tuple(host_prods), externals=("Hole",))
    frag = GrammarModel(name="Frag", productions=tuple(frag_prods))
    vocab = sorted(_terminals(host) | _terminals(frag))
    host = _with_vocab(host, vocab)
    frag = _with_vocab(frag, vocab)

    taken = set(host.class_names())
    rename = {n: (n if n not in taken else f"Frag_{n}") for n in frag.production_names}
    # renamed unlabeled references keep their original role name
    frag_map = {old: (new, lower_first(old)) for old, new in rename.items()}
    merged_prods = [
        Production(p.name, rename_refs(p.body, {"Hole": (rename["Start"], "hole")})) for p in host.productions
    ]
    merged_prods += [
        Production(rename[p.name], rename_refs(p.body, {k: v for k, v in frag_map.items() if k != v[0]}))
        for p in frag.productions
    ]
    merged = GrammarModel(name="Merged", productions=tuple(merged_prods))
    return host, frag, merged


# -- sentences ----------------------------------------------------------------------


class SentenceGen:
    """Random sentences of a grammar by top-down derivation."""

    def __init__(self, gm: GrammarModel, rng: random.Random, holes: dict[str, str] | None = None) -> None:
        self.gm = gm
        self.rng = rng
        self.holes = holes or {}
        self.counter = 0

    def fresh(self, kind: str) -> str:
        self.counter += 1
        if kind == "IDENT":
            return f"v{self.counter}"
        if kind == "INT":
            return str(self.counter)
        return f'"s{self.counter}"'

    def derive(self, e, depth: int, out: list[str]) -> None:
        rng = self.rng
        if isinstance(e, Terminal):
            out.append(e.text)
        elif isinstance(e, ConstantFlag):
            out.append(e.keyword)
        elif isinstance(e, TokenRef):
            out.append(self.fresh(e.kind))
        elif isinstance(e, NonterminalRef):
            target = self.holes.get(e.target, e.target)
            self.derive(self.gm.production(target).body, depth + 1, out)
        elif isinstance(e, Sequence):
            for item in e.items:
                self.derive(item, depth, out)
        elif isinstance(e, Alternation):
            self.derive(rng.choice(e.alts), depth, out)
        elif isinstance(e, Repetition):
            n = rng.randint(e.min, max(e.min, 2 if depth < 6 else 0))
            for _ in range(n):
                self.derive(e.inner, depth, out)
        elif isinstance(e, Optional):
            if depth < 6 and rng.random() < 0.6:
                self.derive(e.inner, depth, out)

    def sentence(self, start: str | None = None) -> str:
        out: list[str] = []
        start = start or self.gm.productions[0].name
        self.derive(self.gm.production(start).body, 0, out)
        return " ".join(out)


# -- linker oracle -------------------------------------------------------------------


def brute_force_links(m, lang):
    """Resolve simple references by scanning every node pair.

    Returns (error codes sorted, links) where links maps (node id, role) to
    the sorted list of linked ids, or None for links if errors occurred.
    """
    schema = lang.schema
    codes = []
    links: dict[tuple[int, str], list[int]] = {}
    for ref in lang.grammar.simple_refs:
        end = next(e for e in schema.association_ends(ref.source_class) if e.role == ref.role)
        for src in m.nodes:
            if not schema.is_subclass(src.cls, ref.source_class):
                continue
            value = src.attrs.get(ref.source_attr)
            if value is None:
                continue
            hits = [
                t.id for t in m.nodes
                if schema.is_subclass(t.cls, ref.target_class) and t.attrs.get(ref.target_attr) == value
            ]
            if len(hits) == 0:
                codes.append("E-LNK-001")
            elif len(hits) > 1:
                codes.append("E-LNK-002")
            else:
                links.setdefault((src.id, ref.role), []).append(hits[0])
                links.setdefault((hits[0], end.inverse_role), []).append(src.id)
    if codes:
        return sorted(codes), None
    return [], {k: sorted(v) for k, v in links.items()}


def actual_links(m) -> dict[tuple[int, str], list[int]]:
    return {(n.id, role): sorted(ids) for n in m.nodes for role, ids in n.links.items() if ids}


def assert_bidirectional(m, lang) -> None:
    """Every link has its inverse link and every target is a model node."""
    schema = lang.schema
    for n in m.nodes:
        for role, ids in n.links.items():
            end = next(e for e in schema.association_ends(n.cls) if e.role == role)
            for t in ids:
                assert 0 <= t < len(m.nodes)
                assert n.id in m.nodes[t].links[end.inverse_role], (n.id, role, t)


def automaton_text(state_names, transitions, name: str = "M") -> str:
    lines = [f"automaton {name} {{"]
    lines += [f"  state {s} ;" for s in state_names]
    lines += [f"  {a} - {act} > {b} ;" for a, act, b in transitions]
    lines.append("}")
    return "\n".join(lines) + "\n"


def big_automaton(n_transitions: int, n_states: int = 50) -> str:
    states = [f"S{i}" for i in range(n_states)]
    transitions = [(states[i % n_states], f"e{i}", states[(i * 7 + 1) % n_states]) for i in range(n_transitions)]
    return automaton_text(states, transitions, "Big")

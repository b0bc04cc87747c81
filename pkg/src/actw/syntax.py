r"""Formulas, sequents and dyadic sequents of infinitary action logic with !.

ASCII surface syntax (tightest first):

    prefix `!`, postfix `^*`        exponential / iteration
    `.`                             product, left-associative
    `\` and `/`                     left and right division, one level;
                                    `\` is right-associative, `/` left-associative
    `&`                             meet, left-associative
    `+`                             join, left-associative

`0` and `1` are constants, identifiers are variables, `=>` is the sequent
arrow.  A mixed unparenthesised division chain like ``a \ b / c`` groups the
`/`-runs first and then folds the `\`s to the right, i.e. ``a \ (b / c)``.

Sequent files carry one sequent per line; `#` starts a comment.  Dyadic
sequents are written ``{!F1, !F2} ; G1, G2 => C`` with ``{}`` for the empty
zone.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache


class Formula:
    """Base class of formula terms.  All terms are immutable values."""

    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True, repr=False)
class Var(Formula):
    name: str

    def __repr__(self):
        return f"Var({self.name})"


@dataclass(frozen=True, repr=False)
class Zero(Formula):
    def __repr__(self):
        return "Zero"


@dataclass(frozen=True, repr=False)
class One(Formula):
    def __repr__(self):
        return "One"


@dataclass(frozen=True, repr=False)
class Slash(Formula):
    """Left division ``left \ right``: the thing that, after `left`, gives `right`."""

    left: Formula
    right: Formula

    def __repr__(self):
        return f"Slash({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class RSlash(Formula):
    """Right division ``left / right``."""

    left: Formula
    right: Formula

    def __repr__(self):
        return f"RSlash({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Prod(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Prod({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Join(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Join({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Meet(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Meet({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Star(Formula):
    body: Formula

    def __repr__(self):
        return f"Star({self.body!r})"


@dataclass(frozen=True, repr=False)
class Bang(Formula):
    body: Formula

    def __repr__(self):
        return f"Bang({self.body!r})"


ZERO = Zero()
ONE = One()

BINARY_TYPES = (Slash, RSlash, Prod, Join, Meet)


def var(name: str) -> Var:
    return Var(name)


def prod_chain(parts) -> Formula:
    """Left-associated product of `parts`; the empty chain is `1`."""
    parts = list(parts)
    if not parts:
        return ONE
    out = parts[0]
    for p in parts[1:]:
        out = Prod(out, p)
    return out


def slash_chain(parts, final: Formula) -> Formula:
    """Right-associated division chain ``p1 \ p2 \ ... \ final``."""
    out = final
    for p in reversed(parts):
        out = Slash(p, out)
    return out


def complexity(f: Formula) -> int:
    """Total number of variable, constant and connective occurrences."""
    if isinstance(f, (Var, Zero, One)):
        return 1
    if isinstance(f, (Star, Bang)):
        return 1 + complexity(f.body)
    return 1 + complexity(f.left) + complexity(f.right)


def depth(f: Formula) -> int:
    """Term-tree depth; atoms have depth 1."""
    if isinstance(f, (Var, Zero, One)):
        return 1
    if isinstance(f, (Star, Bang)):
        return 1 + depth(f.body)
    return 1 + max(depth(f.left), depth(f.right))


def subformulas(f: Formula) -> frozenset:
    """Reflexive-transitive closure of immediate subterms, including `f`."""
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, (Star, Bang)):
            stack.append(g.body)
        elif isinstance(g, BINARY_TYPES):
            stack.append(g.left)
            stack.append(g.right)
    return frozenset(out)


def contains_star(f: Formula) -> bool:
    return any(isinstance(g, Star) for g in subformulas(f))


def star_under_bang(f: Formula) -> bool:
    """True if some `^*` occurs inside the scope of some `!`."""
    return any(
        isinstance(g, Bang) and contains_star(g.body) for g in subformulas(f)
    )


class FragmentClass(enum.IntEnum):
    """Classification of a !-formula; smaller is more restrictive."""

    NE = 0
    MONOIDAL = 1
    STAR_FREE = 2
    UNRESTRICTED = 3


def var_chain(f: Formula):
    """Variable list of a product chain, `1` standing for the empty chain.

    Returns None when `f` is not a chain of variables.
    """
    if isinstance(f, One):
        return []
    if isinstance(f, Var):
        return [f.name]
    if isinstance(f, Prod):
        l = var_chain(f.left)
        r = var_chain(f.right)
        if l is None or r is None:
            return None
        return l + r
    return None


def bang_chains(f: Formula):
    """For `!((b1...bn)\(c1...cm))` return (bs, cs); otherwise None."""
    if not isinstance(f, Bang):
        return None
    body = f.body
    if not isinstance(body, Slash):
        return None
    bs = var_chain(body.left)
    cs = var_chain(body.right)
    if bs is None or cs is None:
        return None
    return bs, cs


def classify_bang(f: Formula) -> FragmentClass:
    """Classify a !-formula per the fragment chain NE <= Monoidal <= StarFree."""
    if not isinstance(f, Bang):
        raise ValueError(f"not a !-formula: {f}")
    chains = bang_chains(f)
    if chains is not None:
        bs, cs = chains
        if len(cs) <= len(bs):
            return FragmentClass.NE
        return FragmentClass.MONOIDAL
    if not contains_star(f.body):
        return FragmentClass.STAR_FREE
    return FragmentClass.UNRESTRICTED


def is_monoidal_bang(f: Formula) -> bool:
    return isinstance(f, Bang) and classify_bang(f) <= FragmentClass.MONOIDAL


def fragment_of(obj) -> FragmentClass:
    """Worst class among the !-subformulas of a formula or (d)sequent."""
    if isinstance(obj, Formula):
        classes = [
            classify_bang(g) for g in subformulas(obj) if isinstance(g, Bang)
        ]
        return max(classes, default=FragmentClass.NE)
    parts = list(obj.antecedent) + [obj.succedent]
    if isinstance(obj, DSequent):
        parts.extend(obj.zone)
    return max((fragment_of(p) for p in parts), default=FragmentClass.NE)


@dataclass(frozen=True, repr=False)
class Sequent:
    antecedent: tuple
    succedent: Formula

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple(self.antecedent))

    def __str__(self):
        return print_sequent(self)

    def __repr__(self):
        return f"Sequent({self})"


@dataclass(frozen=True, repr=False)
class DSequent:
    """Sequent with a set-valued zone of restricted !-formulas."""

    zone: frozenset
    antecedent: tuple
    succedent: Formula

    def __post_init__(self):
        object.__setattr__(self, "zone", frozenset(self.zone))
        object.__setattr__(self, "antecedent", tuple(self.antecedent))
        for f in self.zone:
            if not is_monoidal_bang(f):
                raise ValueError(f"zone formula is not a monoidal !-formula: {f}")

    def __str__(self):
        return print_dsequent(self)

    def __repr__(self):
        return f"DSequent({self})"


def seq(antecedent, succedent) -> Sequent:
    return Sequent(tuple(antecedent), succedent)


def dseq(zone, antecedent, succedent) -> DSequent:
    return DSequent(frozenset(zone), tuple(antecedent), succedent)


# ---------------------------------------------------------------------------
# printing

_PREC_JOIN = 0
_PREC_MEET = 1
_PREC_DIV = 2
_PREC_PROD = 3
_PREC_UNARY = 4


def _prec(f: Formula) -> int:
    if isinstance(f, Join):
        return _PREC_JOIN
    if isinstance(f, Meet):
        return _PREC_MEET
    if isinstance(f, (Slash, RSlash)):
        return _PREC_DIV
    if isinstance(f, Prod):
        return _PREC_PROD
    if isinstance(f, (Star, Bang)):
        return _PREC_UNARY
    return 5


def print_formula(f: Formula) -> str:
    """Minimal-parenthesisation rendering; inverse of parse_formula."""

    def wrap(g, need):
        s = render(g)
        return f"({s})" if need else s

    def render(g):
        if isinstance(g, Var):
            return g.name
        if isinstance(g, Zero):
            return "0"
        if isinstance(g, One):
            return "1"
        if isinstance(g, Star):
            return wrap(g.body, _prec(g.body) < _PREC_UNARY) + "^*"
        if isinstance(g, Bang):
            # `!` applies to a postfix-starred atom, so stars may stay bare
            return "!" + wrap(g.body, _prec(g.body) < _PREC_UNARY)
        if isinstance(g, Prod):
            return (
                wrap(g.left, _prec(g.left) < _PREC_PROD)
                + " . "
                + wrap(g.right, _prec(g.right) <= _PREC_PROD)
            )
        if isinstance(g, Slash):
            # right-assoc; a `/`-chain on the left regroups the same way bare
            left_need = _prec(g.left) < _PREC_DIV or isinstance(g.left, Slash)
            return (
                wrap(g.left, left_need)
                + " \\ "
                + wrap(g.right, _prec(g.right) < _PREC_DIV)
            )
        if isinstance(g, RSlash):
            # left-assoc; a Slash on the left would regroup, so keep it wrapped
            left_need = _prec(g.left) < _PREC_DIV or isinstance(g.left, Slash)
            return (
                wrap(g.left, left_need)
                + " / "
                + wrap(g.right, _prec(g.right) <= _PREC_DIV)
            )
        if isinstance(g, Meet):
            return (
                wrap(g.left, _prec(g.left) < _PREC_MEET)
                + " & "
                + wrap(g.right, _prec(g.right) <= _PREC_MEET)
            )
        if isinstance(g, Join):
            return (
                wrap(g.left, _prec(g.left) < _PREC_JOIN)
                + " + "
                + wrap(g.right, _prec(g.right) <= _PREC_JOIN)
            )
        raise TypeError(f"not a formula: {g!r}")

    return render(f)


def print_sequent(s: Sequent) -> str:
    ant = ", ".join(print_formula(f) for f in s.antecedent)
    return (ant + " " if ant else "") + "=> " + print_formula(s.succedent)


def zone_sorted(zone) -> list:
    """Zone elements in the canonical (printed) order."""
    return sorted(zone, key=print_formula)


def print_dsequent(ds: DSequent) -> str:
    zone = ", ".join(print_formula(f) for f in zone_sorted(ds.zone))
    ant = ", ".join(print_formula(f) for f in ds.antecedent)
    return "{" + zone + "} ; " + (ant + " " if ant else "") + "=> " + print_formula(ds.succedent)


# ---------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<arrow>=>)|(?P<star>\^\*)"
    r"|(?P<punct>[01().+&\\/!,{};@]))"
)


@dataclass
class _Tokens:
    text: str
    toks: list = field(default_factory=list)
    i: int = 0

    def __post_init__(self):
        pos = 0
        n = len(self.text)
        while pos < n:
            m = _TOKEN_RE.match(self.text, pos)
            if m is None or m.end() == pos:
                stripped = self.text[pos:].lstrip()
                if not stripped:
                    break
                at = n - len(stripped)
                raise ParseError(f"unknown token {stripped[0]!r}", at)
            if m.group("ident"):
                self.toks.append(("ident", m.group("ident"), m.start("ident")))
            elif m.group("arrow"):
                self.toks.append(("=>", "=>", m.start("arrow")))
            elif m.group("star"):
                self.toks.append(("^*", "^*", m.start("star")))
            else:
                p = m.group("punct")
                self.toks.append((p, p, m.start("punct")))
            pos = m.end()
        self.toks.append(("eof", "", n))

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[1]!r}", t[2])
        return t


def _parse_atom(ts: _Tokens) -> Formula:
    kind, text, pos = ts.next()
    if kind == "ident":
        return Var(text)
    if kind == "0":
        return ZERO
    if kind == "1":
        return ONE
    if kind == "(":
        f = _parse_formula(ts)
        ts.expect(")")
        return f
    raise ParseError(f"expected a formula, found {text!r}", pos)


def _parse_unary(ts: _Tokens) -> Formula:
    if ts.peek()[0] == "!":
        ts.next()
        return Bang(_parse_unary(ts))
    f = _parse_atom(ts)
    while ts.peek()[0] == "^*":
        ts.next()
        f = Star(f)
    return f


def _parse_prod(ts: _Tokens) -> Formula:
    f = _parse_unary(ts)
    while ts.peek()[0] == ".":
        ts.next()
        f = Prod(f, _parse_unary(ts))
    return f


def _parse_div(ts: _Tokens) -> Formula:
    # collect `prod (op prod)*`, then group `/`-runs left-assoc and fold `\` right
    items = [_parse_prod(ts)]
    ops = []
    while ts.peek()[0] in ("\\", "/"):
        ops.append(ts.next()[0])
        items.append(_parse_prod(ts))
    segments = [items[0]]
    for op, item in zip(ops, items[1:]):
        if op == "/":
            segments[-1] = RSlash(segments[-1], item)
        else:
            segments.append(item)
    out = segments[-1]
    for s in reversed(segments[:-1]):
        out = Slash(s, out)
    return out


def _parse_meet(ts: _Tokens) -> Formula:
    f = _parse_div(ts)
    while ts.peek()[0] == "&":
        ts.next()
        f = Meet(f, _parse_div(ts))
    return f


def _parse_formula(ts: _Tokens) -> Formula:
    f = _parse_meet(ts)
    while ts.peek()[0] == "+":
        ts.next()
        f = Join(f, _parse_meet(ts))
    return f


def parse_formula(text: str) -> Formula:
    ts = _Tokens(text)
    f = _parse_formula(ts)
    ts.expect("eof")
    return f


def _parse_formula_list(ts: _Tokens, stop_kinds) -> list:
    if ts.peek()[0] in stop_kinds:
        return []
    out = [_parse_formula(ts)]
    while ts.peek()[0] == ",":
        ts.next()
        out.append(_parse_formula(ts))
    return out


def parse_sequent(text: str) -> Sequent:
    ts = _Tokens(text)
    ant = _parse_formula_list(ts, ("=>",))
    ts.expect("=>")
    succ = _parse_formula(ts)
    ts.expect("eof")
    return Sequent(tuple(ant), succ)


def parse_dsequent(text: str) -> DSequent:
    ts = _Tokens(text)
    ts.expect("{")
    zone = _parse_formula_list(ts, ("}",))
    ts.expect("}")
    ts.expect(";")
    ant = _parse_formula_list(ts, ("=>",))
    ts.expect("=>")
    succ = _parse_formula(ts)
    ts.expect("eof")
    return DSequent(frozenset(zone), tuple(ant), succ)


def parse_sequent_or_dsequent(text: str):
    if text.lstrip().startswith("{"):
        return parse_dsequent(text)
    return parse_sequent(text)


def read_sequent_file(text: str) -> list:
    """One sequent per line; `#` comments and blank lines are skipped."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse_sequent_or_dsequent(line))
    return out

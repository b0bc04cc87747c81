r"""Hypothesis embedding and the rewriting-based lower-bound construction.

A Turing machine configuration is the string ``l u a q v r``: `u a v` is the
written part of the tape, the state symbol sits immediately right of the
scanned symbol, and `l`, `r` are border markers.  The compiler emits one
rewrite rule per transition shape plus the accepting sweep that ends in the
distinguished symbol `e`, so `l u q0 r` reaches `v e` exactly for
`v = l f(u)`.  The machine interpreter mirrors those rules step for step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ordinals import ORD_ONE, OrdVec, ord_add, rho, rho_inv
from .syntax import (
    Bang,
    Formula,
    Meet,
    Prod,
    Sequent,
    Slash,
    Star,
    Var,
    contains_star,
    prod_chain,
    var_chain,
)


class MachineError(ValueError):
    pass


class SymbolClashError(ValueError):
    pass


# ---------------------------------------------------------------------------
# hypotheses and the deduction embedding

@dataclass(frozen=True)
class HypothesisSet:
    sequents: tuple

    def __post_init__(self):
        object.__setattr__(self, "sequents", tuple(self.sequents))

    def classify(self) -> tuple:
        return tuple(classify_hypothesis(h) for h in self.sequents)


def classify_hypothesis(h: Sequent) -> str:
    """ne / monoidal / star-free / general, by shape."""
    ants = [f.name if isinstance(f, Var) else None for f in h.antecedent]
    succ = var_chain(h.succedent)
    if None not in ants and succ is not None:
        return "ne" if len(succ) <= len(ants) else "monoidal"
    if not contains_star(h.succedent) and not any(
        contains_star(f) for f in h.antecedent
    ):
        return "star-free"
    return "general"


def upsilon(s: HypothesisSet) -> list:
    """One deduction formula (A1...An)\B per hypothesis; B alone when n = 0."""
    out = []
    for h in s.sequents:
        if h.antecedent:
            out.append(Slash(prod_chain(h.antecedent), h.succedent))
        else:
            out.append(h.succedent)
    return out


def embed(s: HypothesisSet, goal: Sequent) -> Sequent:
    banged = tuple(Bang(f) for f in upsilon(s))
    return Sequent(banged + goal.antecedent, goal.succedent)


# ---------------------------------------------------------------------------
# Turing machines

MOVES = ("L", "R", "N")


@dataclass(frozen=True)
class TuringMachine:
    states: frozenset
    tape_alphabet: frozenset
    blank: str
    transitions: frozenset  # (state, symbol, state', symbol', move)
    initial: str
    accepting: str
    input_alphabet: frozenset = frozenset()
    output_alphabet: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "tape_alphabet", frozenset(self.tape_alphabet))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        inp = frozenset(self.input_alphabet) or (self.tape_alphabet - {self.blank})
        outp = frozenset(self.output_alphabet) or (self.tape_alphabet - {self.blank})
        object.__setattr__(self, "input_alphabet", inp)
        object.__setattr__(self, "output_alphabet", outp)
        if self.blank not in self.tape_alphabet:
            raise MachineError("blank symbol must be a tape symbol")
        if self.initial not in self.states or self.accepting not in self.states:
            raise MachineError("initial and accepting states must be states")
        if not inp <= self.tape_alphabet - {self.blank}:
            raise MachineError("input alphabet must be non-blank tape symbols")
        if not outp <= self.tape_alphabet:
            raise MachineError("output alphabet must be tape symbols")
        for q, a, q2, b, mv in self.transitions:
            if q == self.accepting:
                raise MachineError("the accepting state has no outgoing transitions")
            if (
                q not in self.states
                or q2 not in self.states
                or a not in self.tape_alphabet
                or b not in self.tape_alphabet
                or mv not in MOVES
            ):
                raise MachineError(f"malformed transition {(q, a, q2, b, mv)}")


@dataclass(frozen=True)
class TmResult:
    status: str  # "output" | "timeout" | "stuck"
    output: tuple | None = None
    steps: int = 0


def tm_run(m: TuringMachine, input_symbols, step_bound: int) -> TmResult:
    """Direct configuration stepping, matching the compiled rewriting rules.

    The head starts on the last input symbol (on the border blank for empty
    input) and the output is read right of the head at acceptance.  A
    right move on the border blank is only possible with an empty right part,
    exactly like the rule table; otherwise the machine is stuck.
    """
    input_symbols = tuple(input_symbols)
    if not set(input_symbols) <= m.input_alphabet:
        raise MachineError("input symbols outside the input alphabet")
    left = list(input_symbols)
    right: list = []
    state = m.initial
    steps = 0
    by_key = {}
    for t in m.transitions:
        by_key.setdefault((t[0], t[1]), []).append(t)
    while True:
        if state == m.accepting:
            out = list(right)
            while out and out[-1] == m.blank:
                out.pop()
            return TmResult("output", tuple(out), steps)
        if steps >= step_bound:
            return TmResult("timeout", None, steps)
        scanned = left[-1] if left else m.blank
        options = by_key.get((state, scanned), [])
        if len(options) > 1:
            raise MachineError(f"nondeterministic on ({state}, {scanned})")
        if not options:
            return TmResult("stuck", None, steps)
        _, _, q2, b, mv = options[0]
        if left:
            if mv == "N":
                left[-1] = b
            elif mv == "L":
                left.pop()
                right.insert(0, b)
            else:
                left[-1] = b
                if right:
                    left.append(right.pop(0))
                else:
                    left.append(m.blank)
        else:
            if mv == "N":
                left.append(b)
            elif mv == "L":
                right.insert(0, b)
            else:
                if right:
                    return TmResult("stuck", None, steps)
                left.extend([b, m.blank])
        state = q2
        steps += 1


# ---------------------------------------------------------------------------
# string rewriting

@dataclass(frozen=True)
class RewritingSystem:
    alphabet: frozenset
    rules: tuple  # of (lhs tuple, rhs tuple)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(
            self,
            "rules",
            tuple((tuple(l), tuple(r)) for l, r in self.rules),
        )
        for lhs, rhs in self.rules:
            if not lhs:
                raise ValueError("rewrite rules need a non-empty left-hand side")
            for sym in lhs + rhs:
                if sym not in self.alphabet:
                    raise ValueError(f"symbol {sym!r} outside the alphabet")

    def __str__(self):
        return "\n".join(
            " ".join(l) + " -> " + " ".join(r) for l, r in self.rules
        )


def compile_tm(m: TuringMachine, left="l", right="r", end="e") -> RewritingSystem:
    """Rewriting rules simulating the machine between the border markers."""
    lprime = left + "'"
    fresh = {left, lprime, right, end}
    if len(fresh) != 4 or fresh & (m.tape_alphabet | m.states):
        raise SymbolClashError("border and end symbols must be fresh and distinct")
    lam = m.blank
    qa = m.accepting
    rules = []
    for q, a, q2, b, mv in sorted(m.transitions):
        if mv == "N":
            rules.append(((a, q), (b, q2)))
            if a == lam:
                rules.append(((left, q), (left, b, q2)))
        elif mv == "L":
            rules.append(((a, q), (q2, b)))
            if a == lam:
                rules.append(((left, q), (left, q2, b)))
        else:
            for c in sorted(m.tape_alphabet):
                rules.append(((a, q, c), (b, c, q2)))
            rules.append(((a, q, right), (b, lam, q2, right)))
            if a == lam:
                rules.append(((left, q, right), (left, b, lam, q2, right)))
    rules.append(((lam, qa), (qa,)))
    rules.append(((left, qa), (left, lprime, qa)))
    for c in sorted(m.output_alphabet):
        rules.append(((lprime, qa, c), (c, lprime, qa)))
    rules.append(((lprime, qa, lam), (lprime, qa)))
    rules.append(((lprime, qa, right), (end,)))
    alphabet = m.tape_alphabet | m.states | fresh
    seen = []
    for rule in rules:
        if rule not in seen:
            seen.append(rule)
    return RewritingSystem(alphabet, tuple(seen))


def srs_step(srs: RewritingSystem, word: tuple):
    """All one-step successors of the word."""
    out = []
    for lhs, rhs in srs.rules:
        n = len(lhs)
        for k in range(len(word) - n + 1):
            if word[k : k + n] == lhs:
                out.append(word[:k] + rhs + word[k + n :])
    return out


def srs_reach(
    srs: RewritingSystem,
    start,
    predicate,
    step_bound: int,
    breadth_bound: int = 100000,
):
    """Breadth-first reachability; (matching words, truncated flag)."""
    start = tuple(start)
    seen = {start}
    frontier = [start]
    matches = set()
    truncated = False
    if predicate(start):
        matches.add(start)
    for _ in range(step_bound):
        if not frontier:
            break
        nxt = []
        for word in frontier:
            for succ in srs_step(srs, word):
                if succ in seen:
                    continue
                if len(seen) >= breadth_bound:
                    truncated = True
                    return frozenset(matches), truncated
                seen.add(succ)
                if predicate(succ):
                    matches.add(succ)
                nxt.append(succ)
        frontier = nxt
    if frontier:
        truncated = True
    return frozenset(matches), truncated


def suffix_predicate(suffix):
    suffix = tuple(suffix)

    def pred(word):
        return len(word) >= len(suffix) and word[len(word) - len(suffix) :] == suffix

    return pred


# ---------------------------------------------------------------------------
# pairing and indices

def pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def unpair(n: int):
    w = (math.isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


def triple(i: int, j: int, k: int) -> int:
    return pair(i, pair(j, k))


def untriple(n: int):
    i, jk = unpair(n)
    j, k = unpair(jk)
    return i, j, k


@dataclass(frozen=True)
class Index:
    epsilon: int
    alpha: OrdVec
    e: int

    @property
    def code(self) -> int:
        return triple(self.epsilon, rho(self.alpha), self.e)


def decode_index(code: int):
    """Index for a valid ``<epsilon, alpha-code, e>`` triple, else None."""
    eps, j, e = untriple(code)
    if eps not in (0, 1) or j < 1:
        return None
    return Index(eps, rho_inv(j), e)


# ---------------------------------------------------------------------------
# the check functions

P1 = "p1"
P2 = "p2"


def f0(x: int, truth=None):
    """Base check: wraps rank-0 truth and defers positive-rank indices.

    Returns a p1/p2 word or None for undefined.  `truth` decides rank-0
    indices by their `e` component (the default: e > 0 is the true one).
    """
    idx = decode_index(x)
    if idx is None:
        return None
    if not idx.alpha:
        true0 = truth(idx) if truth is not None else idx.e > 0
        return (P1,) if true0 else None
    return (P1,) * x + (P2,)


def f1(w, universal=None):
    """Step check over p1/p2 words, per the two-block case analysis."""
    w = tuple(w)
    x1 = 0
    while x1 < len(w) and w[x1] == P1:
        x1 += 1
    rest = w[x1:]
    if any(sym != P2 for sym in rest) or any(sym not in (P1, P2) for sym in w):
        return (P1,)
    x2 = len(rest)
    idx = decode_index(x1)
    if idx is None or not idx.alpha:
        return (P1,)
    k, t = unpair(x2)
    kidx = decode_index(k)
    if (
        kidx is None
        or kidx.epsilon != 1 - idx.epsilon
        or not kidx.alpha < idx.alpha
    ):
        return (P1,)
    conv = universal if universal is not None else universal_converges
    if not conv(idx.e, k, t):
        return (P1,)
    return (P1,) * k + (P2,)


def encode_machine(m: TuringMachine) -> int:
    return int.from_bytes(format_machine(m).encode(), "big")


def decode_machine(e: int):
    try:
        return parse_machine(e.to_bytes((e.bit_length() + 7) // 8, "big").decode())
    except (ValueError, UnicodeDecodeError, OverflowError):
        return None


def universal_converges(e: int, k: int, t: int) -> bool:
    """Does machine number e accept the unary word p1^k within t steps?"""
    m = decode_machine(e)
    if m is None or P1 not in m.input_alphabet and k > 0:
        return False
    try:
        res = tm_run(m, (P1,) * k, t)
    except MachineError:
        return False
    return res.status == "output"


# ---------------------------------------------------------------------------
# the hypothesis system of the lower bound

LT, RT, FN, EX, GO, FL = "lt", "rt", "fn", "ex", "go", "fl"
OK_V, EN_V, PEX, PALL = "ok", "en", "pex", "pall"


def build_system(m0: TuringMachine, m1: TuringMachine):
    """Shared rewriting system of both check machines plus the ex-rules."""
    if m0.states & m1.states:
        raise SymbolClashError("the two machines need disjoint state sets")
    reserved = {LT, RT, FN, EX, GO, FL, OK_V, EN_V, PEX, PALL}
    if reserved & (m0.states | m1.states):
        raise SymbolClashError("machine states clash with reserved variables")
    s0 = compile_tm(m0, LT, RT, FN)
    s1 = compile_tm(m1, LT, RT, FN)
    rules = list(s0.rules)
    for rule in s1.rules:
        if rule not in rules:
            rules.append(rule)
    rules.append(((EX,), (P2, EX)))
    rules.append(((EX,), (GO,)))
    alphabet = s0.alphabet | s1.alphabet | {EX, GO, P2}
    return RewritingSystem(alphabet, tuple(rules))


def hypotheses_from_srs(srs: RewritingSystem) -> HypothesisSet:
    seqs = []
    for lhs, rhs in srs.rules:
        seqs.append(Sequent(tuple(Var(x) for x in lhs), prod_chain([Var(x) for x in rhs])))
    return HypothesisSet(tuple(seqs))


def build_H(m0: TuringMachine, m1: TuringMachine) -> HypothesisSet:
    return hypotheses_from_srs(build_system(m0, m1))


def cmp_formula(q: str, h: dict) -> Formula:
    """go \ (q . rt . fn \ ((p1 \ h[p1]) & (p2 \ h[p2])))."""
    analyse = Slash(
        Var(FN), Meet(Slash(Var(P1), h[P1]), Slash(Var(P2), h[P2]))
    )
    return Slash(Var(GO), prod_chain([Var(q), Var(RT), analyse]))


def gen_formulas(k: int, m0_start: str = "q00", m1_start: str = "q10") -> dict:
    """The named formula table of the energy construction, up to level k."""
    ok = Var(OK_V)
    en = Var(EN_V)
    go = Var(GO)
    table = {}
    table["Ok"] = Slash(ok, ok)
    h0 = {P1: ok, P2: go}
    h_ex = {P1: Var(FL), P2: Prod(Var(PALL), en)}
    h_all = {P1: ok, P2: Prod(Var(PEX), en)}
    table["Cmp0"] = cmp_formula(m0_start, h0)
    table["Cmp_ex"] = cmp_formula(m1_start, h_ex)
    table["Cmp_all"] = cmp_formula(m1_start, h_all)
    table["En_ex"] = prod_chain(
        [
            go,
            table["Cmp0"],
            Meet(table["Ok"], Slash(go, Var(EX))),
            Meet(table["Ok"], table["Cmp_ex"]),
        ]
    )
    table["En_all"] = prod_chain(
        [
            go,
            table["Cmp0"],
            Meet(table["Ok"], Slash(go, Prod(Star(Var(P2)), go))),
            Meet(table["Ok"], table["Cmp_all"]),
        ]
    )
    table["En0"] = Meet(
        table["Ok"],
        Slash(
            en,
            Meet(Slash(Var(PEX), table["En_ex"]), Slash(Var(PALL), table["En_all"])),
        ),
    )
    for j in range(1, k + 1):
        table[f"En{j}"] = Meet(
            table["Ok"], Slash(en, Prod(en, Star(table[f"En{j - 1}"])))
        )
    table["Brk"] = Meet(
        table["Ok"],
        Slash(
            en,
            Meet(
                Slash(Var(PEX), Slash(Star(Var(P1)), ok)),
                Slash(Var(PALL), Slash(Star(Var(P1)), ok)),
            ),
        ),
    )
    return table


def gen_main_sequent(
    x: int, ks, m0_start: str = "q00", m1_start: str = "q10"
) -> Sequent:
    """lt, p1^x, pQ, en, En(k_M), ..., En(k_1), Brk => lt . ok.

    An x that does not decode to an index maps to the underivable p => q.
    """
    ks = list(ks)
    if any(ks[i] < ks[i + 1] for i in range(len(ks) - 1)):
        raise ValueError("the energy levels must be non-increasing")
    idx = decode_index(x)
    if idx is None:
        return Sequent((Var("p"),), Var("q"))
    table = gen_formulas(max(ks) if ks else 0, m0_start, m1_start)
    q_var = Var(PEX) if idx.epsilon == 0 else Var(PALL)
    ant = [Var(LT)] + [Var(P1)] * x + [q_var, Var(EN_V)]
    for level in reversed(ks):
        ant.append(table[f"En{level}"])
    ant.append(table["Brk"])
    return Sequent(tuple(ant), Prod(Var(LT), Var(OK_V)))


def base_case_sequent(
    x: int, quantifier: str = "ex", m0_start: str = "q00", m1_start: str = "q10"
) -> Sequent:
    """lt, p1^x, pQ, en, Brk => lt . ok, derivable independently of x."""
    table = gen_formulas(0, m0_start, m1_start)
    q_var = Var(PEX) if quantifier == "ex" else Var(PALL)
    ant = (
        [Var(LT)] + [Var(P1)] * x + [q_var, Var(EN_V), table["Brk"]]
    )
    return Sequent(tuple(ant), Prod(Var(LT), Var(OK_V)))


def fail_subcase_sequent(ks, m0_start: str = "q00", m1_start: str = "q10") -> Sequent:
    """lt, fl, En(...), Brk => lt . ok; the dead branch of the step analysis."""
    ks = list(ks)
    table = gen_formulas(max(ks) if ks else 0, m0_start, m1_start)
    ant = [Var(LT), Var(FL)]
    for level in reversed(ks):
        ant.append(table[f"En{level}"])
    ant.append(table["Brk"])
    return Sequent(tuple(ant), Prod(Var(LT), Var(OK_V)))


def ks_for_alpha(alpha: OrdVec) -> list:
    """Non-increasing exponents with w^k1 + ... + w^kM = alpha + 1."""
    succ = ord_add(alpha, ORD_ONE)
    out = []
    for i in range(len(succ.coeffs) - 1, -1, -1):
        out.extend([i] * succ.coeffs[i])
    return out


# ---------------------------------------------------------------------------
# sample machines

def identity_machine(symbols=("a", "b"), blank="lam", prefix="qi") -> TuringMachine:
    """Moves left to the border and accepts; computes the identity."""
    q0, qa = prefix + "0", prefix + "a"
    trans = {(q0, s, q0, s, "L") for s in symbols}
    trans.add((q0, blank, qa, blank, "N"))
    return TuringMachine(
        {q0, qa},
        frozenset(symbols) | {blank},
        blank,
        trans,
        q0,
        qa,
        frozenset(symbols),
        frozenset(symbols),
    )


def successor_machine(symbol="a", blank="lam", prefix="qs") -> TuringMachine:
    """Unary successor: prepends one symbol after walking to the border."""
    q0, q1, q2, qa = (prefix + s for s in ("0", "1", "2", "a"))
    trans = {
        (q0, symbol, q0, symbol, "L"),
        (q0, blank, q1, symbol, "N"),
        (q1, symbol, q2, symbol, "L"),
        (q2, blank, qa, blank, "N"),
    }
    return TuringMachine(
        {q0, q1, q2, qa},
        frozenset({symbol, blank}),
        blank,
        trans,
        q0,
        qa,
        frozenset({symbol}),
        frozenset({symbol}),
    )


def eraser_machine(symbols=("a", "b"), blank="lam", prefix="qe") -> TuringMachine:
    """Erases the tape while walking left; computes the empty output."""
    q0, qa = prefix + "0", prefix + "a"
    trans = {(q0, s, q0, blank, "L") for s in symbols}
    trans.add((q0, blank, qa, blank, "N"))
    return TuringMachine(
        {q0, qa},
        frozenset(symbols) | {blank},
        blank,
        trans,
        q0,
        qa,
        frozenset(symbols),
        frozenset(symbols),
    )


def demo_check_machines():
    """Small stand-ins for the two check machines (the pipeline is parametric)."""
    return (
        identity_machine((P1, P2), prefix="q0"),
        identity_machine((P1, P2), prefix="q1"),
    )


# ---------------------------------------------------------------------------
# machine and rewriting-system files

def parse_machine(text: str) -> TuringMachine:
    fields = {"trans": []}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        rest = rest.strip()
        if key == "trans":
            lhs, _, rhs = rest.partition("->")
            parts = lhs.split() + rhs.split()
            if len(parts) != 5 or parts[4] not in MOVES:
                raise ValueError(f"malformed transition line: {raw!r}")
            fields["trans"].append(tuple(parts))
        elif key in ("states", "tape", "input", "output"):
            fields[key] = rest.split()
        elif key in ("initial", "accepting", "blank"):
            fields[key] = rest
        else:
            raise ValueError(f"unknown machine field {key!r}")
    try:
        return TuringMachine(
            frozenset(fields["states"]),
            frozenset(fields["tape"]),
            fields["blank"],
            frozenset(fields["trans"]),
            fields["initial"],
            fields["accepting"],
            frozenset(fields.get("input", [])),
            frozenset(fields.get("output", [])),
        )
    except KeyError as exc:
        raise ValueError(f"missing machine field {exc.args[0]!r}") from None


def format_machine(m: TuringMachine) -> str:
    lines = [
        "states: " + " ".join(sorted(m.states)),
        "tape: " + " ".join(sorted(m.tape_alphabet)),
        "blank: " + m.blank,
        "input: " + " ".join(sorted(m.input_alphabet)),
        "output: " + " ".join(sorted(m.output_alphabet)),
        "initial: " + m.initial,
        "accepting: " + m.accepting,
    ]
    for t in sorted(m.transitions):
        lines.append("trans: {} {} -> {} {} {}".format(*t))
    return "\n".join(lines) + "\n"


def parse_srs(text: str) -> RewritingSystem:
    rules = []
    symbols = set()
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        lhs, arrow, rhs = line.partition("->")
        if not arrow:
            raise ValueError(f"missing -> in rule line: {raw!r}")
        left = tuple(lhs.split())
        right = tuple(rhs.split())
        if not left:
            raise ValueError(f"empty left-hand side in rule line: {raw!r}")
        rules.append((left, right))
        symbols.update(left + right)
    return RewritingSystem(frozenset(symbols), tuple(rules))

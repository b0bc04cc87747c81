r"""Derivability engines.

* `decide_ne_star_free`: exact decision for star-free dyadic sequents whose
  !-formulas are all non-expanding.  Backward from the goal, no rule
  increases the weight |Gamma| + |C| outside the zone, zones only grow inside
  the goal's !-subformulas, and repetition along a branch can be abandoned,
  so the reachable space is finite and a memoised fixpoint decides it.
* `prove_bounded`: three-valued search for monoidal dyadic sequents.  A
  positive answer always carries a checkable proof (omega nodes closed by
  schema certificates); a negative answer always carries a sound refutation
  (an exact subcall or a refuted omega instance); everything else is Unknown.
* flat bounded search and hypothesis-leaf search for the deduction-theorem
  and dyadic-equivalence cross-checks;
* a bounded backward engine for the basic calculus;
* `rank_upper_bound`, the weight/rank side of the derivation bookkeeping.

Negative caching discipline: a failure computed while some branch was
abandoned due to an ancestor repeat is valid only relative to that path, so
only untainted failures enter the memo.  Minimal proofs never repeat a
sequent along a branch, hence abandoning repeats keeps the root verdict
exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .calculus import (
    BLOCK,
    Derivation,
    RuleId,
    SchemaCertificate,
    StarFamily,
    TNode,
    TSeq,
    backward_finitary,
    bounded_omega_node,
    check_derivation,
    omega_node,
    omega_premises_at,
    plug,
    verify_schema,
    verify_schema_explain,
)
from .dyadic import backward_bsc, backward_dyadic, bsc_axiom, to_dyadic
from .ordinals import ORD_ONE, ORD_ZERO, OrdVec, ord_add, ord_max
from .syntax import (
    ONE,
    Bang,
    DSequent,
    FragmentClass,
    Formula,
    Join,
    Meet,
    One,
    Prod,
    RSlash,
    Sequent,
    Slash,
    Star,
    Var,
    Zero,
    bang_chains,
    complexity,
    contains_star,
    fragment_of,
    subformulas,
)

DERIVABLE = "derivable"
UNDERIVABLE = "underivable"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    status: str
    proof: Derivation | None = None
    witness: tuple | None = None  # (star position, refuted instance n)
    bounds: dict | None = None

    def __bool__(self):
        return self.status == DERIVABLE


def cparam(s) -> int:
    """|Gamma| + |C| over the non-zone part; the zone contributes nothing."""
    return sum(complexity(f) for f in s.antecedent) + complexity(s.succedent)


# ---------------------------------------------------------------------------
# exact engine for the star-free non-expanding fragment

_VAR, _ZERO, _ONE, _SLASH, _RSLASH, _PROD, _JOIN, _MEET, _STAR, _BANG = range(10)

_KIND_CODE = {
    Var: _VAR,
    Zero: _ZERO,
    One: _ONE,
    Slash: _SLASH,
    RSlash: _RSLASH,
    Prod: _PROD,
    Join: _JOIN,
    Meet: _MEET,
    Star: _STAR,
    Bang: _BANG,
}


class NeContext:
    """Interning tables and a shared memo for exact NE decisions.

    Reusing one context across many goals shares all verdicts, which is what
    makes exhaustive corpus sweeps cheap.
    """

    def __init__(self):
        self.fid = {}
        self.formulas = []
        self.kind = []
        self.arg1 = []
        self.arg2 = []
        self.chain = []  # fid -> (bvec, cvec) for monoidal bangs, else None
        self.zid = {}
        self.zones = []  # zid -> frozenset of fids
        self.zchains = []  # zid -> tuple of (bvec, cvec, bang fid)
        self.zone_add = {}
        self.memo = {}

    def intern(self, f: Formula) -> int:
        got = self.fid.get(f)
        if got is not None:
            return got
        code = _KIND_CODE[type(f)]
        a = b = -1
        if isinstance(f, (Star, Bang)):
            a = self.intern(f.body)
        elif code >= _SLASH and code != _STAR:
            a = self.intern(f.left)
            b = self.intern(f.right)
        n = len(self.formulas)
        self.fid[f] = n
        self.formulas.append(f)
        self.kind.append(code)
        self.arg1.append(a)
        self.arg2.append(b)
        chain = None
        if isinstance(f, Bang):
            chains = bang_chains(f)
            if chains is not None:
                bs, cs = chains
                chain = (
                    tuple(self.intern(Var(x)) for x in bs),
                    tuple(self.intern(Var(x)) for x in cs),
                )
        self.chain.append(chain)
        return n

    def intern_zone(self, fids) -> int:
        fz = frozenset(fids)
        got = self.zid.get(fz)
        if got is not None:
            return got
        n = len(self.zones)
        self.zid[fz] = n
        self.zones.append(fz)
        self.zchains.append(
            tuple(
                sorted(
                    (self.chain[f][0], self.chain[f][1], f)
                    for f in fz
                    if self.chain[f] is not None
                )
            )
        )
        return n

    def _zone_plus(self, zid: int, fid: int) -> int:
        got = self.zone_add.get((zid, fid))
        if got is None:
            got = self.intern_zone(self.zones[zid] | {fid})
            self.zone_add[(zid, fid)] = got
        return got

    def intern_dsequent(self, ds: DSequent):
        zid = self.intern_zone(self.intern(f) for f in ds.zone)
        return (zid, self.intern(ds.succedent)) + tuple(
            self.intern(f) for f in ds.antecedent
        )

    def key_to_dsequent(self, key) -> DSequent:
        zid, succ = key[0], key[1]
        return DSequent(
            frozenset(self.formulas[f] for f in self.zones[zid]),
            tuple(self.formulas[f] for f in key[2:]),
            self.formulas[succ],
        )

    def instances(self, key):
        """Backward finitary dyadic instances over interned keys."""
        zid, succ = key[0], key[1]
        ant = key[2:]
        kind, arg1, arg2 = self.kind, self.arg1, self.arg2
        out = []
        ks = kind[succ]
        if len(ant) == 1 and ant[0] == succ:
            out.append((("Id_d", None, None), ()))
        if not ant and ks == _ONE:
            out.append((("OneR_d", None, None), ()))
        if any(kind[f] == _ZERO for f in ant):
            out.append((("ZeroL_d", None, None), ()))
        for k, f in enumerate(ant):
            kf = kind[f]
            if kf == _PROD:
                out.append(
                    (
                        ("ProdL_d", k, None),
                        ((zid, succ) + ant[:k] + (arg1[f], arg2[f]) + ant[k + 1 :],),
                    )
                )
            elif kf == _ONE:
                out.append((("OneL_d", k, None), ((zid, succ) + ant[:k] + ant[k + 1 :],)))
            elif kf == _JOIN:
                out.append(
                    (
                        ("JoinL_d", k, None),
                        (
                            (zid, succ) + ant[:k] + (arg1[f],) + ant[k + 1 :],
                            (zid, succ) + ant[:k] + (arg2[f],) + ant[k + 1 :],
                        ),
                    )
                )
            elif kf == _MEET:
                out.append(
                    (
                        ("MeetL1_d", k, None),
                        ((zid, succ) + ant[:k] + (arg1[f],) + ant[k + 1 :],),
                    )
                )
                out.append(
                    (
                        ("MeetL2_d", k, None),
                        ((zid, succ) + ant[:k] + (arg2[f],) + ant[k + 1 :],),
                    )
                )
            elif kf == _SLASH:
                for j in range(k + 1):
                    out.append(
                        (
                            ("SlashL_d", k, None),
                            (
                                (zid, arg1[f]) + ant[j:k],
                                (zid, succ) + ant[:j] + (arg2[f],) + ant[k + 1 :],
                            ),
                        )
                    )
            elif kf == _RSLASH:
                for j in range(k + 1, len(ant) + 1):
                    out.append(
                        (
                            ("RSlashL_d", k, None),
                            (
                                (zid, arg2[f]) + ant[k + 1 : j],
                                (zid, succ) + ant[:k] + (arg1[f],) + ant[j:],
                            ),
                        )
                    )
            elif kf == _BANG and self.chain[f] is not None:
                out.append(
                    (
                        ("BangLd", k, None),
                        ((self._zone_plus(zid, f), succ) + ant[:k] + ant[k + 1 :],),
                    )
                )
        if ks == _SLASH:
            out.append((("SlashR_d", None, None), ((zid, arg2[succ], arg1[succ]) + ant,)))
        elif ks == _RSLASH:
            out.append((("RSlashR_d", None, None), ((zid, arg1[succ]) + ant + (arg2[succ],),)))
        elif ks == _PROD:
            for j in range(len(ant) + 1):
                out.append(
                    (
                        ("ProdR_d", None, None),
                        ((zid, arg1[succ]) + ant[:j], (zid, arg2[succ]) + ant[j:]),
                    )
                )
        elif ks == _JOIN:
            out.append((("JoinR1_d", None, None), ((zid, arg1[succ]) + ant,)))
            out.append((("JoinR2_d", None, None), ((zid, arg2[succ]) + ant,)))
        elif ks == _MEET:
            out.append(
                (
                    ("MeetR_d", None, None),
                    ((zid, arg1[succ]) + ant, (zid, arg2[succ]) + ant),
                )
            )
        elif ks == _BANG and not ant:
            out.append((("BangRd", None, None), ((zid, arg1[succ]),)))
        for bvec, cvec, bf in self.zchains[zid]:
            n = len(bvec)
            positions = range(len(ant) - n + 1) if n else range(len(ant) + 1)
            for k in positions:
                if n and ant[k : k + n] != bvec:
                    continue
                new_ant = ant[:k] + cvec + ant[k + n :]
                if new_ant == ant:
                    continue
                out.append((("Ad", k, bf), ((zid, succ) + new_ant,)))
        return out

    def solve(self, key) -> bool:
        memo = self.memo
        got = memo.get(key)
        if got is not None:
            return bool(got)
        onpath = {key}
        # frame: [key, instances, inst index, premise index, tainted]
        stack = [[key, self.instances(key), 0, 0, False]]
        result = None
        while stack:
            fr = stack[-1]
            if result is not None:
                ok, taint = result
                result = None
                if ok:
                    fr[3] += 1
                else:
                    fr[4] |= taint
                    fr[2] += 1
                    fr[3] = 0
            while True:
                if fr[2] >= len(fr[1]):
                    if not fr[4]:
                        memo[fr[0]] = False
                    onpath.discard(fr[0])
                    stack.pop()
                    result = (False, fr[4])
                    break
                desc, prems = fr[1][fr[2]]
                if fr[3] >= len(prems):
                    memo[fr[0]] = (desc, prems)
                    onpath.discard(fr[0])
                    stack.pop()
                    result = (True, False)
                    break
                prem = prems[fr[3]]
                hit = memo.get(prem)
                if hit is not None:
                    if hit:
                        fr[3] += 1
                    else:
                        fr[2] += 1
                        fr[3] = 0
                    continue
                if prem in onpath:
                    fr[4] = True
                    fr[2] += 1
                    fr[3] = 0
                    continue
                onpath.add(prem)
                stack.append([prem, self.instances(prem), 0, 0, False])
                break
        entry = memo.get(key)
        return bool(entry) if entry is not None else bool(result and result[0])

    def materialize(self, key) -> Derivation:
        entry = self.memo[key]
        if not entry:
            raise ValueError("no proof recorded for an underivable sequent")
        desc, prems = entry
        kids = tuple(self.materialize(p) for p in prems)
        kindname, pos, ffid = desc
        rid = RuleId(
            kindname,
            pos=pos,
            formula=self.formulas[ffid] if ffid is not None else None,
        )
        return Derivation(rid, self.key_to_dsequent(key), kids)


def decide_ne_star_free(ds: DSequent, ctx: NeContext | None = None, want_proof=True) -> Verdict:
    """Exact decision for star-free dyadic sequents in the NE fragment."""
    if any(contains_star(f) for f in ds.antecedent) or contains_star(ds.succedent):
        raise ValueError("decide_ne_star_free requires a star-free sequent")
    if fragment_of(ds) > FragmentClass.NE:
        raise ValueError("decide_ne_star_free requires the NE fragment")
    ctx = ctx if ctx is not None else NeContext()
    key = ctx.intern_dsequent(ds)
    if ctx.solve(key):
        return Verdict(DERIVABLE, proof=ctx.materialize(key) if want_proof else None)
    return Verdict(UNDERIVABLE)


def enumerate_fin(ds: DSequent, cap: int):
    """Backward closure under finitary dyadic rules; (visited, truncated)."""
    seen = {ds}
    frontier = [ds]
    truncated = False
    while frontier:
        s = frontier.pop()
        for _, prems in backward_dyadic(s):
            for p in prems:
                if p in seen:
                    continue
                if len(seen) >= cap:
                    truncated = True
                    return frozenset(seen), truncated
                seen.add(p)
                frontier.append(p)
    return frozenset(seen), truncated


# ---------------------------------------------------------------------------
# bounded three-valued search for the monoidal fragment

def _is_ne(ds: DSequent) -> bool:
    return fragment_of(ds) <= FragmentClass.NE


def _star_free(ds) -> bool:
    return not (
        any(contains_star(f) for f in ds.antecedent) or contains_star(ds.succedent)
    )


class _BoundedEngine:
    def __init__(self, depth: int, star_bound: int):
        self.depth = depth
        self.star_bound = star_bound
        self.ne = NeContext()
        self.proofs = {}
        self.refuted = {}

    def verdict_of(self, ds) -> str:
        return self._solve(ds, self.depth, frozenset())

    def _solve(self, ds: DSequent, depth: int, path) -> str:
        if ds in self.proofs:
            return DERIVABLE
        if ds in self.refuted:
            return UNDERIVABLE
        if _star_free(ds) and _is_ne(ds):
            key = self.ne.intern_dsequent(ds)
            if self.ne.solve(key):
                self.proofs[ds] = self.ne.materialize(key)
                return DERIVABLE
            self.refuted[ds] = None
            return UNDERIVABLE
        if depth <= 0 or ds in path:
            return UNKNOWN
        path = path | {ds}

        star_positions = [
            k for k, f in enumerate(ds.antecedent) if isinstance(f, Star)
        ]
        for k in star_positions:
            fam = omega_premises_at(ds, k)
            for n in range(self.star_bound + 1):
                if self._solve(fam(n), depth - 1, path) == UNDERIVABLE:
                    self.refuted[ds] = (k, n)
                    return UNDERIVABLE

        for rid, prems in backward_dyadic(ds):
            kids = []
            for p in prems:
                if self._solve(p, depth - 1, path) != DERIVABLE:
                    break
                kids.append(self.proofs[p])
            else:
                self.proofs[ds] = Derivation(rid, ds, tuple(kids))
                return DERIVABLE

        for k in star_positions:
            node = self._close_omega(ds, k, depth - 1, path)
            if node is not None:
                self.proofs[ds] = node
                return DERIVABLE
        return UNKNOWN

    def _close_omega(self, ds, k, depth, path):
        fam = StarFamily.of(ds, k)
        cert = self._extend_cert(fam, depth, path) or self._plug_cert(fam, depth, path)
        if cert is None:
            return None
        if not verify_schema(cert):
            return None
        return omega_node(ds, k, cert)

    def _extend_cert(self, fam: StarFamily, depth, path):
        if not isinstance(fam.succedent, Star):
            return None
        if fam.gamma and fam.delta:
            return None
        side = "left" if not fam.gamma else "right"
        inst0 = fam.instance(0)
        base = None
        for rid, prems in backward_dyadic(inst0):
            if rid.kind != "StarRn_d":
                continue
            kids = []
            for p in prems:
                if self._solve(p, depth, path) != DERIVABLE:
                    break
                kids.append(self.proofs[p])
            else:
                base = Derivation(rid, inst0, tuple(kids))
                break
        if base is None:
            return None
        extra_goal = DSequent(fam.zone, (fam.body,), fam.succedent.body)
        if self._solve(extra_goal, depth, path) != DERIVABLE:
            return None
        return SchemaCertificate(fam, base, extra=self.proofs[extra_goal], side=side)

    def _plug_cert(self, fam: StarFamily, depth, path, fuel: int = 4):
        if self._solve(fam.instance(0), depth, path) != DERIVABLE:
            return None
        base = self.proofs[fam.instance(0)]
        used = set()
        for f in fam.gamma + (fam.body, fam.succedent) + fam.delta:
            used.update(g.name for g in subformulas(f) if isinstance(g, Var))
        for f in fam.zone:
            used.update(g.name for g in subformulas(f) if isinstance(g, Var))
        i = 0
        while f"x{i}_" in used:
            i += 1
        sent = Var(f"x{i}_")
        hole = TSeq(fam.gamma + (BLOCK,) + fam.delta, fam.succedent, fam.zone)

        def search(tseq: TSeq, fuel: int):
            if tseq == hole:
                return TNode(None, tseq)
            if fuel == 0:
                return None
            concrete = tseq.instantiate((sent,))
            for rid, prems in backward_dyadic(concrete):
                tkid = None
                kids = []
                viable = True
                for p in prems:
                    hits = [j for j, g in enumerate(p.antecedent) if g == sent]
                    if len(hits) > 1 or (hits and tkid is not None):
                        viable = False
                        break
                    if hits:
                        parts = (
                            p.antecedent[: hits[0]]
                            + (BLOCK,)
                            + p.antecedent[hits[0] + 1 :]
                        )
                        tkid = TSeq(parts, p.succedent, p.zone)
                        kids.append(None)
                    else:
                        if self._solve(p, depth, path) != DERIVABLE:
                            viable = False
                            break
                        kids.append(self.proofs[p])
                if not viable or tkid is None:
                    continue
                sub = search(tkid, fuel - 1)
                if sub is None:
                    continue
                kids = tuple(sub if c is None else c for c in kids)
                return TNode(rid, tseq, kids)
            return None

        for parts in (
            fam.gamma + (fam.body, BLOCK) + fam.delta,
            fam.gamma + (BLOCK, fam.body) + fam.delta,
        ):
            root = search(TSeq(parts, fam.succedent, fam.zone), fuel)
            if root is not None:
                return SchemaCertificate(fam, base, template=root)
        return None


def star_schema_proof(
    ds: DSequent, position: int, depth: int = 12, star_bound: int = 4
) -> Derivation | None:
    """Proof of `ds` by the omega rule at the position, certificate-closed.

    Unlike `prove_bounded`, this insists on ending with the omega rule even
    when a shorter route (say the identity axiom) exists.
    """
    engine = _BoundedEngine(depth, star_bound)
    return engine._close_omega(ds, position, depth, frozenset())


def prove_bounded(ds: DSequent, depth: int = 14, star_bound: int = 4) -> Verdict:
    """Three-valued bounded derivability for the monoidal dyadic fragment."""
    if fragment_of(ds) > FragmentClass.MONOIDAL:
        raise ValueError("prove_bounded requires the monoidal fragment")
    engine = _BoundedEngine(depth, star_bound)
    status = engine.verdict_of(ds)
    bounds = {"depth": depth, "star_bound": star_bound}
    if status == DERIVABLE:
        return Verdict(DERIVABLE, proof=engine.proofs[ds], bounds=bounds)
    if status == UNDERIVABLE:
        return Verdict(UNDERIVABLE, witness=engine.refuted[ds], bounds=bounds)
    return Verdict(UNKNOWN, bounds=bounds)


# ---------------------------------------------------------------------------
# flat bounded search (with the !-structural rules) and hypothesis search

class _FlatEngine:
    def __init__(self, hypotheses, depth, star_bound, length_cap):
        self.hyps = frozenset(hypotheses)
        self.depth = depth
        self.star_bound = star_bound
        self.length_cap = length_cap
        self.proofs = {}
        self.failed = set()

    def solve(self, s: Sequent, depth: int, path):
        """(derivable?, tainted?) with taint meaning a bound was involved."""
        if s in self.proofs:
            return True, False
        if s in self.failed:
            return False, False
        if len(s.antecedent) > self.length_cap:
            return False, True
        if s in path:
            return False, True
        if depth <= 0:
            return False, True
        path = path | {s}
        taint = False
        stars = [k for k, f in enumerate(s.antecedent) if isinstance(f, Star)]
        for k in stars:
            fam = omega_premises_at(s, k)
            for n in range(self.star_bound + 1):
                ok, t = self.solve(fam(n), depth - 1, path)
                if not ok and not t:
                    self.failed.add(s)
                    return False, False
        if stars:
            taint = True  # a positive closure of the omega family is out of reach

        for rid, prems in self._instances(s):
            kids = []
            bad = False
            for p in prems:
                ok, t = self.solve(p, depth - 1, path)
                if not ok:
                    taint |= t
                    bad = True
                    break
                kids.append(self.proofs[p])
            if not bad:
                self.proofs[s] = Derivation(rid, s, tuple(kids))
                return True, False
        if not taint:
            self.failed.add(s)
        return False, taint

    def _instances(self, s: Sequent):
        return backward_finitary(s, self.hyps)

    def verdict(self, s: Sequent) -> Verdict:
        ok, taint = self.solve(s, self.depth, frozenset())
        bounds = {"depth": self.depth, "length_cap": self.length_cap}
        if ok:
            return Verdict(DERIVABLE, proof=self.proofs[s], bounds=bounds)
        if taint:
            return Verdict(UNKNOWN, bounds=bounds)
        return Verdict(UNDERIVABLE, bounds=bounds)


def prove_flat_bounded(
    s: Sequent, depth: int = 12, star_bound: int = 4, length_cap: int | None = None
) -> Verdict:
    """Bounded cut-free search in the flat system, !-structural rules included.

    Underivable is only reported from an exhausted search in which no bound
    (depth, length, or an unclosed omega family) was ever hit.
    """
    cap = length_cap if length_cap is not None else max(8, len(s.antecedent) + 4)
    return _FlatEngine((), depth, star_bound, cap).verdict(s)


def derive_from_hypotheses(
    s: Sequent,
    hypotheses,
    complexity_cap: int | None = None,
) -> Verdict:
    """Derivability from hypothesis leaves in the star-free flat system.

    Cut belongs to the calculus here: without it, hypotheses do not compose.
    The answer is the forward least fixpoint over the space of sequents drawn
    from the subformula universe of the goal and of the hypotheses' deduction
    formulas, with weight capped at that of the embedded !-sequent.
    Reconstructing a proof from a dyadic proof of the embedding stays inside
    both bounds, so the capped space loses nothing at matching scale.
    """
    hypotheses = tuple(hypotheses)
    parts = list(s.antecedent) + [s.succedent]
    for h in hypotheses:
        parts.extend(h.antecedent)
        parts.append(h.succedent)
    universe = set()
    for f in parts:
        universe |= subformulas(f)
    if any(isinstance(f, Zero) for f in s.antecedent):
        return Verdict(DERIVABLE)
    if any(isinstance(g, (Star, Bang, Zero)) for g in universe):
        raise ValueError(
            "hypothesis search handles star-, !- and 0-free sequents only"
        )
    from .reductions import HypothesisSet, upsilon

    ups = upsilon(HypothesisSet(hypotheses))
    for f in ups:
        universe |= subformulas(f)
    cap = complexity_cap
    if cap is None:
        cap = cparam(s) + sum(complexity(f) + 1 for f in ups) + 4
    closure = _HypothesisClosure(universe, cap)
    for h in hypotheses:
        closure.add(h)
    closure.saturate()
    status = DERIVABLE if s in closure.derivable else UNDERIVABLE
    return Verdict(status, bounds={"complexity_cap": cap})


class _HypothesisClosure:
    """Forward saturation of flat derivability with Cut over a capped space."""

    def __init__(self, universe, cap: int):
        self.universe = frozenset(universe)
        self.cap = cap
        self.derivable = set()
        self.todo = []
        self.by_succ = {}  # succedent -> [sequents]
        self.by_member = {}  # antecedent formula -> [(sequent, position)]
        self.by_hole = {}  # (prefix, suffix, succ) -> set of formulas
        self.by_ant = {}  # antecedent -> set of succedents
        self.joins = [f for f in self.universe if isinstance(f, Join)]
        self.meets = [f for f in self.universe if isinstance(f, Meet)]
        self.prods = [f for f in self.universe if isinstance(f, Prod)]
        self.slashes = [f for f in self.universe if isinstance(f, Slash)]
        self.rslashes = [f for f in self.universe if isinstance(f, RSlash)]
        self.has_one = any(isinstance(f, One) for f in self.universe)
        for a in self.universe:
            self.add(Sequent((a,), a))
        if self.has_one:
            self.add(Sequent((), ONE))

    def _in_space(self, seq: Sequent) -> bool:
        return cparam(seq) <= self.cap and all(
            f in self.universe for f in seq.antecedent
        )

    def add(self, seq: Sequent):
        if seq in self.derivable or not self._in_space(seq):
            return
        self.derivable.add(seq)
        self.todo.append(seq)

    def saturate(self):
        while self.todo:
            seq = self.todo.pop()
            self._index(seq)
            self._unary(seq)
            self._pairs(seq)

    def _index(self, seq: Sequent):
        self.by_succ.setdefault(seq.succedent, []).append(seq)
        self.by_ant.setdefault(seq.antecedent, set()).add(seq.succedent)
        for i, f in enumerate(seq.antecedent):
            self.by_member.setdefault(f, []).append((seq, i))
            hole = (seq.antecedent[:i], seq.antecedent[i + 1 :], seq.succedent)
            self.by_hole.setdefault(hole, set()).add(f)

    def _unary(self, seq: Sequent):
        ant, succ = seq.antecedent, seq.succedent
        if self.has_one:
            for i in range(len(ant) + 1):
                self.add(Sequent(ant[:i] + (ONE,) + ant[i:], succ))
        for i in range(len(ant) - 1):
            merged = Prod(ant[i], ant[i + 1])
            if merged in self.universe:
                self.add(Sequent(ant[:i] + (merged,) + ant[i + 2 :], succ))
        if ant:
            f = Slash(ant[0], succ)
            if f in self.universe:
                self.add(Sequent(ant[1:], f))
            g = RSlash(succ, ant[-1])
            if g in self.universe:
                self.add(Sequent(ant[:-1], g))
        for f in self.joins:
            if succ in (f.left, f.right):
                self.add(Sequent(ant, f))
        for i, g in enumerate(ant):
            for f in self.meets:
                if g in (f.left, f.right):
                    self.add(Sequent(ant[:i] + (f,) + ant[i + 1 :], succ))
        # paired rules seeded by the fresh sequent
        for f in self.joins:
            for i, g in enumerate(ant):
                if g not in (f.left, f.right):
                    continue
                other = f.right if g == f.left else f.left
                hole = (ant[:i], ant[i + 1 :], succ)
                if other == g or other in self.by_hole.get(hole, ()):
                    self.add(Sequent(ant[:i] + (f,) + ant[i + 1 :], succ))
        for f in self.meets:
            if succ not in (f.left, f.right):
                continue
            other = f.right if succ == f.left else f.left
            if other == succ or other in self.by_ant.get(ant, ()):
                self.add(Sequent(ant, f))

    def _pairs(self, seq: Sequent):
        ant, succ = seq.antecedent, seq.succedent
        # seq as the left premise of cut / division rules (succedent role)
        for partner, i in list(self.by_member.get(succ, ())):
            self.add(
                Sequent(
                    partner.antecedent[:i] + ant + partner.antecedent[i + 1 :],
                    partner.succedent,
                )
            )
        for f in self.slashes:
            if f.left != succ:
                continue
            for partner, i in list(self.by_member.get(f.right, ())):
                self.add(
                    Sequent(
                        partner.antecedent[:i] + ant + (f,) + partner.antecedent[i + 1 :],
                        partner.succedent,
                    )
                )
        for f in self.rslashes:
            if f.right != succ:
                continue
            for partner, i in list(self.by_member.get(f.left, ())):
                self.add(
                    Sequent(
                        partner.antecedent[:i] + (f,) + ant + partner.antecedent[i + 1 :],
                        partner.succedent,
                    )
                )
        # seq as the right premise (a marked antecedent member)
        for i, g in enumerate(ant):
            for left in list(self.by_succ.get(g, ())):
                self.add(
                    Sequent(ant[:i] + left.antecedent + ant[i + 1 :], succ)
                )
            for f in self.slashes:
                if f.right != g:
                    continue
                for left in list(self.by_succ.get(f.left, ())):
                    self.add(
                        Sequent(
                            ant[:i] + left.antecedent + (f,) + ant[i + 1 :], succ
                        )
                    )
            for f in self.rslashes:
                if f.left != g:
                    continue
                for left in list(self.by_succ.get(f.right, ())):
                    self.add(
                        Sequent(
                            ant[:i] + (f,) + left.antecedent + ant[i + 1 :], succ
                        )
                    )
        # product on the right
        for f in self.prods:
            if succ == f.left:
                for other in list(self.by_succ.get(f.right, ())):
                    self.add(Sequent(ant + other.antecedent, f))
            if succ == f.right:
                for other in list(self.by_succ.get(f.left, ())):
                    self.add(Sequent(other.antecedent + ant, f))


# ---------------------------------------------------------------------------
# basic-calculus engine

class _BscEngine:
    def __init__(self, srs, star_bound, length_cap):
        self.srs = srs
        self.star_bound = star_bound
        self.length_cap = length_cap
        self.proofs = {}
        self.failed = set()

    def solve(self, s: Sequent, path):
        if s in self.proofs:
            return True, False
        if s in self.failed:
            return False, False
        if len(s.antecedent) > self.length_cap:
            return False, True
        if s in path:
            return False, True
        path = path | {s}
        taint = False
        for rid, prems in backward_bsc(s, self.srs):
            if callable(prems):
                for n in range(self.star_bound + 1):
                    ok, t = self.solve(prems(n), path)
                    if not ok and not t:
                        self.failed.add(s)
                        return False, False
                taint = True
                continue
            kids = []
            bad = False
            for p in prems:
                ok, t = self.solve(p, path)
                if not ok:
                    taint |= t
                    bad = True
                    break
                kids.append(self.proofs[p])
            if not bad:
                self.proofs[s] = Derivation(rid, s, tuple(kids))
                return True, False
        if not taint:
            self.failed.add(s)
        return False, taint


def bsc_prove(s: Sequent, srs, star_bound: int = 4, length_cap: int | None = None) -> Verdict:
    """Backward search in the basic calculus; exact whenever no bound is hit."""
    cap = length_cap if length_cap is not None else max(16, 2 * len(s.antecedent) + 8)
    engine = _BscEngine(srs, star_bound, cap)
    ok, taint = engine.solve(s, frozenset())
    bounds = {"star_bound": star_bound, "length_cap": cap}
    if ok:
        return Verdict(DERIVABLE, proof=engine.proofs[s], bounds=bounds)
    if taint:
        return Verdict(UNKNOWN, bounds=bounds)
    return Verdict(UNDERIVABLE, bounds=bounds)


# ---------------------------------------------------------------------------
# rank bookkeeping

OMEGA_RULE_KINDS = {"StarLw", "StarLw_d", "StarLw_bsc"}


def rank_upper_bound(d: Derivation) -> OrdVec:
    """Upper bound on the finitary-block / omega alternation rank of a proof.

    A maximal finitary block counts one; an omega node contributes its
    sup-bound plus one, where for a certificate the sup-bound is w*a with a
    the number of omega nodes inside the context when a >= 1, and otherwise
    the bound of the base instance.  Bounded omega nodes are rejected.
    """
    if d.rule.kind in OMEGA_RULE_KINDS:
        return _omega_bound(d)
    return _block_bound(d)


def _block_bound(d: Derivation) -> OrdVec:
    best = ORD_ZERO
    stack = [d]
    while stack:
        node = stack.pop()
        if node.rule.kind in OMEGA_RULE_KINDS:
            best = ord_max(best, _omega_bound(node))
        else:
            stack.extend(node.children)
    return ord_add(best, ORD_ONE)


def _omega_bound(node: Derivation) -> OrdVec:
    cert = node.cert
    if cert is None:
        raise ValueError("rank bounds require certificate-closed omega nodes")
    a = _count_omega_in_context(cert)
    if a >= 1:
        sup = OrdVec((0, a))
    else:
        sup = _block_bound(cert.base)
    return ord_add(sup, ORD_ONE)


def _count_omega_in_context(cert: SchemaCertificate) -> int:
    count = 0
    stack = []
    if cert.extra is not None:
        stack.append(cert.extra)
    if cert.template is not None:
        tstack = [cert.template]
        while tstack:
            t = tstack.pop()
            for c in t.children:
                if isinstance(c, TNode):
                    tstack.append(c)
                else:
                    stack.append(c)
    while stack:
        x = stack.pop()
        if x.rule.kind in OMEGA_RULE_KINDS:
            count += 1
            if x.cert is not None:
                stack.append(x.cert.base)
                if x.cert.extra is not None:
                    stack.append(x.cert.extra)
                if x.cert.template is not None:
                    tstack = [x.cert.template]
                    while tstack:
                        t = tstack.pop()
                        for c in t.children:
                            if isinstance(c, TNode):
                                tstack.append(c)
                            else:
                                stack.append(c)
        stack.extend(x.children)
    return count


def bounded_star_proof(ds, position: int, upto: int, subprover=None) -> Derivation:
    """Omega node carrying explicit instance proofs for n = 0..upto."""
    fam = omega_premises_at(ds, position)
    prover = subprover if subprover is not None else _default_subproof
    kids = []
    for n in range(upto + 1):
        kids.append(prover(fam(n)))
    return bounded_omega_node(ds, position, kids)


def _default_subproof(goal):
    if isinstance(goal, DSequent):
        v = prove_bounded(goal)
    else:
        v = prove_flat_bounded(goal)
    if v.status != DERIVABLE:
        raise ValueError(f"could not prove omega instance {goal}")
    return v.proof

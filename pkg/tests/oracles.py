"""Independent oracles used by the test suite.

The dyadic oracle computes derivable sets bottom-up: it seeds the axioms and
applies every cut-free rule forward until a least fixpoint is reached over
the space of sequents with formulas from a fixed subformula-closed universe
and weight below a cap.  The production engine works top-down from each
goal, so the two share no search logic.
"""

from __future__ import annotations

import itertools

from actw.syntax import (
    Bang,
    DSequent,
    Formula,
    Join,
    Meet,
    One,
    Prod,
    RSlash,
    Slash,
    Star,
    Var,
    Zero,
    bang_chains,
    complexity,
)

VAR, SLASH, RSLASH, PROD, JOIN, MEET, BANG = range(7)

_CODES = {
    Var: VAR,
    Slash: SLASH,
    RSlash: RSLASH,
    Prod: PROD,
    Join: JOIN,
    Meet: MEET,
    Bang: BANG,
}


class ForwardDyadicOracle:
    """Least fixpoint of forward dyadic derivability over a capped space.

    The universe must be subformula-closed, star- and constant-free; zone
    elements come from `zone_formulas` (monoidal !-formulas).
    """

    def __init__(self, formulas, zone_formulas, cap):
        self.cap = cap
        self.fid = {}
        self.kind = []
        self.a1 = []
        self.a2 = []
        self.size = []
        self.chain = []
        for f in formulas:
            self._intern(f)
        self.zfids = tuple(self._intern(f) for f in zone_formulas)
        self.nf = len(self.kind)
        self.zones = [
            frozenset(c)
            for r in range(len(self.zfids) + 1)
            for c in itertools.combinations(self.zfids, r)
        ]
        self.zid = {z: i for i, z in enumerate(self.zones)}
        self.prod_of = {}
        self.slash_of = {}
        self.rslash_of = {}
        self.bang_of = {}
        self.meets_by_comp = {}
        self.joins_by_comp = {}
        self.prods = []
        self.slashes = []
        self.rslashes = []
        for g in range(self.nf):
            k, x, y = self.kind[g], self.a1[g], self.a2[g]
            if k == PROD:
                self.prod_of[(x, y)] = g
                self.prods.append((g, x, y))
            elif k == SLASH:
                self.slash_of[(x, y)] = g
                self.slashes.append((g, x, y))
            elif k == RSLASH:
                self.rslash_of[(x, y)] = g
                self.rslashes.append((g, x, y))
            elif k == BANG:
                self.bang_of[x] = g
            elif k == MEET:
                self.meets_by_comp.setdefault(x, []).append(g)
                if y != x:
                    self.meets_by_comp.setdefault(y, []).append(g)
            elif k == JOIN:
                self.joins_by_comp.setdefault(x, []).append(g)
                if y != x:
                    self.joins_by_comp.setdefault(y, []).append(g)
        self.derivable = set()
        self.wt = {}
        self.todo = []
        self.by_succ = {}
        self.by_member = {}
        self.by_hole = {}
        self.by_ant = {}
        self._seed()
        self._saturate()

    def _intern(self, f: Formula) -> int:
        got = self.fid.get(f)
        if got is not None:
            return got
        if isinstance(f, (Star, Zero, One)):
            raise ValueError("the oracle space is star- and constant-free")
        code = _CODES[type(f)]
        a = b = -1
        if isinstance(f, Bang):
            a = self._intern(f.body)
        elif code != VAR:
            a = self._intern(f.left)
            b = self._intern(f.right)
        n = len(self.kind)
        self.fid[f] = n
        self.kind.append(code)
        self.a1.append(a)
        self.a2.append(b)
        self.size.append(complexity(f))
        chain = None
        if isinstance(f, Bang):
            ch = bang_chains(f)
            if ch is not None:
                chain = (
                    tuple(self._intern(Var(x)) for x in ch[0]),
                    tuple(self._intern(Var(x)) for x in ch[1]),
                )
        self.chain.append(chain)
        return n

    def _add(self, zid, succ, ant):
        w = self.size[succ] + sum(self.size[f] for f in ant)
        if w > self.cap:
            return
        key = (zid, succ) + ant
        if key in self.derivable:
            return
        self.derivable.add(key)
        self.wt[key] = w
        self.todo.append(key)

    def _seed(self):
        for zid in range(len(self.zones)):
            for f in range(self.nf):
                self._add(zid, f, (f,))

    def _saturate(self):
        while self.todo:
            key = self.todo.pop()
            self._index(key)
            self._step(key)

    def _index(self, key):
        zid, succ = key[0], key[1]
        ant = key[2:]
        w = self.wt[key]
        self.by_succ.setdefault((zid, succ), []).append((ant, w - self.size[succ]))
        self.by_ant.setdefault((zid, ant), set()).add(succ)
        for i, f in enumerate(ant):
            self.by_member.setdefault((zid, f), []).append((key, i, w))
            self.by_hole.setdefault((zid, ant[:i], ant[i + 1 :], succ), set()).add(f)

    def _step(self, key):
        zid, succ = key[0], key[1]
        ant = key[2:]
        a1, a2, size, cap = self.a1, self.a2, self.size, self.cap
        wkey = self.wt[key]
        want = wkey - size[succ]
        add = self._add
        zone = self.zones[zid]
        for i in range(len(ant) - 1):
            g = self.prod_of.get((ant[i], ant[i + 1]))
            if g is not None:
                add(zid, succ, ant[:i] + (g,) + ant[i + 2 :])
        for i, f in enumerate(ant):
            for m in self.meets_by_comp.get(f, ()):
                add(zid, succ, ant[:i] + (m,) + ant[i + 1 :])
        for j in self.joins_by_comp.get(succ, ()):
            add(zid, j, ant)
        if ant:
            g = self.slash_of.get((ant[0], succ))
            if g is not None:
                add(zid, g, ant[1:])
            g = self.rslash_of.get((succ, ant[-1]))
            if g is not None:
                add(zid, g, ant[:-1])
        for i, f in enumerate(ant):
            for j in self.joins_by_comp.get(f, ()):
                other = a2[j] if a1[j] == f else a1[j]
                if other == f or other in self.by_hole.get(
                    (zid, ant[:i], ant[i + 1 :], succ), ()
                ):
                    add(zid, succ, ant[:i] + (j,) + ant[i + 1 :])
        for m in self.meets_by_comp.get(succ, ()):
            other = a2[m] if a1[m] == succ else a1[m]
            if other == succ or other in self.by_ant.get((zid, ant), ()):
                add(zid, m, ant)
        for g, x, y in self.slashes:
            if x == succ:
                grow = want + size[g]
                for partner, i, wp in list(self.by_member.get((zid, y), ())):
                    if wp - size[y] + grow > cap:
                        continue
                    add(
                        partner[0],
                        partner[1],
                        partner[2 : 2 + i] + ant + (g,) + partner[3 + i :],
                    )
        for i, f in enumerate(ant):
            for g, x, y in self.slashes:
                if y != f:
                    continue
                room = cap - (wkey - size[f] + size[g])
                for lant, wl in list(self.by_succ.get((zid, x), ())):
                    if wl > room:
                        continue
                    add(zid, succ, ant[:i] + lant + (g,) + ant[i + 1 :])
        for g, x, y in self.rslashes:
            if y == succ:
                grow = want + size[g]
                for partner, i, wp in list(self.by_member.get((zid, x), ())):
                    if wp - size[x] + grow > cap:
                        continue
                    add(
                        partner[0],
                        partner[1],
                        partner[2 : 2 + i] + (g,) + ant + partner[3 + i :],
                    )
        for i, f in enumerate(ant):
            for g, x, y in self.rslashes:
                if x != f:
                    continue
                room = cap - (wkey - size[f] + size[g])
                for rant, wr in list(self.by_succ.get((zid, y), ())):
                    if wr > room:
                        continue
                    add(zid, succ, ant[:i] + (g,) + rant + ant[i + 1 :])
        for g, x, y in self.prods:
            if x == succ:
                room = cap - (want + size[g])
                for rant, wr in list(self.by_succ.get((zid, y), ())):
                    if wr > room:
                        continue
                    add(zid, g, ant + rant)
            if y == succ:
                room = cap - (want + size[g])
                for lant, wl in list(self.by_succ.get((zid, x), ())):
                    if wl > room:
                        continue
                    add(zid, g, lant + ant)
        for bf in self.zfids:
            bs, cs = self.chain[bf]
            target = self.zid[zone | {bf}]
            m = len(cs)
            spots = range(len(ant) + 1) if m == 0 else range(len(ant) - m + 1)
            for k in spots:
                if m and ant[k : k + m] != cs:
                    continue
                add(target, succ, ant[:k] + bs + ant[k + m :])
        for bf in zone:
            for tz in {zone, zone - {bf}}:
                t = self.zid[tz]
                for i in range(len(ant) + 1):
                    add(t, succ, ant[:i] + (bf,) + ant[i:])
        if not ant:
            g = self.bang_of.get(succ)
            if g is not None:
                add(zid, g, ())

    def contains(self, ds: DSequent) -> bool:
        try:
            zid = self.zid[frozenset(self.fid[f] for f in ds.zone)]
            key = (zid, self.fid[ds.succedent]) + tuple(
                self.fid[f] for f in ds.antecedent
            )
        except KeyError:
            raise ValueError("sequent outside the oracle space") from None
        return key in self.derivable

    def contains_key(self, zone_fids, succ_fid, ant_fids) -> bool:
        zid = self.zid[frozenset(zone_fids)]
        return (zid, succ_fid) + tuple(ant_fids) in self.derivable


def straight_line_f0(x: int):
    """Clause-by-clause transcription of the base-check definition."""
    from actw.reductions import unpair

    i, rest = unpair(x)
    j, e = unpair(rest)
    if i not in (0, 1) or j < 1:
        return None
    if j == 1:
        return ("p1",) if e > 0 else None
    return ("p1",) * x + ("p2",)


def straight_line_f1(w, universal):
    """Clause-by-clause transcription of the step-check definition."""
    from actw.reductions import unpair
    from actw.ordinals import rho_inv

    w = tuple(w)
    if any(s not in ("p1", "p2") for s in w):
        return ("p1",)
    x1 = 0
    while x1 < len(w) and w[x1] == "p1":
        x1 += 1
    if any(s != "p2" for s in w[x1:]):
        return ("p1",)
    x2 = len(w) - x1
    eps, rest = unpair(x1)
    j, e = unpair(rest)
    if eps not in (0, 1) or j < 2:
        return ("p1",)
    alpha = rho_inv(j)
    k, t = unpair(x2)
    keps, krest = unpair(k)
    kj, _ = unpair(krest)
    if keps != 1 - eps or kj < 1:
        return ("p1",)
    beta = rho_inv(kj)
    from actw.ordinals import ord_compare

    if ord_compare(beta, alpha) >= 0:
        return ("p1",)
    if not universal(e, k, t):
        return ("p1",)
    return ("p1",) * k + ("p2",)

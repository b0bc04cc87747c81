r"""Rule schemas, derivations and the derivation checker.

Three rule families share one instance format: the flat calculus (kinds like
``SlashL``), its dyadic variant (``SlashL_d``, ``Ad``, ...) over sequents with
a !-zone, and the basic calculus used by the rewriting reduction (``_bsc``
kinds).  A rule instance is a conclusion plus a finite premise list;
``validate_instance`` decides whether it matches the named schema, with
contexts matched as sequences.

The only infinitary rule is the left star rule.  In a derivation tree such a
node is closed either by an explicit list of instance subtrees for
n = 0..N (a *bounded* node, yielding "valid up to bound") or by a
`SchemaCertificate`, a finite witness that every instance is derivable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .syntax import (
    Bang,
    DSequent,
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
    is_monoidal_bang,
    print_formula,
    subformulas,
)

FLAT_KINDS = (
    "Id SlashL SlashR RSlashL RSlashR ProdL ProdR OneL OneR ZeroL "
    "JoinL JoinR1 JoinR2 MeetL1 MeetL2 MeetR StarLw StarRn Cut "
    "BangL BangR BangP1 BangP2 BangW BangC Hyp"
).split()

DYADIC_SPECIALS = "BangLd BangRd Ad Wd BangLdInv CutD1 CutD2".split()

BSC_KINDS = (
    "Id_bsc SlashL_bsc SlashLn_bsc ProdL_bsc ProdR_bsc MeetL1_bsc "
    "MeetL2_bsc StarLw_bsc StarRn_bsc A_bsc"
).split()

CUT_KINDS = {"Cut", "CutD1", "CutD2"}
OMEGA_KINDS = {"StarLw", "StarLw_d", "StarLw_bsc"}


@dataclass(frozen=True)
class RuleId:
    kind: str
    n: int | None = None
    pos: int | None = None
    formula: Formula | None = None

    def __str__(self):
        out = self.kind
        if self.n is not None:
            out += f"[{self.n}]"
        if self.pos is not None:
            out += f"@{self.pos}"
        if self.formula is not None:
            out += f"<{print_formula(self.formula)}>"
        return out


def rule(kind: str, n=None, pos=None, formula=None) -> RuleId:
    return RuleId(kind, n, pos, formula)


@dataclass(frozen=True)
class RuleInstance:
    rule: RuleId
    conclusion: object
    premises: tuple


def _is_dyadic_kind(kind: str) -> bool:
    return kind.endswith("_d") or kind in DYADIC_SPECIALS


def _strip(ds: DSequent) -> Sequent:
    return Sequent(ds.antecedent, ds.succedent)


# ---------------------------------------------------------------------------
# schema validation

def validate_instance(ri: RuleInstance, srs=None) -> bool:
    ok, _ = validate_instance_explain(ri, srs)
    return ok


def validate_instance_explain(ri: RuleInstance, srs=None):
    """(ok, reason): does the instance match the named rule schema?"""
    kind = ri.rule.kind
    try:
        if kind.endswith("_bsc"):
            return _validate_bsc(ri, srs)
        if _is_dyadic_kind(kind):
            return _validate_dyadic(ri)
        return _validate_flat(ri.rule, ri.conclusion, ri.premises)
    except (TypeError, AttributeError, IndexError) as exc:
        return False, f"malformed instance: {exc}"


def _fail(reason):
    return False, reason


_OK = (True, None)


def _validate_flat(r: RuleId, c: Sequent, ps: tuple):
    kind = r.kind
    ant, succ = c.antecedent, c.succedent
    if kind == "Id":
        if ps:
            return _fail("Id takes no premises")
        if len(ant) == 1 and ant[0] == succ:
            return _OK
        return _fail("Id needs A => A")
    if kind == "OneR":
        if not ps and not ant and isinstance(succ, One):
            return _OK
        return _fail("OneR needs => 1")
    if kind == "ZeroL":
        if not ps and any(isinstance(f, Zero) for f in ant):
            return _OK
        return _fail("ZeroL needs 0 in the antecedent")
    if kind == "SlashL":
        if len(ps) != 2:
            return _fail("SlashL takes two premises")
        p1, p2 = ps
        a = p1.succedent
        if p2.succedent != succ:
            return _fail("right premise succedent must match")
        m = len(p1.antecedent)
        for k in _positions(r, ant):
            f = ant[k]
            if not (isinstance(f, Slash) and f.left == a):
                continue
            if k - m < 0 or ant[k - m : k] != p1.antecedent:
                continue
            if p2.antecedent == ant[: k - m] + (f.right,) + ant[k + 1 :]:
                return _OK
        return _fail("no SlashL split matches")
    if kind == "RSlashL":
        if len(ps) != 2:
            return _fail("RSlashL takes two premises")
        p1, p2 = ps
        a = p1.succedent
        if p2.succedent != succ:
            return _fail("right premise succedent must match")
        m = len(p1.antecedent)
        for k in _positions(r, ant):
            f = ant[k]
            if not (isinstance(f, RSlash) and f.right == a):
                continue
            if ant[k + 1 : k + 1 + m] != p1.antecedent:
                continue
            if p2.antecedent == ant[:k] + (f.left,) + ant[k + 1 + m :]:
                return _OK
        return _fail("no RSlashL split matches")
    if kind == "SlashR":
        if len(ps) != 1 or not isinstance(succ, Slash):
            return _fail("SlashR needs one premise and a \\-succedent")
        (p,) = ps
        if p.antecedent == (succ.left,) + ant and p.succedent == succ.right:
            return _OK
        return _fail("SlashR premise mismatch")
    if kind == "RSlashR":
        if len(ps) != 1 or not isinstance(succ, RSlash):
            return _fail("RSlashR needs one premise and a /-succedent")
        (p,) = ps
        if p.antecedent == ant + (succ.right,) and p.succedent == succ.left:
            return _OK
        return _fail("RSlashR premise mismatch")
    if kind == "ProdL":
        if len(ps) != 1:
            return _fail("ProdL takes one premise")
        (p,) = ps
        if p.succedent != succ:
            return _fail("succedent must match")
        for k in _positions(r, ant):
            f = ant[k]
            if isinstance(f, Prod) and p.antecedent == ant[:k] + (
                f.left,
                f.right,
            ) + ant[k + 1 :]:
                return _OK
        return _fail("no ProdL position matches")
    if kind == "ProdR":
        if len(ps) != 2 or not isinstance(succ, Prod):
            return _fail("ProdR needs two premises and a .-succedent")
        p1, p2 = ps
        if (
            p1.succedent == succ.left
            and p2.succedent == succ.right
            and p1.antecedent + p2.antecedent == ant
        ):
            return _OK
        return _fail("ProdR split mismatch")
    if kind == "OneL":
        if len(ps) != 1:
            return _fail("OneL takes one premise")
        (p,) = ps
        if p.succedent != succ:
            return _fail("succedent must match")
        for k in _positions(r, ant):
            if isinstance(ant[k], One) and p.antecedent == ant[:k] + ant[k + 1 :]:
                return _OK
        return _fail("no OneL position matches")
    if kind == "JoinL":
        if len(ps) != 2:
            return _fail("JoinL takes two premises")
        p1, p2 = ps
        if p1.succedent != succ or p2.succedent != succ:
            return _fail("succedents must match")
        for k in _positions(r, ant):
            f = ant[k]
            if (
                isinstance(f, Join)
                and p1.antecedent == ant[:k] + (f.left,) + ant[k + 1 :]
                and p2.antecedent == ant[:k] + (f.right,) + ant[k + 1 :]
            ):
                return _OK
        return _fail("no JoinL position matches")
    if kind in ("JoinR1", "JoinR2"):
        if len(ps) != 1 or not isinstance(succ, Join):
            return _fail("JoinRi needs one premise and a +-succedent")
        (p,) = ps
        want = succ.left if kind == "JoinR1" else succ.right
        if p.antecedent == ant and p.succedent == want:
            return _OK
        return _fail("JoinRi premise mismatch")
    if kind in ("MeetL1", "MeetL2"):
        if len(ps) != 1:
            return _fail("MeetLi takes one premise")
        (p,) = ps
        if p.succedent != succ:
            return _fail("succedent must match")
        for k in _positions(r, ant):
            f = ant[k]
            if not isinstance(f, Meet):
                continue
            want = f.left if kind == "MeetL1" else f.right
            if p.antecedent == ant[:k] + (want,) + ant[k + 1 :]:
                return _OK
        return _fail("no MeetLi position matches")
    if kind == "MeetR":
        if len(ps) != 2 or not isinstance(succ, Meet):
            return _fail("MeetR needs two premises and a &-succedent")
        p1, p2 = ps
        if (
            p1.antecedent == ant
            and p2.antecedent == ant
            and p1.succedent == succ.left
            and p2.succedent == succ.right
        ):
            return _OK
        return _fail("MeetR premise mismatch")
    if kind == "StarRn":
        if not isinstance(succ, Star):
            return _fail("StarRn needs a ^*-succedent")
        if r.n is not None and r.n != len(ps):
            return _fail("StarRn arity mismatch")
        body = succ.body
        if any(p.succedent != body for p in ps):
            return _fail("StarRn premises must prove the body")
        joined = tuple(itertools.chain.from_iterable(p.antecedent for p in ps))
        if joined == ant:
            return _OK
        return _fail("StarRn antecedent split mismatch")
    if kind == "StarLw":
        # finite prefix of the instance family; full closure needs a certificate
        for k in _positions(r, ant):
            if not isinstance(ant[k], Star):
                continue
            fam = omega_premises_at(c, k)
            if all(p == fam(n) for n, p in enumerate(ps)):
                return _OK
        return _fail("StarLw instances do not match the family")
    if kind == "Cut":
        if len(ps) != 2:
            return _fail("Cut takes two premises")
        p1, p2 = ps
        a = p1.succedent
        if p2.succedent != succ:
            return _fail("right premise succedent must match")
        for k, f in enumerate(p2.antecedent):
            if f != a:
                continue
            if ant == p2.antecedent[:k] + p1.antecedent + p2.antecedent[k + 1 :]:
                return _OK
        return _fail("no Cut split matches")
    if kind == "BangL":
        if len(ps) != 1:
            return _fail("BangL takes one premise")
        (p,) = ps
        if p.succedent != succ:
            return _fail("succedent must match")
        for k in _positions(r, ant):
            f = ant[k]
            if isinstance(f, Bang) and p.antecedent == ant[:k] + (f.body,) + ant[k + 1 :]:
                return _OK
        return _fail("no BangL position matches")
    if kind == "BangR":
        if len(ps) != 1 or not isinstance(succ, Bang):
            return _fail("BangR needs one premise and a !-succedent")
        (p,) = ps
        if not all(isinstance(f, Bang) for f in ant):
            return _fail("BangR needs an all-! antecedent")
        if p.antecedent == ant and p.succedent == succ.body:
            return _OK
        return _fail("BangR premise mismatch")
    if kind in ("BangP1", "BangP2"):
        # premise = conclusion with one !-formula moved right (P1) or left (P2)
        if len(ps) != 1:
            return _fail("BangPi takes one premise")
        (p,) = ps
        if p.succedent != succ or len(p.antecedent) != len(ant):
            return _fail("BangPi must permute a single !-formula")
        for i in range(len(ant)):
            if not isinstance(ant[i], Bang):
                continue
            targets = (
                range(i, len(ant)) if kind == "BangP1" else range(0, i + 1)
            )
            for j in targets:
                if _move(ant, i, j) == p.antecedent:
                    return _OK
        return _fail("no BangPi move matches")
    if kind == "BangW":
        if len(ps) != 1:
            return _fail("BangW takes one premise")
        (p,) = ps
        if p.succedent != succ:
            return _fail("succedent must match")
        for k in _positions(r, ant):
            if isinstance(ant[k], Bang) and p.antecedent == ant[:k] + ant[k + 1 :]:
                return _OK
        return _fail("no BangW position matches")
    if kind == "BangC":
        if len(ps) != 1:
            return _fail("BangC takes one premise")
        (p,) = ps
        if p.succedent != succ:
            return _fail("succedent must match")
        for k in _positions(r, ant):
            f = ant[k]
            if isinstance(f, Bang) and p.antecedent == ant[:k] + (f, f) + ant[k + 1 :]:
                return _OK
        return _fail("no BangC position matches")
    if kind == "Hyp":
        return _fail("hypothesis leaves are judged by the checker, not the schema")
    return _fail(f"unknown rule kind {kind!r}")


def _positions(r: RuleId, ant: tuple):
    if r.pos is not None:
        return [r.pos] if 0 <= r.pos < len(ant) else []
    return range(len(ant))


def _move(ant: tuple, i: int, j: int) -> tuple:
    """`ant` with the element at index i removed and reinserted at index j."""
    rest = list(ant[:i] + ant[i + 1 :])
    rest.insert(j, ant[i])
    return tuple(rest)


def _validate_dyadic(ri: RuleInstance):
    r, c, ps = ri.rule, ri.conclusion, ri.premises
    if not isinstance(c, DSequent):
        return _fail("dyadic rules need a dyadic conclusion")
    kind = r.kind
    if kind.endswith("_d"):
        # zone threaded unchanged through the flat schema
        if any(not isinstance(p, DSequent) or p.zone != c.zone for p in ps):
            return _fail("zone must thread unchanged")
        flat = RuleId(kind[:-2], r.n, r.pos, r.formula)
        return _validate_flat(flat, _strip(c), tuple(_strip(p) for p in ps))
    if kind == "BangLd":
        if len(ps) != 1:
            return _fail("BangLd takes one premise")
        (p,) = ps
        if p.succedent != c.succedent:
            return _fail("succedent must match")
        ant = c.antecedent
        for k in _positions(r, ant):
            f = ant[k]
            if (
                isinstance(f, Bang)
                and p.antecedent == ant[:k] + ant[k + 1 :]
                and p.zone == c.zone | {f}
            ):
                return _OK
        return _fail("no BangLd position matches")
    if kind == "BangRd":
        if len(ps) != 1 or c.antecedent or not isinstance(c.succedent, Bang):
            return _fail("BangRd needs an empty antecedent and a !-succedent")
        (p,) = ps
        if p.zone == c.zone and not p.antecedent and p.succedent == c.succedent.body:
            return _OK
        return _fail("BangRd premise mismatch")
    if kind == "Ad":
        if len(ps) != 1:
            return _fail("Ad takes one premise")
        (p,) = ps
        if p.succedent != c.succedent:
            return _fail("succedent must match")
        candidates = [r.formula] if r.formula is not None else sorted(
            c.zone, key=print_formula
        )
        ant = c.antecedent
        for zf in candidates:
            if zf not in c.zone:
                continue
            chains = bang_chains(zf)
            if chains is None:
                continue
            bs, cs = chains
            bvec = tuple(Var(x) for x in bs)
            cvec = tuple(Var(x) for x in cs)
            # premise zone may drop the used formula or keep it (set union)
            if p.zone != c.zone and p.zone != c.zone - {zf}:
                continue
            n = len(bvec)
            spots = (
                [r.pos]
                if r.pos is not None
                else range(len(ant) - n + 1) if n else range(len(ant) + 1)
            )
            for k in spots:
                if k < 0 or k + n > len(ant) + (0 if n else 1):
                    continue
                if n and ant[k : k + n] != bvec:
                    continue
                if p.antecedent == ant[:k] + cvec + ant[k + n :]:
                    return _OK
        return _fail("no Ad application matches")
    if kind == "Wd":
        if len(ps) != 1:
            return _fail("Wd takes one premise")
        (p,) = ps
        if (
            p.antecedent == c.antecedent
            and p.succedent == c.succedent
            and p.zone <= c.zone
        ):
            return _OK
        return _fail("Wd must only enlarge the zone")
    if kind == "BangLdInv":
        if len(ps) != 1:
            return _fail("BangLdInv takes one premise")
        (p,) = ps
        if p.succedent != c.succedent:
            return _fail("succedent must match")
        for k, f in enumerate(p.antecedent):
            if (
                isinstance(f, Bang)
                and c.antecedent == p.antecedent[:k] + p.antecedent[k + 1 :]
                and c.zone == p.zone | {f}
            ):
                return _OK
        return _fail("no BangLdInv position matches")
    if kind == "CutD1":
        if len(ps) != 2:
            return _fail("CutD1 takes two premises")
        p1, p2 = ps
        if p1.zone != c.zone or p2.zone != c.zone:
            return _fail("zones must match")
        return _validate_flat(RuleId("Cut"), _strip(c), (_strip(p1), _strip(p2)))
    if kind == "CutD2":
        if len(ps) != 2:
            return _fail("CutD2 takes two premises")
        p1, p2 = ps
        if p1.zone != c.zone or p1.antecedent:
            return _fail("left premise must be zone; => B")
        b = p1.succedent
        if (
            p2.zone == c.zone | {Bang(b)}
            and p2.antecedent == c.antecedent
            and p2.succedent == c.succedent
        ):
            return _OK
        return _fail("CutD2 premise mismatch")
    return _fail(f"unknown dyadic rule {kind!r}")


def basic_rhs(f: Formula) -> bool:
    """Basic right-hand side: r, r1.r2 or r^* with variable components."""
    if isinstance(f, Var):
        return True
    if isinstance(f, Prod):
        return isinstance(f.left, Var) and isinstance(f.right, Var)
    if isinstance(f, Star):
        return isinstance(f.body, Var)
    return False


def _meet_shape(f: Formula):
    """(r1, A1, r2, A2) of a meet (r1\A1)&(r2\A2) with variable keys."""
    if (
        isinstance(f, Meet)
        and isinstance(f.left, Slash)
        and isinstance(f.right, Slash)
        and isinstance(f.left.left, Var)
        and isinstance(f.right.left, Var)
    ):
        return f.left.left, f.left.right, f.right.left, f.right.right
    return None


def _validate_bsc(ri: RuleInstance, srs):
    r, c, ps = ri.rule, ri.conclusion, ri.premises
    if not isinstance(c, Sequent) or not basic_rhs(c.succedent):
        return _fail("basic-calculus conclusions need a basic right-hand side")
    kind = r.kind
    ant, succ = c.antecedent, c.succedent
    if kind == "Id_bsc":
        if not ps and isinstance(succ, Var) and ant == (succ,):
            return _OK
        return _fail("Id_bsc needs r => r")
    if kind == "ProdR_bsc":
        if (
            not ps
            and isinstance(succ, Prod)
            and ant == (succ.left, succ.right)
        ):
            return _OK
        return _fail("ProdR_bsc needs r1, r2 => r1.r2")
    if kind == "StarRn_bsc":
        if (
            not ps
            and isinstance(succ, Star)
            and all(f == succ.body for f in ant)
        ):
            return _OK
        return _fail("StarRn_bsc needs r^n => r^*")
    if len(ps) != 1:
        return _fail(f"{kind} takes one premise")
    (p,) = ps
    if p.succedent != succ:
        return _fail("basic-calculus rules keep the right-hand side")
    if kind == "SlashL_bsc":
        for k in _positions(r, ant):
            f = ant[k]
            if not (isinstance(f, Slash) and isinstance(f.left, Var)):
                continue
            if k >= 1 and ant[k - 1] == f.left:
                if p.antecedent == ant[: k - 1] + (f.right,) + ant[k + 1 :]:
                    return _OK
        return _fail("no SlashL_bsc position matches")
    if kind == "SlashLn_bsc":
        for k in _positions(r, ant):
            f = ant[k]
            if not (
                isinstance(f, Slash)
                and isinstance(f.left, Star)
                and isinstance(f.left.body, Var)
            ):
                continue
            rv = f.left.body
            ns = [r.n] if r.n is not None else range(k + 1)
            for n in ns:
                if n is None or n > k or any(g != rv for g in ant[k - n : k]):
                    continue
                if p.antecedent == ant[: k - n] + (f.right,) + ant[k + 1 :]:
                    return _OK
        return _fail("no SlashLn_bsc application matches")
    if kind == "ProdL_bsc":
        return _validate_flat(RuleId("ProdL", pos=r.pos), c, ps)
    if kind in ("MeetL1_bsc", "MeetL2_bsc"):
        i = 1 if kind == "MeetL1_bsc" else 2
        for k in _positions(r, ant):
            shape = _meet_shape(ant[k])
            if shape is None or k < 1:
                continue
            r1, a1, r2, a2 = shape
            rv, av = (r1, a1) if i == 1 else (r2, a2)
            if ant[k - 1] == rv and p.antecedent == ant[: k - 1] + (av,) + ant[k + 1 :]:
                return _OK
        return _fail(f"no {kind} position matches")
    if kind == "A_bsc":
        if srs is None:
            return _fail("A_bsc needs a rewriting system")
        for lhs, rhs in srs.rules:
            bvec = tuple(Var(x) for x in lhs)
            cvec = tuple(Var(x) for x in rhs)
            n = len(bvec)
            for k in range(len(ant) - n + 1):
                if ant[k : k + n] != bvec:
                    continue
                if p.antecedent == ant[:k] + cvec + ant[k + n :]:
                    return _OK
        return _fail("no rewrite rule application matches")
    if kind == "StarLw_bsc":
        return _validate_flat(RuleId("StarLw", pos=r.pos), c, ps)
    return _fail(f"unknown basic-calculus rule {kind!r}")


# ---------------------------------------------------------------------------
# the omega family and invertible rules

def omega_premises_at(s, star_position: int):
    """The generator n -> (Gamma, A^n, Delta => C) for the star at the position."""
    ant = s.antecedent
    if not (0 <= star_position < len(ant)) or not isinstance(
        ant[star_position], Star
    ):
        raise ValueError(f"position {star_position} does not hold a ^*-formula")
    body = ant[star_position].body
    before = ant[:star_position]
    after = ant[star_position + 1 :]

    def instance(n: int):
        mid = (body,) * n
        if isinstance(s, DSequent):
            return DSequent(s.zone, before + mid + after, s.succedent)
        return Sequent(before + mid + after, s.succedent)

    return instance


omega_premises = omega_premises_at


def invert(s, position: int):
    """Admissible left inversions: list of sequents, or a generator for `^*`."""
    ant = s.antecedent
    if not 0 <= position < len(ant):
        raise ValueError("position out of range")
    f = ant[position]
    if isinstance(f, Star):
        return omega_premises_at(s, position)

    def rebuild(mid):
        new = ant[:position] + tuple(mid) + ant[position + 1 :]
        if isinstance(s, DSequent):
            return DSequent(s.zone, new, s.succedent)
        return Sequent(new, s.succedent)

    if isinstance(f, Join):
        return [rebuild([f.left]), rebuild([f.right])]
    if isinstance(f, Prod):
        return [rebuild([f.left, f.right])]
    raise ValueError(f"formula at position {position} is not invertible: {f}")


# ---------------------------------------------------------------------------
# backward enumeration of finitary flat rules

def backward_finitary(s: Sequent, hypotheses=frozenset()):
    """All finitary cut-free rule instances with conclusion `s`.

    Permutation moves and empty star-right segments that would repeat the
    conclusion verbatim are canonicalised away; they never change
    derivability.  Hypotheses close as `Hyp` leaves on exact equality.
    """
    ant, succ = s.antecedent, s.succedent
    out = []
    if s in hypotheses:
        out.append((RuleId("Hyp"), ()))
    if len(ant) == 1 and ant[0] == succ:
        out.append((RuleId("Id"), ()))
    if not ant and isinstance(succ, One):
        out.append((RuleId("OneR"), ()))
    if any(isinstance(f, Zero) for f in ant):
        out.append((RuleId("ZeroL"), ()))

    mk = Sequent
    for k, f in enumerate(ant):
        before, after = ant[:k], ant[k + 1 :]
        if isinstance(f, Prod):
            out.append(
                (RuleId("ProdL", pos=k), (mk(before + (f.left, f.right) + after, succ),))
            )
        elif isinstance(f, One):
            out.append((RuleId("OneL", pos=k), (mk(before + after, succ),)))
        elif isinstance(f, Join):
            out.append(
                (
                    RuleId("JoinL", pos=k),
                    (
                        mk(before + (f.left,) + after, succ),
                        mk(before + (f.right,) + after, succ),
                    ),
                )
            )
        elif isinstance(f, Meet):
            out.append(
                (RuleId("MeetL1", pos=k), (mk(before + (f.left,) + after, succ),))
            )
            out.append(
                (RuleId("MeetL2", pos=k), (mk(before + (f.right,) + after, succ),))
            )
        elif isinstance(f, Slash):
            for j in range(k + 1):
                out.append(
                    (
                        RuleId("SlashL", pos=k),
                        (
                            mk(ant[j:k], f.left),
                            mk(ant[:j] + (f.right,) + after, succ),
                        ),
                    )
                )
        elif isinstance(f, RSlash):
            for j in range(k + 1, len(ant) + 1):
                out.append(
                    (
                        RuleId("RSlashL", pos=k),
                        (
                            mk(ant[k + 1 : j], f.right),
                            mk(before + (f.left,) + ant[j:], succ),
                        ),
                    )
                )
        elif isinstance(f, Bang):
            out.append((RuleId("BangL", pos=k), (mk(before + (f.body,) + after, succ),)))
            out.append((RuleId("BangW", pos=k), (mk(before + after, succ),)))
            out.append((RuleId("BangC", pos=k), (mk(before + (f, f) + after, succ),)))
            for j in range(len(ant)):
                if j == k:
                    continue
                kind = "BangP1" if j > k else "BangP2"
                out.append((RuleId(kind, pos=k), (mk(_move(ant, k, j), succ),)))

    if isinstance(succ, Slash):
        out.append((RuleId("SlashR"), (mk((succ.left,) + ant, succ.right),)))
    elif isinstance(succ, RSlash):
        out.append((RuleId("RSlashR"), (mk(ant + (succ.right,), succ.left),)))
    elif isinstance(succ, Prod):
        for j in range(len(ant) + 1):
            out.append(
                (
                    RuleId("ProdR"),
                    (mk(ant[:j], succ.left), mk(ant[j:], succ.right)),
                )
            )
    elif isinstance(succ, Join):
        out.append((RuleId("JoinR1"), (mk(ant, succ.left),)))
        out.append((RuleId("JoinR2"), (mk(ant, succ.right),)))
    elif isinstance(succ, Meet):
        out.append((RuleId("MeetR"), (mk(ant, succ.left), mk(ant, succ.right))))
    elif isinstance(succ, Star):
        if not ant:
            out.append((RuleId("StarRn", n=0), ()))
        else:
            for split in _compositions(len(ant)):
                prems = []
                start = 0
                for size in split:
                    prems.append(mk(ant[start : start + size], succ.body))
                    start += size
                out.append((RuleId("StarRn", n=len(split)), tuple(prems)))
    elif isinstance(succ, Bang):
        if all(isinstance(f, Bang) for f in ant):
            out.append((RuleId("BangR"), (mk(ant, succ.body),)))
    return out


def _compositions(k: int):
    """All splits of k items into non-empty consecutive blocks."""
    if k == 0:
        return
    for bits in range(1 << (k - 1)):
        sizes = []
        size = 1
        for i in range(k - 1):
            if bits & (1 << i):
                sizes.append(size)
                size = 1
            else:
                size += 1
        sizes.append(size)
        yield sizes


# ---------------------------------------------------------------------------
# derivations

@dataclass(frozen=True)
class Derivation:
    rule: RuleId
    conclusion: object
    children: tuple = ()
    bounded: bool = False
    cert: "SchemaCertificate | None" = None

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


VALID = "valid"
VALID_UP_TO_BOUND = "valid_up_to_bound"
INVALID = "invalid"


@dataclass(frozen=True)
class CheckResult:
    status: str
    reason: str | None = None
    where: tuple = ()

    def __bool__(self):
        return self.status != INVALID


def check_derivation(
    d: Derivation,
    allow_cut: bool = False,
    omega_bound: int | None = None,
    hypotheses=frozenset(),
    srs=None,
) -> CheckResult:
    """Verdict over a derivation tree.

    Valid when every node instantiates its schema and every omega node is
    closed by a certificate; valid-up-to-bound when some omega node only
    carries explicit instances (at least `omega_bound` of them, when given);
    invalid otherwise, with the first offending node.
    """
    hypotheses = frozenset(hypotheses)
    saw_bounded = False
    stack = [(d, ())]
    while stack:
        node, path = stack.pop()
        kind = node.rule.kind
        if kind in CUT_KINDS and not allow_cut:
            return CheckResult(INVALID, "cut is not allowed here", path)
        if kind == "Hyp":
            if node.children:
                return CheckResult(INVALID, "hypothesis leaves have no premises", path)
            if node.conclusion not in hypotheses:
                return CheckResult(
                    INVALID, f"not a declared hypothesis: {node.conclusion}", path
                )
            continue
        if kind in OMEGA_KINDS:
            if node.cert is not None:
                ok, why = verify_schema_explain(node.cert, srs=srs)
                if not ok:
                    return CheckResult(INVALID, f"bad certificate: {why}", path)
                if not _cert_matches_node(node):
                    return CheckResult(
                        INVALID, "certificate does not certify this conclusion", path
                    )
                continue
            if not node.bounded:
                return CheckResult(
                    INVALID, "omega node without certificate or bound", path
                )
            try:
                fam = omega_premises_at(node.conclusion, _omega_pos(node))
            except ValueError as exc:
                return CheckResult(INVALID, str(exc), path)
            if omega_bound is not None and len(node.children) < omega_bound + 1:
                return CheckResult(
                    INVALID,
                    f"bounded omega node carries fewer than {omega_bound + 1} instances",
                    path,
                )
            for n, child in enumerate(node.children):
                if child.conclusion != fam(n):
                    return CheckResult(
                        INVALID, f"instance {n} does not match the family", path + (n,)
                    )
                stack.append((child, path + (n,)))
            saw_bounded = True
            continue
        inst = RuleInstance(
            node.rule, node.conclusion, tuple(c.conclusion for c in node.children)
        )
        ok, why = validate_instance_explain(inst, srs)
        if not ok:
            return CheckResult(INVALID, f"{node.rule}: {why}", path)
        for i, child in enumerate(node.children):
            stack.append((child, path + (i,)))
    return CheckResult(VALID_UP_TO_BOUND if saw_bounded else VALID)


def _omega_pos(node: Derivation) -> int:
    if node.rule.pos is not None:
        return node.rule.pos
    for k, f in enumerate(node.conclusion.antecedent):
        if isinstance(f, Star):
            return k
    raise ValueError("no ^*-formula in the antecedent of an omega node")


# ---------------------------------------------------------------------------
# schema certificates for omega nodes

@dataclass(frozen=True)
class StarFamily:
    """The premise family n -> (Gamma, A^n, Delta => C), optionally dyadic."""

    gamma: tuple
    body: Formula
    delta: tuple
    succedent: Formula
    zone: frozenset | None = None

    def instance(self, n: int):
        ant = self.gamma + (self.body,) * n + self.delta
        if self.zone is None:
            return Sequent(ant, self.succedent)
        return DSequent(self.zone, ant, self.succedent)

    @staticmethod
    def of(s, star_position: int) -> "StarFamily":
        f = s.antecedent[star_position]
        if not isinstance(f, Star):
            raise ValueError("not a ^*-position")
        return StarFamily(
            s.antecedent[:star_position],
            f.body,
            s.antecedent[star_position + 1 :],
            s.succedent,
            s.zone if isinstance(s, DSequent) else None,
        )


BLOCK = "@"  # stands for the abstract segment A^n inside a template sequent


@dataclass(frozen=True)
class TSeq:
    """Template sequent: antecedent items are formulas or the block marker."""

    parts: tuple
    succedent: Formula
    zone: frozenset | None = None

    def instantiate(self, segment):
        ant = []
        for p in self.parts:
            if p is BLOCK or p == BLOCK:
                ant.extend(segment)
            else:
                ant.append(p)
        if self.zone is None:
            return Sequent(tuple(ant), self.succedent)
        return DSequent(self.zone, tuple(ant), self.succedent)

    def block_count(self) -> int:
        return sum(1 for p in self.parts if p is BLOCK or p == BLOCK)


@dataclass(frozen=True)
class TNode:
    """Template derivation node; `rule` None marks the hole leaf."""

    rule: RuleId | None
    tseq: TSeq
    children: tuple = ()


@dataclass(frozen=True)
class SchemaCertificate:
    """Finite witness that every instance of a star family is derivable.

    `base` derives instance 0.  The context either extends a star-right root
    with one more block premise (`extra` plus a side), or is a template tree
    with one hole standing for the instance-n derivation; plugging a valid
    derivation of instance n yields one of instance n+1.
    """

    family: StarFamily
    base: Derivation
    extra: Derivation | None = None
    side: str | None = None  # "left" | "right" for root extension
    template: TNode | None = None

    @property
    def form(self) -> str:
        return "extend" if self.extra is not None else "plug"


def verify_schema(cert: SchemaCertificate, srs=None) -> bool:
    ok, _ = verify_schema_explain(cert, srs)
    return ok


def verify_schema_explain(cert: SchemaCertificate, srs=None):
    fam = cert.family
    base_check = check_derivation(cert.base, srs=srs)
    if not base_check:
        return _fail(f"base does not check: {base_check.reason}")
    if cert.base.conclusion != fam.instance(0):
        return _fail("base proves the wrong instance")
    if cert.extra is not None:
        ok, why = _verify_extend(cert, srs)
    elif cert.template is not None:
        ok, why = _verify_template(cert, srs)
    else:
        return _fail("certificate carries neither an extension nor a template")
    if not ok:
        return False, why
    plugged = plug(cert, cert.base, 0)
    res = check_derivation(plugged, srs=srs)
    if not res or plugged.conclusion != fam.instance(1):
        return _fail("plugging the base does not yield instance 1")
    return _OK


_STAR_RIGHT = {"StarRn", "StarRn_d", "StarRn_bsc"}


def _verify_extend(cert: SchemaCertificate, srs):
    fam = cert.family
    if not isinstance(fam.succedent, Star):
        return _fail("root extension needs a ^*-succedent")
    if cert.side == "left":
        if fam.gamma:
            return _fail("left extension needs an empty left context")
    elif cert.side == "right":
        if fam.delta:
            return _fail("right extension needs an empty right context")
    else:
        return _fail("extension side must be left or right")
    if cert.base.rule.kind not in _STAR_RIGHT:
        return _fail("extension base must end in a star-right rule")
    res = check_derivation(cert.extra, srs=srs)
    if not res:
        return _fail(f"extra premise does not check: {res.reason}")
    want = (
        Sequent((fam.body,), fam.succedent.body)
        if fam.zone is None
        else DSequent(fam.zone, (fam.body,), fam.succedent.body)
    )
    if cert.extra.conclusion != want:
        return _fail("extra premise must prove body => star body")
    return _OK


def _verify_template(cert: SchemaCertificate, srs):
    fam = cert.family
    root = cert.template
    left = fam.gamma + (fam.body, BLOCK) + fam.delta
    right = fam.gamma + (BLOCK, fam.body) + fam.delta
    if root.tseq.parts not in (left, right):
        return _fail("context conclusion is not instance n+1")
    if root.tseq.succedent != fam.succedent or root.tseq.zone != fam.zone:
        return _fail("context conclusion mismatch")
    hole_parts = fam.gamma + (BLOCK,) + fam.delta
    fresh = _fresh_vars(cert, 2)
    segments = [(), (Var(fresh[0]),), (Var(fresh[0]), Var(fresh[1]))]

    holes = 0
    stack = [root]
    while stack:
        node = stack.pop()
        if node.tseq.block_count() != 1:
            return _fail("every template sequent must carry exactly one block")
        if node.rule is None:
            holes += 1
            if node.children:
                return _fail("the hole is a leaf")
            if (
                node.tseq.parts != hole_parts
                or node.tseq.succedent != fam.succedent
                or node.tseq.zone != fam.zone
            ):
                return _fail("hole sequent does not match the family")
            continue
        if node.rule.kind in OMEGA_KINDS or node.rule.kind in CUT_KINDS:
            return _fail("omega and cut nodes are not allowed in a context")
        tkids = [c for c in node.children if isinstance(c, TNode)]
        dkids = [c for c in node.children if isinstance(c, Derivation)]
        if len(tkids) != 1 or len(tkids) + len(dkids) != len(node.children):
            return _fail("exactly one child continues toward the hole")
        for dk in dkids:
            res = check_derivation(dk, srs=srs)
            if not res:
                return _fail(f"side premise does not check: {res.reason}")
        # context polymorphism: the rules match contexts as sequences, so
        # passing with an empty, a one-variable and a two-variable segment of
        # fresh names forces the block into a context slot, and any A^n
        # substitutes there unchanged
        for seg in segments:
            concl = node.tseq.instantiate(seg)
            prems = tuple(
                c.tseq.instantiate(seg) if isinstance(c, TNode) else c.conclusion
                for c in node.children
            )
            ok, why = validate_instance_explain(
                RuleInstance(node.rule, concl, prems), srs
            )
            if not ok:
                return _fail(f"template node fails at segment size {len(seg)}: {why}")
        stack.extend(tkids)
    if holes != 1:
        return _fail("a context has exactly one hole")
    return _OK


def _fresh_vars(cert: SchemaCertificate, k: int):
    used = set()

    def grab(f: Formula):
        used.update(g.name for g in subformulas(f) if isinstance(g, Var))

    fam = cert.family
    for f in fam.gamma + (fam.body, fam.succedent) + fam.delta:
        grab(f)
    if fam.zone:
        for f in fam.zone:
            grab(f)
    stack = [cert.template] if cert.template is not None else []
    while stack:
        node = stack.pop()
        if isinstance(node, Derivation):
            continue
        for p in node.tseq.parts:
            if isinstance(p, Formula):
                grab(p)
        grab(node.tseq.succedent)
        stack.extend(node.children)
    out = []
    i = 0
    while len(out) < k:
        name = f"x{i}_"
        if name not in used:
            out.append(name)
        i += 1
    return out


def plug(cert: SchemaCertificate, dn: Derivation, n: int) -> Derivation:
    """Derivation of instance n+1 obtained from a derivation of instance n."""
    fam = cert.family
    if dn.conclusion != fam.instance(n):
        raise ValueError("plugged derivation proves the wrong instance")
    if cert.extra is not None:
        if dn.rule.kind not in _STAR_RIGHT:
            raise ValueError("extension expects a star-right root")
        kids = (
            (cert.extra,) + dn.children
            if cert.side == "left"
            else dn.children + (cert.extra,)
        )
        return Derivation(
            RuleId(dn.rule.kind, n=len(kids)), fam.instance(n + 1), kids
        )
    segment = (fam.body,) * n

    def build(node: TNode) -> Derivation:
        if node.rule is None:
            return dn
        kids = tuple(
            build(c) if isinstance(c, TNode) else c for c in node.children
        )
        return Derivation(node.rule, node.tseq.instantiate(segment), kids)

    return build(cert.template)


def _cert_matches_node(node: Derivation) -> bool:
    try:
        fam = StarFamily.of(node.conclusion, _omega_pos(node))
    except ValueError:
        return False
    return node.cert.family == fam


def omega_node(conclusion, star_position: int, cert: SchemaCertificate) -> Derivation:
    kind = (
        "StarLw_d"
        if isinstance(conclusion, DSequent)
        else "StarLw"
    )
    return Derivation(RuleId(kind, pos=star_position), conclusion, (), cert=cert)


def bounded_omega_node(conclusion, star_position: int, instances) -> Derivation:
    kind = "StarLw_d" if isinstance(conclusion, DSequent) else "StarLw"
    return Derivation(
        RuleId(kind, pos=star_position), conclusion, tuple(instances), bounded=True
    )

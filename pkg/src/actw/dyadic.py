r"""The zone calculus and the basic calculus driven by a rewriting system.

Dyadic sequents keep restricted !-formulas in a set-valued zone.  All
finitary rules of the flat system thread the zone unchanged; the !-rules are
replaced by zone absorption (`BangLd`), zone introduction on the right
(`BangRd`) and application of a zone formula to its variable chain (`Ad`).

Reading `Ad` backward we keep the zone unchanged: a premise with a smaller
zone derives the same sequents after zone weakening, so the canonical
enumeration loses nothing.
"""

from __future__ import annotations

from .calculus import RuleId, backward_finitary
from .syntax import (
    Bang,
    DSequent,
    FragmentClass,
    Formula,
    Meet,
    Prod,
    Sequent,
    Slash,
    Star,
    Var,
    bang_chains,
    fragment_of,
    is_monoidal_bang,
    print_formula,
)


class FragmentError(ValueError):
    pass


def to_dyadic(s: Sequent) -> DSequent:
    """Wrap a monoidal-fragment sequent with an empty zone."""
    if fragment_of(s) > FragmentClass.MONOIDAL:
        raise FragmentError(f"not in the monoidal fragment: {s}")
    return DSequent(frozenset(), s.antecedent, s.succedent)


def weaken_zone(ds: DSequent, extra) -> DSequent:
    """Union extra monoidal !-formulas into the zone; derivability-preserving."""
    extra = frozenset(extra)
    for f in extra:
        if not is_monoidal_bang(f):
            raise FragmentError(f"not a monoidal !-formula: {f}")
    return DSequent(ds.zone | extra, ds.antecedent, ds.succedent)


def absorb(ds: DSequent, position: int) -> DSequent:
    """Move the !-formula at the position into the zone (both-ways admissible)."""
    ant = ds.antecedent
    if not 0 <= position < len(ant):
        raise ValueError("position out of range")
    f = ant[position]
    if not isinstance(f, Bang):
        raise ValueError(f"formula at position {position} is not a !-formula: {f}")
    if not is_monoidal_bang(f):
        raise FragmentError(f"not a monoidal !-formula: {f}")
    return DSequent(ds.zone | {f}, ant[:position] + ant[position + 1 :], ds.succedent)


def absorb_all(ds: DSequent) -> DSequent:
    """Absorb every top-level monoidal !-formula of the antecedent."""
    while True:
        for k, f in enumerate(ds.antecedent):
            if isinstance(f, Bang) and is_monoidal_bang(f):
                ds = absorb(ds, k)
                break
        else:
            return ds


_FLAT_BANG_KINDS = {"BangL", "BangR", "BangP1", "BangP2", "BangW", "BangC"}


def backward_dyadic(ds: DSequent):
    """All finitary dyadic rule instances with conclusion `ds`, cut excluded.

    Identity-shaped instances (premise equal to the conclusion) are dropped.
    """
    out = []
    flat = Sequent(ds.antecedent, ds.succedent)
    zone = ds.zone
    for r, prems in backward_finitary(flat):
        if r.kind in _FLAT_BANG_KINDS or r.kind == "Hyp":
            continue
        out.append(
            (
                RuleId(r.kind + "_d", r.n, r.pos, r.formula),
                tuple(DSequent(zone, p.antecedent, p.succedent) for p in prems),
            )
        )
    ant, succ = ds.antecedent, ds.succedent
    for k, f in enumerate(ant):
        if isinstance(f, Bang) and is_monoidal_bang(f):
            out.append(
                (
                    RuleId("BangLd", pos=k),
                    (DSequent(zone | {f}, ant[:k] + ant[k + 1 :], succ),),
                )
            )
    if not ant and isinstance(succ, Bang):
        out.append((RuleId("BangRd"), (DSequent(zone, (), succ.body),)))
    for zf in sorted(zone, key=print_formula):
        bs, cs = bang_chains(zf)
        bvec = tuple(Var(x) for x in bs)
        cvec = tuple(Var(x) for x in cs)
        n = len(bvec)
        positions = range(len(ant) - n + 1) if n else range(len(ant) + 1)
        for k in positions:
            if n and ant[k : k + n] != bvec:
                continue
            new_ant = ant[:k] + cvec + ant[k + n :]
            if new_ant == ant:
                continue
            out.append(
                (
                    RuleId("Ad", pos=k, formula=zf),
                    (DSequent(zone, new_ant, succ),),
                )
            )
    return out


# ---------------------------------------------------------------------------
# the basic calculus

def is_basic_rhs(f: Formula) -> bool:
    if isinstance(f, Var):
        return True
    if isinstance(f, Prod):
        return isinstance(f.left, Var) and isinstance(f.right, Var)
    if isinstance(f, Star):
        return isinstance(f.body, Var)
    return False


def check_bsc_sequent(s: Sequent) -> Sequent:
    if not is_basic_rhs(s.succedent):
        raise ValueError(f"not a basic right-hand side: {s.succedent}")
    return s


def _meet_key(f: Formula):
    if (
        isinstance(f, Meet)
        and isinstance(f.left, Slash)
        and isinstance(f.right, Slash)
        and isinstance(f.left.left, Var)
        and isinstance(f.right.left, Var)
    ):
        return f.left.left, f.left.right, f.right.left, f.right.right
    return None


def bsc_axiom(s: Sequent):
    """The unique closing axiom of the basic calculus, if `s` is one."""
    ant, succ = s.antecedent, s.succedent
    if isinstance(succ, Var) and ant == (succ,):
        return RuleId("Id_bsc")
    if isinstance(succ, Prod) and ant == (succ.left, succ.right):
        return RuleId("ProdR_bsc")
    if isinstance(succ, Star) and all(f == succ.body for f in ant):
        return RuleId("StarRn_bsc", n=len(ant))
    return None


def backward_bsc(s: Sequent, srs):
    """Backward instances in the basic calculus over the rewriting system.

    Finitary instances carry premise tuples; for each `^*` in the antecedent
    one entry carries the omega-premise generator instead.
    """
    check_bsc_sequent(s)
    ant, succ = s.antecedent, s.succedent
    out = []
    ax = bsc_axiom(s)
    if ax is not None:
        out.append((ax, ()))
    mk = Sequent
    for k, f in enumerate(ant):
        if isinstance(f, Prod):
            out.append(
                (
                    RuleId("ProdL_bsc", pos=k),
                    (mk(ant[:k] + (f.left, f.right) + ant[k + 1 :], succ),),
                )
            )
        elif isinstance(f, Slash) and isinstance(f.left, Var):
            if k >= 1 and ant[k - 1] == f.left:
                out.append(
                    (
                        RuleId("SlashL_bsc", pos=k),
                        (mk(ant[: k - 1] + (f.right,) + ant[k + 1 :], succ),),
                    )
                )
        elif (
            isinstance(f, Slash)
            and isinstance(f.left, Star)
            and isinstance(f.left.body, Var)
        ):
            rv = f.left.body
            run = 0
            while run < k and ant[k - 1 - run] == rv:
                run += 1
            for n in range(run + 1):
                out.append(
                    (
                        RuleId("SlashLn_bsc", n=n, pos=k),
                        (mk(ant[: k - n] + (f.right,) + ant[k + 1 :], succ),),
                    )
                )
        elif _meet_key(f) is not None and k >= 1:
            r1, a1, r2, a2 = _meet_key(f)
            if ant[k - 1] == r1:
                out.append(
                    (
                        RuleId("MeetL1_bsc", pos=k),
                        (mk(ant[: k - 1] + (a1,) + ant[k + 1 :], succ),),
                    )
                )
            if ant[k - 1] == r2:
                out.append(
                    (
                        RuleId("MeetL2_bsc", pos=k),
                        (mk(ant[: k - 1] + (a2,) + ant[k + 1 :], succ),),
                    )
                )
        elif isinstance(f, Star):
            from .calculus import omega_premises_at

            out.append((RuleId("StarLw_bsc", pos=k), omega_premises_at(s, k)))
    for idx, (lhs, rhs) in enumerate(srs.rules):
        bvec = tuple(Var(x) for x in lhs)
        cvec = tuple(Var(x) for x in rhs)
        n = len(bvec)
        for k in range(len(ant) - n + 1):
            if ant[k : k + n] != bvec:
                continue
            new_ant = ant[:k] + cvec + ant[k + n :]
            if new_ant == ant:
                continue
            out.append((RuleId("A_bsc", n=idx, pos=k), (mk(new_ant, succ),)))
    return out

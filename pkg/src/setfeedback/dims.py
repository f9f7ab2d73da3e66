"""Exact combinatorial dimensions by memoized recursion over version spaces.

Version spaces are hypothesis bitmasks.  A feedback set that contains every
output of ``V`` at ``x`` leaves ``V`` unchanged (a *self* edge).  Shattered
trees may use such edges, and the recursions below treat them by building the
value one level at a time: once level ``d-1`` is established for ``V``, a
self edge certifies ``d-1`` for the child as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .games import GameSolver
from .helly import helly_number, minimal_empty_families
from .model import ProblemInstance
from .rational import bits

NEG_INF = float("-inf")
POS_INF = float("inf")
PSL_SUBSET_GUARD = 10**6


def _is_label_symmetric(m: int, masks: tuple[int, ...]) -> bool:
    """True if the family is invariant under every permutation of the labels."""
    if m <= 1:
        return True
    family = set(masks)

    def image(mask, perm):
        out = 0
        for y in bits(mask):
            out |= 1 << perm[y]
        return out

    swap = [1, 0] + list(range(2, m))
    cycle = [(y + 1) % m for y in range(m)]
    # a transposition and an m-cycle generate the full symmetric group
    return all({image(a, perm) for a in family} == family for perm in (swap, cycle))


@dataclass(frozen=True)
class RelationReport:
    p: int
    gamma: Fraction
    psl: int
    ms: int
    sl: int
    helly: int
    sandwich: bool
    collapse_applies: bool
    collapse: bool | None

    @property
    def passed(self) -> bool:
        return self.sandwich and self.collapse is not False


class DimensionEngine:
    """Dimension queries for one fixed instance; all caches live on the engine."""

    def __init__(self, instance: ProblemInstance):
        self.inst = instance
        self.games = GameSolver(instance.m)
        self.symmetric = _is_label_symmetric(instance.m, instance.sets)
        self._rows = instance.hypotheses.rows
        self._sl: dict = {}
        self._ld: dict = {}
        self._psl: dict = {}
        self._ms: dict = {}
        self._families: dict[int, list[tuple[int, ...]]] = {}
        self._helly: int | None = None

    # -- keys --------------------------------------------------------------

    def _relabelled(self, V: int):
        names: dict[int, int] = {}
        return tuple(
            tuple(names.setdefault(y, len(names)) for y in self._rows[h]) for h in bits(V)
        )

    def key(self, V: int):
        """Memo key: the mask, or a label-canonical row list when the family allows it."""
        return self._relabelled(V) if self.symmetric else V

    def _root(self, V: int | None) -> int:
        return self.inst.full if V is None else V

    # -- Littlestone -------------------------------------------------------

    def ldim(self, V: int | None = None) -> int:
        V = self._root(V)
        if V == 0:
            return -1
        k = self._relabelled(V)
        hit = self._ld.get(k)
        if hit is not None:
            return hit
        best = 0
        for x in range(self.inst.n_instances):
            parts = [W for W in (V & c for c in self.inst.label_cover[x]) if W]
            if len(parts) >= 2:
                vals = sorted((self.ldim(W) for W in parts), reverse=True)
                best = max(best, 1 + vals[1])
        self._ld[k] = best
        return best

    # -- Set Littlestone ---------------------------------------------------

    def sl_edge_values(self, V: int, x: int) -> list[float]:
        """Per label y: best continuation ``1 + SL(V(x,A))`` over sets avoiding y.

        ``-inf`` when no usable set avoids y; ``+inf`` when a self edge avoids y.
        """
        sets = self.inst.sets
        child = []
        for s, W in enumerate(V & c for c in self.inst.cover[x]):
            if W == 0:
                child.append(None)
            elif W == V:
                child.append(POS_INF)
            else:
                child.append(1 + self.sldim(W))
        out = []
        for y in range(self.inst.m):
            best = NEG_INF
            for s, a in enumerate(sets):
                v = child[s]
                if v is not None and not (a >> y) & 1 and v > best:
                    best = v
            out.append(best)
        return out

    def sldim(self, V: int | None = None) -> int:
        V = self._root(V)
        if V == 0:
            return -1
        k = self.key(V)
        hit = self._sl.get(k)
        if hit is not None:
            return hit
        best = 0
        for x in range(self.inst.n_instances):
            val = min(self.sl_edge_values(V, x))
            if val > best:
                best = int(val)
        self._sl[k] = best
        return best

    # -- p-Set Littlestone -------------------------------------------------

    def families(self, p: int) -> list[tuple[int, ...]]:
        """Minimal empty-intersection families of at most ``p`` sets."""
        if p < 2:
            raise ValueError(f"p must be at least 2, got {p}")
        hit = self._families.get(p)
        if hit is None:
            n = self.inst.n_sets
            if math.comb(n, min(p, n)) > PSL_SUBSET_GUARD:
                raise ValueError(f"C({n},{p}) exceeds the enumeration guard")
            hit = list(minimal_empty_families(self.inst.sets, max_size=p))
            self._families[p] = hit
        return hit

    def psl_family_value(self, V: int, x: int, family: tuple[int, ...], p: int) -> int:
        vals = []
        for s in family:
            W = V & self.inst.cover[x][s]
            if W == 0:
                return 0
            if W != V:
                vals.append(self.psldim(W, p))
        return 1 + min(vals)

    def psldim(self, V: int | None = None, p: int = 2) -> int:
        fams = self.families(p)
        V = self._root(V)
        if V == 0:
            return -1
        k = (self.key(V), p)
        hit = self._psl.get(k)
        if hit is not None:
            return hit
        best = 0
        for x in range(self.inst.n_instances):
            for fam in fams:
                best = max(best, self.psl_family_value(V, x, fam, p))
        self._psl[k] = best
        return best

    # -- Measure shattering ------------------------------------------------

    def unavoidable(self, masks: list[int], gamma: Fraction) -> bool:
        """Can every measure be pushed to mass at most ``1-gamma`` on some set?"""
        if not masks:
            return False
        common = -1
        for a in masks:
            common &= a
        if common:
            return False
        if gamma == 0:
            return True
        return self.games.value(masks) <= 1 - gamma

    def ms_child_values(self, V: int, x: int, gamma: Fraction) -> list[tuple[int, float]]:
        """``(set index, MS of child)`` for sets usable at x; self edges get ``+inf``."""
        out = []
        for s, c in enumerate(self.inst.cover[x]):
            W = V & c
            if W == V:
                out.append((s, POS_INF))
            elif W:
                out.append((s, self.msdim(W, gamma)))
        return out

    def level_collection(self, children, level: int) -> list[int]:
        sets = self.inst.sets
        return [sets[s] for s, c in children if c >= level]

    def ms_at(self, V: int, x: int, gamma: Fraction) -> int:
        """Depth certified at instance x alone."""
        children = self.ms_child_values(V, x, gamma)
        top = max((c for _, c in children if c != POS_INF), default=-1)
        depth = 0
        # Self edges are valid at every level reached so far.
        for level in range(0, top + 2):
            if not self.unavoidable(self.level_collection(children, level), gamma):
                break
            depth = level + 1
        return depth

    def msdim(self, V: int | None = None, gamma=Fraction(0)) -> int:
        gamma = Fraction(gamma)
        if not 0 <= gamma <= 1:
            raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
        V = self._root(V)
        if V == 0:
            return -1
        k = (self.key(V), gamma)
        hit = self._ms.get(k)
        if hit is not None:
            return hit
        best = max(self.ms_at(V, x, gamma) for x in range(self.inst.n_instances))
        self._ms[k] = best
        return best

    # -- Helly and relations -----------------------------------------------

    def helly(self) -> int:
        if self._helly is None:
            self._helly = helly_number(self.inst.sets)
        return self._helly

    def check_relations(self, p: int, gamma) -> RelationReport:
        gamma = Fraction(gamma)
        if p < 2 or not 0 <= gamma <= Fraction(1, p):
            raise ValueError("need p >= 2 and 0 <= gamma <= 1/p")
        psl, ms, sl = self.psldim(None, p), self.msdim(None, gamma), self.sldim()
        h = self.helly()
        applies = h == p
        return RelationReport(
            p, gamma, psl, ms, sl, h,
            sandwich=psl <= ms <= sl,
            collapse_applies=applies,
            collapse=(psl == ms == sl) if applies else None,
        )


@lru_cache(maxsize=64)
def engine_for(instance: ProblemInstance) -> DimensionEngine:
    return DimensionEngine(instance)


def ldim(instance, V=None) -> int:
    return engine_for(instance).ldim(V)


def sldim(instance, V=None) -> int:
    return engine_for(instance).sldim(V)


def psldim(instance, V=None, p: int = 2) -> int:
    return engine_for(instance).psldim(V, p)


def msdim(instance, V=None, gamma=Fraction(0)) -> int:
    return engine_for(instance).msdim(V, gamma)


def check_relations(instance, p: int, gamma) -> RelationReport:
    return engine_for(instance).check_relations(p, gamma)

"""Materialized shattered trees and an engine-independent validator.

An SL tree branches on every label (edge ``y`` carries a set avoiding ``y``);
a p-SL tree branches on ``0..p-1`` with sibling sets of empty intersection.
Leaves carry a hypothesis consistent with the whole root-to-leaf path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dims import DimensionEngine
from .model import ProblemInstance


@dataclass
class WitnessNode:
    instance: int | None = None          # None at leaves
    children: dict[int, tuple[int, "WitnessNode"]] = field(default_factory=dict)
    hypothesis: int | None = None        # set at leaves

    @property
    def is_leaf(self) -> bool:
        return self.instance is None


@dataclass
class WitnessTree:
    kind: str            # "sl" or "psl"
    p: int | None
    depth: int
    root: WitnessNode

    def to_dict(self) -> dict:
        return {"kind": self.kind, "p": self.p, "depth": self.depth, "root": _node_dict(self.root)}

    @classmethod
    def from_dict(cls, doc: dict) -> WitnessTree:
        return cls(doc["kind"], doc.get("p"), doc["depth"], _node_from(doc["root"]))


def _node_dict(node: WitnessNode) -> dict:
    if node.is_leaf:
        return {"hypothesis": node.hypothesis}
    return {
        "instance": node.instance,
        "edges": [
            {"edge": e, "set": s, "child": _node_dict(c)} for e, (s, c) in sorted(node.children.items())
        ],
    }


def _node_from(doc: dict) -> WitnessNode:
    if "instance" not in doc:
        return WitnessNode(hypothesis=doc["hypothesis"])
    return WitnessNode(
        instance=doc["instance"],
        children={e["edge"]: (e["set"], _node_from(e["child"])) for e in doc["edges"]},
    )


def _leaf(V: int) -> WitnessNode:
    return WitnessNode(hypothesis=(V & -V).bit_length() - 1)


def sldim_witness(engine: DimensionEngine, V: int | None = None, depth: int | None = None) -> WitnessTree:
    """A complete label-branching tree of the given depth (default: SL(V))."""
    inst = engine.inst
    V = inst.full if V is None else V
    d = engine.sldim(V) if depth is None else depth
    if V == 0 or d > engine.sldim(V):
        raise ValueError(f"no shattered tree of depth {d}")

    def build(W: int, d: int) -> WitnessNode:
        if d == 0:
            return _leaf(W)
        for x in range(inst.n_instances):
            children = {}
            for y in range(inst.m):
                pick = next(
                    (
                        s for s, a in enumerate(inst.sets)
                        if not (a >> y) & 1
                        and (W & inst.cover[x][s])
                        and engine.sldim(W & inst.cover[x][s]) >= d - 1
                    ),
                    None,
                )
                if pick is None:
                    break
                children[y] = pick
            else:
                return WitnessNode(
                    instance=x,
                    children={y: (s, build(W & inst.cover[x][s], d - 1)) for y, s in children.items()},
                )
        raise AssertionError("engine value and witness search disagree")

    return WitnessTree("sl", None, d, build(V, d))


def psldim_witness(
    engine: DimensionEngine, p: int, V: int | None = None, depth: int | None = None
) -> WitnessTree:
    """A p-branching tree; short families are padded by repeating their last set."""
    inst = engine.inst
    V = inst.full if V is None else V
    d = engine.psldim(V, p) if depth is None else depth
    if V == 0 or d > engine.psldim(V, p):
        raise ValueError(f"no shattered tree of depth {d}")

    def build(W: int, d: int) -> WitnessNode:
        if d == 0:
            return _leaf(W)
        for x in range(inst.n_instances):
            for fam in engine.families(p):
                kids = [W & inst.cover[x][s] for s in fam]
                if all(k and engine.psldim(k, p) >= d - 1 for k in kids):
                    padded = list(fam) + [fam[-1]] * (p - len(fam))
                    return WitnessNode(
                        instance=x,
                        children={
                            i: (s, build(W & inst.cover[x][s], d - 1)) for i, s in enumerate(padded)
                        },
                    )
        raise AssertionError("engine value and witness search disagree")

    return WitnessTree("psl", p, d, build(V, d))


def validate_witness(instance: ProblemInstance, tree: WitnessTree) -> list[str]:
    """Check a tree edge by edge against the raw instance; returns problems found."""
    problems: list[str] = []
    sets = instance.sets

    def walk(node: WitnessNode, path: list[tuple[int, int]], level: int):
        if node.is_leaf:
            if level != tree.depth:
                problems.append(f"leaf at depth {level}, expected {tree.depth}")
            h = node.hypothesis
            if h is None or not 0 <= h < instance.n_hypotheses:
                problems.append(f"leaf hypothesis {h!r} out of range")
                return
            for x, s in path:
                if not (sets[s] >> instance.output(h, x)) & 1:
                    problems.append(f"hypothesis {h} leaves set {s} at instance {x}")
            return
        if not 0 <= node.instance < instance.n_instances:
            problems.append(f"instance index {node.instance} out of range")
            return
        if tree.kind == "sl":
            if sorted(node.children) != list(range(instance.m)):
                problems.append("SL node does not branch on every label")
            for y, (s, _) in node.children.items():
                if (sets[s] >> y) & 1:
                    problems.append(f"edge {y} carries set {s} containing it")
        else:
            if sorted(node.children) != list(range(tree.p)):
                problems.append(f"p-SL node does not have {tree.p} branches")
            common = -1
            for s, _ in node.children.values():
                common &= sets[s]
            if common:
                problems.append("sibling sets share a label")
        for _, (s, child) in sorted(node.children.items()):
            walk(child, path + [(node.instance, s)], level + 1)

    walk(tree.root, [], 0)
    return problems

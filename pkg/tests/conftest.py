"""Shared fuzz generators: random valid models and random edit sequences.

The generators deliberately avoid producing indistinguishable sibling twins
(duplicate names, several start/end events in one container, sibling flows
over the same endpoint pair), which keeps canonical ordering total on the
corpus. All randomness is seeded, so the corpus is reproducible.
"""

import copy
import itertools
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mmdiff.diff import _WorkingTree
from mmdiff.model import Edge, Element, Metatype, Model

_ATTR_TYPES = ("EString", "EInt", "EFloat", "EBoolean")

_ECORE_CONTAINERS = (Metatype.EPACKAGE, Metatype.ECLASS)
_BPMN_CONTAINERS = (Metatype.PROCESS, Metatype.SUBPROCESS)
_FLOW_ENDPOINT_KINDS = (Metatype.TASK, Metatype.START_EVENT, Metatype.END_EVENT,
                        Metatype.SUBPROCESS)


class _Namer:
    def __init__(self):
        self._counter = itertools.count(1)

    def __call__(self, prefix: str) -> str:
        return f"{prefix}{next(self._counter)}"


def random_model(rng: random.Random, flavor: str | None = None, max_elements: int = 50) -> Model:
    """A valid random model of up to `max_elements` elements."""
    flavor = flavor or rng.choice(("ecore", "bpmn"))
    names = _Namer()
    size_budget = rng.randint(1, max_elements)
    if flavor == "ecore":
        root = _grow_ecore(rng, names, size_budget)
    else:
        root = _grow_bpmn(rng, names, size_budget)
    return Model(root)


def _grow_ecore(rng, names, budget) -> Element:
    root = Element(Metatype.EPACKAGE, name=names("Pkg"))
    packages = [root]
    classes: list[Element] = []
    count = 1
    while count < budget:
        kind = rng.choice(("package", "class", "attribute", "reference"))
        if kind == "package":
            el = Element(Metatype.EPACKAGE, name=names("Pkg"))
            rng.choice(packages).children.append(el)
            packages.append(el)
        elif kind == "class":
            el = Element(Metatype.ECLASS, name=names("Class"))
            rng.choice(packages).children.append(el)
            classes.append(el)
        elif kind == "attribute" and classes:
            el = Element(Metatype.EATTRIBUTE, name=names("attr"),
                         attributes={"type": rng.choice(_ATTR_TYPES)})
            rng.choice(classes).children.append(el)
        elif kind == "reference" and classes:
            el = Element(Metatype.EREFERENCE, name=names("ref"))
            rng.choice(classes).children.append(el)
        else:
            continue
        count += 1
    # wire references once all classes exist
    _assign_ids(root)
    for el in root.walk():
        if el.metatype is Metatype.EREFERENCE:
            el.edges.append(Edge("target", rng.choice(classes).local_id))
    return root


def _grow_bpmn(rng, names, budget) -> Element:
    root = Element(Metatype.PROCESS, name=names("Proc"))
    containers = [root]
    count = 1
    while count < budget:
        kind = rng.choice(("task", "task", "subprocess", "start", "end"))
        container = rng.choice(containers)
        if kind == "task":
            container.children.append(Element(Metatype.TASK, name=names("Task")))
        elif kind == "subprocess":
            el = Element(Metatype.SUBPROCESS, name=names("Sub"))
            container.children.append(el)
            containers.append(el)
        elif kind == "start":
            if any(c.metatype is Metatype.START_EVENT for c in container.children):
                continue
            container.children.append(Element(Metatype.START_EVENT))
        else:
            if any(c.metatype is Metatype.END_EVENT for c in container.children):
                continue
            container.children.append(Element(Metatype.END_EVENT))
        count += 1
    _assign_ids(root)
    # add flows between distinct endpoint pairs of one container
    for container in containers:
        endpoints = [c for c in container.children if c.metatype in _FLOW_ENDPOINT_KINDS]
        if len(endpoints) < 2 or count >= budget:
            continue
        pairs = [(a, b) for a in endpoints for b in endpoints if a is not b]
        rng.shuffle(pairs)
        for a, b in pairs[:rng.randint(0, min(3, len(pairs)))]:
            if count >= budget:
                break
            flow = Element(Metatype.SEQUENCE_FLOW, local_id=f"flow_{a.local_id}_{b.local_id}",
                           edges=[Edge("source", a.local_id), Edge("target", b.local_id)])
            container.children.append(flow)
            count += 1
    return root


def _assign_ids(root: Element) -> None:
    for i, el in enumerate(root.walk(), start=1):
        if not el.local_id:
            el.local_id = f"g{i}"


def shuffle_ids(model: Model) -> Model:
    """Same structure and order, permuted local ids."""
    root = copy.deepcopy(model.root)
    elements = list(root.walk())
    mapping = {el.local_id: f"z{len(elements) - i}" for i, el in enumerate(elements)}
    for el in elements:
        el.local_id = mapping[el.local_id]
        for edge in el.edges:
            edge.target_id = mapping[edge.target_id]
    return Model(root)


# ------------------------------------------------------------- random edits


def random_edits(rng: random.Random, model: Model, max_edits: int = 10,
                 max_elements: int = 50) -> Model:
    """Apply up to `max_edits` random valid edits to a copy of the model."""
    names = _Namer()
    tree = _WorkingTree(copy.deepcopy(model.root))
    for _ in range(rng.randint(1, max_edits)):
        alive = list(tree.root.walk())
        action = rng.choice(("rename", "move", "create", "delete", "update", "retarget"))
        if action == "rename":
            _edit_rename(rng, names, alive)
        elif action == "move":
            _edit_move(rng, tree, alive)
        elif action == "create":
            if len(alive) < max_elements:
                _edit_create(rng, names, tree, alive)
        elif action == "delete":
            _edit_delete(rng, tree, alive)
        elif action == "update":
            _edit_update(rng, alive)
        else:
            _edit_retarget(rng, tree, alive)
    return Model(copy.deepcopy(tree.root))


def _edit_rename(rng, names, alive):
    named = [el for el in alive if el.metatype.named]
    if named:
        el = rng.choice(named)
        el.name = names("Ren") + el.name


def _subtree(el):
    return set(map(id, el.walk()))


def _twin_in(parent, metatype, name):
    return any(c.metatype is metatype and (c.name or "") == (name or "")
               for c in parent.children)


def _flow_pair_taken(parent, source_id, target_id, ignore=None):
    for c in parent.children:
        if c is ignore or c.metatype is not Metatype.SEQUENCE_FLOW:
            continue
        if c.edge("source").target_id == source_id and c.edge("target").target_id == target_id:
            return True
    return False


def _edit_move(rng, tree, alive):
    movable = [el for el in alive if tree.parent_of(el) is not None]
    rng.shuffle(movable)
    for el in movable:
        inside = _subtree(el)
        parents = [
            p for p in alive
            if id(p) not in inside
            and p is not tree.parent_of(el)
            and p.metatype.allows_child(el.metatype)
        ]
        if el.metatype is Metatype.SEQUENCE_FLOW:
            src = el.edge("source").target_id
            tgt = el.edge("target").target_id
            parents = [p for p in parents if not _flow_pair_taken(p, src, tgt)]
        else:
            parents = [p for p in parents if not _twin_in(p, el.metatype, el.name)]
        if parents:
            tree.move(el, rng.choice(parents))
            return


def _edit_create(rng, names, tree, alive):
    classes = [el for el in alive if el.metatype is Metatype.ECLASS]
    choices = []
    for parent in alive:
        for kind in (Metatype.EPACKAGE, Metatype.ECLASS, Metatype.EATTRIBUTE,
                     Metatype.EREFERENCE, Metatype.TASK, Metatype.SUBPROCESS,
                     Metatype.START_EVENT, Metatype.END_EVENT, Metatype.SEQUENCE_FLOW):
            if parent.metatype.allows_child(kind):
                choices.append((parent, kind))
    rng.shuffle(choices)
    for parent, kind in choices:
        if kind is Metatype.EREFERENCE and not classes:
            continue
        if kind in (Metatype.START_EVENT, Metatype.END_EVENT) and _twin_in(parent, kind, ""):
            continue
        if kind is Metatype.SEQUENCE_FLOW:
            endpoints = [c for c in parent.children if c.metatype in _FLOW_ENDPOINT_KINDS]
            pairs = [(a, b) for a in endpoints for b in endpoints
                     if a is not b and not _flow_pair_taken(parent, a.local_id, b.local_id)]
            if not pairs:
                continue
            a, b = rng.choice(pairs)
            el = tree.create(parent, kind, None, {})
            el.edges = [Edge("source", a.local_id), Edge("target", b.local_id)]
            return
        name = None
        attributes = {}
        if kind.named:
            prefix = {"epackage": "Pkg", "eclass": "Class", "eattribute": "attr",
                      "ereference": "ref", "task": "Task", "subprocess": "Sub"}[kind.value]
            name = names("New" + prefix)
        if kind is Metatype.EATTRIBUTE:
            attributes = {"type": rng.choice(_ATTR_TYPES)}
        el = tree.create(parent, kind, name, attributes)
        if kind is Metatype.EREFERENCE:
            el.edges = [Edge("target", rng.choice(classes).local_id)]
        return


def _edit_delete(rng, tree, alive):
    candidates = [el for el in alive if tree.parent_of(el) is not None]
    rng.shuffle(candidates)
    for el in candidates:
        inside = _subtree(el)
        subtree_ids = {e.local_id for e in el.walk()}
        externally_referenced = any(
            edge.target_id in subtree_ids
            for other in alive if id(other) not in inside
            for edge in other.edges
        )
        if not externally_referenced:
            tree.detach(el)
            return


def _edit_update(rng, alive):
    attrs = [el for el in alive if el.metatype is Metatype.EATTRIBUTE]
    if attrs:
        el = rng.choice(attrs)
        others = [t for t in _ATTR_TYPES if t != el.attributes.get("type")]
        el.attributes["type"] = rng.choice(others)


def _edit_retarget(rng, tree, alive):
    by_id = {el.local_id: el for el in alive}
    refs = [el for el in alive if el.metatype is Metatype.EREFERENCE]
    flows = [el for el in alive if el.metatype is Metatype.SEQUENCE_FLOW]
    rng.shuffle(refs)
    rng.shuffle(flows)
    if refs and (rng.random() < 0.5 or not flows):
        el = refs[0] if refs else None
        classes = [c for c in alive if c.metatype is Metatype.ECLASS]
        if el is not None and classes:
            el.edge("target").target_id = rng.choice(classes).local_id
            return
    for flow in flows:
        parent = tree.parent_of(flow)
        endpoints = [c for c in parent.children if c.metatype in _FLOW_ENDPOINT_KINDS]
        role = rng.choice(("source", "target"))
        other_role = "target" if role == "source" else "source"
        rng.shuffle(endpoints)
        for candidate in endpoints:
            if candidate is by_id.get(flow.edge(role).target_id):
                continue
            src = candidate.local_id if role == "source" else flow.edge("source").target_id
            tgt = candidate.local_id if role == "target" else flow.edge("target").target_id
            if src == tgt or _flow_pair_taken(parent, src, tgt, ignore=flow):
                continue
            flow.edge(role).target_id = candidate.local_id
            return


# ------------------------------------------------------------------ corpora


@pytest.fixture(scope="session")
def fuzz_pairs():
    """1000 (old, new) pairs where new is old plus up to 10 random edits."""
    rng = random.Random(20130511)
    pairs = []
    for _ in range(1000):
        old = random_model(rng)
        new = random_edits(rng, old)
        pairs.append((old, new))
    return pairs

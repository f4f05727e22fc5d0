"""Edit-script derivation from a matching, and script application.

Scripts hold atomic operations in a fixed phase order: creates (parents
before children), moves, renames, attribute updates, edge operations,
deletes (children before parents). Subject paths are structural paths valid
in the pre-state of the operation's phase, so application resolves each
phase's paths first and then executes the phase. Derivation simulates the
patch on a working copy while recording operations, which keeps the paths it
writes and the paths application expects in lockstep.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass

from mmdiff.errors import (
    DocumentError,
    InconsistentMatching,
    InvariantViolation,
    UnresolvablePath,
)
from mmdiff.matching import MatcherConfig, Matching, match_models
from mmdiff.model import Edge, Element, Metatype, Model, PathStep, format_path

CREATE_ELEMENT = "CreateElement"
DELETE_ELEMENT = "DeleteElement"
MOVE_ELEMENT = "MoveElement"
RENAME_ELEMENT = "RenameElement"
UPDATE_ATTRIBUTE = "UpdateAttribute"
RETARGET_EDGE = "RetargetEdge"
CREATE_EDGE = "CreateEdge"
DELETE_EDGE = "DeleteEdge"

_EDGE_KINDS = (RETARGET_EDGE, DELETE_EDGE, CREATE_EDGE)
_KIND_ORDER = (
    CREATE_ELEMENT,
    MOVE_ELEMENT,
    RENAME_ELEMENT,
    UPDATE_ATTRIBUTE,
    *_EDGE_KINDS,
    DELETE_ELEMENT,
)

Path = tuple[PathStep, ...]


@dataclass(frozen=True)
class EditOp:
    """One atomic edit; payload keys depend on the kind."""

    kind: str
    subject: Path
    payload: dict

    def __str__(self) -> str:
        return _format_op(self)


@dataclass(frozen=True)
class EditScript:
    """Ordered list of atomic edits transforming one model into another."""

    ops: tuple[EditOp, ...] = ()

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def kinds(self) -> dict[str, int]:
        """Multiset of operation kinds, for report comparisons."""
        counts: dict[str, int] = {}
        for op in self.ops:
            counts[op.kind] = counts.get(op.kind, 0) + 1
        return counts


class _WorkingTree:
    """Mutable tree with parent/id indexes used while patching."""

    def __init__(self, root: Element):
        self.root = root
        self.parent: dict[int, Element | None] = {id(root): None}
        self.by_id: dict[str, Element] = {}
        for el in root.walk():
            self.by_id[el.local_id] = el
            for child in el.children:
                self.parent[id(child)] = el
        self._fresh = 0

    def parent_of(self, el: Element) -> Element | None:
        return self.parent[id(el)]

    def path_of(self, el: Element) -> Path:
        steps: list[PathStep] = []
        cur: Element | None = el
        while cur is not None:
            parent = self.parent[id(cur)]
            key = (cur.metatype, cur.name or "")
            ordinal = 0
            if parent is not None:
                for sib in parent.children:
                    if sib is cur:
                        break
                    if (sib.metatype, sib.name or "") == key:
                        ordinal += 1
            steps.append(PathStep(cur.metatype, cur.name or "", ordinal))
            cur = parent
        return tuple(reversed(steps))

    def resolve(self, path: Path) -> Element:
        if not path:
            raise UnresolvablePath("empty path")
        first = path[0]
        if (
            first.metatype is not self.root.metatype
            or first.name != (self.root.name or "")
            or first.ordinal != 0
        ):
            raise UnresolvablePath(f"{format_path(path)} does not start at the root")
        cur = self.root
        for step in path[1:]:
            matches = [
                c for c in cur.children
                if c.metatype is step.metatype and (c.name or "") == step.name
            ]
            if step.ordinal >= len(matches):
                raise UnresolvablePath(f"{format_path(path)} does not resolve")
            cur = matches[step.ordinal]
        return cur

    def fresh_id(self) -> str:
        while True:
            self._fresh += 1
            candidate = f"w{self._fresh}"
            if candidate not in self.by_id:
                return candidate

    def create(self, parent: Element, metatype: Metatype, name: str | None, attributes: dict) -> Element:
        if not parent.metatype.allows_child(metatype):
            raise InvariantViolation(
                f"{parent.metatype.tag} may not contain {metatype.tag}"
            )
        el = Element(metatype=metatype, name=name, local_id=self.fresh_id(), attributes=dict(attributes))
        parent.children.append(el)
        self.parent[id(el)] = parent
        self.by_id[el.local_id] = el
        return el

    def move(self, el: Element, new_parent: Element) -> None:
        if self.parent[id(el)] is None:
            raise InvariantViolation("the root cannot be moved")
        if not new_parent.metatype.allows_child(el.metatype):
            raise InvariantViolation(
                f"{new_parent.metatype.tag} may not contain {el.metatype.tag}"
            )
        self.detach(el)
        new_parent.children.append(el)
        self.parent[id(el)] = new_parent

    def detach(self, el: Element) -> None:
        parent = self.parent[id(el)]
        if parent is None:
            raise InvariantViolation("the root cannot be removed")
        try:
            parent.children.remove(el)
        except ValueError:
            pass


def _op_buckets(script: EditScript) -> dict[str, list[EditOp]]:
    buckets: dict[str, list[EditOp]] = {kind: [] for kind in _KIND_ORDER}
    for op in script:
        if op.kind not in buckets:
            raise InvariantViolation(f"unknown edit kind {op.kind!r}")
        buckets[op.kind].append(op)
    return buckets


# ------------------------------------------------------------------ derive


def derive_edit_script(old: Model, new: Model, matching: Matching, cfg: MatcherConfig | None = None) -> EditScript:
    """Turn a matching into an ordered atomic edit script.

    Unmatched new elements become creates, unmatched old ones deletes;
    matched pairs contribute moves, renames, attribute updates and edge
    operations. The `cfg` argument is accepted for signature completeness;
    all policy decisions are already encoded in the matching.
    """
    del cfg
    _check_membership(old, new, matching)

    working_root = copy.deepcopy(old.root)
    tree = _WorkingTree(working_root)
    wmap: dict[int, Element] = {
        id(o): w for o, w in zip(old.root.walk(), working_root.walk())
    }
    nmap: dict[int, Element] = {}
    pairs = sorted(matching.element_pairs, key=lambda p: old.position_of(p[0]))
    for o, n in pairs:
        nmap[id(n)] = wmap[id(o)]

    ops: list[EditOp] = []

    # creates, parents before children (new-model document order)
    pending: list[tuple[Element, Element, Path]] = []
    for n in new.elements:
        if matching.has_new(n):
            continue
        parent_n = new.parent_of(n)
        if parent_n is None:
            raise InconsistentMatching("the roots of both models must be paired")
        w = tree.create(nmap[id(parent_n)], n.metatype, n.name, n.attributes)
        nmap[id(n)] = w
        pending.append((n, w, tree.path_of(w)))
    for n, w, path in pending:
        edges_payload = []
        for e in sorted(n.edges, key=lambda e: e.role):
            target_w = nmap[id(new.by_id[e.target_id])]
            w.edges.append(Edge(e.role, target_w.local_id))
            edges_payload.append({"role": e.role, "target": tree.path_of(target_w)})
        payload = {
            "metatype": n.metatype,
            "name": n.name,
            "attributes": dict(n.attributes),
            "edges": edges_payload,
        }
        ops.append(EditOp(CREATE_ELEMENT, path, payload))

    # moves: pairs whose parent correspondence differs
    moves: list[tuple[Element, Element]] = []
    for o, n in pairs:
        parent_n = new.parent_of(n)
        if parent_n is None:
            continue
        w = wmap[id(o)]
        target_parent = nmap[id(parent_n)]
        if tree.parent_of(w) is not target_parent:
            moves.append((w, target_parent))
    for w, target_parent in moves:
        ops.append(EditOp(MOVE_ELEMENT, tree.path_of(w), {"new_parent": tree.path_of(target_parent)}))
    for w, target_parent in moves:
        tree.move(w, target_parent)

    # renames
    renames = [(wmap[id(o)], o.name, n.name) for o, n in pairs if o.name != n.name]
    for w, old_name, new_name in renames:
        ops.append(EditOp(RENAME_ELEMENT, tree.path_of(w), {"old_name": old_name, "new_name": new_name}))
    for w, _, new_name in renames:
        w.name = new_name

    # attribute updates (paths are unaffected by this phase)
    for o, n in pairs:
        w = wmap[id(o)]
        for key in sorted(set(o.attributes) | set(n.attributes)):
            ov = o.attributes.get(key)
            nv = n.attributes.get(key)
            if ov == nv:
                continue
            ops.append(EditOp(
                UPDATE_ATTRIBUTE,
                tree.path_of(w),
                {"key": key, "old_value": ov, "new_value": nv},
            ))
            if nv is None:
                w.attributes.pop(key, None)
            else:
                w.attributes[key] = nv

    # edge operations
    edge_pairs = {
        (id(o_el), edge_o.role): edge_n
        for (o_el, edge_o), (_n_el, edge_n) in matching.edge_pairs
    }
    planned: list[tuple[str, Element, str, Element, Element]] = []
    for o, n in pairs:
        if not o.metatype.edge_roles:
            continue
        w = wmap[id(o)]
        for role in o.metatype.edge_roles:
            current = tree.by_id[w.edge(role).target_id]
            expected = nmap[id(new.by_id[n.edge(role).target_id])]
            if current is expected:
                continue
            corresponding = (id(o), role) in edge_pairs
            if corresponding and role == "target":
                planned.append(("retarget", w, role, current, expected))
            else:
                planned.append(("replace", w, role, current, expected))
    for action, w, role, current, expected in planned:
        subject = tree.path_of(w)
        if action == "retarget":
            ops.append(EditOp(RETARGET_EDGE, subject, {
                "role": role,
                "old_target": tree.path_of(current),
                "new_target": tree.path_of(expected),
            }))
        else:
            ops.append(EditOp(DELETE_EDGE, subject, {"role": role, "old_target": tree.path_of(current)}))
            ops.append(EditOp(CREATE_EDGE, subject, {"role": role, "target": tree.path_of(expected)}))
    for _action, w, role, _current, expected in planned:
        w.edge(role).target_id = expected.local_id

    # deletes, children before parents (reverse old document order)
    doomed = [wmap[id(o)] for o in reversed(old.elements) if not matching.has_old(o)]
    delete_ops = [EditOp(DELETE_ELEMENT, tree.path_of(w), {}) for w in doomed]
    ops.extend(delete_ops)
    for w in doomed:
        tree.detach(w)

    order = {kind: i for i, kind in enumerate(_KIND_ORDER)}
    assert [order[op.kind] for op in ops] == sorted(order[op.kind] for op in ops)
    return EditScript(tuple(ops))


def _check_membership(old: Model, new: Model, matching: Matching) -> None:
    for o, n in matching.element_pairs:
        if old.by_id.get(o.local_id) is not o:
            raise InconsistentMatching(f"old element {o!r} is not part of the old model")
        if new.by_id.get(n.local_id) is not n:
            raise InconsistentMatching(f"new element {n!r} is not part of the new model")
    for (o_el, _), (n_el, _) in matching.edge_pairs:
        if matching.new_of(o_el) is not n_el:
            raise InconsistentMatching("edge pairs must connect paired elements")


# ------------------------------------------------------------------- apply


def apply_edit_script(old: Model, script: EditScript) -> Model:
    """Apply a script to a model, returning the patched model.

    Paths are resolved against the pre-state of each operation's phase
    (creates resolve sequentially so parents exist before their children).
    The input model is left untouched.
    """
    tree = _WorkingTree(copy.deepcopy(old.root))
    buckets = _op_buckets(script)

    created: list[tuple[Element, EditOp]] = []
    for op in buckets[CREATE_ELEMENT]:
        if len(op.subject) < 2:
            raise InvariantViolation("cannot create a second root element")
        parent = tree.resolve(op.subject[:-1])
        el = tree.create(parent, op.payload["metatype"], op.payload["name"], op.payload["attributes"])
        created.append((el, op))
    for el, op in created:
        for spec in op.payload["edges"]:
            target = tree.resolve(spec["target"])
            el.edges.append(Edge(spec["role"], target.local_id))

    moves = [
        (tree.resolve(op.subject), tree.resolve(op.payload["new_parent"]))
        for op in buckets[MOVE_ELEMENT]
    ]
    for el, parent in moves:
        tree.move(el, parent)

    renames = [(tree.resolve(op.subject), op.payload["new_name"]) for op in buckets[RENAME_ELEMENT]]
    for el, name in renames:
        el.name = name

    for op in buckets[UPDATE_ATTRIBUTE]:
        el = tree.resolve(op.subject)
        value = op.payload["new_value"]
        if value is None:
            el.attributes.pop(op.payload["key"], None)
        else:
            el.attributes[op.payload["key"]] = value

    retargets = [
        (tree.resolve(op.subject), op.payload["role"], tree.resolve(op.payload["new_target"]))
        for op in buckets[RETARGET_EDGE]
    ]
    edge_deletes = [(tree.resolve(op.subject), op.payload["role"]) for op in buckets[DELETE_EDGE]]
    edge_creates = [
        (tree.resolve(op.subject), op.payload["role"], tree.resolve(op.payload["target"]))
        for op in buckets[CREATE_EDGE]
    ]
    for el, role, target in retargets:
        edge = el.edge(role)
        if edge is None:
            raise InvariantViolation(f"{el.metatype.tag} has no {role} edge to retarget")
        edge.target_id = target.local_id
    for el, role in edge_deletes:
        edge = el.edge(role)
        if edge is None:
            raise InvariantViolation(f"{el.metatype.tag} has no {role} edge to delete")
        el.edges.remove(edge)
    for el, role, target in edge_creates:
        if el.edge(role) is not None:
            raise InvariantViolation(f"{el.metatype.tag} already has a {role} edge")
        el.edges.append(Edge(role, target.local_id))

    doomed = [tree.resolve(op.subject) for op in buckets[DELETE_ELEMENT]]
    for el in doomed:
        tree.detach(el)

    try:
        return Model(tree.root)
    except DocumentError as exc:
        raise InvariantViolation(f"patched model is invalid: {exc}") from exc


# ---------------------------------------------------------------- rendering


def _quote(value) -> str:
    return json.dumps(value)


def _format_op(op: EditOp) -> str:
    subject = format_path(op.subject)
    p = op.payload
    if op.kind == CREATE_ELEMENT:
        return f"CREATE {subject} ({p['metatype'].tag})"
    if op.kind == DELETE_ELEMENT:
        return f"DELETE {subject}"
    if op.kind == MOVE_ELEMENT:
        return f"MOVE {subject} -> {format_path(p['new_parent'])}"
    if op.kind == RENAME_ELEMENT:
        return f"RENAME {subject} {_quote(p['old_name'])} -> {_quote(p['new_name'])}"
    if op.kind == UPDATE_ATTRIBUTE:
        return (
            f"UPDATE {subject} {p['key']}: "
            f"{_quote(p['old_value'])} -> {_quote(p['new_value'])}"
        )
    if op.kind == RETARGET_EDGE:
        return (
            f"RETARGET {subject} {p['role']}: "
            f"{format_path(p['old_target'])} -> {format_path(p['new_target'])}"
        )
    if op.kind == DELETE_EDGE:
        return f"DELETE-EDGE {subject} {p['role']}: {format_path(p['old_target'])}"
    if op.kind == CREATE_EDGE:
        return f"CREATE-EDGE {subject} {p['role']}: {format_path(p['target'])}"
    raise ValueError(f"unknown edit kind {op.kind!r}")


def _path_json(path: Path) -> list[dict]:
    return [
        {"metatype": s.metatype.tag, "name": s.name, "ordinal": s.ordinal}
        for s in path
    ]


def op_to_json(op: EditOp) -> dict:
    """JSON-ready dict for one op; field names are part of the report schema."""
    p = op.payload
    if op.kind == CREATE_ELEMENT:
        payload = {
            "metatype": p["metatype"].tag,
            "name": p["name"],
            "attributes": dict(sorted(p["attributes"].items())),
            "edges": [
                {"role": spec["role"], "target": _path_json(spec["target"])}
                for spec in p["edges"]
            ],
        }
    elif op.kind == DELETE_ELEMENT:
        payload = {}
    elif op.kind == MOVE_ELEMENT:
        payload = {"new_parent": _path_json(p["new_parent"])}
    elif op.kind == RENAME_ELEMENT:
        payload = {"old_name": p["old_name"], "new_name": p["new_name"]}
    elif op.kind == UPDATE_ATTRIBUTE:
        payload = {"key": p["key"], "old_value": p["old_value"], "new_value": p["new_value"]}
    elif op.kind == RETARGET_EDGE:
        payload = {
            "role": p["role"],
            "old_target": _path_json(p["old_target"]),
            "new_target": _path_json(p["new_target"]),
        }
    elif op.kind == DELETE_EDGE:
        payload = {"role": p["role"], "old_target": _path_json(p["old_target"])}
    elif op.kind == CREATE_EDGE:
        payload = {"role": p["role"], "target": _path_json(p["target"])}
    else:
        raise ValueError(f"unknown edit kind {op.kind!r}")
    return {"kind": op.kind, "subject": _path_json(op.subject), "payload": payload}


def format_script(script: EditScript, fmt: str = "text") -> str:
    """Deterministic rendering of a script as text lines or JSON."""
    if fmt == "text":
        return "".join(_format_op(op) + "\n" for op in script)
    if fmt == "json":
        return json.dumps([op_to_json(op) for op in script], indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def diff_models(old: Model, new: Model, cfg: MatcherConfig | None = None) -> EditScript:
    """Match two models under a configuration and derive the edit script."""
    cfg = cfg if cfg is not None else MatcherConfig()
    matching = match_models(old, new, cfg)
    return derive_edit_script(old, new, matching, cfg)

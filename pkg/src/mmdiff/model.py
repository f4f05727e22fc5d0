"""Generic in-memory model trees plus the XML interchange subset.

A Model is a validated, indexed tree of Elements. Two metamodel subsets are
supported: a structural one (packages, classes, attributes, references) and
a process one (processes, subprocesses, tasks, events, sequence flows).
Local ids are document-local wiring for edges only; they never carry
cross-version identity. Canonical equivalence (deterministic child ordering,
id erasure, edge targets compared positionally) is the oracle used to check
patch round-trips.
"""

from __future__ import annotations

import copy
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum
from xml.sax.saxutils import quoteattr

from mmdiff.errors import (
    ContainmentViolation,
    DanglingEdge,
    MalformedDocument,
    MissingName,
    UnknownMetatype,
)


class Metatype(Enum):
    """Element kinds of the two supported metamodel subsets."""

    EPACKAGE = "epackage"
    ECLASS = "eclass"
    EATTRIBUTE = "eattribute"
    EREFERENCE = "ereference"
    PROCESS = "process"
    SUBPROCESS = "subprocess"
    TASK = "task"
    START_EVENT = "startevent"
    END_EVENT = "endevent"
    SEQUENCE_FLOW = "sequenceflow"

    @property
    def tag(self) -> str:
        return self.value

    @property
    def named(self) -> bool:
        return self in _NAMED

    @property
    def edge_roles(self) -> tuple[str, ...]:
        return _EDGE_ROLES.get(self, ())

    def allows_child(self, child: "Metatype") -> bool:
        return child in _CONTAINMENT[self]


_NAMED = {
    Metatype.EPACKAGE,
    Metatype.ECLASS,
    Metatype.EATTRIBUTE,
    Metatype.EREFERENCE,
    Metatype.PROCESS,
    Metatype.SUBPROCESS,
    Metatype.TASK,
}

_PROCESS_CHILDREN = {
    Metatype.TASK,
    Metatype.START_EVENT,
    Metatype.END_EVENT,
    Metatype.SEQUENCE_FLOW,
    Metatype.SUBPROCESS,
}

_CONTAINMENT = {
    Metatype.EPACKAGE: {Metatype.EPACKAGE, Metatype.ECLASS},
    Metatype.ECLASS: {Metatype.EATTRIBUTE, Metatype.EREFERENCE},
    Metatype.EATTRIBUTE: set(),
    Metatype.EREFERENCE: set(),
    Metatype.PROCESS: _PROCESS_CHILDREN,
    Metatype.SUBPROCESS: _PROCESS_CHILDREN,
    Metatype.TASK: set(),
    Metatype.START_EVENT: set(),
    Metatype.END_EVENT: set(),
    Metatype.SEQUENCE_FLOW: set(),
}

_EDGE_ROLES = {
    Metatype.EREFERENCE: ("target",),
    Metatype.SEQUENCE_FLOW: ("source", "target"),
}

_FLOW_ENDPOINTS = {
    Metatype.TASK,
    Metatype.START_EVENT,
    Metatype.END_EVENT,
    Metatype.SUBPROCESS,
}

_ENDPOINT_KINDS = {
    Metatype.EREFERENCE: {"target": {Metatype.ECLASS}},
    Metatype.SEQUENCE_FLOW: {"source": _FLOW_ENDPOINTS, "target": _FLOW_ENDPOINTS},
}

_ROOT_KINDS = {Metatype.EPACKAGE, Metatype.PROCESS}

# metatypes whose interchange signature carries an id attribute
_ALWAYS_ID = {
    Metatype.SUBPROCESS,
    Metatype.TASK,
    Metatype.START_EVENT,
    Metatype.END_EVENT,
    Metatype.SEQUENCE_FLOW,
    Metatype.EREFERENCE,
}

_TAG_TO_METATYPE = {m.value: m for m in Metatype}


@dataclass(eq=False)
class Edge:
    """A typed outgoing edge; the target id resolves in the same document."""

    role: str
    target_id: str


@dataclass(eq=False)
class Element:
    """One node of a model tree. Treat instances as immutable once indexed."""

    metatype: Metatype
    name: str | None = None
    local_id: str = ""
    attributes: dict[str, str] = field(default_factory=dict)
    children: list["Element"] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)

    def walk(self):
        """Yield this element and all descendants in depth-first order."""
        yield self
        for child in self.children:
            yield from child.walk()

    def edge(self, role: str) -> Edge | None:
        for e in self.edges:
            if e.role == role:
                return e
        return None

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        label = self.name if self.name is not None else ""
        return f"<{self.metatype.tag} {label!r} id={self.local_id}>"


@dataclass(frozen=True)
class PathStep:
    """One step of a structural path: kind, name, ordinal among equal keys."""

    metatype: Metatype
    name: str
    ordinal: int


def format_path(path: tuple[PathStep, ...]) -> str:
    """Render a structural path as readable text ("/de/shop/DomesticAnimal").

    Unnamed elements show their metatype tag; an ordinal suffix appears only
    when it is non-zero ("/p/sequenceflow[1]").
    """
    parts = []
    for step in path:
        label = step.name if step.name else step.metatype.tag
        if step.ordinal:
            label += f"[{step.ordinal}]"
        parts.append(label)
    return "/" + "/".join(parts)


class Model:
    """A validated, indexed document with a single root element.

    Construction validates the whole tree: containment, naming, edge shape,
    edge resolution and endpoint kinds. Elements without a local id get a
    fresh one assigned; explicit ids must be unique.
    """

    def __init__(self, root: Element):
        self.root = root
        self.elements: list[Element] = list(root.walk())
        self._position: dict[int, int] = {}
        self._parent: dict[int, Element | None] = {id(root): None}
        self.by_id: dict[str, Element] = {}
        self._assign_missing_ids()
        for pos, el in enumerate(self.elements):
            self._position[id(el)] = pos
            for child in el.children:
                self._parent[id(child)] = el
        self._validate()

    # -------------------------------------------------- index accessors

    def parent_of(self, el: Element) -> Element | None:
        return self._parent[id(el)]

    def position_of(self, el: Element) -> int:
        return self._position[id(el)]

    def path_of(self, el: Element) -> tuple[PathStep, ...]:
        """Structural path of an element in current document order."""
        steps: list[PathStep] = []
        cur: Element | None = el
        while cur is not None:
            parent = self._parent[id(cur)]
            siblings = parent.children if parent is not None else [cur]
            key = (cur.metatype, cur.name or "")
            ordinal = 0
            for sib in siblings:
                if sib is cur:
                    break
                if (sib.metatype, sib.name or "") == key:
                    ordinal += 1
            steps.append(PathStep(cur.metatype, cur.name or "", ordinal))
            cur = parent
        return tuple(reversed(steps))

    def resolve(self, path: tuple[PathStep, ...]) -> Element | None:
        """Resolve a structural path; None when any step fails."""
        if not path:
            return None
        first = path[0]
        root_key = (self.root.metatype, self.root.name or "")
        if (first.metatype, first.name) != root_key or first.ordinal != 0:
            return None
        cur = self.root
        for step in path[1:]:
            matches = [
                c for c in cur.children
                if c.metatype is step.metatype and (c.name or "") == step.name
            ]
            if step.ordinal >= len(matches):
                return None
            cur = matches[step.ordinal]
        return cur

    # -------------------------------------------------- validation

    def _assign_missing_ids(self) -> None:
        used = set()
        for el in self.elements:
            if el.local_id:
                if el.local_id in used:
                    raise MalformedDocument(f"duplicate id {el.local_id!r}")
                used.add(el.local_id)
        counter = 1
        for el in self.elements:
            if not el.local_id:
                while f"n{counter}" in used:
                    counter += 1
                el.local_id = f"n{counter}"
                used.add(el.local_id)
            self.by_id[el.local_id] = el

    def _validate(self) -> None:
        if self.root.metatype not in _ROOT_KINDS:
            raise ContainmentViolation(
                f"root must be an epackage or a process, got {self.root.metatype.tag}"
            )
        for el in self.elements:
            if el.metatype.named:
                if not el.name:
                    raise MissingName(f"{el.metatype.tag} (id={el.local_id}) needs a name")
            elif el.name is not None:
                raise MalformedDocument(f"{el.metatype.tag} elements do not carry a name")
            parent = self._parent[id(el)]
            if parent is not None and not parent.metatype.allows_child(el.metatype):
                raise ContainmentViolation(
                    f"{parent.metatype.tag} may not contain {el.metatype.tag}"
                )
            roles = sorted(e.role for e in el.edges)
            if roles != sorted(el.metatype.edge_roles):
                raise MalformedDocument(
                    f"{el.metatype.tag} (id={el.local_id}) must have edges "
                    f"{list(el.metatype.edge_roles)}, got {roles}"
                )
            for edge in el.edges:
                target = self.by_id.get(edge.target_id)
                if target is None:
                    raise DanglingEdge(
                        f"{el.metatype.tag} (id={el.local_id}) {edge.role} id "
                        f"{edge.target_id!r} does not resolve"
                    )
                allowed = _ENDPOINT_KINDS[el.metatype][edge.role]
                if target.metatype not in allowed:
                    raise ContainmentViolation(
                        f"{el.metatype.tag} {edge.role} may not point at {target.metatype.tag}"
                    )


def resolve_name_path(model: Model, text: str) -> Element:
    """Resolve a readable path ("/de/shop/DomesticAnimal", "/p/sequenceflow[1]").

    Each segment is a name (for named elements) or a metatype tag (for
    unnamed ones), with an optional [ordinal] suffix. Raises KeyError when
    the path does not resolve; intended for fixtures and tests.
    """
    segments = [s for s in text.split("/") if s]
    if not segments:
        raise KeyError(f"empty path {text!r}")

    def seg_parts(seg: str) -> tuple[str, int]:
        if seg.endswith("]") and "[" in seg:
            base, _, idx = seg[:-1].rpartition("[")
            return base, int(idx)
        return seg, 0

    def matches(el: Element, label: str) -> bool:
        if el.name is not None:
            return el.name == label
        return el.metatype.tag == label

    label, ordinal = seg_parts(segments[0])
    if not matches(model.root, label) or ordinal != 0:
        raise KeyError(f"{text!r}: root does not match {label!r}")
    cur = model.root
    for seg in segments[1:]:
        label, ordinal = seg_parts(seg)
        found = [c for c in cur.children if matches(c, label)]
        if ordinal >= len(found):
            raise KeyError(f"{text!r}: segment {seg!r} does not resolve")
        cur = found[ordinal]
    return cur


# ------------------------------------------------------------------ parsing

_RESERVED_ATTRS = {"name", "id", "source", "target"}


def parse_model(text: str) -> Model:
    """Parse an interchange document into a validated Model."""
    try:
        xml_root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedDocument(f"not well-formed XML: {exc}") from exc
    root = _build_element(xml_root)
    return Model(root)


def _build_element(node: ET.Element) -> Element:
    metatype = _TAG_TO_METATYPE.get(node.tag)
    if metatype is None:
        raise UnknownMetatype(f"unknown element tag {node.tag!r}")
    if node.text and node.text.strip():
        raise MalformedDocument(f"<{node.tag}> must not contain text")
    if node.tail and node.tail.strip():
        raise MalformedDocument(f"<{node.tag}> must not be followed by text")

    attrs = dict(node.attrib)
    name = attrs.pop("name", None)
    local_id = attrs.pop("id", "")
    edges: list[Edge] = []
    for role in ("source", "target"):
        ref = attrs.pop(role, None)
        if role in metatype.edge_roles:
            if ref is None:
                raise MalformedDocument(f"<{node.tag}> requires a {role} attribute")
            edges.append(Edge(role, ref))
        elif ref is not None:
            raise MalformedDocument(f"<{node.tag}> does not take a {role} attribute")
    if name is not None and not metatype.named:
        raise MalformedDocument(f"<{node.tag}> does not take a name attribute")

    children = [_build_element(child) for child in node]
    return Element(
        metatype=metatype,
        name=name,
        local_id=local_id,
        attributes=attrs,
        children=children,
        edges=edges,
    )


# ------------------------------------------------------------- serialization


def serialize_model(model: Model) -> str:
    """Render a Model as a deterministic interchange document.

    Ids are renumbered e1..eN in document order and emitted only for
    metatypes whose signature carries an id or for elements some edge
    points at, so equal structures serialize byte-identically.
    """
    referenced = {e.target_id for el in model.elements for e in el.edges}
    new_ids: dict[str, str] = {}
    counter = 1
    for el in model.elements:
        if el.metatype in _ALWAYS_ID or el.local_id in referenced:
            new_ids[el.local_id] = f"e{counter}"
            counter += 1

    lines: list[str] = []

    def emit(el: Element, depth: int) -> None:
        parts = [el.metatype.tag]
        if el.name is not None:
            parts.append(f"name={quoteattr(el.name)}")
        if el.local_id in new_ids:
            parts.append(f"id={quoteattr(new_ids[el.local_id])}")
        for role in el.metatype.edge_roles:
            edge = el.edge(role)
            parts.append(f"{role}={quoteattr(new_ids[edge.target_id])}")
        for key in sorted(el.attributes):
            parts.append(f"{key}={quoteattr(el.attributes[key])}")
        pad = "  " * depth
        if el.children:
            lines.append(f"{pad}<{' '.join(parts)}>")
            for child in el.children:
                emit(child, depth + 1)
            lines.append(f"{pad}</{el.metatype.tag}>")
        else:
            lines.append(f"{pad}<{' '.join(parts)}/>")

    emit(model.root, 0)
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ canonical form


def canonicalize(model: Model) -> Model:
    """Deterministic canonical form of a model.

    Children are sorted by (metatype tag, name, recursive fingerprint), and
    local ids are replaced by canonical positional ids c1..cN, with edges
    remapped accordingly. Two models are structurally equivalent exactly
    when their canonical forms are identical.
    """
    root = copy.deepcopy(model.root)
    by_id = {el.local_id: el for el in root.walk()}

    # name-paths without ordinals, for describing edge targets in fingerprints
    name_path: dict[int, str] = {}

    def index_paths(el: Element, prefix: str) -> None:
        label = f"{el.metatype.tag}:{el.name or ''}"
        path = prefix + "/" + label
        name_path[id(el)] = path
        for child in el.children:
            index_paths(child, path)

    index_paths(root, "")

    plain_fp: dict[int, str] = {}

    def structural_fp(el: Element) -> str:
        cached = plain_fp.get(id(el))
        if cached is not None:
            return cached
        attrs = ",".join(f"{k}={v}" for k, v in sorted(el.attributes.items()))
        kids = ",".join(sorted(structural_fp(c) for c in el.children))
        fp = f"{el.metatype.tag}|{el.name or ''}|{attrs}|[{kids}]"
        plain_fp[id(el)] = fp
        return fp

    full_fp: dict[int, str] = {}

    def fingerprint(el: Element) -> str:
        cached = full_fp.get(id(el))
        if cached is not None:
            return cached
        attrs = ",".join(f"{k}={v}" for k, v in sorted(el.attributes.items()))
        kids = ",".join(sorted(fingerprint(c) for c in el.children))
        edge_parts = []
        for edge in sorted(el.edges, key=lambda e: e.role):
            target = by_id[edge.target_id]
            edge_parts.append(
                f"{edge.role}->{name_path[id(target)]}#{structural_fp(target)}"
            )
        fp = f"{el.metatype.tag}|{el.name or ''}|{attrs}|[{kids}]|{';'.join(edge_parts)}"
        full_fp[id(el)] = fp
        return fp

    def sort_children(el: Element) -> None:
        el.edges.sort(key=lambda e: e.role)
        el.children.sort(key=lambda c: (c.metatype.tag, c.name or "", fingerprint(c)))
        for child in el.children:
            sort_children(child)

    sort_children(root)

    renamed: dict[str, str] = {}
    for i, el in enumerate(root.walk(), start=1):
        renamed[el.local_id] = f"c{i}"
    for el in root.walk():
        el.local_id = renamed[el.local_id]
        for edge in el.edges:
            edge.target_id = renamed[edge.target_id]
    return Model(root)


def _structurally_identical(a: Element, b: Element) -> bool:
    if (
        a.metatype is not b.metatype
        or a.name != b.name
        or a.attributes != b.attributes
        or len(a.children) != len(b.children)
        or [(e.role, e.target_id) for e in a.edges] != [(e.role, e.target_id) for e in b.edges]
    ):
        return False
    return all(_structurally_identical(ca, cb) for ca, cb in zip(a.children, b.children))


def models_equivalent(a: Model, b: Model) -> bool:
    """True when the canonical forms of both models are identical."""
    return _structurally_identical(canonicalize(a).root, canonicalize(b).root)

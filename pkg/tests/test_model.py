"""Interchange parsing, serialization, canonical form and equivalence."""

import pytest

from mmdiff.errors import (
    ContainmentViolation,
    DanglingEdge,
    MalformedDocument,
    MissingName,
    UnknownMetatype,
)
from mmdiff.model import (
    Edge,
    Element,
    Metatype,
    Model,
    canonicalize,
    format_path,
    models_equivalent,
    parse_model,
    resolve_name_path,
    serialize_model,
)

ECORE_DOC = """
<epackage name="de">
  <eclass name="DomesticAnimal">
    <eattribute name="nickname" type="EString"/>
    <eattribute name="price" type="EInt"/>
  </eclass>
</epackage>
"""

BPMN_DOC = """
<process name="Send Order">
  <startevent id="s"/>
  <task id="t" name="Deliver Goods"/>
  <endevent id="e"/>
  <sequenceflow id="f1" source="s" target="t"/>
  <sequenceflow id="f2" source="t" target="e"/>
</process>
"""


# ------------------------------------------------------------------ parsing


def test_parse_ecore_fixture():
    m = parse_model(ECORE_DOC)
    assert m.root.metatype is Metatype.EPACKAGE
    assert m.root.name == "de"
    cls = m.root.children[0]
    assert cls.metatype is Metatype.ECLASS
    assert cls.name == "DomesticAnimal"
    assert [a.name for a in cls.children] == ["nickname", "price"]
    assert cls.children[0].attributes == {"type": "EString"}


def test_parse_minimal_document():
    m = parse_model('<epackage name="p"/>')
    assert len(m.elements) == 1
    assert not m.root.children


def test_parse_bpmn_edges_resolve():
    m = parse_model(BPMN_DOC)
    flow = m.by_id["f1"]
    assert [e.role for e in flow.edges] == ["source", "target"]
    assert m.by_id[flow.edge("target").target_id].name == "Deliver Goods"


def test_parse_dangling_flow_target():
    doc = BPMN_DOC.replace('target="t"', 'target="missing"')
    with pytest.raises(DanglingEdge):
        parse_model(doc)


def test_parse_bad_xml():
    with pytest.raises(MalformedDocument):
        parse_model("<epackage name='p'")
    with pytest.raises(MalformedDocument):
        parse_model("")


def test_parse_unknown_tag():
    with pytest.raises(UnknownMetatype):
        parse_model('<epackage name="p"><gateway id="g"/></epackage>')


def test_parse_containment_violation():
    with pytest.raises(ContainmentViolation):
        parse_model('<epackage name="p"><task id="t" name="x"/></epackage>')


def test_parse_missing_name():
    with pytest.raises(MissingName):
        parse_model('<epackage name="p"><eclass/></epackage>')
    with pytest.raises(MissingName):
        parse_model('<epackage name=""/>')


def test_parse_name_on_unnamed_metatype():
    doc = '<process name="p"><startevent id="s" name="go"/></process>'
    with pytest.raises(MalformedDocument):
        parse_model(doc)


def test_parse_flow_needs_both_endpoints():
    doc = '<process name="p"><task id="t" name="x"/><sequenceflow id="f" source="t"/></process>'
    with pytest.raises(MalformedDocument):
        parse_model(doc)


def test_parse_duplicate_ids():
    doc = '<process name="p"><task id="t" name="a"/><task id="t" name="b"/></process>'
    with pytest.raises(MalformedDocument):
        parse_model(doc)


def test_parse_reference_must_point_at_class():
    doc = (
        '<epackage name="p"><eclass name="A">'
        '<eattribute id="x" name="f" type="EInt"/>'
        '<ereference name="r" target="x"/>'
        "</eclass></epackage>"
    )
    with pytest.raises(ContainmentViolation):
        parse_model(doc)


def test_parse_rejects_text_content():
    with pytest.raises(MalformedDocument):
        parse_model('<epackage name="p">hello</epackage>')


def test_root_must_be_package_or_process():
    with pytest.raises(ContainmentViolation):
        parse_model('<eclass name="C"/>')


# -------------------------------------------------------------- serialization


def test_serialize_is_deterministic():
    m = parse_model(ECORE_DOC)
    assert serialize_model(m) == serialize_model(m)


def test_serialize_parse_fixpoint():
    for doc in (ECORE_DOC, BPMN_DOC):
        once = serialize_model(parse_model(doc))
        twice = serialize_model(parse_model(once))
        assert once == twice


def test_serialize_round_trip_is_equivalent():
    for doc in (ECORE_DOC, BPMN_DOC):
        m = parse_model(doc)
        assert models_equivalent(m, parse_model(serialize_model(m)))


def test_serialized_class_with_renamed_attribute():
    doc = '<epackage name="de"><eclass name="Pet"><eattribute name="moniker" type="EString"/></eclass></epackage>'
    out = serialize_model(parse_model(doc))
    assert '<eclass name="Pet">' in out
    assert 'name="moniker"' in out


# ------------------------------------------------------------ canonical form


def test_canonicalize_sorts_siblings():
    doc = '<epackage name="p"><eclass name="B"/><eclass name="A"/></epackage>'
    canon = canonicalize(parse_model(doc))
    assert [c.name for c in canon.root.children] == ["A", "B"]


def test_canonicalize_idempotent():
    m = parse_model(BPMN_DOC)
    once = canonicalize(m)
    twice = canonicalize(once)
    assert serialize_model(once) == serialize_model(twice)


def test_canonical_form_ignores_ids_and_sibling_order():
    a = parse_model(
        '<process name="p"><task id="x" name="A"/><task id="y" name="B"/>'
        '<sequenceflow id="f" source="x" target="y"/></process>'
    )
    b = parse_model(
        '<process name="p"><sequenceflow id="f9" source="q2" target="q7"/>'
        '<task id="q7" name="B"/><task id="q2" name="A"/></process>'
    )
    assert serialize_model(canonicalize(a)) == serialize_model(canonicalize(b))
    assert models_equivalent(a, b)


def test_canonicalize_distinguishes_flows_by_target():
    # two flows from the same source to different targets must not be conflated
    a = parse_model(
        '<process name="p"><startevent id="s"/><task id="t1" name="A"/><task id="t2" name="B"/>'
        '<sequenceflow id="f1" source="s" target="t1"/><sequenceflow id="f2" source="s" target="t2"/></process>'
    )
    b = parse_model(
        '<process name="p"><startevent id="s"/><task id="t1" name="A"/><task id="t2" name="B"/>'
        '<sequenceflow id="f2" source="s" target="t2"/><sequenceflow id="f1" source="s" target="t1"/></process>'
    )
    assert models_equivalent(a, b)


def test_canonicalize_preserves_signature_multiset():
    m = parse_model(BPMN_DOC)
    canon = canonicalize(m)
    sig = lambda model: sorted(
        (el.metatype.tag, el.name or "", tuple(sorted(el.attributes.items())))
        for el in model.elements
    )
    assert sig(m) == sig(canon)


# -------------------------------------------------------------- equivalence


def test_equivalence_reflexive():
    m = parse_model(ECORE_DOC)
    assert models_equivalent(m, m)


def test_equivalence_is_an_equivalence_relation(fuzz_pairs):
    from conftest import shuffle_ids

    for old, new in fuzz_pairs[:60]:
        assert models_equivalent(old, old)
        twin = shuffle_ids(old)
        twice = shuffle_ids(twin)
        # symmetry, on an equivalent and on a generally non-equivalent pair
        assert models_equivalent(old, twin) and models_equivalent(twin, old)
        assert models_equivalent(old, new) == models_equivalent(new, old)
        # transitivity across two independent id permutations
        assert models_equivalent(twin, twice) and models_equivalent(old, twice)


def test_rename_breaks_equivalence():
    renamed = BPMN_DOC.replace("Deliver Goods", "Send Items")
    assert not models_equivalent(parse_model(BPMN_DOC), parse_model(renamed))


def test_retarget_breaks_equivalence():
    a = parse_model(BPMN_DOC)
    b = parse_model(BPMN_DOC.replace('source="s" target="t"', 'source="s" target="e"'))
    assert not models_equivalent(a, b)


def test_attribute_value_breaks_equivalence():
    a = parse_model(ECORE_DOC)
    b = parse_model(ECORE_DOC.replace('type="EInt"', 'type="EFloat"'))
    assert not models_equivalent(a, b)


# ------------------------------------------------------------------- paths


def test_path_of_and_resolve():
    m = parse_model(BPMN_DOC)
    flow2 = m.by_id["f2"]
    path = m.path_of(flow2)
    assert format_path(path) == "/Send Order/sequenceflow[1]"
    assert m.resolve(path) is flow2
    task = resolve_name_path(m, "/Send Order/Deliver Goods")
    assert task is m.by_id["t"]
    assert m.resolve(m.path_of(m.root)) is m.root


def test_resolve_name_path_failures():
    m = parse_model(BPMN_DOC)
    with pytest.raises(KeyError):
        resolve_name_path(m, "/Send Order/nope")
    with pytest.raises(KeyError):
        resolve_name_path(m, "/Send Order/sequenceflow[7]")


def test_programmatic_model_gets_ids():
    root = Element(Metatype.EPACKAGE, name="p", children=[Element(Metatype.ECLASS, name="C")])
    m = Model(root)
    assert all(el.local_id for el in m.elements)
    assert m.parent_of(root.children[0]) is root


# every illegal parent/child nesting must fail with ContainmentViolation

_PARENT_DOCS = {
    "epackage": '<epackage name="p">{child}</epackage>',
    "eclass": '<epackage name="p"><eclass name="C">{child}</eclass></epackage>',
    "eattribute": '<epackage name="p"><eclass name="C">'
                  '<eattribute name="a" type="T">{child}</eattribute></eclass></epackage>',
    "ereference": '<epackage name="p"><eclass id="cc" name="C2"/><eclass name="C">'
                  '<ereference name="r" target="cc">{child}</ereference></eclass></epackage>',
    "process": '<process name="p">{child}</process>',
    "subprocess": '<process name="p"><subprocess id="s" name="S">{child}</subprocess></process>',
    "task": '<process name="p"><task id="t" name="T">{child}</task></process>',
    "startevent": '<process name="p"><startevent id="s">{child}</startevent></process>',
    "endevent": '<process name="p"><endevent id="e">{child}</endevent></process>',
    "sequenceflow": '<process name="p"><task id="a" name="A"/><task id="b" name="B"/>'
                    '<sequenceflow id="f" source="a" target="b">{child}</sequenceflow></process>',
}

_CHILD_SNIPPETS = {
    "epackage": '<epackage name="x"/>',
    "eclass": '<eclass name="X"/>',
    "eattribute": '<eattribute name="x" type="T"/>',
    "ereference": '<ereference name="x" target="zz"/>',
    "process": '<process name="x"/>',
    "subprocess": '<subprocess id="sx" name="X"/>',
    "task": '<task id="tx" name="X"/>',
    "startevent": '<startevent id="sx"/>',
    "endevent": '<endevent id="ex"/>',
    "sequenceflow": '<sequenceflow id="fx" source="q1" target="q2"/>',
}


def _illegal_combos():
    for parent in Metatype:
        for child in Metatype:
            if child is Metatype.PROCESS or parent.allows_child(child):
                continue
            yield parent.value, child.value


@pytest.mark.parametrize("parent_tag,child_tag", sorted(_illegal_combos()))
def test_every_illegal_nesting_is_a_containment_violation(parent_tag, child_tag):
    doc = _PARENT_DOCS[parent_tag].format(child=_CHILD_SNIPPETS[child_tag])
    with pytest.raises(ContainmentViolation):
        parse_model(doc)


@pytest.mark.parametrize("parent_tag", sorted(m.value for m in Metatype))
def test_nested_process_is_rejected(parent_tag):
    # a process can only ever be the root; nested ones hit the containment rule
    doc = _PARENT_DOCS[parent_tag].format(child=_CHILD_SNIPPETS["process"])
    with pytest.raises(ContainmentViolation):
        parse_model(doc)

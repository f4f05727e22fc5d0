"""Built-in change scenarios and the configuration-matrix benchmark.

Five problematic edit operations are reconstructed for both metamodel
flavors: moving elements into a new container (S1), renaming without
structural change (S2), the combination of both (S3), exchanging the
location of near-clones (S4), and updating a reference/flow target (S5,
plus the source-change variant S5b). Each scenario carries a hand-written
ground-truth script, reference correspondences, and a per-configuration
prediction of the edit operations each matcher configuration derives.

The default matrix holds four configurations: plain top-down matching with
character bigrams, two-phase with bigrams, two-phase with the semantic
similarity and the shipped synonym dictionary, and full-scope matching with
the exact-name pre-pass and the target-flexible edge policy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path as FsPath

from mmdiff.diff import (
    CREATE_EDGE,
    CREATE_ELEMENT,
    DELETE_EDGE,
    DELETE_ELEMENT,
    MOVE_ELEMENT,
    RENAME_ELEMENT,
    RETARGET_EDGE,
    UPDATE_ATTRIBUTE,
    EditOp,
    EditScript,
    apply_edit_script,
    derive_edit_script,
    op_to_json,
)
from mmdiff.errors import IoFailure, ModelDiffError
from mmdiff.matching import MatcherConfig, Matching, match_models
from mmdiff.model import (
    Metatype,
    Model,
    PathStep,
    format_path,
    models_equivalent,
    parse_model,
    resolve_name_path,
    serialize_model,
)
from mmdiff.similarity import default_synonyms

MATCHES = "MATCHES-PREDICTION"
DEVIATES = "DEVIATES"

CONFIG_TOPDOWN = "topdown-bigram"
CONFIG_TWOPHASE = "twophase-bigram"
CONFIG_SEMANTIC = "twophase-semantic"
CONFIG_FULLSCOPE = "fullscope-exact-flexible"

_ALL = (CONFIG_TOPDOWN, CONFIG_TWOPHASE, CONFIG_SEMANTIC, CONFIG_FULLSCOPE)


def default_matrix() -> list[tuple[str, MatcherConfig]]:
    """The four named configurations every scenario carries predictions for."""
    return [
        (CONFIG_TOPDOWN, MatcherConfig(pipeline="topdown")),
        (CONFIG_TWOPHASE, MatcherConfig(pipeline="twophase")),
        (CONFIG_SEMANTIC, MatcherConfig(pipeline="twophase", name_sim="semantic",
                                        synonyms=default_synonyms())),
        (CONFIG_FULLSCOPE, MatcherConfig(pipeline="fullscope", exact_name_first=True,
                                         edge_policy="target-flexible")),
    ]


@dataclass(frozen=True)
class Prediction:
    """Expected op-kind multiset and subject set for one matrix cell."""

    subjects: frozenset[tuple[str, str]]
    kind_counts: tuple[tuple[str, int], ...]
    interpretation: str = "move"

    def kinds(self) -> dict[str, int]:
        return dict(self.kind_counts)


def _predict(creates=(), moves=(), renames=(), updates=(), retargets=(),
             edge_deletes=(), edge_creates=(), deletes=(), interpretation="move") -> Prediction:
    groups = [
        (CREATE_ELEMENT, creates),
        (MOVE_ELEMENT, moves),
        (RENAME_ELEMENT, renames),
        (UPDATE_ATTRIBUTE, updates),
        (RETARGET_EDGE, retargets),
        (DELETE_EDGE, edge_deletes),
        (CREATE_EDGE, edge_creates),
        (DELETE_ELEMENT, deletes),
    ]
    subjects = frozenset((kind, path) for kind, paths in groups for path in paths)
    counts = tuple((kind, len(paths)) for kind, paths in groups if paths)
    return Prediction(subjects, counts, interpretation)


@dataclass(eq=False)
class Scenario:
    """One benchmark case: models, ground truth, references, predictions."""

    id: str
    flavor: str
    description: str
    old_xml: str
    new_xml: str
    old: Model
    new: Model
    ground_truth: EditScript
    references: dict[str, tuple[tuple[str, str], ...]]
    expected: dict[str, Prediction]

    @property
    def key(self) -> str:
        return f"{self.id}.{self.flavor}"


def _p(*segments) -> tuple[PathStep, ...]:
    return tuple(PathStep(Metatype(tag), name, ordinal) for tag, name, ordinal in segments)


def _create(path, tag, name, attributes=None, edges=()) -> EditOp:
    return EditOp(CREATE_ELEMENT, path, {
        "metatype": Metatype(tag),
        "name": name,
        "attributes": dict(attributes or {}),
        "edges": list(edges),
    })


# ------------------------------------------------------------ ecore fixtures

_ECORE_BASE_OLD = """\
<epackage name="de">
  <eclass name="DomesticAnimal">
    <eattribute name="nickname" type="EString"/>
    <eattribute name="price" type="EInt"/>
  </eclass>
</epackage>
"""

_S1_ECORE_NEW = """\
<epackage name="de">
  <epackage name="shop">
    <eclass name="DomesticAnimal">
      <eattribute name="nickname" type="EString"/>
      <eattribute name="price" type="EInt"/>
    </eclass>
  </epackage>
</epackage>
"""

_S2_ECORE_NEW = """\
<epackage name="de">
  <eclass name="Pet">
    <eattribute name="moniker" type="EString"/>
    <eattribute name="price" type="EInt"/>
  </eclass>
</epackage>
"""

_S3_ECORE_NEW = """\
<epackage name="de">
  <epackage name="shop">
    <eclass name="Pet">
      <eattribute name="moniker" type="EString"/>
      <eattribute name="price" type="EInt"/>
    </eclass>
  </epackage>
</epackage>
"""

_S4_ECORE_OLD = """\
<epackage name="de">
  <epackage name="core">
    <eclass name="DomesticAnimal">
      <eattribute name="nickname" type="EString"/>
      <eattribute name="price" type="EInt"/>
    </eclass>
  </epackage>
  <epackage name="shop">
    <eclass name="DomesticAnimalNew">
      <eattribute name="nickname" type="EString"/>
      <eattribute name="price" type="EInt"/>
    </eclass>
  </epackage>
</epackage>
"""

_S4_ECORE_NEW = """\
<epackage name="de">
  <epackage name="core">
    <eclass name="DomesticAnimalNew">
      <eattribute name="nickname" type="EString"/>
      <eattribute name="price" type="EInt"/>
    </eclass>
  </epackage>
  <epackage name="shop">
    <eclass name="DomesticAnimal">
      <eattribute name="nickname" type="EString"/>
      <eattribute name="price" type="EInt"/>
    </eclass>
  </epackage>
</epackage>
"""

_S5_ECORE_OLD = """\
<epackage name="de">
  <eclass name="DomesticAnimal">
    <ereference id="r1" name="owner" target="c_owner"/>
  </eclass>
  <eclass id="c_owner" name="Owner"/>
  <eclass id="c_person" name="Person"/>
</epackage>
"""

_S5_ECORE_NEW = _S5_ECORE_OLD.replace('target="c_owner"', 'target="c_person"')

_S5B_ECORE_NEW = """\
<epackage name="de">
  <eclass name="DomesticAnimal"/>
  <eclass id="c_owner" name="Owner"/>
  <eclass id="c_person" name="Person">
    <ereference id="r1" name="owner" target="c_owner"/>
  </eclass>
</epackage>
"""

# ------------------------------------------------------------- bpmn fixtures

_BPMN_BASE_OLD = """\
<process name="Send Order">
  <startevent id="s"/>
  <task id="t" name="Deliver Goods"/>
  <endevent id="e"/>
  <sequenceflow id="f1" source="s" target="t"/>
  <sequenceflow id="f2" source="t" target="e"/>
</process>
"""

_S1_BPMN_NEW = """\
<process name="Send Order">
  <subprocess id="sp" name="Send Order">
    <startevent id="s"/>
    <task id="t" name="Deliver Goods"/>
    <endevent id="e"/>
    <sequenceflow id="f1" source="s" target="t"/>
    <sequenceflow id="f2" source="t" target="e"/>
  </subprocess>
</process>
"""

_S2_BPMN_NEW = _BPMN_BASE_OLD.replace("Deliver Goods", "Send Items")

_S3_BPMN_NEW = _S1_BPMN_NEW.replace("Deliver Goods", "Send Items")

_S4_BPMN_OLD = """\
<process name="Main">
  <subprocess id="l" name="Left">
    <task id="t1" name="doSomething"/>
  </subprocess>
  <subprocess id="r" name="Right">
    <task id="t2" name="doSomethingNew"/>
  </subprocess>
</process>
"""

_S4_BPMN_NEW = """\
<process name="Main">
  <subprocess id="l" name="Left">
    <task id="t2" name="doSomethingNew"/>
  </subprocess>
  <subprocess id="r" name="Right">
    <task id="t1" name="doSomething"/>
  </subprocess>
</process>
"""

_S5_BPMN_OLD = """\
<process name="Main">
  <task id="t1" name="Task1"/>
  <task id="t2" name="Task2"/>
  <task id="t3" name="Task3"/>
  <sequenceflow id="f" source="t1" target="t2"/>
</process>
"""

_S5_BPMN_NEW = _S5_BPMN_OLD.replace('target="t2"', 'target="t3"')

_S5B_BPMN_NEW = _S5_BPMN_OLD.replace('source="t1"', 'source="t3"')


# --------------------------------------------------------- scenario assembly

_DE = ("epackage", "de", 0)
_SO = ("process", "Send Order", 0)
_MAIN = ("process", "Main", 0)


def _scenario(sid, flavor, description, old_xml, new_xml, ground_truth,
              references, expected) -> Scenario:
    return Scenario(
        id=sid,
        flavor=flavor,
        description=description,
        old_xml=old_xml,
        new_xml=new_xml,
        old=parse_model(old_xml),
        new=parse_model(new_xml),
        ground_truth=ground_truth,
        references=references,
        expected=expected,
    )


def _s1_ecore() -> Scenario:
    gt = EditScript((
        _create(_p(_DE, ("epackage", "shop", 0)), "epackage", "shop"),
        EditOp(MOVE_ELEMENT, _p(_DE, ("eclass", "DomesticAnimal", 0)),
               {"new_parent": _p(_DE, ("epackage", "shop", 0))}),
    ))
    reference = (
        ("/de", "/de"),
        ("/de/DomesticAnimal", "/de/shop/DomesticAnimal"),
        ("/de/DomesticAnimal/nickname", "/de/shop/DomesticAnimal/nickname"),
        ("/de/DomesticAnimal/price", "/de/shop/DomesticAnimal/price"),
    )
    moved = _predict(creates=["/de/shop"], moves=["/de/DomesticAnimal"])
    expected = {
        CONFIG_TOPDOWN: _predict(
            creates=["/de/shop", "/de/shop/DomesticAnimal",
                     "/de/shop/DomesticAnimal/nickname", "/de/shop/DomesticAnimal/price"],
            deletes=["/de/DomesticAnimal", "/de/DomesticAnimal/nickname",
                     "/de/DomesticAnimal/price"],
        ),
        CONFIG_TWOPHASE: moved,
        CONFIG_SEMANTIC: moved,
        CONFIG_FULLSCOPE: moved,
    }
    return _scenario("S1", "ecore", "class moved into a newly created subpackage",
                     _ECORE_BASE_OLD, _S1_ECORE_NEW, gt, {"default": reference}, expected)


def _s1_bpmn() -> Scenario:
    sp = ("subprocess", "Send Order", 0)
    moved_paths = [
        "/Send Order/startevent",
        "/Send Order/Deliver Goods",
        "/Send Order/endevent",
        "/Send Order/sequenceflow",
        "/Send Order/sequenceflow[1]",
    ]
    gt_ops = [_create(_p(_SO, sp), "subprocess", "Send Order")]
    for tag, name, ordinal in [("startevent", "", 0), ("task", "Deliver Goods", 0),
                               ("endevent", "", 0), ("sequenceflow", "", 0),
                               ("sequenceflow", "", 1)]:
        gt_ops.append(EditOp(MOVE_ELEMENT, _p(_SO, (tag, name, ordinal)),
                             {"new_parent": _p(_SO, sp)}))
    reference = (
        ("/Send Order", "/Send Order"),
        ("/Send Order/startevent", "/Send Order/Send Order/startevent"),
        ("/Send Order/Deliver Goods", "/Send Order/Send Order/Deliver Goods"),
        ("/Send Order/endevent", "/Send Order/Send Order/endevent"),
        ("/Send Order/sequenceflow", "/Send Order/Send Order/sequenceflow"),
        ("/Send Order/sequenceflow[1]", "/Send Order/Send Order/sequenceflow[1]"),
    )
    moved = _predict(creates=["/Send Order/Send Order"], moves=moved_paths)
    expected = {
        CONFIG_TOPDOWN: _predict(
            creates=["/Send Order/Send Order", "/Send Order/Send Order/startevent",
                     "/Send Order/Send Order/Deliver Goods", "/Send Order/Send Order/endevent",
                     "/Send Order/Send Order/sequenceflow", "/Send Order/Send Order/sequenceflow[1]"],
            deletes=moved_paths,
        ),
        CONFIG_TWOPHASE: moved,
        CONFIG_SEMANTIC: moved,
        CONFIG_FULLSCOPE: moved,
    }
    return _scenario("S1", "bpmn", "process content moved into a newly created subprocess",
                     _BPMN_BASE_OLD, _S1_BPMN_NEW, EditScript(tuple(gt_ops)),
                     {"default": reference}, expected)


def _s2_ecore() -> Scenario:
    gt = EditScript((
        EditOp(RENAME_ELEMENT, _p(_DE, ("eclass", "DomesticAnimal", 0)),
               {"old_name": "DomesticAnimal", "new_name": "Pet"}),
        EditOp(RENAME_ELEMENT,
               _p(_DE, ("eclass", "DomesticAnimal", 0), ("eattribute", "nickname", 0)),
               {"old_name": "nickname", "new_name": "moniker"}),
    ))
    reference = (
        ("/de", "/de"),
        ("/de/DomesticAnimal", "/de/Pet"),
        ("/de/DomesticAnimal/nickname", "/de/Pet/moniker"),
        ("/de/DomesticAnimal/price", "/de/Pet/price"),
    )
    # the untouched attribute still pairs full-scope, so the move-capable
    # character-similarity configs report it as moved into the re-created class
    recreated = _predict(
        creates=["/de/Pet", "/de/Pet/moniker"],
        moves=["/de/DomesticAnimal/price"],
        deletes=["/de/DomesticAnimal", "/de/DomesticAnimal/nickname"],
    )
    expected = {
        CONFIG_TOPDOWN: _predict(
            creates=["/de/Pet", "/de/Pet/moniker", "/de/Pet/price"],
            deletes=["/de/DomesticAnimal", "/de/DomesticAnimal/nickname",
                     "/de/DomesticAnimal/price"],
        ),
        CONFIG_TWOPHASE: recreated,
        CONFIG_SEMANTIC: _predict(
            renames=["/de/DomesticAnimal", "/de/DomesticAnimal/nickname"]),
        CONFIG_FULLSCOPE: recreated,
    }
    return _scenario("S2", "ecore", "class and attribute renamed, same structure",
                     _ECORE_BASE_OLD, _S2_ECORE_NEW, gt, {"default": reference}, expected)


def _s2_bpmn() -> Scenario:
    gt = EditScript((
        EditOp(RENAME_ELEMENT, _p(_SO, ("task", "Deliver Goods", 0)),
               {"old_name": "Deliver Goods", "new_name": "Send Items"}),
    ))
    reference = (
        ("/Send Order", "/Send Order"),
        ("/Send Order/startevent", "/Send Order/startevent"),
        ("/Send Order/Deliver Goods", "/Send Order/Send Items"),
        ("/Send Order/endevent", "/Send Order/endevent"),
        ("/Send Order/sequenceflow", "/Send Order/sequenceflow"),
        ("/Send Order/sequenceflow[1]", "/Send Order/sequenceflow[1]"),
    )
    # strict policy: both flows touch the re-created task, so they dissolve too
    recreated = _predict(
        creates=["/Send Order/Send Items", "/Send Order/sequenceflow[2]",
                 "/Send Order/sequenceflow[3]"],
        deletes=["/Send Order/Deliver Goods", "/Send Order/sequenceflow",
                 "/Send Order/sequenceflow[1]"],
    )
    expected = {
        CONFIG_TOPDOWN: recreated,
        CONFIG_TWOPHASE: recreated,
        CONFIG_SEMANTIC: _predict(renames=["/Send Order/Deliver Goods"]),
        CONFIG_FULLSCOPE: _predict(
            creates=["/Send Order/Send Items", "/Send Order/sequenceflow[2]"],
            retargets=["/Send Order/sequenceflow"],
            deletes=["/Send Order/Deliver Goods", "/Send Order/sequenceflow[1]"],
        ),
    }
    return _scenario("S2", "bpmn", "task renamed, no structural change",
                     _BPMN_BASE_OLD, _S2_BPMN_NEW, gt, {"default": reference}, expected)


def _s3_ecore() -> Scenario:
    shop = ("epackage", "shop", 0)
    gt = EditScript((
        _create(_p(_DE, shop), "epackage", "shop"),
        EditOp(MOVE_ELEMENT, _p(_DE, ("eclass", "DomesticAnimal", 0)),
               {"new_parent": _p(_DE, shop)}),
        EditOp(RENAME_ELEMENT, _p(_DE, shop, ("eclass", "DomesticAnimal", 0)),
               {"old_name": "DomesticAnimal", "new_name": "Pet"}),
        EditOp(RENAME_ELEMENT,
               _p(_DE, shop, ("eclass", "DomesticAnimal", 0), ("eattribute", "nickname", 0)),
               {"old_name": "nickname", "new_name": "moniker"}),
    ))
    reference = (
        ("/de", "/de"),
        ("/de/DomesticAnimal", "/de/shop/Pet"),
        ("/de/DomesticAnimal/nickname", "/de/shop/Pet/moniker"),
        ("/de/DomesticAnimal/price", "/de/shop/Pet/price"),
    )
    recreated = _predict(
        creates=["/de/shop", "/de/shop/Pet", "/de/shop/Pet/moniker"],
        moves=["/de/DomesticAnimal/price"],
        deletes=["/de/DomesticAnimal", "/de/DomesticAnimal/nickname"],
    )
    expected = {
        CONFIG_TOPDOWN: _predict(
            creates=["/de/shop", "/de/shop/Pet", "/de/shop/Pet/moniker", "/de/shop/Pet/price"],
            deletes=["/de/DomesticAnimal", "/de/DomesticAnimal/nickname",
                     "/de/DomesticAnimal/price"],
        ),
        CONFIG_TWOPHASE: recreated,
        CONFIG_SEMANTIC: _predict(
            creates=["/de/shop"],
            moves=["/de/DomesticAnimal"],
            renames=["/de/shop/DomesticAnimal", "/de/shop/DomesticAnimal/nickname"],
        ),
        CONFIG_FULLSCOPE: recreated,
    }
    return _scenario("S3", "ecore", "class moved into a new subpackage and renamed",
                     _ECORE_BASE_OLD, _S3_ECORE_NEW, gt, {"default": reference}, expected)


def _s3_bpmn() -> Scenario:
    sp = ("subprocess", "Send Order", 0)
    moved_paths = [
        "/Send Order/startevent",
        "/Send Order/Deliver Goods",
        "/Send Order/endevent",
        "/Send Order/sequenceflow",
        "/Send Order/sequenceflow[1]",
    ]
    gt_ops = [_create(_p(_SO, sp), "subprocess", "Send Order")]
    for tag, name, ordinal in [("startevent", "", 0), ("task", "Deliver Goods", 0),
                               ("endevent", "", 0), ("sequenceflow", "", 0),
                               ("sequenceflow", "", 1)]:
        gt_ops.append(EditOp(MOVE_ELEMENT, _p(_SO, (tag, name, ordinal)),
                             {"new_parent": _p(_SO, sp)}))
    gt_ops.append(EditOp(RENAME_ELEMENT, _p(_SO, sp, ("task", "Deliver Goods", 0)),
                         {"old_name": "Deliver Goods", "new_name": "Send Items"}))
    reference = (
        ("/Send Order", "/Send Order"),
        ("/Send Order/startevent", "/Send Order/Send Order/startevent"),
        ("/Send Order/Deliver Goods", "/Send Order/Send Order/Send Items"),
        ("/Send Order/endevent", "/Send Order/Send Order/endevent"),
        ("/Send Order/sequenceflow", "/Send Order/Send Order/sequenceflow"),
        ("/Send Order/sequenceflow[1]", "/Send Order/Send Order/sequenceflow[1]"),
    )
    expected = {
        CONFIG_TOPDOWN: _predict(
            creates=["/Send Order/Send Order", "/Send Order/Send Order/startevent",
                     "/Send Order/Send Order/Send Items", "/Send Order/Send Order/endevent",
                     "/Send Order/Send Order/sequenceflow", "/Send Order/Send Order/sequenceflow[1]"],
            deletes=moved_paths,
        ),
        CONFIG_TWOPHASE: _predict(
            creates=["/Send Order/Send Order", "/Send Order/Send Order/Send Items",
                     "/Send Order/Send Order/sequenceflow", "/Send Order/Send Order/sequenceflow[1]"],
            moves=["/Send Order/startevent", "/Send Order/endevent"],
            deletes=["/Send Order/Deliver Goods", "/Send Order/sequenceflow",
                     "/Send Order/sequenceflow[1]"],
        ),
        CONFIG_SEMANTIC: _predict(
            creates=["/Send Order/Send Order"],
            moves=moved_paths,
            renames=["/Send Order/Send Order/Deliver Goods"],
        ),
        CONFIG_FULLSCOPE: _predict(
            creates=["/Send Order/Send Order", "/Send Order/Send Order/Send Items",
                     "/Send Order/Send Order/sequenceflow"],
            moves=["/Send Order/startevent", "/Send Order/endevent", "/Send Order/sequenceflow"],
            retargets=["/Send Order/Send Order/sequenceflow[1]"],
            deletes=["/Send Order/Deliver Goods", "/Send Order/sequenceflow"],
        ),
    }
    return _scenario("S3", "bpmn", "process content moved into a subprocess, task renamed",
                     _BPMN_BASE_OLD, _S3_BPMN_NEW, EditScript(tuple(gt_ops)),
                     {"default": reference}, expected)


def _s4_ecore() -> Scenario:
    core = ("epackage", "core", 0)
    shop = ("epackage", "shop", 0)
    gt = EditScript((
        EditOp(MOVE_ELEMENT, _p(_DE, core, ("eclass", "DomesticAnimal", 0)),
               {"new_parent": _p(_DE, shop)}),
        EditOp(MOVE_ELEMENT, _p(_DE, shop, ("eclass", "DomesticAnimalNew", 0)),
               {"new_parent": _p(_DE, core)}),
    ))
    shared = (
        ("/de", "/de"),
        ("/de/core", "/de/core"),
        ("/de/shop", "/de/shop"),
    )
    move_ref = shared + (
        ("/de/core/DomesticAnimal", "/de/shop/DomesticAnimal"),
        ("/de/core/DomesticAnimal/nickname", "/de/shop/DomesticAnimal/nickname"),
        ("/de/core/DomesticAnimal/price", "/de/shop/DomesticAnimal/price"),
        ("/de/shop/DomesticAnimalNew", "/de/core/DomesticAnimalNew"),
        ("/de/shop/DomesticAnimalNew/nickname", "/de/core/DomesticAnimalNew/nickname"),
        ("/de/shop/DomesticAnimalNew/price", "/de/core/DomesticAnimalNew/price"),
    )
    rename_ref = shared + (
        ("/de/core/DomesticAnimal", "/de/core/DomesticAnimalNew"),
        ("/de/core/DomesticAnimal/nickname", "/de/core/DomesticAnimalNew/nickname"),
        ("/de/core/DomesticAnimal/price", "/de/core/DomesticAnimalNew/price"),
        ("/de/shop/DomesticAnimalNew", "/de/shop/DomesticAnimal"),
        ("/de/shop/DomesticAnimalNew/nickname", "/de/shop/DomesticAnimal/nickname"),
        ("/de/shop/DomesticAnimalNew/price", "/de/shop/DomesticAnimal/price"),
    )
    slots = _predict(renames=["/de/core/DomesticAnimal", "/de/shop/DomesticAnimalNew"],
                     interpretation="rename")
    expected = {
        CONFIG_TOPDOWN: slots,
        CONFIG_TWOPHASE: slots,
        CONFIG_SEMANTIC: slots,
        CONFIG_FULLSCOPE: _predict(
            moves=["/de/core/DomesticAnimal", "/de/shop/DomesticAnimalNew"],
            interpretation="move"),
    }
    return _scenario("S4", "ecore", "near-clone classes exchanged between packages",
                     _S4_ECORE_OLD, _S4_ECORE_NEW, gt,
                     {"move": move_ref, "rename": rename_ref}, expected)


def _s4_bpmn() -> Scenario:
    left = ("subprocess", "Left", 0)
    right = ("subprocess", "Right", 0)
    gt = EditScript((
        EditOp(MOVE_ELEMENT, _p(_MAIN, left, ("task", "doSomething", 0)),
               {"new_parent": _p(_MAIN, right)}),
        EditOp(MOVE_ELEMENT, _p(_MAIN, right, ("task", "doSomethingNew", 0)),
               {"new_parent": _p(_MAIN, left)}),
    ))
    shared = (
        ("/Main", "/Main"),
        ("/Main/Left", "/Main/Left"),
        ("/Main/Right", "/Main/Right"),
    )
    move_ref = shared + (
        ("/Main/Left/doSomething", "/Main/Right/doSomething"),
        ("/Main/Right/doSomethingNew", "/Main/Left/doSomethingNew"),
    )
    rename_ref = shared + (
        ("/Main/Left/doSomething", "/Main/Left/doSomethingNew"),
        ("/Main/Right/doSomethingNew", "/Main/Right/doSomething"),
    )
    slots = _predict(renames=["/Main/Left/doSomething", "/Main/Right/doSomethingNew"],
                     interpretation="rename")
    expected = {
        CONFIG_TOPDOWN: slots,
        CONFIG_TWOPHASE: slots,
        CONFIG_SEMANTIC: slots,
        CONFIG_FULLSCOPE: _predict(
            moves=["/Main/Left/doSomething", "/Main/Right/doSomethingNew"],
            interpretation="move"),
    }
    return _scenario("S4", "bpmn", "near-clone tasks exchanged between subprocesses",
                     _S4_BPMN_OLD, _S4_BPMN_NEW, gt,
                     {"move": move_ref, "rename": rename_ref}, expected)


def _s5_ecore() -> Scenario:
    ref_path = _p(_DE, ("eclass", "DomesticAnimal", 0), ("ereference", "owner", 0))
    gt = EditScript((
        EditOp(RETARGET_EDGE, ref_path, {
            "role": "target",
            "old_target": _p(_DE, ("eclass", "Owner", 0)),
            "new_target": _p(_DE, ("eclass", "Person", 0)),
        }),
    ))
    strict_ref = (
        ("/de", "/de"),
        ("/de/DomesticAnimal", "/de/DomesticAnimal"),
        ("/de/Owner", "/de/Owner"),
        ("/de/Person", "/de/Person"),
    )
    flexible_ref = strict_ref + (("/de/DomesticAnimal/owner", "/de/DomesticAnimal/owner"),)
    recreated = _predict(creates=["/de/DomesticAnimal/owner[1]"],
                         deletes=["/de/DomesticAnimal/owner"])
    expected = {
        CONFIG_TOPDOWN: recreated,
        CONFIG_TWOPHASE: recreated,
        CONFIG_SEMANTIC: recreated,
        CONFIG_FULLSCOPE: _predict(retargets=["/de/DomesticAnimal/owner"]),
    }
    return _scenario("S5", "ecore", "reference target changed from Owner to Person",
                     _S5_ECORE_OLD, _S5_ECORE_NEW, gt,
                     {"strict": strict_ref, "flexible": flexible_ref}, expected)


def _s5_bpmn() -> Scenario:
    flow = _p(_MAIN, ("sequenceflow", "", 0))
    gt = EditScript((
        EditOp(RETARGET_EDGE, flow, {
            "role": "target",
            "old_target": _p(_MAIN, ("task", "Task2", 0)),
            "new_target": _p(_MAIN, ("task", "Task3", 0)),
        }),
    ))
    strict_ref = (
        ("/Main", "/Main"),
        ("/Main/Task1", "/Main/Task1"),
        ("/Main/Task2", "/Main/Task2"),
        ("/Main/Task3", "/Main/Task3"),
    )
    flexible_ref = strict_ref + (("/Main/sequenceflow", "/Main/sequenceflow"),)
    recreated = _predict(creates=["/Main/sequenceflow[1]"], deletes=["/Main/sequenceflow"])
    expected = {
        CONFIG_TOPDOWN: recreated,
        CONFIG_TWOPHASE: recreated,
        CONFIG_SEMANTIC: recreated,
        CONFIG_FULLSCOPE: _predict(retargets=["/Main/sequenceflow"]),
    }
    return _scenario("S5", "bpmn", "sequence flow target changed from Task2 to Task3",
                     _S5_BPMN_OLD, _S5_BPMN_NEW, gt,
                     {"strict": strict_ref, "flexible": flexible_ref}, expected)


def _s5b_ecore() -> Scenario:
    gt = EditScript((
        EditOp(MOVE_ELEMENT,
               _p(_DE, ("eclass", "DomesticAnimal", 0), ("ereference", "owner", 0)),
               {"new_parent": _p(_DE, ("eclass", "Person", 0))}),
    ))
    reference = (
        ("/de", "/de"),
        ("/de/DomesticAnimal", "/de/DomesticAnimal"),
        ("/de/Owner", "/de/Owner"),
        ("/de/Person", "/de/Person"),
    )
    recreated = _predict(creates=["/de/Person/owner"], deletes=["/de/DomesticAnimal/owner"])
    expected = {name: recreated for name in _ALL}
    return _scenario("S5b", "ecore", "reference source changed: owner moved to Person",
                     _S5_ECORE_OLD, _S5B_ECORE_NEW, gt, {"default": reference}, expected)


def _s5b_bpmn() -> Scenario:
    flow = _p(_MAIN, ("sequenceflow", "", 0))
    gt = EditScript((
        EditOp(DELETE_EDGE, flow, {"role": "source",
                                   "old_target": _p(_MAIN, ("task", "Task1", 0))}),
        EditOp(CREATE_EDGE, flow, {"role": "source",
                                   "target": _p(_MAIN, ("task", "Task3", 0))}),
    ))
    reference = (
        ("/Main", "/Main"),
        ("/Main/Task1", "/Main/Task1"),
        ("/Main/Task2", "/Main/Task2"),
        ("/Main/Task3", "/Main/Task3"),
    )
    recreated = _predict(creates=["/Main/sequenceflow[1]"], deletes=["/Main/sequenceflow"])
    expected = {name: recreated for name in _ALL}
    return _scenario("S5b", "bpmn", "sequence flow source changed from Task1 to Task3",
                     _S5_BPMN_OLD, _S5B_BPMN_NEW, gt, {"default": reference}, expected)


@lru_cache(maxsize=1)
def _scenarios() -> tuple[Scenario, ...]:
    return (
        _s1_ecore(), _s1_bpmn(),
        _s2_ecore(), _s2_bpmn(),
        _s3_ecore(), _s3_bpmn(),
        _s4_ecore(), _s4_bpmn(),
        _s5_ecore(), _s5_bpmn(),
        _s5b_ecore(), _s5b_bpmn(),
    )


def builtin_scenarios() -> list[Scenario]:
    """The twelve built-in scenarios (S1-S5 plus S5b, both flavors)."""
    return list(_scenarios())


def reference_matching(scenario: Scenario, interpretation: str = "move",
                       edge_policy: str = "strict") -> Matching:
    """Hand-specified ground-truth correspondences for a scenario.

    S4 has one reference per interpretation ("move" or "rename"); S5's
    reference depends on the edge policy (the flow/reference pair exists
    only under target-flexible). All other scenarios have a single
    reference and ignore both arguments.
    """
    refs = scenario.references
    if "rename" in refs:
        key = interpretation
    elif "strict" in refs:
        key = "flexible" if edge_policy == "target-flexible" else "strict"
    else:
        key = "default"
    pairs = [
        (resolve_name_path(scenario.old, old_path), resolve_name_path(scenario.new, new_path))
        for old_path, new_path in refs[key]
    ]
    return Matching(pairs)


# ------------------------------------------------------------------ running


@dataclass(eq=False)
class BenchmarkRow:
    """Result of one (scenario, config) cell."""

    scenario: str
    flavor: str
    config: str
    script: EditScript
    verdict: str
    precision: float
    recall: float
    round_trip: bool
    note: str = ""


@dataclass(eq=False)
class BenchmarkReport:
    """All cells of one benchmark run, stable by (scenario, config)."""

    rows: list[BenchmarkRow]

    @property
    def all_match(self) -> bool:
        return all(row.verdict == MATCHES for row in self.rows)

    def to_text(self) -> str:
        lines = []
        header = f"{'scenario':<10} {'flavor':<6} {'config':<26} {'verdict':<20} {'prec':>5} {'rec':>5}  ops"
        lines.append(header)
        lines.append("-" * len(header))
        for row in self.rows:
            ops = ",".join(f"{kind}x{n}" for kind, n in sorted(row.script.kinds().items())) or "-"
            lines.append(
                f"{row.scenario:<10} {row.flavor:<6} {row.config:<26} {row.verdict:<20} "
                f"{row.precision:>5.2f} {row.recall:>5.2f}  {ops}"
            )
            if row.note:
                lines.append(f"{'':>10} note: {row.note}")
        matched = sum(1 for row in self.rows if row.verdict == MATCHES)
        lines.append(f"{matched}/{len(self.rows)} cells match the prediction table")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "all_match": self.all_match,
            "rows": [
                {
                    "scenario": row.scenario,
                    "flavor": row.flavor,
                    "config": row.config,
                    "verdict": row.verdict,
                    "precision": row.precision,
                    "recall": row.recall,
                    "round_trip": row.round_trip,
                    "note": row.note,
                    "ops": [op_to_json(op) for op in row.script],
                }
                for row in self.rows
            ],
        }
        return json.dumps(payload, indent=2) + "\n"


def _pair_ids(matching: Matching) -> set[tuple[str, str]]:
    return {(a.local_id, b.local_id) for a, b in matching.element_pairs}


def run_benchmark(configs: list[tuple[str, MatcherConfig]] | None = None,
                  scenarios: list[Scenario] | None = None) -> BenchmarkReport:
    """Run every configuration over every scenario and score the outcomes.

    Each cell derives a script, verifies the patch round-trip, compares
    op-kind multiset and subject set against the scenario's prediction for
    that configuration, and computes correspondence precision/recall against
    the reference matching. Failures are recorded per cell, never raised.
    """
    configs = configs if configs is not None else default_matrix()
    scenarios = scenarios if scenarios is not None else builtin_scenarios()
    rows: list[BenchmarkRow] = []
    for sc in scenarios:
        for name, cfg in configs:
            rows.append(_run_cell(sc, name, cfg))
    return BenchmarkReport(rows)


def _run_cell(sc: Scenario, name: str, cfg: MatcherConfig) -> BenchmarkRow:
    try:
        matching = match_models(sc.old, sc.new, cfg)
        script = derive_edit_script(sc.old, sc.new, matching, cfg)
        round_trip = models_equivalent(apply_edit_script(sc.old, script), sc.new)
        prediction = sc.expected.get(name)
        if prediction is None:
            return BenchmarkRow(sc.id, sc.flavor, name, script, DEVIATES,
                                0.0, 0.0, round_trip, note=f"no prediction for config {name!r}")
        reference = reference_matching(sc, prediction.interpretation, cfg.edge_policy)
        derived = _pair_ids(matching)
        expected = _pair_ids(reference)
        hits = len(derived & expected)
        precision = hits / len(derived) if derived else 1.0
        recall = hits / len(expected) if expected else 1.0
        got_subjects = {(op.kind, format_path(op.subject)) for op in script}
        matches = (
            round_trip
            and script.kinds() == prediction.kinds()
            and got_subjects == set(prediction.subjects)
        )
        note = ""
        if not matches:
            note = f"expected {dict(prediction.kinds())}, derived {script.kinds()}"
        return BenchmarkRow(sc.id, sc.flavor, name, script,
                            MATCHES if matches else DEVIATES,
                            precision, recall, round_trip, note)
    except ModelDiffError as exc:
        return BenchmarkRow(sc.id, sc.flavor, name, EditScript(), DEVIATES,
                            0.0, 0.0, False, note=f"{type(exc).__name__}: {exc}")


# ------------------------------------------------------------------- export


def export_scenarios(directory) -> list[FsPath]:
    """Write every scenario's models plus a manifest; returns written paths.

    The manifest has one line per scenario: id, flavor, old file, new file.
    """
    out = FsPath(directory)
    written: list[FsPath] = []
    manifest_lines: list[str] = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for sc in builtin_scenarios():
            stem = f"{sc.id.lower()}_{sc.flavor}"
            old_name = f"{stem}_old.xml"
            new_name = f"{stem}_new.xml"
            (out / old_name).write_text(serialize_model(sc.old), encoding="utf-8")
            (out / new_name).write_text(serialize_model(sc.new), encoding="utf-8")
            written.extend([out / old_name, out / new_name])
            manifest_lines.append(f"{sc.id} {sc.flavor} {old_name} {new_name}")
        manifest = out / "manifest.txt"
        manifest.write_text("\n".join(manifest_lines) + "\n", encoding="utf-8")
        written.append(manifest)
    except OSError as exc:
        raise IoFailure(f"cannot export scenarios to {out}: {exc}") from exc
    return written

"""TimeML corpus reading.

Parses `.tml` files into an in-memory document model (text, events, time
expressions, document creation time, temporal links) and normalizes the 14
TimeML relation labels onto the interval-relation alphabet.
"""

from __future__ import annotations

import enum
import logging
import random
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .algebra import AllenRelation, IntervalAssertion

log = logging.getLogger(__name__)


class ParseError(Exception):
    """Malformed or incomplete TimeML input."""

    def __init__(self, message: str, source: str = ""):
        super().__init__(f"{source}: {message}" if source else message)
        self.source = source


class TimeMLRelation(enum.Enum):
    BEFORE = "BEFORE"
    AFTER = "AFTER"
    IBEFORE = "IBEFORE"
    IAFTER = "IAFTER"
    BEGINS = "BEGINS"
    BEGUN_BY = "BEGUN_BY"
    ENDS = "ENDS"
    ENDED_BY = "ENDED_BY"
    INCLUDES = "INCLUDES"
    IS_INCLUDED = "IS_INCLUDED"
    DURING = "DURING"
    DURING_INV = "DURING_INV"
    SIMULTANEOUS = "SIMULTANEOUS"
    IDENTITY = "IDENTITY"


# DURING, DURING_INV and IDENTITY all collapse onto equals, matching the
# official TempEval-3 scorer; overlaps / overlapped-by are never produced.
_TIMEML_TO_ALLEN: dict[TimeMLRelation, AllenRelation] = {
    TimeMLRelation.BEFORE: AllenRelation.BEFORE,
    TimeMLRelation.AFTER: AllenRelation.AFTER,
    TimeMLRelation.IBEFORE: AllenRelation.MEETS,
    TimeMLRelation.IAFTER: AllenRelation.MET_BY,
    TimeMLRelation.BEGINS: AllenRelation.STARTS,
    TimeMLRelation.BEGUN_BY: AllenRelation.STARTED_BY,
    TimeMLRelation.ENDS: AllenRelation.FINISHES,
    TimeMLRelation.ENDED_BY: AllenRelation.FINISHED_BY,
    TimeMLRelation.INCLUDES: AllenRelation.CONTAINS,
    TimeMLRelation.IS_INCLUDED: AllenRelation.DURING,
    TimeMLRelation.DURING: AllenRelation.EQUALS,
    TimeMLRelation.DURING_INV: AllenRelation.EQUALS,
    TimeMLRelation.SIMULTANEOUS: AllenRelation.EQUALS,
    TimeMLRelation.IDENTITY: AllenRelation.EQUALS,
}


def map_timeml_to_allen(label: TimeMLRelation) -> AllenRelation:
    return _TIMEML_TO_ALLEN[label]


class EntityKind(enum.Enum):
    EVENT = "event"
    TIMEX = "timex"
    DCT = "dct"


@dataclass(frozen=True)
class TemporalEntity:
    id: str
    kind: EntityKind
    span: Optional[tuple[int, int]] = None  # absent for the DCT
    surface: Optional[str] = None


@dataclass(frozen=True)
class TLink:
    source: str
    target: str
    relation: AllenRelation
    original_label: TimeMLRelation

    def assertion(self) -> IntervalAssertion:
        return IntervalAssertion(self.source, self.relation, self.target)


@dataclass
class Document:
    id: str
    text: str
    dct: TemporalEntity
    entities: list[TemporalEntity] = field(default_factory=list)
    tlinks: list[TLink] = field(default_factory=list)

    def entity(self, entity_id: str) -> TemporalEntity:
        if entity_id == self.dct.id:
            return self.dct
        for ent in self.entities:
            if ent.id == entity_id:
                return ent
        raise KeyError(entity_id)

    @property
    def all_entities(self) -> list[TemporalEntity]:
        return [self.dct] + [e for e in self.entities if e.id != self.dct.id]


def _collect_text(element: ET.Element, doc_id: str, entities: list[TemporalEntity]) -> str:
    """Walk the TEXT element, stripping markup and recording entity spans."""
    parts: list[str] = []
    offset = 0

    def emit(chunk: Optional[str]) -> None:
        nonlocal offset
        if chunk:
            parts.append(chunk)
            offset += len(chunk)

    def walk(node: ET.Element) -> None:
        emit(node.text)
        for child in node:
            start = offset
            walk(child)
            end = offset
            tag = child.tag.upper()
            if tag in ("EVENT", "TIMEX3"):
                kind = EntityKind.EVENT if tag == "EVENT" else EntityKind.TIMEX
                ent_id = child.get("eid") or child.get("tid")
                if not ent_id:
                    raise ParseError(f"{tag} without id", doc_id)
                surface = "".join(parts)[start:end]
                if not surface:
                    raise ParseError(f"{tag} {ent_id} covers empty text", doc_id)
                entities.append(TemporalEntity(ent_id, kind, (start, end), surface))
            emit(child.tail)

    walk(element)
    return "".join(parts)


def _link_endpoint(elem: ET.Element, role: str, instance_to_event: dict[str, str]) -> Optional[str]:
    if role == "source":
        eiid = elem.get("eventInstanceID")
        tid = elem.get("timeID")
    else:
        eiid = elem.get("relatedToEventInstance")
        tid = elem.get("relatedToTime")
    if eiid is not None:
        return instance_to_event.get(eiid, eiid)
    return tid


def parse_tml(content: bytes, source: str = "<bytes>") -> Document:
    """Parse one TimeML document.

    Event-instance ids in TLINKs are resolved back to their event ids;
    duplicate TLINKs for an ordered entity pair keep the first occurrence.
    """
    try:
        root = ET.fromstring(content)
    except ET.ParseError as exc:
        raise ParseError(f"malformed XML: {exc}", source) from exc

    doc_id_elem = root.find(".//DOCID")
    doc_id = (doc_id_elem.text or "").strip() if doc_id_elem is not None else Path(source).stem

    # DCT: the TIMEX3 whose functionInDocument marks document creation time.
    dct_elem = None
    for timex in root.iter("TIMEX3"):
        if timex.get("functionInDocument") == "CREATION_TIME":
            dct_elem = timex
            break
    if dct_elem is None:
        raise ParseError("no document creation time annotation", source)
    dct_id = dct_elem.get("tid")
    if not dct_id:
        raise ParseError("DCT TIMEX3 has no tid", source)
    dct = TemporalEntity(dct_id, EntityKind.DCT)

    text_elem = root.find(".//TEXT")
    if text_elem is None:
        raise ParseError("no TEXT element", source)
    entities: list[TemporalEntity] = []
    text = _collect_text(text_elem, doc_id, entities)

    seen_ids: set[str] = {dct.id}
    unique_entities: list[TemporalEntity] = []
    for ent in entities:
        if ent.id in seen_ids:
            log.warning("%s: duplicate entity id %s, keeping first", source, ent.id)
            continue
        seen_ids.add(ent.id)
        unique_entities.append(ent)

    instance_to_event: dict[str, str] = {}
    for inst in root.iter("MAKEINSTANCE"):
        eiid = inst.get("eiid")
        eid = inst.get("eventID")
        if eiid and eid:
            instance_to_event[eiid] = eid

    tlinks: list[TLink] = []
    seen_pairs: set[tuple[str, str]] = set()
    for link in root.iter("TLINK"):
        rel_text = link.get("relType")
        try:
            label = TimeMLRelation(rel_text)
        except ValueError:
            raise ParseError(f"unknown relation label {rel_text!r}", source)
        src = _link_endpoint(link, "source", instance_to_event)
        tgt = _link_endpoint(link, "target", instance_to_event)
        if src is None or tgt is None:
            raise ParseError(f"TLINK {link.get('lid')} missing an endpoint", source)
        for ref in (src, tgt):
            if ref not in seen_ids:
                raise ParseError(f"TLINK references unknown entity {ref!r}", source)
        if src == tgt:
            log.warning("%s: skipping self-link on %s", source, src)
            continue
        if (src, tgt) in seen_pairs:
            log.warning("%s: duplicate TLINK for (%s, %s), keeping first", source, src, tgt)
            continue
        seen_pairs.add((src, tgt))
        tlinks.append(TLink(src, tgt, map_timeml_to_allen(label), label))

    return Document(id=doc_id, text=text, dct=dct, entities=unique_entities, tlinks=tlinks)


class Split(enum.Enum):
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"


_TEST_DIR_NAMES = {"te3-platinum", "platinum", "test"}

DEFAULT_SPLIT_SEED = 1337
VALIDATION_FRACTION = 0.2


def _find_tml_files(root: Path) -> tuple[list[Path], list[Path]]:
    train_files: list[Path] = []
    test_files: list[Path] = []
    for path in sorted(root.rglob("*.tml")):
        relative_parts = {p.lower() for p in path.relative_to(root).parts[:-1]}
        if relative_parts & _TEST_DIR_NAMES:
            test_files.append(path)
        else:
            train_files.append(path)
    return train_files, test_files


def _read_manifest(path: Path) -> set[str]:
    return {line.strip() for line in path.read_text().splitlines() if line.strip()}


def load_corpus(
    root: Path | str,
    split: Split,
    seed: int = DEFAULT_SPLIT_SEED,
    strict: bool = False,
    manifest: Optional[Path] = None,
) -> list[Document]:
    """Load one split of a TempEval-3 style corpus layout.

    Test documents are those under a platinum/test subdirectory; the
    remaining documents are deterministically partitioned 80/20 into
    train/validation by a seeded shuffle of document ids. A manifest file
    (one document id per line) overrides the seeded validation membership.
    """
    root = Path(root)
    if not root.is_dir():
        raise IOError(f"corpus root {root} is not a directory")
    train_files, test_files = _find_tml_files(root)
    if not train_files and not test_files:
        raise IOError(f"no .tml files under {root}")

    files = test_files if split is Split.TEST else train_files
    docs: list[Document] = []
    errors: list[ParseError] = []
    for path in files:
        try:
            docs.append(parse_tml(path.read_bytes(), str(path)))
        except ParseError as exc:
            if strict:
                raise
            errors.append(exc)
            log.warning("skipping unparseable file: %s", exc)
    if errors:
        log.warning("%d file(s) failed to parse", len(errors))

    if split is Split.TEST:
        return docs

    docs.sort(key=lambda d: d.id)
    if manifest is not None:
        validation_ids = _read_manifest(manifest)
    else:
        ids = [d.id for d in docs]
        random.Random(seed).shuffle(ids)
        n_validation = int(len(ids) * VALIDATION_FRACTION)
        validation_ids = set(ids[:n_validation])

    if split is Split.VALIDATION:
        return [d for d in docs if d.id in validation_ids]
    return [d for d in docs if d.id not in validation_ids]


def corpus_assertions(docs: Iterable[Document]) -> dict[str, set[IntervalAssertion]]:
    """Per-document interval assertions from gold links."""
    return {doc.id: {link.assertion() for link in doc.tlinks} for doc in docs}

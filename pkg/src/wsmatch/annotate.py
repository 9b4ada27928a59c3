"""Writing a confirmed matching plan into SAWSDL annotations, and reading it back.

modelReference carries the peer IRIs (``targetNamespace#localName``); the
match expressions themselves cannot be expressed as IRI lists, so they ride
in extension attributes in a dedicated namespace:

* ``subst:opExpr``  on the substituted operation - its AND/OR expression
* ``subst:inMap``   on substituent input leaf elements - expression over
  substituted input leaves
* ``subst:outMap``  on substituted output leaf elements - expression over
  substituent output leaves

Annotations are additive: reparsing an annotated document yields the same
service model as the original.
"""

from __future__ import annotations

import threading
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from io import BytesIO

from wsmatch.errors import AnnotationError
from wsmatch.mapping import (
    MatchingPlan,
    OperationConnective,
    OperationRef,
    operation_refs,
    parse_data_expr,
    parse_operation_expr,
    path_refs,
    render_data_expr,
    render_operation_expr,
    validate_plan,
)
from wsmatch.wsdl import WSDL_NS, XSD_NS, ServiceDescription, parse_wsdl, _parse_xml

SAWSDL_NS = "http://www.w3.org/ns/sawsdl"
SUBST_NS = "urn:wsmatch:substitution:1.0"

MODEL_REFERENCE = f"{{{SAWSDL_NS}}}modelReference"
OP_EXPR_ATTR = f"{{{SUBST_NS}}}opExpr"
IN_MAP_ATTR = f"{{{SUBST_NS}}}inMap"
OUT_MAP_ATTR = f"{{{SUBST_NS}}}outMap"

# ET's prefix registry is process-global; serialization re-registers the
# source document's prefixes under this lock so QName attribute values
# (message="tns:...") keep resolving after the round trip.
_SERIALIZE_LOCK = threading.Lock()


def operation_iri(namespace: str, operation_name: str) -> str:
    return f"{namespace}#{operation_name}"


def split_iri(iri: str) -> tuple[str, str]:
    namespace, _, fragment = iri.rpartition("#")
    return namespace, fragment


@dataclass(frozen=True)
class AnnotatedWsdlPair:
    """The two annotated documents plus a manifest of everything written."""

    substituted_doc: bytes
    substituent_doc: bytes
    manifest: dict


def annotate_pair(
    substituted: ServiceDescription,
    substituent: ServiceDescription,
    plan: MatchingPlan,
) -> AnnotatedWsdlPair:
    """Write the plan into both documents as SAWSDL modelReference annotations
    plus expression extension attributes."""
    if plan.is_empty():
        raise AnnotationError("nothing to annotate: plan matches no operations")
    report = validate_plan(plan, substituted, substituent)
    if not report.ok:
        details = "; ".join(p.message for p in report.errors)
        raise AnnotationError(f"plan failed validation: {details}")

    left = _Document(substituted)
    right = _Document(substituent)
    manifest_entries: dict[str, list] = {"substituted": [], "substituent": []}

    # Operation-level annotations, both directions.
    for op_name, expr in plan.operations.items():
        refs = operation_refs(expr)
        iris = [operation_iri(substituent.target_namespace, r) for r in refs]
        node = left.operation_node(op_name)
        _append_model_refs(node, iris)
        node.set(OP_EXPR_ATTR, render_operation_expr(expr))
        manifest_entries["substituted"].append(
            {
                "target": f"operation {op_name}",
                "modelReference": iris,
                "opExpr": render_operation_expr(expr),
            }
        )
        back_iri = operation_iri(substituted.target_namespace, op_name)
        for ref in refs:
            ref_node = right.operation_node(ref)
            _append_model_refs(ref_node, [back_iri])
            manifest_entries["substituent"].append(
                {"target": f"operation {ref}", "modelReference": [back_iri]}
            )

    # Input mappings ride on substituent input leaf elements.
    _annotate_mappings(
        doc=right,
        service=substituent,
        peer=substituted,
        mappings=plan.input_mappings,
        attr=IN_MAP_ATTR,
        attr_name="inMap",
        side="input",
        peer_side="input",
        manifest=manifest_entries["substituent"],
    )
    # Output mappings ride on substituted output leaf elements.
    _annotate_mappings(
        doc=left,
        service=substituted,
        peer=substituent,
        mappings=plan.output_mappings,
        attr=OUT_MAP_ATTR,
        attr_name="outMap",
        side="output",
        peer_side="output",
        manifest=manifest_entries["substituted"],
    )

    manifest = {
        "substituted": {
            "name": substituted.name,
            "targetNamespace": substituted.target_namespace,
            "annotations": manifest_entries["substituted"],
        },
        "substituent": {
            "name": substituent.name,
            "targetNamespace": substituent.target_namespace,
            "annotations": manifest_entries["substituent"],
        },
    }
    return AnnotatedWsdlPair(left.serialize(), right.serialize(), manifest)


def _annotate_mappings(
    doc, service, peer, mappings, attr, attr_name, side, peer_side, manifest
):
    """Attach mapping expressions to the leaf elements they target."""
    planned: dict[int, tuple] = {}
    for leaf_path, expr in mappings.items():
        leaf = _find_leaf(service, leaf_path, side)
        if leaf is None:
            raise AnnotationError(
                f"{side} leaf <{leaf_path}> not found in {service.name}"
            )
        node = doc.leaf_node(leaf.raw_path)
        text = render_data_expr(expr)
        previous = planned.get(id(node))
        if previous is not None and previous[0] != text:
            raise AnnotationError(
                f"leaf element {leaf.raw_path[-1]} is shared by paths with "
                f"different mapping expressions; annotate cannot express that"
            )
        peer_iris = []
        for ref in path_refs(expr):
            peer_leaf = _find_leaf(peer, ref, peer_side)
            if peer_leaf is None:
                raise AnnotationError(
                    f"mapping for <{leaf_path}> references unknown peer leaf <{ref}>"
                )
            iri = operation_iri(peer.target_namespace, peer_leaf.leaf_name)
            if iri not in peer_iris:
                peer_iris.append(iri)
        node.set(attr, text)
        _append_model_refs(node, peer_iris)
        planned[id(node)] = (text,)
        manifest.append(
            {
                "target": f"element {'/'.join(leaf.raw_path)}",
                "modelReference": peer_iris,
                attr_name: text,
            }
        )


def _find_leaf(service: ServiceDescription, leaf_path: str, side: str):
    for op in service.operations:
        data = op.input if side == "input" else op.output
        leaf = data.find_leaf(leaf_path)
        if leaf is not None:
            return leaf
    return None


def _append_model_refs(node: ET.Element, iris: list[str]) -> None:
    existing = node.get(MODEL_REFERENCE)
    values = existing.split() if existing else []
    for iri in iris:
        if iri not in values:
            values.append(iri)
    if values:
        node.set(MODEL_REFERENCE, " ".join(values))


# ---------------------------------------------------------------------------
# Extraction


def extract_plan(
    pair: AnnotatedWsdlPair | tuple[bytes, bytes],
) -> tuple[MatchingPlan, list[str]]:
    """Reconstruct the matching plan from an annotated pair.

    Returns the plan plus degradation warnings (operations annotated with
    modelReference only are recovered as bare AND matches). Dangling IRIs
    raise AnnotationError naming the reference.
    """
    if isinstance(pair, AnnotatedWsdlPair):
        left_bytes, right_bytes = pair.substituted_doc, pair.substituent_doc
    else:
        left_bytes, right_bytes = pair
    substituted = parse_wsdl(left_bytes)
    substituent = parse_wsdl(right_bytes)
    left = _Document(substituted)
    right = _Document(substituent)
    warnings: list[str] = []
    plan = MatchingPlan()

    substituent_ops = set(substituent.operation_names())
    for op in substituted.operations:
        node = left.operation_node(op.name)
        expr_text = node.get(OP_EXPR_ATTR)
        refs_text = node.get(MODEL_REFERENCE)
        if expr_text:
            expr = parse_operation_expr(expr_text, substituent)
            plan.operations[op.name] = expr
            if refs_text:
                _check_iris(refs_text, substituent, substituent_ops)
        elif refs_text:
            names = _check_iris(refs_text, substituent, substituent_ops)
            expr = (
                OperationRef(names[0])
                if len(names) == 1
                else OperationConnective(
                    "AND", tuple(OperationRef(n) for n in names)
                )
            )
            plan.operations[op.name] = expr
            warnings.append(
                f"operation {op.name}: modelReference without expression "
                f"attribute; recovered a bare AND match"
            )

    _extract_mappings(right, substituent, "input", IN_MAP_ATTR, plan.input_mappings)
    _extract_mappings(left, substituted, "output", OUT_MAP_ATTR, plan.output_mappings)
    return plan, warnings


def _check_iris(refs_text: str, peer: ServiceDescription, peer_ops: set[str]):
    names = []
    for iri in refs_text.split():
        namespace, fragment = split_iri(iri)
        if namespace != peer.target_namespace or fragment not in peer_ops:
            raise AnnotationError(f"dangling IRI: {iri}")
        names.append(fragment)
    return names


def _extract_mappings(doc, service, side, attr, target: dict):
    for op in service.operations:
        data = op.input if side == "input" else op.output
        for leaf in data.leaves:
            if leaf.sentence.text in target:
                continue
            node = doc.leaf_node(leaf.raw_path, missing_ok=True)
            if node is None:
                continue
            text = node.get(attr)
            if text is None:
                continue
            target[leaf.sentence.text] = parse_data_expr(text)


# ---------------------------------------------------------------------------
# Document access


class _Document:
    """ET view over a service's raw document for attribute surgery."""

    def __init__(self, service: ServiceDescription):
        self.service = service
        try:
            self.root, self.nsmap = _parse_xml(service.raw_document, service.name)
        except Exception as exc:
            raise AnnotationError(str(exc)) from exc
        self._globals: dict[str, ET.Element] = {}
        self._complex_types: dict[str, ET.Element] = {}
        for types_el in self.root.findall(f"{{{WSDL_NS}}}types"):
            for schema in types_el.findall(f"{{{XSD_NS}}}schema"):
                for child in schema:
                    name = child.get("name")
                    if not name:
                        continue
                    tag = child.tag.rsplit("}", 1)[-1]
                    if tag == "element":
                        self._globals.setdefault(name, child)
                    elif tag == "complexType":
                        self._complex_types.setdefault(name, child)

    def operation_node(self, name: str) -> ET.Element:
        op = self.service.operation(name)
        if op is None:
            raise AnnotationError(
                f"operation {name} missing from {self.service.name}"
            )
        port_type_name = op.port_type
        for port_type in self.root.findall(f"{{{WSDL_NS}}}portType"):
            if port_type.get("name") != port_type_name:
                continue
            for node in port_type.findall(f"{{{WSDL_NS}}}operation"):
                if node.get("name") == name:
                    return node
        raise AnnotationError(
            f"operation {name} missing from document of {self.service.name}"
        )

    def leaf_node(self, raw_path: tuple[str, ...], missing_ok: bool = False):
        node = self._globals.get(raw_path[0])
        if node is None:
            if missing_ok:
                return None
            raise AnnotationError(
                f"element {raw_path[0]} not found in document of "
                f"{self.service.name} (imported schemas cannot be annotated)"
            )
        for segment in raw_path[1:]:
            node = self._descend(node, segment)
            if node is None:
                if missing_ok:
                    return None
                raise AnnotationError(
                    f"element path {'/'.join(raw_path)} not found in document "
                    f"of {self.service.name}"
                )
        return node

    def _descend(self, element: ET.Element, segment: str):
        containers = list(element.findall(f"{{{XSD_NS}}}complexType"))
        type_ref = element.get("type")
        if type_ref:
            local = type_ref.split(":")[-1]
            named = self._complex_types.get(local)
            if named is not None:
                containers.append(named)
        for container in containers:
            found = self._search_group(container, segment)
            if found is not None:
                return found
        return None

    # group-structuring tags we look through when searching for a direct child
    _GROUPS = ("sequence", "all", "choice", "complexContent", "extension", "restriction")

    def _search_group(self, container: ET.Element, segment: str):
        for child in container:
            tag = child.tag.rsplit("}", 1)[-1]
            if tag in ("element", "attribute"):
                if child.get("name") == segment:
                    return child
                if tag == "element" and child.get("ref", "").split(":")[-1] == segment:
                    target = self._globals.get(segment)
                    if target is not None:
                        return target
            elif tag in self._GROUPS:
                found = self._search_group(child, segment)
                if found is not None:
                    return found
        return None

    def serialize(self) -> bytes:
        # Namespaces that appear only inside QName attribute VALUES (message=
        # "tns:GetWeatherIn") are invisible to ET's serializer; re-declare
        # them literally so those references keep resolving after reparse.
        used = set()
        for el in self.root.iter():
            if not isinstance(el.tag, str):
                continue
            if el.tag.startswith("{"):
                used.add(el.tag[1:].split("}", 1)[0])
            for key in el.attrib:
                if key.startswith("{"):
                    used.add(key[1:].split("}", 1)[0])
        default_ns = None
        for prefix, uri in self.nsmap.items():
            if uri in used:
                if prefix == "":
                    default_ns = uri
                continue
            self.root.set(f"xmlns:{prefix}" if prefix else "xmlns", uri)

        buffer = BytesIO()
        with _SERIALIZE_LOCK:
            ET.register_namespace("sawsdl", SAWSDL_NS)
            ET.register_namespace("subst", SUBST_NS)
            ET.register_namespace("wsdl", WSDL_NS)
            ET.register_namespace("xs", XSD_NS)
            for prefix, uri in self.nsmap.items():
                if prefix and uri in used:
                    ET.register_namespace(prefix, uri)
            ET.ElementTree(self.root).write(
                buffer,
                encoding="utf-8",
                xml_declaration=True,
                default_namespace=default_ns,
            )
        return buffer.getvalue()

"""WSDL 1.1 parsing into the flattened service model.

A service is a set of named operations; each operation's input and output is
a one-level set of path sentences, one per schema leaf, rendered root-first
("GetWeatherResponse/temperature" becomes "get weather response temperature").
Bindings, SOAP details and faults are ignored by the model; the raw document
is retained untouched for annotation.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum
from io import BytesIO

from wsmatch.errors import WsdlError
from wsmatch.locator import read_location, resolve_location
from wsmatch.textsim import Sentence, tokenize

WSDL_NS = "http://schemas.xmlsoap.org/wsdl/"
XSD_NS = "http://www.w3.org/2001/XMLSchema"

# Complex-type expansion stops here; deeper structure is truncated with a warning.
MAX_TREE_DEPTH = 8
# xsd:import / xsd:include / wsdl:import chains stop here.
MAX_RESOLVE_DEPTH = 16


class SchemaKind(Enum):
    COMPLEX = "complex"
    SIMPLE = "simple"


@dataclass(frozen=True)
class SchemaElementTree:
    """Element (or attribute) node in a schema tree."""

    name: str
    kind: SchemaKind
    children: tuple["SchemaElementTree", ...] = ()
    type_name: str | None = None
    is_attribute: bool = False


@dataclass(frozen=True)
class LeafPath:
    """One root-to-leaf path of a flattened element."""

    sentence: Sentence
    raw_path: tuple[str, ...]
    type_name: str | None

    @property
    def leaf_name(self) -> str:
        return self.raw_path[-1]


@dataclass(frozen=True)
class DataSet:
    """Flattened input or output: a duplicate-free set of path sentences."""

    leaves: tuple[LeafPath, ...]
    source_element: str | None = None

    @property
    def sentences(self) -> tuple[Sentence, ...]:
        return tuple(leaf.sentence for leaf in self.leaves)

    @property
    def sentence_texts(self) -> tuple[str, ...]:
        return tuple(leaf.sentence.text for leaf in self.leaves)

    def find_leaf(self, path_text: str) -> LeafPath | None:
        for leaf in self.leaves:
            if leaf.sentence.text == path_text:
                return leaf
        return None

    def merge(self, other: "DataSet") -> "DataSet":
        leaves = list(self.leaves)
        seen = {leaf.sentence.words for leaf in leaves}
        for leaf in other.leaves:
            if leaf.sentence.words not in seen:
                seen.add(leaf.sentence.words)
                leaves.append(leaf)
        return DataSet(tuple(leaves), self.source_element or other.source_element)


EMPTY_DATA_SET = DataSet(())


@dataclass(frozen=True)
class Operation:
    name: str
    name_sentence: Sentence
    input: DataSet
    output: DataSet
    wsdl_id: str
    port_type: str


@dataclass
class ServiceDescription:
    name: str
    target_namespace: str
    operations: tuple[Operation, ...]
    source_uri: str | None
    raw_document: bytes
    warnings: tuple[str, ...] = ()

    def operation(self, name: str) -> Operation | None:
        for op in self.operations:
            if op.name == name:
                return op
        return None

    def operation_names(self) -> tuple[str, ...]:
        return tuple(op.name for op in self.operations)

    def model_key(self):
        """Structural identity: everything except provenance and raw bytes."""
        return (
            self.target_namespace,
            tuple(
                (
                    op.wsdl_id,
                    op.name,
                    tuple(op.input.sentence_texts),
                    tuple(op.output.sentence_texts),
                )
                for op in self.operations
            ),
        )


def flatten_element(tree: SchemaElementTree) -> DataSet:
    """One sentence per leaf: the tokenized root-to-leaf name path.

    Duplicate sentences collapse; truncation warnings are handled at parse
    time (the tree passed here is already depth-capped).
    """
    leaves: list[LeafPath] = []
    seen: set[tuple[str, ...]] = set()

    def walk(node: SchemaElementTree, trail: tuple[str, ...]):
        trail = trail + (node.name,)
        if not node.children:
            sentence = tokenize(" ".join(trail))
            if sentence.words and sentence.words not in seen:
                seen.add(sentence.words)
                leaves.append(LeafPath(sentence, trail, node.type_name))
            return
        for child in node.children:
            walk(child, trail)

    walk(tree, ())
    return DataSet(tuple(leaves), source_element=tree.name)


def parse_wsdl(document: bytes, base_uri: str | None = None) -> ServiceDescription:
    """Parse a WSDL 1.1 document (embedded or imported schemas) into the model."""
    parser = _WsdlParser(base_uri)
    return parser.parse(document)


def parse_wsdl_location(uri: str) -> ServiceDescription:
    return parse_wsdl(read_location(uri), base_uri=uri)


# ---------------------------------------------------------------------------


def _parse_xml(document: bytes, origin: str) -> tuple[ET.Element, dict[str, str]]:
    """Parse bytes, collecting prefix -> namespace mappings used for QNames."""
    nsmap: dict[str, str] = {}
    try:
        events = ET.iterparse(BytesIO(document), events=("start-ns", "start"))
        root = None
        for event, payload in events:
            if event == "start-ns":
                prefix, uri = payload
                nsmap[prefix] = uri
            elif root is None:
                root = payload
    except ET.ParseError as exc:
        raise WsdlError(f"{origin}: not well-formed XML: {exc}") from exc
    if root is None:
        raise WsdlError(f"{origin}: empty document")
    return root, nsmap


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _ns(tag: str) -> str:
    if tag.startswith("{"):
        return tag[1:].split("}", 1)[0]
    return ""


class _QNameResolver:
    def __init__(self, nsmap: dict[str, str], target_namespace: str):
        self.nsmap = nsmap
        self.target_namespace = target_namespace

    def resolve(self, qname: str) -> tuple[str, str]:
        qname = qname.strip()
        if ":" in qname:
            prefix, local = qname.split(":", 1)
            ns = self.nsmap.get(prefix)
            if ns is None:
                raise WsdlError(f"undeclared namespace prefix in QName: {qname}")
            return ns, local
        return self.nsmap.get("", self.target_namespace), qname


@dataclass
class _Schema:
    target_namespace: str
    resolver: _QNameResolver
    elements: dict[str, ET.Element] = field(default_factory=dict)
    complex_types: dict[str, ET.Element] = field(default_factory=dict)
    simple_types: dict[str, ET.Element] = field(default_factory=dict)


class _SchemaIndex:
    """Global element/type declarations across embedded and imported schemas."""

    def __init__(self):
        self.schemas: list[_Schema] = []

    def add(self, schema_el: ET.Element, nsmap: dict[str, str]):
        tns = schema_el.get("targetNamespace", "")
        schema = _Schema(tns, _QNameResolver(nsmap, tns))
        for child in schema_el:
            local = _local(child.tag)
            name = child.get("name")
            if not name:
                continue
            if local == "element":
                schema.elements[name] = child
            elif local == "complexType":
                schema.complex_types[name] = child
            elif local == "simpleType":
                schema.simple_types[name] = child
        self.schemas.append(schema)

    def _lookup(self, kind: str, ns: str, local: str):
        for schema in self.schemas:
            if schema.target_namespace != ns:
                continue
            table = getattr(schema, kind)
            if local in table:
                return table[local], schema
        return None, None

    def element(self, ns, local):
        return self._lookup("elements", ns, local)

    def complex_type(self, ns, local):
        return self._lookup("complex_types", ns, local)

    def simple_type(self, ns, local):
        return self._lookup("simple_types", ns, local)


class _WsdlParser:
    def __init__(self, base_uri: str | None):
        self.base_uri = base_uri
        self.warnings: list[str] = []
        self.schema_index = _SchemaIndex()
        self.messages: dict[str, ET.Element] = {}
        self.resolver: _QNameResolver | None = None
        self._loaded_locations: set[str] = set()

    def parse(self, document: bytes) -> ServiceDescription:
        origin = self.base_uri or "<document>"
        root, nsmap = _parse_xml(document, origin)
        if root.tag != f"{{{WSDL_NS}}}definitions":
            raise WsdlError(
                f"{origin}: not a WSDL document (root is {root.tag})"
            )
        target_namespace = root.get("targetNamespace", "")
        self.resolver = _QNameResolver(nsmap, target_namespace)

        self._collect(root, nsmap, self.base_uri, depth=0)

        operations = []
        seen_ids = set()
        for port_type in root.findall(f"{{{WSDL_NS}}}portType"):
            pt_name = port_type.get("name", "")
            for op_el in port_type.findall(f"{{{WSDL_NS}}}operation"):
                op = self._build_operation(op_el, pt_name)
                if op.wsdl_id in seen_ids:
                    raise WsdlError(f"duplicate operation: {op.wsdl_id}")
                seen_ids.add(op.wsdl_id)
                operations.append(op)
        if not operations:
            raise WsdlError(f"{origin}: no operations found")

        name = root.get("name")
        if not name:
            service_el = root.find(f"{{{WSDL_NS}}}service")
            if service_el is not None:
                name = service_el.get("name")
        if not name and self.base_uri:
            name = self.base_uri.rstrip("/").rsplit("/", 1)[-1].rsplit(".", 1)[0]
        return ServiceDescription(
            name=name or "service",
            target_namespace=target_namespace,
            operations=tuple(operations),
            source_uri=self.base_uri,
            raw_document=document,
            warnings=tuple(self.warnings),
        )

    # -- document collection ------------------------------------------------

    def _collect(self, definitions: ET.Element, nsmap, base_uri, depth):
        if depth > MAX_RESOLVE_DEPTH:
            raise WsdlError("import resolution depth exceeded")
        types = definitions.findall(f"{{{WSDL_NS}}}types")
        for types_el in types:
            for schema_el in types_el.findall(f"{{{XSD_NS}}}schema"):
                self._add_schema(schema_el, nsmap, base_uri, depth)
        for message in definitions.findall(f"{{{WSDL_NS}}}message"):
            name = message.get("name")
            if name:
                self.messages.setdefault(name, message)
        for imp in definitions.findall(f"{{{WSDL_NS}}}import"):
            location = imp.get("location")
            if not location:
                continue
            self._load_wsdl_import(location, base_uri, depth)

    def _add_schema(self, schema_el, nsmap, base_uri, depth):
        self.schema_index.add(schema_el, nsmap)
        for child in schema_el:
            local = _local(child.tag)
            if local not in ("import", "include"):
                continue
            location = child.get("schemaLocation")
            if not location:
                if local == "import":
                    continue  # namespace-only import; must resolve elsewhere
                raise WsdlError("xs:include without schemaLocation")
            self._load_schema_location(location, base_uri, depth + 1)

    def _load_schema_location(self, location, base_uri, depth):
        if depth > MAX_RESOLVE_DEPTH:
            raise WsdlError("import resolution depth exceeded")
        resolved = resolve_location(base_uri, location)
        if resolved in self._loaded_locations:
            return
        self._loaded_locations.add(resolved)
        try:
            payload = read_location(resolved)
        except Exception as exc:
            raise WsdlError(f"unsupported import: {resolved} ({exc})") from exc
        root, nsmap = _parse_xml(payload, resolved)
        if _local(root.tag) != "schema" or _ns(root.tag) != XSD_NS:
            raise WsdlError(f"{resolved}: imported document is not an XML schema")
        self._add_schema(root, nsmap, resolved, depth)

    def _load_wsdl_import(self, location, base_uri, depth):
        resolved = resolve_location(base_uri, location)
        if resolved in self._loaded_locations:
            return
        self._loaded_locations.add(resolved)
        try:
            payload = read_location(resolved)
        except Exception as exc:
            raise WsdlError(f"unsupported import: {resolved} ({exc})") from exc
        root, nsmap = _parse_xml(payload, resolved)
        local = _local(root.tag)
        if local == "definitions":
            self._collect(root, nsmap, resolved, depth + 1)
        elif local == "schema":
            self._add_schema(root, nsmap, resolved, depth + 1)
        else:
            raise WsdlError(f"{resolved}: unsupported import target {root.tag}")

    # -- operations ----------------------------------------------------------

    def _build_operation(self, op_el: ET.Element, port_type: str) -> Operation:
        name = op_el.get("name")
        if not name:
            raise WsdlError(f"portType {port_type}: operation without a name")
        input_el = op_el.find(f"{{{WSDL_NS}}}input")
        output_el = op_el.find(f"{{{WSDL_NS}}}output")
        input_set = self._message_data_set(input_el, f"{port_type}/{name}/input")
        output_set = self._message_data_set(output_el, f"{port_type}/{name}/output")
        return Operation(
            name=name,
            name_sentence=tokenize(name),
            input=input_set,
            output=output_set,
            wsdl_id=f"{port_type}/{name}",
            port_type=port_type,
        )

    def _message_data_set(self, ref_el: ET.Element | None, where: str) -> DataSet:
        if ref_el is None:
            return EMPTY_DATA_SET
        message_qname = ref_el.get("message")
        if not message_qname:
            raise WsdlError(f"{where}: missing message attribute")
        ns, local = self.resolver.resolve(message_qname)
        message = self.messages.get(local)
        if message is None:
            raise WsdlError(f"{where}: unresolvable message reference {message_qname}")
        data = EMPTY_DATA_SET
        for part in message.findall(f"{{{WSDL_NS}}}part"):
            tree = self._part_tree(part, where)
            data = data.merge(flatten_element(tree))
        return data

    def _part_tree(self, part: ET.Element, where: str) -> SchemaElementTree:
        part_name = part.get("name", "part")
        element_ref = part.get("element")
        type_ref = part.get("type")
        if element_ref:
            ns, local = self.resolver.resolve(element_ref)
            decl, schema = self.schema_index.element(ns, local)
            if decl is None:
                raise WsdlError(
                    f"{where}: message part references missing element "
                    f"{{{ns}}}{local}"
                )
            return self._element_tree(decl, schema, depth=1)
        if type_ref:
            ns, local = self.resolver.resolve(type_ref)
            return self._typed_tree(part_name, ns, local, self.resolver, depth=1)
        raise WsdlError(f"{where}: part {part_name} has neither element nor type")

    # -- schema trees ----------------------------------------------------------

    def _element_tree(self, decl: ET.Element, schema: _Schema, depth: int) -> SchemaElementTree:
        name = decl.get("name")
        ref = decl.get("ref")
        if ref and not name:
            ns, local = schema.resolver.resolve(ref)
            target, target_schema = self.schema_index.element(ns, local)
            if target is None:
                raise WsdlError(f"unresolvable element reference {{{ns}}}{local}")
            return self._element_tree(target, target_schema, depth)
        if not name:
            raise WsdlError("schema element without name or ref")
        if depth >= MAX_TREE_DEPTH:
            self.warnings.append(
                f"element {name}: tree truncated at depth {MAX_TREE_DEPTH}"
            )
            return SchemaElementTree(name, SchemaKind.SIMPLE)

        type_ref = decl.get("type")
        if type_ref:
            ns, local = schema.resolver.resolve(type_ref)
            return self._typed_tree(name, ns, local, schema.resolver, depth)

        inline_complex = decl.find(f"{{{XSD_NS}}}complexType")
        if inline_complex is not None:
            children = self._complex_children(inline_complex, schema, depth)
            if children:
                return SchemaElementTree(name, SchemaKind.COMPLEX, children)
            return SchemaElementTree(name, SchemaKind.SIMPLE)
        inline_simple = decl.find(f"{{{XSD_NS}}}simpleType")
        if inline_simple is not None:
            return SchemaElementTree(
                name, SchemaKind.SIMPLE, type_name=self._simple_base(inline_simple, schema)
            )
        return SchemaElementTree(name, SchemaKind.SIMPLE)

    def _typed_tree(
        self, name: str, ns: str, local: str, resolver: _QNameResolver, depth: int
    ) -> SchemaElementTree:
        if ns == XSD_NS:
            return SchemaElementTree(name, SchemaKind.SIMPLE, type_name=local)
        complex_decl, schema = self.schema_index.complex_type(ns, local)
        if complex_decl is not None:
            if depth >= MAX_TREE_DEPTH:
                self.warnings.append(
                    f"element {name}: tree truncated at depth {MAX_TREE_DEPTH}"
                )
                return SchemaElementTree(name, SchemaKind.SIMPLE, type_name=local)
            children = self._complex_children(complex_decl, schema, depth)
            if children:
                return SchemaElementTree(name, SchemaKind.COMPLEX, children, type_name=local)
            return SchemaElementTree(name, SchemaKind.SIMPLE, type_name=local)
        simple_decl, schema = self.schema_index.simple_type(ns, local)
        if simple_decl is not None:
            return SchemaElementTree(
                name, SchemaKind.SIMPLE, type_name=self._simple_base(simple_decl, schema)
            )
        raise WsdlError(f"unresolvable type reference {{{ns}}}{local}")

    def _complex_children(
        self, complex_el: ET.Element, schema: _Schema, depth: int
    ) -> tuple[SchemaElementTree, ...]:
        children: list[SchemaElementTree] = []
        for group_tag in ("sequence", "all", "choice"):
            for group in complex_el.findall(f"{{{XSD_NS}}}{group_tag}"):
                children.extend(self._group_children(group, schema, depth))
        # complexContent extension/restriction: include the base type's shape
        content = complex_el.find(f"{{{XSD_NS}}}complexContent")
        if content is not None:
            for derivation in content:
                base_ref = derivation.get("base")
                if base_ref:
                    ns, local = schema.resolver.resolve(base_ref)
                    base_decl, base_schema = self.schema_index.complex_type(ns, local)
                    if base_decl is not None and depth < MAX_TREE_DEPTH:
                        children.extend(
                            self._complex_children(base_decl, base_schema, depth)
                        )
                for group_tag in ("sequence", "all", "choice"):
                    for group in derivation.findall(f"{{{XSD_NS}}}{group_tag}"):
                        children.extend(self._group_children(group, schema, depth))
        for attr in complex_el.findall(f"{{{XSD_NS}}}attribute"):
            attr_name = attr.get("name")
            if not attr_name:
                continue
            type_name = None
            type_ref = attr.get("type")
            if type_ref:
                ns, local = schema.resolver.resolve(type_ref)
                if ns == XSD_NS:
                    type_name = local
                else:
                    decl, decl_schema = self.schema_index.simple_type(ns, local)
                    type_name = (
                        self._simple_base(decl, decl_schema) if decl is not None else local
                    )
            children.append(
                SchemaElementTree(
                    attr_name, SchemaKind.SIMPLE, type_name=type_name, is_attribute=True
                )
            )
        return tuple(children)

    def _group_children(self, group, schema, depth):
        out = []
        for child in group:
            local = _local(child.tag)
            if local == "element":
                out.append(self._element_tree(child, schema, depth + 1))
            elif local in ("sequence", "all", "choice"):
                out.extend(self._group_children(child, schema, depth))
        return out

    def _simple_base(self, simple_el: ET.Element, schema: _Schema) -> str | None:
        restriction = simple_el.find(f"{{{XSD_NS}}}restriction")
        if restriction is None:
            return None
        base = restriction.get("base")
        if not base:
            return None
        ns, local = schema.resolver.resolve(base)
        if ns == XSD_NS:
            return local
        nested, nested_schema = self.schema_index.simple_type(ns, local)
        if nested is not None:
            return self._simple_base(nested, nested_schema)
        return local

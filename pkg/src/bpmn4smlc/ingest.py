"""XML codec for the extended workflow models.

Documents are standard BPMN 2.0: the ML data rides inside stock elements so
files stay schema-valid and open in ordinary BPMN tools. Concretely:

* tasks are ``serviceTask`` elements carrying extension-namespace attributes
  (``kind``, ``execution``, ``platform``, ``faasConfiguration``,
  ``offloadingTechnology``, ``mlPlatform``, ``script``, ``environment``);
* the fifteen ML event kinds sit in an ``<sml:event kind=".."
  payloadName=".."/>`` child of ``extensionElements``; Timer/Message/Signal/
  Error use the standard event definitions, a bare event is the plain none
  event, and every other standard definition is rejected;
* data objects and data stores carry ``<sml:artifact kind=".." .../>`` in
  their ``extensionElements``;
* flow conditions use the standard ``conditionExpression`` element with the
  mini-grammar ``<path> == <json-scalar>`` or the keyword ``default``;
* data associations are ``dataInputAssociation`` (Read) and
  ``dataOutputAssociation`` (Write) children of the owning task, pointing at
  the artifact via ``sourceRef``/``targetRef``.

Parsing is strict: unknown enumeration values, missing required attributes
and unsupported BPMN constructs fail with a diagnostic carrying the element
path. Serialization is canonical (fixed attribute order, 2-space indent, LF)
so equal models produce byte-identical documents, and
``parse(serialize(m))`` is structurally equal to ``m``.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .model import (
    DATA_OBJECT_KIND,
    AssociationDirection,
    Bpmn4smlModel,
    CodeObject,
    ConditionExpr,
    ConfigType,
    DataAssociation,
    DataObjectDecl,
    DataObjectKind,
    DataSetRole,
    DataStoreDecl,
    DataStoreKind,
    DocumentObject,
    DocumentType,
    EventKind,
    EventNode,
    EventPosition,
    ExecutionBinding,
    ExecutionMode,
    EXTENSION_EVENT_KINDS,
    FlowNode,
    GatewayDirection,
    GatewayKind,
    GatewayNode,
    Lane,
    LearningConfigurationObject,
    LogObject,
    MetadataObject,
    MLDataObject,
    MLDataType,
    MLModelObject,
    ModelError,
    ModelStatus,
    RepositoryType,
    SequenceFlow,
    TaskKind,
    TaskNode,
    assemble_model,
)

BPMN_NS = "http://www.omg.org/spec/BPMN/20100524/MODEL"
SML_NS = "http://bpmn4sml.org/ns/v1"

ET.register_namespace("bpmn", BPMN_NS)
ET.register_namespace("sml", SML_NS)


def _b(tag: str) -> str:
    return f"{{{BPMN_NS}}}{tag}"


def _s(tag: str) -> str:
    return f"{{{SML_NS}}}{tag}"


_PATH_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*$")

_EVENT_TAGS = {
    "startEvent": EventPosition.START,
    "intermediateCatchEvent": EventPosition.INTERMEDIATE_CATCH,
    "intermediateThrowEvent": EventPosition.INTERMEDIATE_THROW,
    "endEvent": EventPosition.END,
}
_EVENT_TAG_BY_POSITION = {v: k for k, v in _EVENT_TAGS.items()}

_STANDARD_EVENT_DEFS = {
    "timerEventDefinition": EventKind.TIMER,
    "messageEventDefinition": EventKind.MESSAGE,
    "signalEventDefinition": EventKind.SIGNAL,
    "errorEventDefinition": EventKind.ERROR,
}
_STANDARD_DEF_BY_KIND = {v: k for k, v in _STANDARD_EVENT_DEFS.items()}

_GATEWAY_TAGS = {
    "exclusiveGateway": GatewayKind.EXCLUSIVE,
    "parallelGateway": GatewayKind.PARALLEL,
}
_GATEWAY_TAG_BY_KIND = {v: k for k, v in _GATEWAY_TAGS.items()}

# Known but unsupported BPMN constructs, rejected with a clear diagnostic.
_UNSUPPORTED_PROCESS_ELEMENTS = {
    "task",
    "userTask",
    "manualTask",
    "scriptTask",
    "sendTask",
    "receiveTask",
    "businessRuleTask",
    "callActivity",
    "subProcess",
    "adHocSubProcess",
    "transaction",
    "boundaryEvent",
    "inclusiveGateway",
    "complexGateway",
    "eventBasedGateway",
}

# Extension attributes defined per data object kind: (required, optional).
_OBJECT_ATTRS: dict[DataObjectKind, tuple[tuple[str, ...], tuple[str, ...]]] = {
    DataObjectKind.ML_MODEL: (("identifier",), ("status",)),
    DataObjectKind.ML_DATA: (("identifier", "dataObjectType"), ("dataSetType",)),
    DataObjectKind.CODE: (("identifier", "operation"), ()),
    DataObjectKind.LEARNING_CONFIGURATION: (("identifier", "configuration", "configType"), ()),
    DataObjectKind.LOG: (("logContent",), ()),
    DataObjectKind.METADATA: (("association", "location"), ("description",)),
    DataObjectKind.DOCUMENT: (("identifier", "documentContent", "documentType"), ()),
}


@dataclass(frozen=True)
class SourceDocument:
    data: bytes
    uri: str | None = None


@dataclass(frozen=True)
class IngestDiagnostic:
    code: str
    element_path: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} at {self.element_path}: {self.message}"


class IngestError(Exception):
    def __init__(self, diagnostic: IngestDiagnostic):
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))


class MalformedXml(IngestError):
    def __init__(self, path: str, message: str):
        super().__init__(IngestDiagnostic("malformed-xml", path, message))


class UnknownKind(IngestError):
    def __init__(self, value: str, path: str, message: str = ""):
        self.value = value
        super().__init__(
            IngestDiagnostic("unknown-kind", path, message or f"unknown value {value!r}")
        )


class MissingAttribute(IngestError):
    def __init__(self, name: str, path: str):
        self.name = name
        super().__init__(
            IngestDiagnostic("missing-attribute", path, f"required attribute {name!r} is missing")
        )


class UnexpectedAttribute(IngestError):
    def __init__(self, name: str, path: str, message: str):
        self.name = name
        super().__init__(IngestDiagnostic("unexpected-attribute", path, message))


class MalformedCondition(IngestError):
    def __init__(self, path: str, message: str):
        super().__init__(IngestDiagnostic("malformed-condition", path, message))


class UnsupportedConstruct(IngestError):
    def __init__(self, path: str, message: str):
        super().__init__(IngestDiagnostic("unsupported-construct", path, message))


def load_file(path: str) -> SourceDocument:
    with open(path, "rb") as handle:
        return SourceDocument(data=handle.read(), uri=path)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1] if "}" in tag else tag


def _ns(tag: str) -> str:
    return tag.split("}", 1)[0][1:] if tag.startswith("{") else ""


class _Cursor:
    """Element plus its absolute path, for diagnostics."""

    def __init__(self, element: ET.Element, path: str):
        self.element = element
        self.path = path

    def children(self) -> list[_Cursor]:
        counters: dict[str, int] = {}
        out = []
        for child in self.element:
            local = _local(child.tag)
            counters[local] = counters.get(local, 0) + 1
            out.append(_Cursor(child, f"{self.path}/{local}[{counters[local]}]"))
        return out

    def attr(self, name: str, namespace: str | None = None) -> str | None:
        key = f"{{{namespace}}}{name}" if namespace else name
        return self.element.attrib.get(key)

    def require(self, name: str, namespace: str | None = None) -> str:
        value = self.attr(name, namespace)
        if value is None:
            raise MissingAttribute(name, self.path)
        return value

    def enum(self, enum_type, name: str, namespace: str | None = None, required: bool = True):
        value = self.attr(name, namespace)
        if value is None:
            if required:
                raise MissingAttribute(name, self.path)
            return None
        try:
            return enum_type(value)
        except ValueError:
            raise UnknownKind(value, self.path, f"{name}={value!r} is not a known value") from None


def _parse_condition(text: str, path: str) -> ConditionExpr:
    body = (text or "").strip()
    if not body:
        raise MalformedCondition(path, "empty condition expression")
    if body == "default":
        return ConditionExpr(is_default=True)
    selector, sep, literal_text = body.partition("==")
    if not sep:
        raise MalformedCondition(path, f"expected '<path> == <literal>' or 'default', got {body!r}")
    selector = selector.strip()
    literal_text = literal_text.strip()
    if not _PATH_RE.match(selector):
        raise MalformedCondition(path, f"invalid payload selector {selector!r}")
    try:
        literal = json.loads(literal_text)
    except json.JSONDecodeError:
        raise MalformedCondition(
            path, f"literal {literal_text!r} is not a JSON string, number or boolean"
        ) from None
    if literal is None or isinstance(literal, (dict, list)):
        raise MalformedCondition(path, f"literal {literal_text!r} must be a scalar")
    return ConditionExpr(path=selector, literal=literal)


def _format_condition(condition: ConditionExpr) -> str:
    if condition.is_default:
        return "default"
    return f"{condition.path} == {json.dumps(condition.literal)}"


def _find_sml_child(cursor: _Cursor, tag: str) -> _Cursor | None:
    for child in cursor.children():
        if child.element.tag == _b("extensionElements"):
            for ext in child.children():
                if ext.element.tag == _s(tag):
                    return ext
    return None


def _parse_task(cursor: _Cursor) -> tuple[TaskNode, list[DataAssociation]]:
    task_id = cursor.require("id")
    name = cursor.attr("name") or ""
    kind = cursor.enum(TaskKind, "kind", SML_NS)
    mode = cursor.enum(ExecutionMode, "execution", SML_NS)
    binding = ExecutionBinding(
        mode=mode,
        platform=cursor.attr("platform", SML_NS),
        faas_configuration=cursor.attr("faasConfiguration", SML_NS),
        offloading_technology=cursor.attr("offloadingTechnology", SML_NS),
        ml_platform=cursor.attr("mlPlatform", SML_NS),
        script=cursor.attr("script", SML_NS),
    )
    task = TaskNode(
        id=task_id,
        name=name,
        kind=kind,
        execution=binding,
        environment=cursor.attr("environment", SML_NS),
    )

    associations: list[DataAssociation] = []
    for child in cursor.children():
        tag = _local(child.element.tag)
        if tag == "dataInputAssociation" or tag == "dataOutputAssociation":
            assoc_id = child.require("id")
            ref_tag = "sourceRef" if tag == "dataInputAssociation" else "targetRef"
            ref = None
            for ref_child in child.children():
                if _local(ref_child.element.tag) == ref_tag:
                    ref = (ref_child.element.text or "").strip()
            if not ref:
                raise MissingAttribute(ref_tag, child.path)
            direction = (
                AssociationDirection.READ
                if tag == "dataInputAssociation"
                else AssociationDirection.WRITE
            )
            associations.append(
                DataAssociation(id=assoc_id, task=task_id, artifact=ref, direction=direction)
            )
        elif tag == "extensionElements":
            continue
        else:
            raise UnsupportedConstruct(child.path, f"unsupported task child element {tag!r}")
    return task, associations


def _parse_event(cursor: _Cursor, position: EventPosition) -> EventNode:
    event_id = cursor.require("id")
    name = cursor.attr("name") or ""
    sml_event = _find_sml_child(cursor, "event")
    standard_kinds: list[EventKind] = []
    for child in cursor.children():
        tag = _local(child.element.tag)
        if tag in _STANDARD_EVENT_DEFS:
            standard_kinds.append(_STANDARD_EVENT_DEFS[tag])
        elif tag.endswith("EventDefinition"):
            raise UnsupportedConstruct(child.path, f"unsupported event definition {tag!r}")

    if sml_event is not None and standard_kinds:
        raise UnsupportedConstruct(
            cursor.path, "event mixes an ML event kind with a standard event definition"
        )
    if len(standard_kinds) > 1:
        raise UnsupportedConstruct(cursor.path, "event carries multiple event definitions")

    if sml_event is not None:
        kind = sml_event.enum(EventKind, "kind")
        if kind not in EXTENSION_EVENT_KINDS:
            raise UnknownKind(
                kind.value, sml_event.path, f"kind {kind.value!r} is not an ML event kind"
            )
        payload = sml_event.attr("payloadName")
    elif standard_kinds:
        kind = standard_kinds[0]
        payload = cursor.attr("payloadName", SML_NS)
    else:
        kind = EventKind.PLAIN_NONE
        payload = cursor.attr("payloadName", SML_NS)
    return EventNode(id=event_id, name=name, kind=kind, position=position, payload_name=payload)


def _parse_artifact_object(cursor: _Cursor) -> DataObjectDecl:
    object_id = cursor.require("id")
    name = cursor.attr("name") or ""
    artifact = _find_sml_child(cursor, "artifact")
    if artifact is None:
        raise MissingAttribute("sml:artifact", cursor.path)
    kind = artifact.enum(DataObjectKind, "kind")
    required, optional = _OBJECT_ATTRS[kind]
    allowed = set(required) | set(optional) | {"kind"}
    for attr_name in artifact.element.attrib:
        if _local(attr_name) not in allowed:
            raise UnexpectedAttribute(
                _local(attr_name),
                artifact.path,
                f"attribute {_local(attr_name)!r} is not defined for kind {kind.value!r}",
            )
    get = artifact.require
    opt = artifact.attr
    if kind is DataObjectKind.ML_MODEL:
        return MLModelObject(
            id=object_id,
            name=name,
            identifier=get("identifier"),
            status=artifact.enum(ModelStatus, "status", required=False),
        )
    if kind is DataObjectKind.ML_DATA:
        return MLDataObject(
            id=object_id,
            name=name,
            identifier=get("identifier"),
            data_object_type=artifact.enum(MLDataType, "dataObjectType"),
            data_set_type=artifact.enum(DataSetRole, "dataSetType", required=False),
        )
    if kind is DataObjectKind.CODE:
        return CodeObject(id=object_id, name=name, identifier=get("identifier"), operation=get("operation"))
    if kind is DataObjectKind.LEARNING_CONFIGURATION:
        return LearningConfigurationObject(
            id=object_id,
            name=name,
            identifier=get("identifier"),
            configuration=get("configuration"),
            config_type=artifact.enum(ConfigType, "configType"),
        )
    if kind is DataObjectKind.LOG:
        return LogObject(id=object_id, name=name, log_content=get("logContent"))
    if kind is DataObjectKind.METADATA:
        return MetadataObject(
            id=object_id,
            name=name,
            association=get("association"),
            location=get("location"),
            description=opt("description"),
        )
    return DocumentObject(
        id=object_id,
        name=name,
        identifier=get("identifier"),
        document_content=get("documentContent"),
        document_type=artifact.enum(DocumentType, "documentType"),
    )


def _parse_data_store(cursor: _Cursor) -> DataStoreDecl:
    store_id = cursor.require("id")
    name = cursor.attr("name") or ""
    artifact = _find_sml_child(cursor, "artifact")
    if artifact is None:
        raise MissingAttribute("sml:artifact", cursor.path)
    kind = artifact.enum(DataStoreKind, "kind")
    repository_type = artifact.enum(RepositoryType, "repositoryType", required=False)
    if kind is DataStoreKind.DATA_REPOSITORY and repository_type is None:
        raise MissingAttribute("repositoryType", artifact.path)
    if kind is not DataStoreKind.DATA_REPOSITORY and repository_type is not None:
        raise UnexpectedAttribute(
            "repositoryType",
            artifact.path,
            f"repositoryType is not defined for kind {kind.value!r}",
        )
    return DataStoreDecl(
        id=store_id,
        name=name,
        kind=kind,
        placement=artifact.require("placement"),
        platform=artifact.attr("platform"),
        repository_type=repository_type,
    )


def _parse_lanes(cursor: _Cursor) -> list[Lane]:
    lanes: list[Lane] = []
    for lane_cursor in cursor.children():
        if _local(lane_cursor.element.tag) != "lane":
            continue
        members = []
        for ref in lane_cursor.children():
            if _local(ref.element.tag) == "flowNodeRef":
                members.append((ref.element.text or "").strip())
        lanes.append(Lane(name=lane_cursor.attr("name") or "", members=tuple(members)))
    return lanes


def parse(doc: SourceDocument) -> Bpmn4smlModel:
    """Decode a document into an assembled model.

    Raises an IngestError subtype with an element path for every fault;
    structural model errors from assembly propagate unchanged.
    """
    try:
        root = ET.fromstring(doc.data)
    except ET.ParseError as exc:
        raise MalformedXml("/", f"document is not well-formed XML: {exc}") from None

    root_cursor = _Cursor(root, "/definitions")
    if root.tag != _b("definitions"):
        raise MalformedXml("/", f"root element must be BPMN definitions, got {_local(root.tag)!r}")

    processes = [c for c in root_cursor.children() if c.element.tag == _b("process")]
    if len(processes) != 1:
        raise UnsupportedConstruct(
            root_cursor.path, f"expected exactly one process element, found {len(processes)}"
        )
    process = processes[0]
    process_id = process.require("id")
    process_name = process.attr("name") or ""

    data_stores: list[DataStoreDecl] = []
    for child in root_cursor.children():
        tag = child.element.tag
        if _ns(tag) != BPMN_NS:
            continue  # diagram interchange and foreign extensions are dropped
        local = _local(tag)
        if local == "dataStore":
            data_stores.append(_parse_data_store(child))
        elif local not in {"process"}:
            raise UnsupportedConstruct(child.path, f"unsupported definitions child {local!r}")

    # Flow counts are needed to infer gateway direction when the document
    # does not spell it out.
    raw_outgoing: dict[str, int] = {}
    raw_incoming: dict[str, int] = {}
    for child in process.children():
        if child.element.tag == _b("sequenceFlow"):
            source = child.attr("sourceRef")
            target = child.attr("targetRef")
            if source:
                raw_outgoing[source] = raw_outgoing.get(source, 0) + 1
            if target:
                raw_incoming[target] = raw_incoming.get(target, 0) + 1

    nodes: list[FlowNode] = []
    flows: list[SequenceFlow] = []
    data_objects: list[DataObjectDecl] = []
    associations: list[DataAssociation] = []
    lanes: list[Lane] = []

    for child in process.children():
        tag = child.element.tag
        if _ns(tag) != BPMN_NS:
            continue
        local = _local(tag)
        if local == "serviceTask":
            task, task_associations = _parse_task(child)
            nodes.append(task)
            associations.extend(task_associations)
        elif local in _EVENT_TAGS:
            nodes.append(_parse_event(child, _EVENT_TAGS[local]))
        elif local in _GATEWAY_TAGS:
            gw_id = child.require("id")
            direction_attr = child.attr("gatewayDirection")
            if direction_attr in ("Diverging", "Converging"):
                direction = GatewayDirection(direction_attr)
            elif direction_attr not in (None, "Unspecified"):
                raise UnknownKind(direction_attr, child.path, "unsupported gatewayDirection")
            else:
                out_n = raw_outgoing.get(gw_id, 0)
                in_n = raw_incoming.get(gw_id, 0)
                if out_n > 1 and in_n <= 1:
                    direction = GatewayDirection.DIVERGING
                elif in_n > 1 and out_n <= 1:
                    direction = GatewayDirection.CONVERGING
                else:
                    raise MissingAttribute("gatewayDirection", child.path)
            nodes.append(
                GatewayNode(
                    id=gw_id,
                    name=child.attr("name") or "",
                    gateway_kind=_GATEWAY_TAGS[local],
                    direction=direction,
                )
            )
        elif local == "sequenceFlow":
            flow_id = child.require("id")
            source = child.require("sourceRef")
            target = child.require("targetRef")
            condition = None
            for sub in child.children():
                if _local(sub.element.tag) == "conditionExpression":
                    condition = _parse_condition(sub.element.text or "", sub.path)
            flows.append(SequenceFlow(id=flow_id, source=source, target=target, condition=condition))
        elif local == "dataObject":
            data_objects.append(_parse_artifact_object(child))
        elif local == "laneSet":
            lanes.extend(_parse_lanes(child))
        elif local in _UNSUPPORTED_PROCESS_ELEMENTS:
            raise UnsupportedConstruct(child.path, f"unsupported BPMN construct {local!r}")
        elif local in {"documentation", "extensionElements", "dataObjectReference"}:
            continue
        else:
            raise UnsupportedConstruct(child.path, f"unsupported process child {local!r}")

    # Conditions only make sense on branches of a diverging exclusive gateway.
    node_index = {n.id: n for n in nodes}
    for flow in flows:
        if flow.condition is None:
            continue
        source = node_index.get(flow.source)
        if not (
            isinstance(source, GatewayNode)
            and source.gateway_kind is GatewayKind.EXCLUSIVE
            and source.direction is GatewayDirection.DIVERGING
        ):
            raise MalformedCondition(
                f"/definitions/process[1]",
                f"flow {flow.id!r} carries a condition but its source is not a diverging exclusive gateway",
            )
    defaults: dict[str, int] = {}
    for flow in flows:
        if flow.condition is not None and flow.condition.is_default:
            defaults[flow.source] = defaults.get(flow.source, 0) + 1
    for gateway_id, count in defaults.items():
        if count > 1:
            raise MalformedCondition(
                "/definitions/process[1]",
                f"gateway {gateway_id!r} has more than one default flow",
            )

    return assemble_model(
        process_id=process_id,
        name=process_name,
        nodes=nodes,
        flows=flows,
        data_objects=data_objects,
        data_stores=data_stores,
        associations=associations,
        lanes=lanes,
    )


def parse_bytes(data: bytes, uri: str | None = None) -> Bpmn4smlModel:
    return parse(SourceDocument(data=data, uri=uri))


def _write_binding(element: ET.Element, task: TaskNode) -> None:
    element.set(_s("kind"), task.kind.value)
    element.set(_s("execution"), task.execution.mode.value)
    for attr, value in (
        ("platform", task.execution.platform),
        ("faasConfiguration", task.execution.faas_configuration),
        ("offloadingTechnology", task.execution.offloading_technology),
        ("mlPlatform", task.execution.ml_platform),
        ("script", task.execution.script),
        ("environment", task.environment),
    ):
        if value is not None:
            element.set(_s(attr), value)


def _object_artifact_attrs(obj: DataObjectDecl) -> dict[str, str]:
    kind = DATA_OBJECT_KIND[type(obj)]
    attrs: dict[str, str] = {"kind": kind.value}
    if isinstance(obj, MLModelObject):
        attrs["identifier"] = obj.identifier
        if obj.status is not None:
            attrs["status"] = obj.status.value
    elif isinstance(obj, MLDataObject):
        attrs["identifier"] = obj.identifier
        attrs["dataObjectType"] = obj.data_object_type.value
        if obj.data_set_type is not None:
            attrs["dataSetType"] = obj.data_set_type.value
    elif isinstance(obj, CodeObject):
        attrs["identifier"] = obj.identifier
        attrs["operation"] = obj.operation
    elif isinstance(obj, LearningConfigurationObject):
        attrs["identifier"] = obj.identifier
        attrs["configuration"] = obj.configuration
        attrs["configType"] = obj.config_type.value
    elif isinstance(obj, LogObject):
        attrs["logContent"] = obj.log_content
    elif isinstance(obj, MetadataObject):
        attrs["association"] = obj.association
        attrs["location"] = obj.location
        if obj.description is not None:
            attrs["description"] = obj.description
    elif isinstance(obj, DocumentObject):
        attrs["identifier"] = obj.identifier
        attrs["documentContent"] = obj.document_content
        attrs["documentType"] = obj.document_type.value
    return attrs


def serialize(model: Bpmn4smlModel) -> SourceDocument:
    """Encode a valid model as a canonical UTF-8 document."""
    root = ET.Element(_b("definitions"))
    root.set("targetNamespace", SML_NS)
    process = ET.SubElement(root, _b("process"))
    process.set("id", model.process_id)
    if model.name:
        process.set("name", model.name)

    if model.lanes:
        lane_set = ET.SubElement(process, _b("laneSet"))
        lane_set.set("id", f"{model.process_id}_lanes")
        for index, lane in enumerate(model.lanes, start=1):
            lane_el = ET.SubElement(lane_set, _b("lane"))
            lane_el.set("id", f"{model.process_id}_lane_{index}")
            if lane.name:
                lane_el.set("name", lane.name)
            for member in lane.members:
                ref = ET.SubElement(lane_el, _b("flowNodeRef"))
                ref.text = member

    associations_by_task: dict[str, list[DataAssociation]] = {}
    for assoc in model.associations:
        associations_by_task.setdefault(assoc.task, []).append(assoc)

    for node in model.nodes.values():
        if isinstance(node, TaskNode):
            el = ET.SubElement(process, _b("serviceTask"))
            el.set("id", node.id)
            if node.name:
                el.set("name", node.name)
            _write_binding(el, node)
            for assoc in associations_by_task.get(node.id, ()):
                if assoc.direction is AssociationDirection.READ:
                    assoc_el = ET.SubElement(el, _b("dataInputAssociation"))
                    assoc_el.set("id", assoc.id)
                    ref = ET.SubElement(assoc_el, _b("sourceRef"))
                else:
                    assoc_el = ET.SubElement(el, _b("dataOutputAssociation"))
                    assoc_el.set("id", assoc.id)
                    ref = ET.SubElement(assoc_el, _b("targetRef"))
                ref.text = assoc.artifact
        elif isinstance(node, EventNode):
            el = ET.SubElement(process, _b(_EVENT_TAG_BY_POSITION[node.position]))
            el.set("id", node.id)
            if node.name:
                el.set("name", node.name)
            if node.kind in EXTENSION_EVENT_KINDS:
                ext = ET.SubElement(el, _b("extensionElements"))
                event_el = ET.SubElement(ext, _s("event"))
                event_el.set("kind", node.kind.value)
                if node.payload_name is not None:
                    event_el.set("payloadName", node.payload_name)
            else:
                if node.payload_name is not None:
                    el.set(_s("payloadName"), node.payload_name)
                if node.kind is not EventKind.PLAIN_NONE:
                    ET.SubElement(el, _b(_STANDARD_DEF_BY_KIND[node.kind]))
        else:
            el = ET.SubElement(process, _b(_GATEWAY_TAG_BY_KIND[node.gateway_kind]))
            el.set("id", node.id)
            if node.name:
                el.set("name", node.name)
            el.set("gatewayDirection", node.direction.value)

    for flow in model.flows:
        el = ET.SubElement(process, _b("sequenceFlow"))
        el.set("id", flow.id)
        el.set("sourceRef", flow.source)
        el.set("targetRef", flow.target)
        if flow.condition is not None:
            cond = ET.SubElement(el, _b("conditionExpression"))
            cond.text = _format_condition(flow.condition)

    for obj in model.data_objects.values():
        el = ET.SubElement(process, _b("dataObject"))
        el.set("id", obj.id)
        if obj.name:
            el.set("name", obj.name)
        ext = ET.SubElement(el, _b("extensionElements"))
        artifact = ET.SubElement(ext, _s("artifact"))
        for key, value in _object_artifact_attrs(obj).items():
            artifact.set(key, value)

    for store in model.data_stores.values():
        el = ET.SubElement(root, _b("dataStore"))
        el.set("id", store.id)
        if store.name:
            el.set("name", store.name)
        ext = ET.SubElement(el, _b("extensionElements"))
        artifact = ET.SubElement(ext, _s("artifact"))
        artifact.set("kind", store.kind.value)
        artifact.set("placement", store.placement)
        if store.platform is not None:
            artifact.set("platform", store.platform)
        if store.repository_type is not None:
            artifact.set("repositoryType", store.repository_type.value)

    tree = ET.ElementTree(root)
    ET.indent(tree, space="  ")
    text = ET.tostring(root, encoding="unicode", xml_declaration=True)
    if not text.endswith("\n"):
        text += "\n"
    return SourceDocument(data=text.encode("utf-8"), uri=None)

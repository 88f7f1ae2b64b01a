"""In-memory process graph for serverless ML workflows.

The model is the single source of truth consumed by the validator, the
orchestration extractor and the topology mapper. Values are immutable once
assembled and safe to share across threads; assembly itself is
single-threaded and fails fast on the first structural inconsistency.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Union


class TaskKind(str, Enum):
    GENERIC_FAAS = "GenericFaaS"
    GENERIC_OFFLOADED = "GenericOffloaded"
    JOB_CONFIGURATION = "JobConfiguration"
    DATA_SOURCING = "DataSourcing"
    DATA_VALIDATION = "DataValidation"
    DATA_FUSION = "DataFusion"
    PREPROCESSING = "Preprocessing"
    FEATURE_ENGINEERING = "FeatureEngineering"
    FEATURE_ENRICHMENT = "FeatureEnrichment"
    DATA_SPLIT = "DataSplit"
    TRAINING = "Training"
    SCORING = "Scoring"
    EVALUATION = "Evaluation"
    TUNING = "Tuning"
    TRANSFER_LEARNING = "TransferLearning"
    VOTING = "Voting"
    VERIFICATION = "Verification"
    DEPLOYMENT = "Deployment"
    DEPRECATION = "Deprecation"
    INFERENCE = "Inference"
    MODEL_SELECTION = "ModelSelection"
    EXPLANATION = "Explanation"
    MONITORING = "Monitoring"


class EventKind(str, Enum):
    DATA_SOURCE = "DataSource"
    RAW_DATA_UPDATE = "RawDataUpdate"
    FEATURE_SET_UPDATE = "FeatureSetUpdate"
    DATASET_UPDATE = "DatasetUpdate"
    REQUIREMENT_UPDATE = "RequirementUpdate"
    DATA_DRIFT = "DataDrift"
    CONCEPT_DRIFT = "ConceptDrift"
    PERFORMANCE_DEFICIT = "PerformanceDeficit"
    VERIFICATION = "Verification"
    VERIFICATION_FAILURE = "VerificationFailure"
    DEPLOYMENT = "Deployment"
    DEPRECATION = "Deprecation"
    INFERENCE = "Inference"
    OPERATION_DEGRADATION = "OperationDegradation"
    JOB_OFFLOADING = "JobOffloading"
    # Standard BPMN kinds kept because scheduled/manual/broadcast/error
    # triggers map onto them; every other standard definition is rejected
    # at ingest.
    PLAIN_NONE = "PlainNone"
    TIMER = "Timer"
    MESSAGE = "Message"
    SIGNAL = "Signal"
    ERROR = "Error"


#: The 15 ML-specific event kinds (everything except the standard BPMN ones).
EXTENSION_EVENT_KINDS: frozenset[EventKind] = frozenset(
    k
    for k in EventKind
    if k
    not in {
        EventKind.PLAIN_NONE,
        EventKind.TIMER,
        EventKind.MESSAGE,
        EventKind.SIGNAL,
        EventKind.ERROR,
    }
)

#: Event kinds announcing a repository update; these are the only legal
#: triggers in event-driven topology mapping.
STORE_UPDATE_EVENT_KINDS: frozenset[EventKind] = frozenset(
    {EventKind.RAW_DATA_UPDATE, EventKind.FEATURE_SET_UPDATE, EventKind.DATASET_UPDATE}
)


class EventPosition(str, Enum):
    START = "Start"
    INTERMEDIATE_CATCH = "IntermediateCatch"
    INTERMEDIATE_THROW = "IntermediateThrow"
    END = "End"


class ExecutionMode(str, Enum):
    FAAS = "faas"
    OFFLOADED = "offloaded"


class GatewayKind(str, Enum):
    EXCLUSIVE = "Exclusive"
    PARALLEL = "Parallel"


class GatewayDirection(str, Enum):
    DIVERGING = "Diverging"
    CONVERGING = "Converging"


class AssociationDirection(str, Enum):
    READ = "Read"
    WRITE = "Write"


class DataObjectKind(str, Enum):
    ML_MODEL = "MLModel"
    ML_DATA = "MLData"
    CODE = "Code"
    LEARNING_CONFIGURATION = "LearningConfiguration"
    LOG = "Log"
    METADATA = "Metadata"
    DOCUMENT = "Document"


class DataStoreKind(str, Enum):
    MODEL_REGISTRY = "ModelRegistry"
    LOG_STORE = "LogStore"
    METADATA_REPOSITORY = "MetadataRepository"
    DATA_REPOSITORY = "DataRepository"


class ModelStatus(str, Enum):
    TRAINED = "trained"
    VERIFIED = "verified"
    DEPLOYED = "deployed"
    DEPRECATED = "deprecated"


class MLDataType(str, Enum):
    RAW_DATA = "RawData"
    FEATURE_SET = "FeatureSet"
    FULL_DATA_SET = "FullDataSet"


class DataSetRole(str, Enum):
    TRAINING = "Training"
    VALIDATION = "Validation"
    VERIFICATION = "Verification"
    INFERENCE_REQUEST = "InferenceRequest"


class ConfigType(str, Enum):
    TRAINING = "Training"
    EVALUATION = "Evaluation"
    TUNING = "Tuning"


class DocumentType(str, Enum):
    REQUIREMENT_DOCUMENT = "RequirementDocument"
    TUNING_RESULT = "TuningResult"
    EVALUATION_RESULT = "EvaluationResult"
    DEFICIT_REPORT = "DeficitReport"
    VERIFICATION_RESULT = "VerificationResult"
    INFERENCE_RESULT = "InferenceResult"
    MODEL_AND_DATA_STATISTICS = "ModelAndDataStatistics"
    MODEL_EXPLANATION = "ModelExplanation"


class RepositoryType(str, Enum):
    RAW_DATA = "RawData"
    FEATURE_SET = "FeatureSet"
    DATA_SET = "DataSet"


@dataclass(frozen=True)
class ExecutionBinding:
    """How a task runs: as a serverless function or as an offloaded job.

    Attribute completeness per mode is intentionally not enforced here;
    the validator reports incomplete bindings (rule R-V1) so that broken
    models can be represented, inspected and diagnosed.
    """

    mode: ExecutionMode
    platform: str | None = None
    faas_configuration: str | None = None
    offloading_technology: str | None = None
    ml_platform: str | None = None
    script: str | None = None


@dataclass(frozen=True)
class TaskNode:
    id: str
    name: str
    kind: TaskKind
    execution: ExecutionBinding
    environment: str | None = None


@dataclass(frozen=True)
class EventNode:
    id: str
    name: str
    kind: EventKind
    position: EventPosition
    payload_name: str | None = None


@dataclass(frozen=True)
class GatewayNode:
    id: str
    name: str
    gateway_kind: GatewayKind
    direction: GatewayDirection


FlowNode = Union[TaskNode, EventNode, GatewayNode]


@dataclass(frozen=True)
class ConditionExpr:
    """Equality test against a dot-separated payload selector, or `default`."""

    is_default: bool = False
    path: str | None = None
    literal: str | int | float | bool | None = None

    def __post_init__(self) -> None:
        if self.is_default:
            if self.path is not None or self.literal is not None:
                raise ValueError("default condition must not carry a path or literal")
        else:
            if not self.path:
                raise ValueError("non-default condition requires a path")
            if self.literal is None:
                raise ValueError("non-default condition requires a literal")


@dataclass(frozen=True)
class SequenceFlow:
    id: str
    source: str
    target: str
    condition: ConditionExpr | None = None


@dataclass(frozen=True)
class MLModelObject:
    id: str
    name: str
    identifier: str
    status: ModelStatus | None = None


@dataclass(frozen=True)
class MLDataObject:
    id: str
    name: str
    identifier: str
    data_object_type: MLDataType
    # A data_set_type on anything but a FullDataSet is reported by the
    # validator (R-V3), not rejected here.
    data_set_type: DataSetRole | None = None


@dataclass(frozen=True)
class CodeObject:
    id: str
    name: str
    identifier: str
    operation: str


@dataclass(frozen=True)
class LearningConfigurationObject:
    id: str
    name: str
    identifier: str
    configuration: str
    config_type: ConfigType


@dataclass(frozen=True)
class LogObject:
    id: str
    name: str
    log_content: str


@dataclass(frozen=True)
class MetadataObject:
    id: str
    name: str
    association: str
    location: str
    description: str | None = None


@dataclass(frozen=True)
class DocumentObject:
    id: str
    name: str
    identifier: str
    document_content: str
    document_type: DocumentType


DataObjectDecl = Union[
    MLModelObject,
    MLDataObject,
    CodeObject,
    LearningConfigurationObject,
    LogObject,
    MetadataObject,
    DocumentObject,
]

#: Wire/kind tag per data object class, shared with the XML codec.
DATA_OBJECT_KIND: dict[type, DataObjectKind] = {
    MLModelObject: DataObjectKind.ML_MODEL,
    MLDataObject: DataObjectKind.ML_DATA,
    CodeObject: DataObjectKind.CODE,
    LearningConfigurationObject: DataObjectKind.LEARNING_CONFIGURATION,
    LogObject: DataObjectKind.LOG,
    MetadataObject: DataObjectKind.METADATA,
    DocumentObject: DataObjectKind.DOCUMENT,
}


@dataclass(frozen=True)
class DataStoreDecl:
    id: str
    name: str
    kind: DataStoreKind
    placement: str
    platform: str | None = None
    repository_type: RepositoryType | None = None

    def __post_init__(self) -> None:
        if self.kind is DataStoreKind.DATA_REPOSITORY:
            if self.repository_type is None:
                raise ValueError(f"data repository {self.id!r} requires a repositoryType")
        elif self.repository_type is not None:
            raise ValueError(f"repositoryType is only defined for data repositories ({self.id!r})")


#: Placement value marking a store that lives outside the deployed topology.
EXTERNAL_PLACEMENT = "external"


@dataclass(frozen=True)
class DataAssociation:
    id: str
    task: str
    artifact: str
    direction: AssociationDirection


@dataclass(frozen=True)
class Lane:
    name: str
    members: tuple[str, ...] = ()


class ModelError(Exception):
    """Base class for structural model failures."""


class DuplicateIdError(ModelError):
    def __init__(self, element_id: str):
        self.element_id = element_id
        super().__init__(f"duplicate identifier {element_id!r}")


class DanglingReferenceError(ModelError):
    def __init__(self, from_id: str, to_id: str):
        self.from_id = from_id
        self.to_id = to_id
        super().__init__(f"{from_id!r} references unknown element {to_id!r}")


class LaneConflictError(ModelError):
    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"node {node_id!r} belongs to more than one lane")


class UnknownElementError(ModelError):
    def __init__(self, element_id: str):
        self.element_id = element_id
        super().__init__(f"unknown element {element_id!r}")


class NotATaskError(ModelError):
    def __init__(self, element_id: str):
        self.element_id = element_id
        super().__init__(f"element {element_id!r} is not a task")


@dataclass(frozen=True)
class Bpmn4smlModel:
    """A fully assembled, referentially closed process graph.

    Collections preserve document order. Use :func:`assemble_model` instead
    of constructing directly; it checks the structural invariants and
    canonicalizes association order.
    """

    process_id: str
    name: str
    nodes: dict[str, FlowNode] = field(default_factory=dict)
    flows: tuple[SequenceFlow, ...] = ()
    data_objects: dict[str, DataObjectDecl] = field(default_factory=dict)
    data_stores: dict[str, DataStoreDecl] = field(default_factory=dict)
    associations: tuple[DataAssociation, ...] = ()
    lanes: tuple[Lane, ...] = ()

    def node(self, node_id: str) -> FlowNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownElementError(node_id) from None

    def tasks(self) -> list[TaskNode]:
        return [n for n in self.nodes.values() if isinstance(n, TaskNode)]

    def events(self) -> list[EventNode]:
        return [n for n in self.nodes.values() if isinstance(n, EventNode)]

    def start_events(self) -> list[EventNode]:
        return [e for e in self.events() if e.position is EventPosition.START]

    def outgoing(self, node_id: str) -> list[SequenceFlow]:
        """Flows leaving `node_id`, in document order; empty for sinks."""
        self.node(node_id)
        return [f for f in self.flows if f.source == node_id]

    def incoming(self, node_id: str) -> list[SequenceFlow]:
        self.node(node_id)
        return [f for f in self.flows if f.target == node_id]

    def associations_of(
        self, task_id: str, direction: AssociationDirection | None = None
    ) -> list[DataAssociation]:
        """Data associations of a task, optionally filtered by direction."""
        node = self.node(task_id)
        if not isinstance(node, TaskNode):
            raise NotATaskError(task_id)
        return [
            a
            for a in self.associations
            if a.task == task_id and (direction is None or a.direction is direction)
        ]

    def artifact(self, artifact_id: str) -> DataObjectDecl | DataStoreDecl:
        if artifact_id in self.data_objects:
            return self.data_objects[artifact_id]
        if artifact_id in self.data_stores:
            return self.data_stores[artifact_id]
        raise UnknownElementError(artifact_id)


def _canonical_associations(
    nodes: dict[str, FlowNode], associations: Iterable[DataAssociation]
) -> tuple[DataAssociation, ...]:
    # Grouped by owning task (node document order), Reads before Writes,
    # declared order otherwise. Matches what the XML encoding can express.
    by_task: dict[str, list[DataAssociation]] = {}
    for assoc in associations:
        by_task.setdefault(assoc.task, []).append(assoc)
    ordered: list[DataAssociation] = []
    for node_id in nodes:
        group = by_task.pop(node_id, None)
        if group is None:
            continue
        ordered.extend(a for a in group if a.direction is AssociationDirection.READ)
        ordered.extend(a for a in group if a.direction is AssociationDirection.WRITE)
    for group in by_task.values():  # dangling tasks; caught below
        ordered.extend(group)
    return tuple(ordered)


def assemble_model(
    process_id: str,
    name: str = "",
    nodes: Iterable[FlowNode] = (),
    flows: Iterable[SequenceFlow] = (),
    data_objects: Iterable[DataObjectDecl] = (),
    data_stores: Iterable[DataStoreDecl] = (),
    associations: Iterable[DataAssociation] = (),
    lanes: Iterable[Lane] = (),
) -> Bpmn4smlModel:
    """Build a model from raw element collections.

    Raises the structural error for the first violated invariant:
    DuplicateIdError, DanglingReferenceError or LaneConflictError.
    Deterministic: identical inputs yield structurally equal models.
    """
    node_map: dict[str, FlowNode] = {}
    object_map: dict[str, DataObjectDecl] = {}
    store_map: dict[str, DataStoreDecl] = {}
    seen: set[str] = set()

    def claim(element_id: str) -> None:
        if element_id in seen:
            raise DuplicateIdError(element_id)
        seen.add(element_id)

    for node in nodes:
        claim(node.id)
        node_map[node.id] = node
    flow_list = tuple(flows)
    for flow in flow_list:
        claim(flow.id)
    for obj in data_objects:
        claim(obj.id)
        object_map[obj.id] = obj
    for store in data_stores:
        claim(store.id)
        store_map[store.id] = store
    assoc_list = tuple(associations)
    for assoc in assoc_list:
        claim(assoc.id)

    for flow in flow_list:
        if flow.source not in node_map:
            raise DanglingReferenceError(flow.id, flow.source)
        if flow.target not in node_map:
            raise DanglingReferenceError(flow.id, flow.target)

    for assoc in assoc_list:
        task = node_map.get(assoc.task)
        if task is None or not isinstance(task, TaskNode):
            raise DanglingReferenceError(assoc.id, assoc.task)
        if assoc.artifact not in object_map and assoc.artifact not in store_map:
            raise DanglingReferenceError(assoc.id, assoc.artifact)

    lane_list = tuple(lanes)
    assigned: set[str] = set()
    for lane in lane_list:
        for member in lane.members:
            if member not in node_map:
                raise DanglingReferenceError(lane.name, member)
            if member in assigned:
                raise LaneConflictError(member)
            assigned.add(member)

    return Bpmn4smlModel(
        process_id=process_id,
        name=name,
        nodes=node_map,
        flows=flow_list,
        data_objects=object_map,
        data_stores=store_map,
        associations=_canonical_associations(node_map, assoc_list),
        lanes=lane_list,
    )


def sanitize_name(text: str) -> str:
    """Collapse a display name to an identifier-safe token."""
    out = []
    last_us = False
    for ch in text:
        if ch.isalnum():
            out.append(ch)
            last_us = False
        elif not last_us:
            out.append("_")
            last_us = True
    token = "".join(out).strip("_")
    return token or "unnamed"


class NameAllocator:
    """Hands out unique sanitized names, de-duplicating with numeric suffixes."""

    def __init__(self) -> None:
        self._taken: set[str] = set()

    def allocate(self, text: str) -> str:
        base = sanitize_name(text)
        candidate = base
        counter = 2
        while candidate in self._taken:
            candidate = f"{base}_{counter}"
            counter += 1
        self._taken.add(candidate)
        return candidate


def task_display_names(model: Bpmn4smlModel, allocator: NameAllocator | None = None) -> dict[str, str]:
    """Unique sanitized display name per task node, in document order.

    Both the orchestration state names and the TOSCA node template names
    come from this map so the two outputs stay aligned.
    """
    allocator = allocator or NameAllocator()
    return {task.id: allocator.allocate(task.name or task.id) for task in model.tasks()}

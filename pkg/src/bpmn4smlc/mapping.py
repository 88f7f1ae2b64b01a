"""Model-to-topology mapping for provider-typed deployment templates.

Applies the conceptual rules: one node template per task (function type,
ML-platform service type, or an ``Offloaded_<technology>`` extension type),
task configuration JSON as node properties, scripts as artifact attachments,
one store node per data store (or one shared store with per-store directory
properties when aggregation is on), connectsTo per task/store pair, one
orchestrator node carrying the serialized orchestration definition with an
orchestrates relationship to every task, and a hostedOn relationship from
every non-platform node to its cloud platform node. Event-driven mode maps
store-update start events to trigger-annotated connectsTo relationships
instead of an orchestrator.

Stores placed "external" stay out of the topology; their associations are
recorded as topology comments, as are intermediate events collapsed during
orchestration extraction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping

from .model import (
    AssociationDirection,
    Bpmn4smlModel,
    DataStoreDecl,
    DataStoreKind,
    EventNode,
    EventPosition,
    EXTERNAL_PLACEMENT,
    ExecutionMode,
    NameAllocator,
    STORE_UPDATE_EVENT_KINDS,
    TaskNode,
    sanitize_name,
    task_display_names,
)
from .orchestration import OrchestrationStateMachine


class MappingError(Exception):
    pass


class UnknownProfile(MappingError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown provider profile {name!r}")


class UnknownMlPlatform(MappingError):
    def __init__(self, value: str):
        self.value = value
        super().__init__(f"no node type known for ML platform {value!r}")


class UnsupportedEventDriven(MappingError):
    def __init__(self, element_id: str, message: str):
        self.element_id = element_id
        super().__init__(f"{message} ({element_id!r})")


class MissingPlatform(MappingError):
    def __init__(self, element_id: str):
        self.element_id = element_id
        super().__init__(
            f"no platform value can be derived for {element_id!r}; "
            "the model defines no unambiguous cloud platform"
        )


class EmptyProcess(MappingError):
    def __init__(self) -> None:
        super().__init__("model contains no tasks; nothing to deploy")


@dataclass(frozen=True)
class ProviderProfile:
    name: str
    function_node_type: str
    orchestrator_node_type: str
    platform_node_type: str
    store_node_type: Mapping[DataStoreKind, str]
    ml_platform_node_type: Mapping[str, str]
    orchestrates_rel_type: str
    connects_to_rel_type: str
    hosted_on_rel_type: str


_PROFILES: dict[str, ProviderProfile] = {
    "aws": ProviderProfile(
        name="aws",
        function_node_type="AwsLambdaFunction",
        orchestrator_node_type="AwsSFOrchestration",
        platform_node_type="AwsPlatform",
        store_node_type=MappingProxyType({kind: "AwsS3Bucket" for kind in DataStoreKind}),
        ml_platform_node_type=MappingProxyType({"sagemaker": "AwsSageMaker"}),
        orchestrates_rel_type="AwsSFOrchestrates",
        connects_to_rel_type="connectsTo",
        hosted_on_rel_type="hostedOn",
    ),
    "generic": ProviderProfile(
        name="generic",
        function_node_type="ServerlessFunction",
        orchestrator_node_type="FunctionOrchestrator",
        platform_node_type="CloudPlatform",
        store_node_type=MappingProxyType({kind: "ObjectStore" for kind in DataStoreKind}),
        ml_platform_node_type=MappingProxyType({}),
        orchestrates_rel_type="orchestrates",
        connects_to_rel_type="connectsTo",
        hosted_on_rel_type="hostedOn",
    ),
}


def builtin_profile(name: str) -> ProviderProfile:
    try:
        return _PROFILES[name]
    except KeyError:
        raise UnknownProfile(name) from None


class MapMode(str, Enum):
    ORCHESTRATION = "orchestration"
    EVENT_DRIVEN = "eventdriven"


@dataclass(frozen=True)
class MapOptions:
    profile: ProviderProfile
    aggregate_stores: bool = False
    mode: MapMode = MapMode.ORCHESTRATION


@dataclass(frozen=True)
class ArtifactRef:
    name: str
    path: str


@dataclass(frozen=True)
class NodeTemplate:
    name: str
    type_name: str
    properties: dict = field(default_factory=dict)
    artifacts: tuple[ArtifactRef, ...] = ()


@dataclass(frozen=True)
class RelationshipTemplate:
    type_name: str
    source: str
    target: str
    properties: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ToscaTopology:
    node_templates: tuple[NodeTemplate, ...]
    relationship_templates: tuple[RelationshipTemplate, ...]
    comments: tuple[str, ...] = ()

    def node(self, name: str) -> NodeTemplate:
        for template in self.node_templates:
            if template.name == name:
                return template
        raise KeyError(name)


def _function_node(
    task: TaskNode, name: str, profile: ProviderProfile
) -> NodeTemplate:
    binding = task.execution
    if binding.mode is ExecutionMode.FAAS:
        type_name = profile.function_node_type
        properties: dict = {}
        if binding.faas_configuration:
            properties = json.loads(binding.faas_configuration)
    else:
        if binding.ml_platform is not None:
            key = binding.ml_platform.strip().lower()
            type_name = profile.ml_platform_node_type.get(key)
            if type_name is None:
                raise UnknownMlPlatform(binding.ml_platform)
        else:
            type_name = f"Offloaded_{sanitize_name(binding.offloading_technology or 'unknown')}"
        properties = {"offloadingTechnology": binding.offloading_technology}
        if binding.ml_platform is not None:
            properties["mlPlatform"] = binding.ml_platform
    if task.environment is not None:
        properties["environment"] = task.environment
    artifacts: tuple[ArtifactRef, ...] = ()
    if binding.script:
        artifact_name = sanitize_name(binding.script.rsplit("/", 1)[-1])
        artifacts = (ArtifactRef(name=artifact_name, path=binding.script),)
    return NodeTemplate(name=name, type_name=type_name, properties=properties, artifacts=artifacts)


def _store_properties(store: DataStoreDecl) -> dict:
    properties: dict = {"placement": store.placement}
    if store.platform is not None:
        properties["platform"] = store.platform
    if store.repository_type is not None:
        properties["repositoryType"] = store.repository_type.value
    return properties


class _PlatformResolver:
    """Platform node per distinct platform value; single-value models provide
    the fallback for elements that carry no platform of their own."""

    def __init__(self, model: Bpmn4smlModel, allocator: NameAllocator, node_type: str):
        values: list[str] = []
        for task in model.tasks():
            platform = task.execution.platform
            if task.execution.mode is ExecutionMode.FAAS and platform:
                if platform not in values:
                    values.append(platform)
        for store in model.data_stores.values():
            if store.placement == EXTERNAL_PLACEMENT:
                continue
            if store.platform and store.platform not in values:
                values.append(store.platform)
        self.values = values
        self.default = values[0] if len(values) == 1 else None
        self.node_type = node_type
        self._names: dict[str, str] = {
            value: allocator.allocate(f"{value}_platform") for value in values
        }

    def nodes(self) -> list[NodeTemplate]:
        return [
            NodeTemplate(name=self._names[value], type_name=self.node_type, properties={"name": value})
            for value in self.values
        ]

    def node_for(self, platform: str | None, element_id: str) -> str:
        if platform is not None and platform in self._names:
            return self._names[platform]
        if platform is None and self.default is not None:
            return self._names[self.default]
        raise MissingPlatform(element_id)


def _event_driven_triggers(
    model: Bpmn4smlModel,
    store_nodes: Mapping[str, str],
    task_nodes: Mapping[str, str],
    profile: ProviderProfile,
) -> list[RelationshipTemplate]:
    kind_to_repo = {
        "RawDataUpdate": "RawData",
        "FeatureSetUpdate": "FeatureSet",
        "DatasetUpdate": "DataSet",
    }
    triggers: list[RelationshipTemplate] = []
    fed_tasks: set[str] = set()
    for node in model.nodes.values():
        if isinstance(node, EventNode) and node.position is EventPosition.START:
            if node.kind not in STORE_UPDATE_EVENT_KINDS:
                raise UnsupportedEventDriven(
                    node.id, "event-driven mapping only supports store-update start events"
                )
            # The trigger source resolves via payloadName when it names a
            # store, otherwise the unique store of the implied kind.
            source_store: DataStoreDecl | None = None
            if node.payload_name and node.payload_name in model.data_stores:
                source_store = model.data_stores[node.payload_name]
            else:
                wanted = kind_to_repo[node.kind.value]
                candidates = [
                    store
                    for store in model.data_stores.values()
                    if store.kind is DataStoreKind.DATA_REPOSITORY
                    and store.repository_type is not None
                    and store.repository_type.value == wanted
                    and store.placement != EXTERNAL_PLACEMENT
                ]
                if len(candidates) == 1:
                    source_store = candidates[0]
            if source_store is None or source_store.id not in store_nodes:
                raise UnsupportedEventDriven(
                    node.id, "cannot resolve the updated store for this trigger"
                )
            for flow in model.outgoing(node.id):
                target = model.node(flow.target)
                if not isinstance(target, TaskNode):
                    raise UnsupportedEventDriven(
                        flow.target, "event-driven triggers must flow directly into a task"
                    )
                fed_tasks.add(target.id)
                triggers.append(
                    RelationshipTemplate(
                        type_name=profile.connects_to_rel_type,
                        source=store_nodes[source_store.id],
                        target=task_nodes[target.id],
                        properties={"trigger": node.kind.value},
                    )
                )
    for node in model.nodes.values():
        if isinstance(node, TaskNode):
            for flow in model.incoming(node.id):
                source = model.node(flow.source)
                is_trigger = (
                    isinstance(source, EventNode)
                    and source.position is EventPosition.START
                    and source.kind in STORE_UPDATE_EVENT_KINDS
                )
                if not is_trigger:
                    raise UnsupportedEventDriven(
                        node.id, "task is reachable other than via a store-update start event"
                    )
            if node.id not in fed_tasks:
                raise UnsupportedEventDriven(node.id, "task has no store-update trigger")
        elif isinstance(node, EventNode):
            if node.position not in (EventPosition.START, EventPosition.END):
                raise UnsupportedEventDriven(
                    node.id, "intermediate events are not supported in event-driven mapping"
                )
        else:
            raise UnsupportedEventDriven(node.id, "gateways are not supported in event-driven mapping")
    return triggers


def map_to_topology(
    model: Bpmn4smlModel,
    machine: OrchestrationStateMachine | None,
    options: MapOptions,
) -> ToscaTopology:
    """Apply the mapping rules to a validated model.

    `machine` must be the orchestration extracted from the same model in
    orchestration mode; event-driven mode ignores it.
    """
    profile = options.profile
    tasks = model.tasks()
    if not tasks:
        raise EmptyProcess()

    allocator = NameAllocator()
    task_names = task_display_names(model, allocator)

    nodes: list[NodeTemplate] = []
    relationships: list[RelationshipTemplate] = []
    comments: list[str] = []

    for task in tasks:
        nodes.append(_function_node(task, task_names[task.id], profile))

    internal_stores = [
        store for store in model.data_stores.values() if store.placement != EXTERNAL_PLACEMENT
    ]
    external_ids = {
        store.id for store in model.data_stores.values() if store.placement == EXTERNAL_PLACEMENT
    }
    store_nodes: dict[str, str] = {}
    if options.aggregate_stores:
        groups: dict[str, list[DataStoreDecl]] = {}
        for store in internal_stores:
            groups.setdefault(profile.store_node_type[store.kind], []).append(store)
        for type_name, members in groups.items():
            node_name = allocator.allocate(type_name)
            properties: dict = {}
            for store in members:
                directory = sanitize_name(store.name or store.id)
                properties[f"directory_{directory}"] = f"/{directory}"
                store_nodes[store.id] = node_name
            nodes.append(NodeTemplate(name=node_name, type_name=type_name, properties=properties))
    else:
        for store in internal_stores:
            node_name = allocator.allocate(store.name or store.id)
            store_nodes[store.id] = node_name
            nodes.append(
                NodeTemplate(
                    name=node_name,
                    type_name=profile.store_node_type[store.kind],
                    properties=_store_properties(store),
                )
            )

    orchestrator_name: str | None = None
    if options.mode is MapMode.ORCHESTRATION:
        if machine is None:
            raise MappingError("orchestration mode requires an extracted state machine")
        orchestrator_name = allocator.allocate(f"{model.name or model.process_id}_orchestrator")
        definition_path = f"orchestration/{sanitize_name(machine.name)}.asl.json"
        nodes.append(
            NodeTemplate(
                name=orchestrator_name,
                type_name=profile.orchestrator_node_type,
                artifacts=(ArtifactRef(name="definition", path=definition_path),),
            )
        )
        for annotation in machine.annotations:
            comments.append(
                f"intermediate event {annotation.event_id} ({annotation.kind.value}, "
                f"{annotation.position.value}) collapsed into the orchestration transitions"
            )

    resolver = _PlatformResolver(model, allocator, profile.platform_node_type)
    platform_nodes = resolver.nodes()
    nodes.extend(platform_nodes)

    task_node_names = {task.id: task_names[task.id] for task in tasks}
    if options.mode is MapMode.ORCHESTRATION:
        assert orchestrator_name is not None
        for task in tasks:
            relationships.append(
                RelationshipTemplate(
                    type_name=profile.orchestrates_rel_type,
                    source=orchestrator_name,
                    target=task_node_names[task.id],
                )
            )

    seen_pairs: set[tuple[str, str]] = set()
    for task in tasks:
        for assoc in model.associations_of(task.id):
            if assoc.artifact in external_ids:
                store = model.data_stores[assoc.artifact]
                comments.append(
                    f"external data source {store.id} ({assoc.direction.value.lower()} by "
                    f"{task.id}) is outside the deployed topology"
                )
                continue
            if assoc.artifact not in store_nodes:
                continue  # data objects have no topology counterpart
            pair = (task_node_names[task.id], store_nodes[assoc.artifact])
            if pair in seen_pairs:
                continue
            seen_pairs.add(pair)
            relationships.append(
                RelationshipTemplate(
                    type_name=profile.connects_to_rel_type, source=pair[0], target=pair[1]
                )
            )

    if options.mode is MapMode.EVENT_DRIVEN:
        relationships.extend(
            _event_driven_triggers(model, store_nodes, task_node_names, profile)
        )

    platform_node_names = {node.name for node in platform_nodes}
    for node in nodes:
        if node.name in platform_node_names:
            continue
        platform_value: str | None = None
        element_id = node.name
        matching_task = next((t for t in tasks if task_node_names[t.id] == node.name), None)
        if matching_task is not None:
            element_id = matching_task.id
            if matching_task.execution.mode is ExecutionMode.FAAS:
                platform_value = matching_task.execution.platform
        else:
            store_ids = [sid for sid, nname in store_nodes.items() if nname == node.name]
            if len(store_ids) == 1:
                store = model.data_stores[store_ids[0]]
                element_id = store.id
                platform_value = store.platform
        relationships.append(
            RelationshipTemplate(
                type_name=profile.hosted_on_rel_type,
                source=node.name,
                target=resolver.node_for(platform_value, element_id),
            )
        )

    return ToscaTopology(
        node_templates=tuple(nodes),
        relationship_templates=tuple(relationships),
        comments=tuple(comments),
    )

"""Compact construction helpers shared across the test suite."""

from __future__ import annotations

from bpmn4smlc.model import (
    AssociationDirection,
    Bpmn4smlModel,
    ConditionExpr,
    DataAssociation,
    DataStoreDecl,
    DataStoreKind,
    EventKind,
    EventNode,
    EventPosition,
    ExecutionBinding,
    ExecutionMode,
    GatewayDirection,
    GatewayKind,
    GatewayNode,
    MLDataObject,
    MLDataType,
    DataSetRole,
    RepositoryType,
    SequenceFlow,
    TaskKind,
    TaskNode,
    assemble_model,
)

FAAS_CONFIG = '{"runtime": "python3.9", "memory": 128}'


def faas(
    task_id: str,
    kind: TaskKind = TaskKind.GENERIC_FAAS,
    name: str = "",
    platform: str | None = "aws",
    config: str | None = FAAS_CONFIG,
    script: str | None = None,
    environment: str | None = None,
    offloading_technology: str | None = None,
    ml_platform: str | None = None,
) -> TaskNode:
    return TaskNode(
        id=task_id,
        name=name or task_id,
        kind=kind,
        execution=ExecutionBinding(
            mode=ExecutionMode.FAAS,
            platform=platform,
            faas_configuration=config,
            script=script,
            offloading_technology=offloading_technology,
            ml_platform=ml_platform,
        ),
        environment=environment,
    )


def offloaded(
    task_id: str,
    kind: TaskKind = TaskKind.GENERIC_OFFLOADED,
    name: str = "",
    technology: str | None = "cloud",
    ml_platform: str | None = None,
    script: str | None = None,
    platform: str | None = None,
    config: str | None = None,
) -> TaskNode:
    return TaskNode(
        id=task_id,
        name=name or task_id,
        kind=kind,
        execution=ExecutionBinding(
            mode=ExecutionMode.OFFLOADED,
            offloading_technology=technology,
            ml_platform=ml_platform,
            script=script,
            platform=platform,
            faas_configuration=config,
        ),
    )


def event(
    event_id: str,
    kind: EventKind,
    position: EventPosition,
    payload: str | None = None,
    name: str = "",
) -> EventNode:
    return EventNode(id=event_id, name=name, kind=kind, position=position, payload_name=payload)


def start(event_id: str = "start") -> EventNode:
    return event(event_id, EventKind.PLAIN_NONE, EventPosition.START)


def end(event_id: str = "end") -> EventNode:
    return event(event_id, EventKind.PLAIN_NONE, EventPosition.END)


def gateway(gw_id: str, kind: GatewayKind, direction: GatewayDirection, name: str = "") -> GatewayNode:
    return GatewayNode(id=gw_id, name=name, gateway_kind=kind, direction=direction)


def flow(flow_id: str, source: str, target: str, condition: ConditionExpr | None = None) -> SequenceFlow:
    return SequenceFlow(id=flow_id, source=source, target=target, condition=condition)


def chain(*node_ids: str) -> list[SequenceFlow]:
    return [
        flow(f"f_{a}_{b}", a, b)
        for a, b in zip(node_ids, node_ids[1:])
    ]


def read(assoc_id: str, task_id: str, artifact_id: str) -> DataAssociation:
    return DataAssociation(assoc_id, task_id, artifact_id, AssociationDirection.READ)


def write(assoc_id: str, task_id: str, artifact_id: str) -> DataAssociation:
    return DataAssociation(assoc_id, task_id, artifact_id, AssociationDirection.WRITE)


def ml_data(
    object_id: str,
    data_type: MLDataType = MLDataType.FULL_DATA_SET,
    role: DataSetRole | None = None,
    name: str = "",
) -> MLDataObject:
    return MLDataObject(
        id=object_id,
        name=name,
        identifier=object_id,
        data_object_type=data_type,
        data_set_type=role,
    )


def dataset_repo(store_id: str = "dataset_repo", platform: str | None = "aws") -> DataStoreDecl:
    return DataStoreDecl(
        id=store_id,
        name=store_id,
        kind=DataStoreKind.DATA_REPOSITORY,
        placement="cloud",
        platform=platform,
        repository_type=RepositoryType.DATA_SET,
    )


def store(
    store_id: str,
    kind: DataStoreKind,
    repo_type: RepositoryType | None = None,
    placement: str = "cloud",
    platform: str | None = "aws",
) -> DataStoreDecl:
    return DataStoreDecl(
        id=store_id,
        name=store_id,
        kind=kind,
        placement=placement,
        platform=platform,
        repository_type=repo_type,
    )


def linear_model(*tasks: TaskNode, **kwargs) -> Bpmn4smlModel:
    """start -> tasks... -> end with the remaining collections passed through."""
    nodes = [start(), *tasks, end()]
    flows = chain("start", *[t.id for t in tasks], "end")
    return assemble_model("proc", kwargs.pop("name", "proc"), nodes, flows, **kwargs)

"""Seeded random model generators for property tests.

Two families: `random_model` produces arbitrary structurally valid models
(any kinds, artifacts, lanes; legality per the validator not required) for
codec round-trips, and `series_parallel_model` produces connected,
validation-clean structured processes for orchestration and mapping tests.
"""

from __future__ import annotations

import json
import random

from bpmn4smlc.model import (
    AssociationDirection,
    Bpmn4smlModel,
    CodeObject,
    ConditionExpr,
    ConfigType,
    DataAssociation,
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
    ModelStatus,
    RepositoryType,
    SequenceFlow,
    TaskKind,
    TaskNode,
    assemble_model,
)

_WORDS = [
    "alpha", "drift", "score", "batch", "model", "split", "tune",
    "Fancy Name", "weird:chars!", "data set", "ümlaut", "x",
]

#: Task kinds with no cardinality rule, safe for validation-clean models.
SAFE_KINDS = [
    TaskKind.GENERIC_FAAS,
    TaskKind.DATA_SOURCING,
    TaskKind.DATA_VALIDATION,
    TaskKind.MONITORING,
    TaskKind.MODEL_SELECTION,
    TaskKind.DEPRECATION,
    TaskKind.TRANSFER_LEARNING,
    TaskKind.EXPLANATION,
    TaskKind.VERIFICATION,
]

#: (kind, position) pairs that are both legal and non-start.
SAFE_INTERMEDIATE_EVENTS = [
    (EventKind.CONCEPT_DRIFT, EventPosition.INTERMEDIATE_THROW),
    (EventKind.DATA_DRIFT, EventPosition.INTERMEDIATE_CATCH),
    (EventKind.PERFORMANCE_DEFICIT, EventPosition.INTERMEDIATE_CATCH),
    (EventKind.DEPLOYMENT, EventPosition.INTERMEDIATE_THROW),
    (EventKind.TIMER, EventPosition.INTERMEDIATE_CATCH),
    (EventKind.MESSAGE, EventPosition.INTERMEDIATE_CATCH),
]


class _Ids:
    def __init__(self) -> None:
        self.counter = 0

    def next(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"


def _name(rng: random.Random) -> str:
    return rng.choice(_WORDS) if rng.random() < 0.8 else ""


def _binding(rng: random.Random, valid: bool) -> ExecutionBinding:
    if rng.random() < 0.7:
        config = json.dumps({"memory": rng.choice([128, 256, 512]), "runtime": "python3.9"})
        script = f"code/{rng.randrange(100)}.zip" if rng.random() < 0.3 else None
        return ExecutionBinding(
            mode=ExecutionMode.FAAS, platform="aws", faas_configuration=config, script=script
        )
    ml_platform = "sagemaker" if rng.random() < 0.5 else None
    return ExecutionBinding(
        mode=ExecutionMode.OFFLOADED,
        offloading_technology=rng.choice(["cloud", "edge"]) if valid or rng.random() < 0.9 else None,
        ml_platform=ml_platform,
        script=f"jobs/{rng.randrange(100)}.json" if rng.random() < 0.2 else None,
    )


def _random_object(rng: random.Random, object_id: str):
    roll = rng.randrange(7)
    name = _name(rng)
    if roll == 0:
        return MLModelObject(object_id, name, f"model-{object_id}", rng.choice([None, *ModelStatus]))
    if roll == 1:
        data_type = rng.choice(list(MLDataType))
        role = rng.choice(list(DataSetRole)) if data_type is MLDataType.FULL_DATA_SET and rng.random() < 0.6 else None
        return MLDataObject(object_id, name, f"data-{object_id}", data_type, role)
    if roll == 2:
        return CodeObject(object_id, name, f"code-{object_id}", "train --fast")
    if roll == 3:
        return LearningConfigurationObject(
            object_id, name, f"cfg-{object_id}", '{"folds": 5}', rng.choice(list(ConfigType))
        )
    if roll == 4:
        return LogObject(object_id, name, "ts=0 msg=ok")
    if roll == 5:
        return MetadataObject(object_id, name, f"data-{object_id}", "s3://bucket/key", _name(rng) or None)
    return DocumentObject(object_id, name, f"doc-{object_id}", "....", rng.choice(list(DocumentType)))


def _random_store(rng: random.Random, store_id: str) -> DataStoreDecl:
    kind = rng.choice(list(DataStoreKind))
    return DataStoreDecl(
        id=store_id,
        name=_name(rng),
        kind=kind,
        placement=rng.choice(["cloud", "local", "external"]),
        platform="aws" if rng.random() < 0.7 else None,
        repository_type=rng.choice(list(RepositoryType)) if kind is DataStoreKind.DATA_REPOSITORY else None,
    )


def _condition(rng: random.Random) -> ConditionExpr:
    literal = rng.choice(["gold", 5, 2.5, True, False, "a == b"])
    path = rng.choice(["result", "payload.status", "metrics.auc"])
    return ConditionExpr(path=path, literal=literal)


def _structured_flow(
    rng: random.Random,
    ids: _Ids,
    budget: int,
    valid_tasks: bool,
    with_events: bool,
):
    """Series-parallel skeleton: returns (nodes, flows, entry_id, exit_id)."""
    nodes: list = []
    flows: list[SequenceFlow] = []
    remaining = [budget]

    def new_flow(source: str, target: str, condition: ConditionExpr | None = None) -> None:
        flows.append(SequenceFlow(ids.next("f"), source, target, condition))

    def task_node() -> str:
        task = TaskNode(
            id=ids.next("t"),
            name=_name(rng),
            kind=rng.choice(SAFE_KINDS) if valid_tasks else rng.choice(list(TaskKind)),
            execution=_binding(rng, valid_tasks),
        )
        nodes.append(task)
        return task.id

    def block() -> tuple[str, str]:
        """Returns (entry, exit) of a sub-graph; consumes budget."""
        remaining[0] -= 1
        if remaining[0] <= 0:
            tid = task_node()
            return tid, tid
        roll = rng.random()
        if roll < 0.5 or remaining[0] < 4:
            tid = task_node()
            if with_events and rng.random() < 0.25 and remaining[0] > 1:
                kind, position = rng.choice(SAFE_INTERMEDIATE_EVENTS)
                ev = EventNode(ids.next("e"), _name(rng), kind, position, None)
                nodes.append(ev)
                remaining[0] -= 1
                new_flow(tid, ev.id)
                return tid, ev.id
            return tid, tid
        if roll < 0.75:
            split = GatewayNode(ids.next("g"), _name(rng), GatewayKind.EXCLUSIVE, GatewayDirection.DIVERGING)
            join = GatewayNode(ids.next("g"), _name(rng), GatewayKind.EXCLUSIVE, GatewayDirection.CONVERGING)
            nodes.extend([split, join])
            remaining[0] -= 1
            n_branches = 2 if remaining[0] < 6 else rng.choice([2, 3])
            for index in range(n_branches):
                entry, exit_ = block()
                condition = ConditionExpr(is_default=True) if index == 0 else _condition(rng)
                new_flow(split.id, entry, condition)
                new_flow(exit_, join.id)
            return split.id, join.id
        split = GatewayNode(ids.next("g"), _name(rng), GatewayKind.PARALLEL, GatewayDirection.DIVERGING)
        join = GatewayNode(ids.next("g"), _name(rng), GatewayKind.PARALLEL, GatewayDirection.CONVERGING)
        nodes.extend([split, join])
        remaining[0] -= 1
        n_branches = 2 if remaining[0] < 6 else rng.choice([2, 3])
        for _ in range(n_branches):
            entry, exit_ = block()
            new_flow(split.id, entry)
            new_flow(exit_, join.id)
        return split.id, join.id

    segments = []
    while remaining[0] > 0:
        segments.append(block())
        if rng.random() < 0.3:
            break
    entry = segments[0][0]
    for (_, prev_exit), (next_entry, _) in zip(segments, segments[1:]):
        new_flow(prev_exit, next_entry)
    return nodes, flows, entry, segments[-1][1]


def series_parallel_model(rng: random.Random, max_nodes: int = 12) -> Bpmn4smlModel:
    """Connected structured process with start/end, ≤ max_nodes flow nodes."""
    while True:
        model = _series_parallel_once(rng, max_nodes)
        if len(model.nodes) <= max_nodes:
            return model


def _series_parallel_once(rng: random.Random, max_nodes: int) -> Bpmn4smlModel:
    ids = _Ids()
    budget = rng.randrange(1, max(2, max_nodes - 3))
    nodes, flows, entry, exit_ = _structured_flow(rng, ids, budget, valid_tasks=True, with_events=True)
    start = EventNode(ids.next("start"), "", EventKind.PLAIN_NONE, EventPosition.START)
    end = EventNode(ids.next("end"), _name(rng), EventKind.PLAIN_NONE, EventPosition.END)
    flows = [
        SequenceFlow(ids.next("f"), start.id, entry),
        *flows,
        SequenceFlow(ids.next("f"), exit_, end.id),
    ]
    stores = [_random_store(rng, ids.next("s")) for _ in range(rng.randrange(0, 3))]
    objects = [_random_object(rng, ids.next("d")) for _ in range(rng.randrange(0, 3))]
    associations = []
    task_ids = [n.id for n in nodes if isinstance(n, TaskNode)]
    for artifact in [*stores, *objects]:
        if task_ids and rng.random() < 0.7:
            associations.append(
                DataAssociation(
                    ids.next("a"),
                    rng.choice(task_ids),
                    artifact.id,
                    rng.choice(list(AssociationDirection)),
                )
            )
    return assemble_model(
        process_id="proc",
        name=rng.choice(["pipeline", "ml flow", "Pipeline #7"]),
        nodes=[start, *nodes, end],
        flows=flows,
        data_objects=objects,
        data_stores=stores,
        associations=associations,
    )


def random_model(rng: random.Random) -> Bpmn4smlModel:
    """Arbitrary structurally valid model for codec round-trips."""
    ids = _Ids()
    budget = rng.randrange(1, 10)
    nodes, flows, entry, exit_ = _structured_flow(rng, ids, budget, valid_tasks=False, with_events=True)
    start = EventNode(ids.next("start"), _name(rng), rng.choice(
        [EventKind.PLAIN_NONE, EventKind.DATASET_UPDATE, EventKind.TIMER, EventKind.INFERENCE]
    ), EventPosition.START, payload_name=_name(rng) or None)
    end_kind = rng.choice([EventKind.PLAIN_NONE, EventKind.ERROR, EventKind.SIGNAL])
    end = EventNode(ids.next("end"), _name(rng), end_kind, EventPosition.END, payload_name=_name(rng) or None)
    flows = [
        SequenceFlow(ids.next("f"), start.id, entry),
        *flows,
        SequenceFlow(ids.next("f"), exit_, end.id),
    ]
    all_nodes: list = [start, *nodes, end]
    # Occasionally a disconnected task and a floating (even illegal) event;
    # the codec must carry those too.
    if rng.random() < 0.3:
        loose = TaskNode(ids.next("t"), _name(rng), rng.choice(list(TaskKind)), _binding(rng, False))
        all_nodes.append(loose)
    if rng.random() < 0.3:
        all_nodes.append(
            EventNode(
                ids.next("e"),
                _name(rng),
                rng.choice(list(EventKind)),
                rng.choice(list(EventPosition)),
                payload_name=_name(rng) or None,
            )
        )

    stores = [_random_store(rng, ids.next("s")) for _ in range(rng.randrange(0, 4))]
    objects = [_random_object(rng, ids.next("d")) for _ in range(rng.randrange(0, 5))]
    task_ids = [n.id for n in all_nodes if isinstance(n, TaskNode)]
    associations = []
    for artifact in [*stores, *objects]:
        for _ in range(rng.randrange(0, 3)):
            if task_ids:
                associations.append(
                    DataAssociation(
                        ids.next("a"),
                        rng.choice(task_ids),
                        artifact.id,
                        rng.choice(list(AssociationDirection)),
                    )
                )

    lanes = []
    if rng.random() < 0.5 and task_ids:
        half = max(1, len(task_ids) // 2)
        lanes.append(Lane(name="service a", members=tuple(task_ids[:half])))
        if task_ids[half:] and rng.random() < 0.7:
            lanes.append(Lane(name="service b", members=tuple(task_ids[half:])))

    return assemble_model(
        process_id=f"proc_{rng.randrange(1000)}",
        name=_name(rng),
        nodes=all_nodes,
        flows=flows,
        data_objects=objects,
        data_stores=stores,
        associations=associations,
        lanes=lanes,
    )

"""Control-flow extraction into a function-orchestration state machine.

The extractor recognizes the structured pattern set orchestration engines
commonly support: sequences, exclusive choice with rejoin, matched parallel
split/join pairs, and loops formed by back-edges through exclusive gateways.
Anything else is rejected with UnsupportedTopology instead of being
approximated. Intermediate events do not become states; they collapse into
transitions and are kept on a sidecar annotation list so downstream mapping
can surface them. Start events select the trigger and are not states; end
events become Succeed states (Fail for error end events).

State names are the sanitized task display names shared with the topology
mapper; resource references stay raw task identifiers and serialize as
``${<id>}`` substitution placeholders for deployment to bind.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

from .model import (
    Bpmn4smlModel,
    EventKind,
    EventNode,
    EventPosition,
    GatewayDirection,
    GatewayKind,
    GatewayNode,
    NameAllocator,
    TaskNode,
    task_display_names,
)


@dataclass(frozen=True)
class TaskState:
    resource_ref: str
    next: str | None  # None terminates the enclosing machine


@dataclass(frozen=True)
class ChoiceRule:
    path: str
    literal: str | int | float | bool
    target: str


@dataclass(frozen=True)
class ChoiceState:
    rules: tuple[ChoiceRule, ...]
    default: str


@dataclass(frozen=True)
class SucceedState:
    pass


@dataclass(frozen=True)
class FailState:
    cause: str


@dataclass(frozen=True)
class EventAnnotation:
    event_id: str
    kind: EventKind
    position: EventPosition


@dataclass(frozen=True)
class OrchestrationStateMachine:
    name: str
    start_state: str
    states: dict[str, "State"] = field(default_factory=dict)
    annotations: tuple[EventAnnotation, ...] = ()

    def task_states(self) -> list[TaskState]:
        found: list[TaskState] = []
        for state in self.states.values():
            if isinstance(state, TaskState):
                found.append(state)
            elif isinstance(state, ParallelState):
                for branch in state.branches:
                    found.extend(branch.task_states())
        return found


@dataclass(frozen=True)
class ParallelState:
    branches: tuple[OrchestrationStateMachine, ...]
    next: str | None


State = Union[TaskState, ChoiceState, ParallelState, SucceedState, FailState]


class ExtractionError(Exception):
    pass


class NoStartEvent(ExtractionError):
    def __init__(self) -> None:
        super().__init__("process has no start event")


class MultipleStartEvents(ExtractionError):
    def __init__(self, count: int):
        super().__init__(f"process has {count} start events, orchestration needs exactly one")


class UnmatchedParallelJoin(ExtractionError):
    pass


class UnsupportedTopology(ExtractionError):
    pass


class _Region:
    """State container for one machine level (top level or one branch)."""

    def __init__(self, expecting_join: bool):
        self.expecting_join = expecting_join
        self.join: str | None = None
        self.states: dict[str, State | None] = {}

    def reserve(self, name: str) -> None:
        self.states[name] = None

    def assign(self, name: str, state: State) -> None:
        self.states[name] = state

    def built_states(self) -> dict[str, State]:
        return {name: state for name, state in self.states.items() if state is not None}


class _Extractor:
    def __init__(self, model: Bpmn4smlModel):
        self.model = model
        self.allocator = NameAllocator()
        self.task_names = task_display_names(model, self.allocator)
        self.owner: dict[str, _Region] = {}
        self.state_name: dict[str, str] = {}
        self.annotations: list[EventAnnotation] = []
        self._passing: set[str] = set()

    def unique_successor(self, node_id: str) -> str:
        flows = self.model.outgoing(node_id)
        if len(flows) == 0:
            raise UnsupportedTopology(f"node {node_id!r} has no outgoing flow")
        if len(flows) > 1:
            raise UnsupportedTopology(
                f"node {node_id!r} has {len(flows)} outgoing flows; implicit splits are not supported"
            )
        return flows[0].target

    def translate(self, node_id: str, region: _Region) -> str | None:
        node = self.model.node(node_id)

        if isinstance(node, EventNode) and node.position in (
            EventPosition.INTERMEDIATE_CATCH,
            EventPosition.INTERMEDIATE_THROW,
        ):
            if node_id in self._passing:
                raise UnsupportedTopology(f"cycle through event {node_id!r} contains no task")
            self.annotations.append(EventAnnotation(node.id, node.kind, node.position))
            self._passing.add(node_id)
            try:
                return self.translate(self.unique_successor(node_id), region)
            finally:
                self._passing.discard(node_id)

        if isinstance(node, EventNode) and node.position is EventPosition.START:
            raise UnsupportedTopology(f"start event {node_id!r} is referenced mid-flow")

        if isinstance(node, GatewayNode) and node.direction is GatewayDirection.CONVERGING:
            if len(self.model.incoming(node_id)) < 2:
                raise UnsupportedTopology(f"converging gateway {node_id!r} has fewer than two incoming flows")
            if node.gateway_kind is GatewayKind.EXCLUSIVE:
                if node_id in self._passing:
                    raise UnsupportedTopology(f"cycle through gateway {node_id!r} contains no task")
                self._passing.add(node_id)
                try:
                    return self.translate(self.unique_successor(node_id), region)
                finally:
                    self._passing.discard(node_id)
            # Parallel join: legal only as the boundary of the branch being built.
            if not region.expecting_join:
                raise UnmatchedParallelJoin(f"parallel join {node_id!r} has no matching split here")
            if region.join is not None and region.join != node_id:
                raise UnmatchedParallelJoin(
                    f"branch reaches joins {region.join!r} and {node_id!r}"
                )
            region.join = node_id
            return None

        # State-owning nodes: tasks, diverging gateways, end events.
        if node_id in self.owner:
            if self.owner[node_id] is not region:
                raise UnsupportedTopology(
                    f"node {node_id!r} is reached from more than one parallel region"
                )
            return self.state_name[node_id]

        self.owner[node_id] = region

        if isinstance(node, TaskNode):
            name = self.task_names[node.id]
            self.state_name[node_id] = name
            region.reserve(name)
            nxt = self.translate(self.unique_successor(node_id), region)
            region.assign(name, TaskState(resource_ref=node.id, next=nxt))
            return name

        if isinstance(node, EventNode):  # end event
            name = self.allocator.allocate(node.name or "Done")
            self.state_name[node_id] = name
            region.reserve(name)
            if node.kind is EventKind.ERROR:
                self.annotations.append(EventAnnotation(node.id, node.kind, node.position))
                region.assign(name, FailState(cause=node.payload_name or node.name or node.id))
            else:
                region.assign(name, SucceedState())
            return name

        if node.gateway_kind is GatewayKind.EXCLUSIVE:
            return self._translate_choice(node, region)
        return self._translate_parallel(node, region)

    def _translate_choice(self, node: GatewayNode, region: _Region) -> str:
        flows = self.model.outgoing(node.id)
        if len(flows) < 2:
            raise UnsupportedTopology(f"diverging gateway {node.id!r} needs at least two outgoing flows")
        default_flows = [f for f in flows if f.condition is not None and f.condition.is_default]
        if len(default_flows) != 1:
            raise UnsupportedTopology(
                f"exclusive gateway {node.id!r} needs exactly one default flow, found {len(default_flows)}"
            )
        name = self.allocator.allocate(node.name or node.id)
        self.state_name[node.id] = name
        region.reserve(name)
        rules: list[ChoiceRule] = []
        for flow in flows:
            if flow.condition is not None and flow.condition.is_default:
                continue
            if flow.condition is None:
                raise UnsupportedTopology(
                    f"flow {flow.id!r} from exclusive gateway {node.id!r} has no condition"
                )
            target = self.translate(flow.target, region)
            if target is None:
                raise UnsupportedTopology(
                    f"choice branch {flow.id!r} may not end a parallel branch directly"
                )
            rules.append(ChoiceRule(path=flow.condition.path, literal=flow.condition.literal, target=target))
        default_target = self.translate(default_flows[0].target, region)
        if default_target is None:
            raise UnsupportedTopology(
                f"default branch of gateway {node.id!r} may not end a parallel branch directly"
            )
        region.assign(name, ChoiceState(rules=tuple(rules), default=default_target))
        return name

    def _translate_parallel(self, node: GatewayNode, region: _Region) -> str:
        flows = self.model.outgoing(node.id)
        if len(flows) < 2:
            raise UnsupportedTopology(f"diverging gateway {node.id!r} needs at least two outgoing flows")
        for flow in flows:
            if flow.condition is not None:
                raise UnsupportedTopology(f"parallel branch {flow.id!r} must not carry a condition")
        name = self.allocator.allocate(node.name or node.id)
        self.state_name[node.id] = name
        region.reserve(name)
        branches: list[OrchestrationStateMachine] = []
        joins: set[str] = set()
        for index, flow in enumerate(flows, start=1):
            branch_region = _Region(expecting_join=True)
            entry = self.translate(flow.target, branch_region)
            if entry is None:
                raise UnsupportedTopology(
                    f"parallel branch {flow.id!r} is empty (flows straight into the join)"
                )
            if branch_region.join is None:
                raise UnmatchedParallelJoin(
                    f"parallel branch {flow.id!r} never reaches a parallel join"
                )
            joins.add(branch_region.join)
            branches.append(
                OrchestrationStateMachine(
                    name=f"{name}_branch_{index}",
                    start_state=entry,
                    states=branch_region.built_states(),
                )
            )
        if len(joins) != 1:
            raise UnmatchedParallelJoin(
                f"branches of gateway {node.id!r} reach different joins: {sorted(joins)}"
            )
        join_id = joins.pop()
        nxt = self.translate(self.unique_successor(join_id), region)
        region.assign(name, ParallelState(branches=tuple(branches), next=nxt))
        return name


def extract(model: Bpmn4smlModel) -> OrchestrationStateMachine:
    """Derive the orchestration state machine from a validated model."""
    starts = model.start_events()
    if not starts:
        raise NoStartEvent()
    if len(starts) > 1:
        raise MultipleStartEvents(len(starts))

    extractor = _Extractor(model)
    top = _Region(expecting_join=False)
    entry = extractor.translate(extractor.unique_successor(starts[0].id), top)
    assert entry is not None  # top level never expects a join
    machine = OrchestrationStateMachine(
        name=model.name or model.process_id,
        start_state=entry,
        states=top.built_states(),
        annotations=tuple(extractor.annotations),
    )
    if not any(isinstance(s, (SucceedState, FailState)) for s in machine.states.values()):
        raise UnsupportedTopology("process never reaches an end event")
    task_state_count = len(machine.task_states())
    task_count = len(model.tasks())
    if task_state_count != task_count:
        raise UnsupportedTopology(
            f"only {task_state_count} of {task_count} tasks are reachable from the start event"
        )
    return machine


def _rule_doc(rule: ChoiceRule) -> dict:
    if isinstance(rule.literal, bool):
        operator = "BooleanEquals"
    elif isinstance(rule.literal, (int, float)):
        operator = "NumericEquals"
    else:
        operator = "StringEquals"
    return {"Variable": f"$.{rule.path}", operator: rule.literal, "Next": rule.target}


def _state_doc(state: State) -> dict:
    if isinstance(state, TaskState):
        doc: dict = {"Type": "Task", "Resource": f"${{{state.resource_ref}}}"}
        if state.next is None:
            doc["End"] = True
        else:
            doc["Next"] = state.next
        return doc
    if isinstance(state, ChoiceState):
        return {
            "Type": "Choice",
            "Choices": [_rule_doc(rule) for rule in state.rules],
            "Default": state.default,
        }
    if isinstance(state, ParallelState):
        doc = {
            "Type": "Parallel",
            "Branches": [
                {"StartAt": branch.start_state, "States": _states_doc(branch)}
                for branch in state.branches
            ],
        }
        if state.next is None:
            doc["End"] = True
        else:
            doc["Next"] = state.next
        return doc
    if isinstance(state, SucceedState):
        return {"Type": "Succeed"}
    return {"Type": "Fail", "Cause": state.cause}


def _states_doc(machine: OrchestrationStateMachine) -> dict:
    return {name: _state_doc(state) for name, state in machine.states.items()}


def serialize_asl(machine: OrchestrationStateMachine) -> bytes:
    """Deterministic orchestration-definition JSON (2-space indent, LF)."""
    doc = {
        "Comment": machine.name,
        "StartAt": machine.start_state,
        "States": _states_doc(machine),
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def output_filename(machine: OrchestrationStateMachine) -> str:
    from .model import sanitize_name

    return f"{sanitize_name(machine.name)}.asl.json"

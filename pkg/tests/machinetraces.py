"""Trace enumeration over orchestration state machines (test-side).

Produces the set of resource-reference sequences a machine can execute,
exploring every choice resolution and every interleaving of parallel
branches. Used to compare machine behaviour against the BPMN token
simulator.
"""

from __future__ import annotations

from bpmn4smlc.orchestration import (
    ChoiceState,
    FailState,
    OrchestrationStateMachine,
    ParallelState,
    SucceedState,
    TaskState,
)

Trace = tuple[str, ...]


def _interleave(left: Trace, right: Trace) -> set[Trace]:
    if not left:
        return {right}
    if not right:
        return {left}
    return {(left[0], *rest) for rest in _interleave(left[1:], right)} | {
        (right[0], *rest) for rest in _interleave(left, right[1:])
    }


def _interleave_all(trace_sets: list[set[Trace]]) -> set[Trace]:
    combined: set[Trace] = {()}
    for traces in trace_sets:
        combined = {
            merged
            for existing in combined
            for new in traces
            for merged in _interleave(existing, new)
        }
    return combined


def machine_traces(machine: OrchestrationStateMachine, max_len: int | None = None) -> set[Trace]:
    """Completed traces of the machine, dropped (not truncated) beyond max_len.

    Termination with loops relies on every cycle emitting at least one task,
    which the extractor guarantees.
    """

    def from_state(name: str, emitted: int) -> set[Trace]:
        if max_len is not None and emitted > max_len:
            return set()
        state = machine.states[name]
        if isinstance(state, (SucceedState, FailState)):
            return {()}
        if isinstance(state, TaskState):
            tails = {()} if state.next is None else from_state(state.next, emitted + 1)
            return {(state.resource_ref, *tail) for tail in tails}
        if isinstance(state, ChoiceState):
            targets = [rule.target for rule in state.rules] + [state.default]
            out: set[Trace] = set()
            for target in targets:
                out |= from_state(target, emitted)
            return out
        assert isinstance(state, ParallelState)
        branch_sets = [machine_traces(branch, max_len) for branch in state.branches]
        merged = _interleave_all(branch_sets)
        if state.next is None:
            return merged
        out = set()
        for body in merged:
            for tail in from_state(state.next, emitted + len(body)):
                out.add(body + tail)
        return out

    traces = from_state(machine.start_state, 0)
    if max_len is not None:
        traces = {t for t in traces if len(t) <= max_len}
    return traces

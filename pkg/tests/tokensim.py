"""Independent BPMN token simulator used as the orchestration oracle.

Enumerates the complete set of task-execution sequences a process graph can
produce under standard token semantics, exploring every exclusive-gateway
choice and every interleaving of parallel branches. Written against the
process graph only; it knows nothing about state machines.
"""

from __future__ import annotations

from bpmn4smlc.model import (
    Bpmn4smlModel,
    EventNode,
    EventPosition,
    GatewayDirection,
    GatewayKind,
    GatewayNode,
    TaskNode,
)

Trace = tuple[str, ...]


def enumerate_traces(model: Bpmn4smlModel, max_len: int | None = None) -> set[Trace]:
    """All completed task-id sequences reachable from the start event.

    A trace is complete when no tokens remain. `max_len` bounds the trace
    length for graphs with loops; traces longer than the bound are dropped,
    not truncated.
    """
    starts = model.start_events()
    if len(starts) != 1:
        raise ValueError(f"token simulation requires exactly one start event, got {len(starts)}")
    outgoing = {node_id: tuple(model.outgoing(node_id)) for node_id in model.nodes}
    incoming = {node_id: tuple(model.incoming(node_id)) for node_id in model.nodes}

    initial = tuple(sorted(f.id for f in outgoing[starts[0].id]))
    results: set[Trace] = set()
    flow_by_id = {f.id: f for f in model.flows}

    def explore(marking: tuple[str, ...], trace: Trace, seen: set) -> None:
        if max_len is not None and len(trace) > max_len:
            return
        key = (marking, trace)
        if key in seen:
            return
        seen.add(key)
        if not marking:
            results.add(trace)
            return
        fired_any = False
        tokens = list(marking)
        for idx, flow_id in enumerate(tokens):
            flow = flow_by_id[flow_id]
            node = model.nodes[flow.target]
            rest = tokens[:idx] + tokens[idx + 1 :]
            if isinstance(node, TaskNode):
                fired_any = True
                produced = [f.id for f in outgoing[node.id]]
                explore(tuple(sorted(rest + produced)), trace + (node.id,), seen)
            elif isinstance(node, EventNode):
                if node.position is EventPosition.END:
                    fired_any = True
                    explore(tuple(sorted(rest)), trace, seen)
                else:
                    fired_any = True
                    produced = [f.id for f in outgoing[node.id]]
                    explore(tuple(sorted(rest + produced)), trace, seen)
            elif isinstance(node, GatewayNode):
                if node.gateway_kind is GatewayKind.EXCLUSIVE:
                    if node.direction is GatewayDirection.DIVERGING:
                        fired_any = True
                        for branch in outgoing[node.id]:
                            explore(tuple(sorted(rest + [branch.id])), trace, seen)
                    else:
                        fired_any = True
                        produced = [f.id for f in outgoing[node.id]]
                        explore(tuple(sorted(rest + produced)), trace, seen)
                elif node.direction is GatewayDirection.DIVERGING:
                    fired_any = True
                    produced = [f.id for f in outgoing[node.id]]
                    explore(tuple(sorted(rest + produced)), trace, seen)
                else:
                    # Parallel join: fires only with a token on every incoming
                    # flow; consume one per flow.
                    needed = [f.id for f in incoming[node.id]]
                    pool = list(tokens)
                    satisfied = True
                    for need in needed:
                        if need in pool:
                            pool.remove(need)
                        else:
                            satisfied = False
                            break
                    if satisfied:
                        fired_any = True
                        produced = [f.id for f in outgoing[node.id]]
                        explore(tuple(sorted(pool + produced)), trace, seen)
        if not fired_any:
            # Deadlock (e.g. starved parallel join): no completed trace.
            return

    explore(initial, (), set())
    return results

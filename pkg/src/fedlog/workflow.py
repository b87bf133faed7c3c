"""Process models for query execution: BPMN-flavored XML and a persisted,
append-only execution log (one record line per node status transition).
"""

from __future__ import annotations

import time
import uuid
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

BPMN_NS = "http://www.omg.org/spec/BPMN/20100524/MODEL"


class WorkflowError(Exception):
    pass


@dataclass(frozen=True)
class ProcessNode:
    id: str
    kind: str  # "start" | "task" | "end"
    task_ref: Optional[str] = None


@dataclass(frozen=True)
class ProcessModel:
    nodes: tuple[ProcessNode, ...]
    edges: tuple[tuple[str, str], ...]

    def node(self, node_id: str) -> ProcessNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise WorkflowError(f"unknown node {node_id}")

    def successors(self, node_id: str) -> list[str]:
        return [b for a, b in self.edges if a == node_id]

    def topological_order(self) -> list[ProcessNode]:
        indeg = {n.id: 0 for n in self.nodes}
        for _, b in self.edges:
            indeg[b] += 1
        queue = [n.id for n in self.nodes if indeg[n.id] == 0]
        order = []
        while queue:
            nid = queue.pop(0)
            order.append(self.node(nid))
            for succ in self.successors(nid):
                indeg[succ] -= 1
                if indeg[succ] == 0:
                    queue.append(succ)
        if len(order) != len(self.nodes):
            raise WorkflowError("process graph contains a cycle")
        return order

    def validate(self) -> None:
        starts = [n for n in self.nodes if n.kind == "start"]
        ends = [n for n in self.nodes if n.kind == "end"]
        if len(starts) != 1:
            raise WorkflowError(f"process must have exactly one start event, "
                                f"found {len(starts)}")
        if len(ends) != 1:
            raise WorkflowError(f"process must have exactly one end event, "
                                f"found {len(ends)}")
        ids = {n.id for n in self.nodes}
        for a, b in self.edges:
            if a not in ids or b not in ids:
                raise WorkflowError(f"edge {a}->{b} references unknown node")
        # Every node reachable from start; end reachable from every node.
        reach = {starts[0].id}
        frontier = [starts[0].id]
        while frontier:
            nid = frontier.pop()
            for succ in self.successors(nid):
                if succ not in reach:
                    reach.add(succ)
                    frontier.append(succ)
        if reach != ids:
            raise WorkflowError("not every node is reachable from the start event")
        back = {ends[0].id}
        frontier = [ends[0].id]
        preds = {n.id: [a for a, b in self.edges if b == n.id] for n in self.nodes}
        while frontier:
            nid = frontier.pop()
            for pred in preds[nid]:
                if pred not in back:
                    back.add(pred)
                    frontier.append(pred)
        if back != ids:
            raise WorkflowError("the end event is not reachable from every node")


def model_plan(plan) -> ProcessModel:
    """Chain: start -> reason -> rewrite -> plan -> subquery(i)... ->
    consolidate -> end."""
    if not plan.subqueries:
        raise WorkflowError("cannot model an empty plan")
    stages = ["reason", "rewrite", "plan"]
    stages += [f"subquery({i})" for i in range(1, len(plan.subqueries) + 1)]
    stages.append("consolidate")
    nodes = [ProcessNode("start", "start")]
    for stage in stages:
        nodes.append(ProcessNode(stage, "task", stage))
    nodes.append(ProcessNode("end", "end"))
    edges = tuple(
        (nodes[i].id, nodes[i + 1].id) for i in range(len(nodes) - 1)
    )
    model = ProcessModel(tuple(nodes), edges)
    model.validate()
    return model


# ---------------------------------------------------------------------------
# BPMN serialization


def serialize_bpmn(model: ProcessModel) -> str:
    ET.register_namespace("", BPMN_NS)
    root = ET.Element(f"{{{BPMN_NS}}}definitions")
    proc = ET.SubElement(root, f"{{{BPMN_NS}}}process", {"id": "query_process"})
    for node in model.nodes:
        if node.kind == "start":
            ET.SubElement(proc, f"{{{BPMN_NS}}}startEvent", {"id": node.id})
        elif node.kind == "end":
            ET.SubElement(proc, f"{{{BPMN_NS}}}endEvent", {"id": node.id})
        else:
            ET.SubElement(
                proc,
                f"{{{BPMN_NS}}}serviceTask",
                {"id": node.id, "name": node.task_ref or ""},
            )
    for i, (a, b) in enumerate(model.edges, start=1):
        ET.SubElement(
            proc,
            f"{{{BPMN_NS}}}sequenceFlow",
            {"id": f"flow{i}", "sourceRef": a, "targetRef": b},
        )
    return ET.tostring(root, encoding="unicode", xml_declaration=True)


def parse_bpmn(text: str) -> ProcessModel:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise WorkflowError(f"malformed BPMN XML: {exc}") from exc
    proc = root.find(f"{{{BPMN_NS}}}process")
    if proc is None:
        raise WorkflowError("BPMN XML has no process element")
    nodes = []
    edges = []
    for el in proc:
        tag = el.tag.split("}", 1)[-1]
        if tag == "startEvent":
            nodes.append(ProcessNode(el.get("id"), "start"))
        elif tag == "endEvent":
            nodes.append(ProcessNode(el.get("id"), "end"))
        elif tag == "serviceTask":
            nodes.append(ProcessNode(el.get("id"), "task", el.get("name") or None))
        elif tag == "sequenceFlow":
            edges.append((el.get("sourceRef"), el.get("targetRef")))
        else:
            raise WorkflowError(f"unsupported BPMN element {tag}")
    model = ProcessModel(tuple(nodes), tuple(edges))
    model.validate()
    return model


# ---------------------------------------------------------------------------
# Execution store


@dataclass(frozen=True)
class NodeRecord:
    process_instance_id: str
    node_id: str
    status: str  # pending | running | done | failed
    timestamp: float
    seq: int
    detail: str = ""


class ExecutionStore:
    """Append-only, one log file per process instance, tab-separated."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _file(self, instance_id: str) -> Path:
        return self.directory / f"{instance_id}.log"

    def append(self, record: NodeRecord) -> None:
        detail = record.detail.replace("\t", " ").replace("\n", " ")
        line = "\t".join(
            [
                str(record.seq),
                record.process_instance_id,
                record.node_id,
                record.status,
                repr(record.timestamp),
                detail,
            ]
        )
        with open(self._file(record.process_instance_id), "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    def events(self, instance_id: str) -> list[NodeRecord]:
        file = self._file(instance_id)
        if not file.exists():
            return []
        out = []
        for line in file.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            seq, iid, node_id, status, ts, detail = line.split("\t", 5)
            out.append(NodeRecord(iid, node_id, status, float(ts), int(seq), detail))
        return out

    def instance_ids(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.log"))

    def node_states(self, instance_id: str) -> list[dict]:
        """Final state per node, in first-seen (topological) order."""
        states: dict[str, dict] = {}
        order: list[str] = []
        for ev in self.events(instance_id):
            if ev.node_id not in states:
                order.append(ev.node_id)
                states[ev.node_id] = {
                    "node_id": ev.node_id,
                    "status": ev.status,
                    "started_at": None,
                    "finished_at": None,
                    "detail": "",
                }
            state = states[ev.node_id]
            state["status"] = ev.status
            if ev.status == "running":
                state["started_at"] = ev.timestamp
            if ev.status in ("done", "failed"):
                state["finished_at"] = ev.timestamp
            if ev.detail:
                state["detail"] = ev.detail
        return [states[n] for n in order]


# ---------------------------------------------------------------------------
# Runner


def run(
    model: ProcessModel,
    callbacks: dict[str, Callable[[], Optional[str]]],
    store: ExecutionStore,
    instance_id: Optional[str] = None,
) -> tuple[str, str]:
    """Execute a process model; returns (instance_id, terminal status).

    Each task node's callback may return a detail string.  On failure the
    node is marked failed and downstream nodes stay pending.
    """
    model.validate()
    order = model.topological_order()
    for node in order:
        if node.kind == "task" and (node.task_ref or "") not in callbacks:
            raise WorkflowError(f"no callback registered for task "
                                f"{node.task_ref!r}")
    instance_id = instance_id or uuid.uuid4().hex
    seq = 0

    def emit(node_id: str, status: str, detail: str = ""):
        nonlocal seq
        seq += 1
        store.append(
            NodeRecord(instance_id, node_id, status, time.time(), seq, detail)
        )

    for node in order:
        emit(node.id, "pending")
    for node in order:
        emit(node.id, "running")
        if node.kind == "task":
            try:
                detail = callbacks[node.task_ref]() or ""
            except Exception as exc:
                emit(node.id, "failed", f"{type(exc).__name__}: {exc}")
                return instance_id, "failed"
            emit(node.id, "done", detail)
        else:
            emit(node.id, "done")
    return instance_id, "done"

"""Service-template emission and archive packaging.

The YAML dialect is TOSCA Simple Profile 1.3: relationships are expressed as
requirements on their source node with the relationship type under
``relationship:``; artifacts become ``{file: <path>}`` entries. Both the
YAML emitter and the archive packager are pure functions: equal inputs give
byte-identical output (fixed key order, zeroed archive timestamps, stored
entries, fixed entry order).
"""

from __future__ import annotations

from dataclasses import dataclass
from io import BytesIO
from typing import Mapping
from zipfile import ZIP_STORED, ZipFile, ZipInfo

import yaml

from .mapping import ToscaTopology

TOSCA_VERSION = "tosca_simple_yaml_1_3"
ENTRY_DEFINITIONS = "definitions/service.yaml"
ORCHESTRATION_PREFIX = "orchestration/"


@dataclass(frozen=True)
class CsarManifest:
    created_by: str
    entry_definitions: str = ENTRY_DEFINITIONS
    meta_file_version: str = "1.0"
    csar_version: str = "1.1"

    def render(self) -> bytes:
        lines = [
            f"TOSCA-Meta-File-Version: {self.meta_file_version}",
            f"CSAR-Version: {self.csar_version}",
            f"Created-By: {self.created_by}",
            f"Entry-Definitions: {self.entry_definitions}",
        ]
        return ("\n".join(lines) + "\n").encode("utf-8")


class MissingArtifact(Exception):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"artifact {path!r} referenced by the topology was not provided")


def emit_yaml(topology: ToscaTopology) -> bytes:
    """Render the topology as a deterministic service template."""
    node_templates: dict = {}
    for node in topology.node_templates:
        entry: dict = {"type": node.type_name}
        if node.properties:
            entry["properties"] = dict(node.properties)
        requirements = []
        for rel in topology.relationship_templates:
            if rel.source != node.name:
                continue
            relationship: dict | str
            if rel.properties:
                relationship = {"type": rel.type_name, "properties": dict(rel.properties)}
            else:
                relationship = rel.type_name
            requirements.append({rel.type_name: {"node": rel.target, "relationship": relationship}})
        if requirements:
            entry["requirements"] = requirements
        if node.artifacts:
            entry["artifacts"] = {a.name: {"file": a.path} for a in node.artifacts}
        node_templates[node.name] = entry

    doc: dict = {"tosca_definitions_version": TOSCA_VERSION}
    if topology.comments:
        doc["metadata"] = {"comments": list(topology.comments)}
    doc["topology_template"] = {"node_templates": node_templates}
    text = yaml.safe_dump(doc, sort_keys=False, default_flow_style=False, allow_unicode=True)
    return text.encode("utf-8")


def _zeroed(path: str) -> ZipInfo:
    info = ZipInfo(filename=path, date_time=(1980, 1, 1, 0, 0, 0))
    info.compress_type = ZIP_STORED
    info.external_attr = 0o644 << 16
    return info


def package_csar(
    topology: ToscaTopology,
    orchestration_doc: bytes | None,
    artifact_files: Mapping[str, bytes],
    created_by: str,
) -> bytes:
    """Bundle service template, orchestration definition and artifacts.

    Every artifact path referenced by the topology must be resolvable: paths
    under ``orchestration/`` are satisfied by `orchestration_doc`, everything
    else by `artifact_files`. Raises MissingArtifact otherwise.
    """
    orchestration_entry: tuple[str, bytes] | None = None
    artifact_entries: dict[str, bytes] = {}
    for node in topology.node_templates:
        for artifact in node.artifacts:
            if artifact.path in artifact_files:
                artifact_entries[artifact.path] = artifact_files[artifact.path]
            elif artifact.path.startswith(ORCHESTRATION_PREFIX) and orchestration_doc is not None:
                orchestration_entry = (artifact.path, orchestration_doc)
            else:
                raise MissingArtifact(artifact.path)

    manifest = CsarManifest(created_by=created_by)
    buffer = BytesIO()
    with ZipFile(buffer, "w", compression=ZIP_STORED) as archive:
        archive.writestr(_zeroed("TOSCA-Metadata/TOSCA.meta"), manifest.render())
        archive.writestr(_zeroed(ENTRY_DEFINITIONS), emit_yaml(topology))
        if orchestration_entry is not None:
            archive.writestr(_zeroed(orchestration_entry[0]), orchestration_entry[1])
        for path in sorted(artifact_entries):
            archive.writestr(_zeroed(path), artifact_entries[path])
    return buffer.getvalue()

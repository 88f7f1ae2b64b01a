"""Compiler and validator for serverless machine-learning workflow models.

Pipeline: parse an extended BPMN document into a typed process graph,
validate it against the metamodel rules, derive a function-orchestration
state machine from the control flow, map the model to a provider-typed
TOSCA topology, and emit a service template plus CSAR package.
"""

__version__ = "0.1.0"

from .ingest import SourceDocument, load_file, parse, parse_bytes, serialize
from .mapping import (
    MapMode,
    MapOptions,
    ProviderProfile,
    ToscaTopology,
    builtin_profile,
    map_to_topology,
)
from .model import Bpmn4smlModel, assemble_model
from .orchestration import OrchestrationStateMachine, extract, serialize_asl
from .validation import ValidationReport, validate
from .emit import emit_yaml, package_csar

__all__ = [
    "__version__",
    "Bpmn4smlModel",
    "MapMode",
    "MapOptions",
    "OrchestrationStateMachine",
    "ProviderProfile",
    "SourceDocument",
    "ToscaTopology",
    "ValidationReport",
    "assemble_model",
    "builtin_profile",
    "emit_yaml",
    "extract",
    "load_file",
    "map_to_topology",
    "package_csar",
    "parse",
    "parse_bytes",
    "serialize",
    "serialize_asl",
    "validate",
]

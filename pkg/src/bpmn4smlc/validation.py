"""Rule-based model validation with a machine-readable report.

Registry (E = error, W = warning):

- R-V1  (E) execution binding complete for its mode, faasConfiguration is a JSON object
- R-V2  (E) job-configuration tasks must run as serverless functions
- R-V3  (E) dataSetType only on FullDataSet data objects
- R-V4  (E) ML event kind legal at its position (legality table below)
- R-V5  (E) data fusion reads at least two MLData objects and writes exactly one
- R-V6  (E) preprocessing operates on exactly one MLData input source
- R-V7  (E) feature engineering operates on exactly one MLData input source
- R-V8  (E) feature enrichment needs at least two MLData input sources
- R-V9  (E) data split has a unique dataset-repository connection
- R-V10 (E) voting reads at least two inference-result documents
- R-V11 (E) training has exactly one training-data source
- R-V12 (E) scoring has exactly one validation-data source
- R-V13 (E) evaluation has exactly one training-data source
- R-V14 (E) tuning has exactly one training-data source
- R-V15 (E) serverless inference reads from a model registry
- R-V16 (E) environment attribute only on deployment tasks
- R-V17 (W) task not connected to any sequence flow
- R-W1  (W) learning-configuration input whose configType does not match the task

A "training-data source" is either a Read of an MLData(FullDataSet, Training)
object or a Read of a dataset repository; at most one explicit object input
is allowed and at least one source must exist. Validation-data sources follow
the same pattern with the Validation role. Findings are ordered by
(elementId, ruleId) and reports serialize to JSON and plain text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .model import (
    AssociationDirection,
    Bpmn4smlModel,
    ConfigType,
    DataSetRole,
    DataStoreDecl,
    DataStoreKind,
    DocumentObject,
    DocumentType,
    EventKind,
    EventNode,
    EventPosition,
    ExecutionMode,
    EXTENSION_EVENT_KINDS,
    LearningConfigurationObject,
    MLDataObject,
    MLDataType,
    RepositoryType,
    TaskKind,
    TaskNode,
)


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class ValidationRule:
    rule_id: str
    severity: Severity
    description: str


@dataclass(frozen=True)
class Finding:
    rule_id: str
    element_id: str
    severity: Severity
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def passed(self) -> bool:
        return not any(f.severity is Severity.ERROR for f in self.findings)

    def to_json(self) -> str:
        doc = {
            "passed": self.passed,
            "findings": [
                {
                    "rule": f.rule_id,
                    "element": f.element_id,
                    "severity": f.severity.value,
                    "message": f.message,
                }
                for f in self.findings
            ],
        }
        return json.dumps(doc, indent=2) + "\n"

    def to_text(self) -> str:
        lines = []
        for f in self.findings:
            lines.append(f"{f.severity.value.upper():7s} {f.rule_id:5s} {f.element_id}: {f.message}")
        lines.append("passed" if self.passed else "failed")
        return "\n".join(lines) + "\n"


#: Legal (kind, position) pairs for the 15 ML event kinds; everything else
#: is rejected, and none of them may terminate a process.
EVENT_POSITION_TABLE: dict[EventKind, frozenset[EventPosition]] = {
    EventKind.DATA_SOURCE: frozenset({EventPosition.START, EventPosition.INTERMEDIATE_CATCH}),
    EventKind.RAW_DATA_UPDATE: frozenset({EventPosition.START, EventPosition.INTERMEDIATE_CATCH}),
    EventKind.FEATURE_SET_UPDATE: frozenset({EventPosition.START, EventPosition.INTERMEDIATE_CATCH}),
    EventKind.DATASET_UPDATE: frozenset({EventPosition.START, EventPosition.INTERMEDIATE_CATCH}),
    EventKind.REQUIREMENT_UPDATE: frozenset({EventPosition.START, EventPosition.INTERMEDIATE_CATCH}),
    EventKind.VERIFICATION: frozenset({EventPosition.START, EventPosition.INTERMEDIATE_CATCH}),
    EventKind.INFERENCE: frozenset({EventPosition.START, EventPosition.INTERMEDIATE_CATCH}),
    EventKind.DATA_DRIFT: frozenset(
        {EventPosition.START, EventPosition.INTERMEDIATE_CATCH, EventPosition.INTERMEDIATE_THROW}
    ),
    EventKind.CONCEPT_DRIFT: frozenset(
        {EventPosition.START, EventPosition.INTERMEDIATE_CATCH, EventPosition.INTERMEDIATE_THROW}
    ),
    EventKind.DEPLOYMENT: frozenset(
        {EventPosition.START, EventPosition.INTERMEDIATE_CATCH, EventPosition.INTERMEDIATE_THROW}
    ),
    EventKind.DEPRECATION: frozenset(
        {EventPosition.START, EventPosition.INTERMEDIATE_CATCH, EventPosition.INTERMEDIATE_THROW}
    ),
    EventKind.OPERATION_DEGRADATION: frozenset(
        {EventPosition.START, EventPosition.INTERMEDIATE_CATCH, EventPosition.INTERMEDIATE_THROW}
    ),
    EventKind.PERFORMANCE_DEFICIT: frozenset({EventPosition.INTERMEDIATE_CATCH}),
    EventKind.VERIFICATION_FAILURE: frozenset({EventPosition.INTERMEDIATE_CATCH}),
    EventKind.JOB_OFFLOADING: frozenset({EventPosition.INTERMEDIATE_CATCH}),
}

RULES: dict[str, ValidationRule] = {
    rule.rule_id: rule
    for rule in (
        ValidationRule("R-V1", Severity.ERROR, "execution binding attributes complete for mode"),
        ValidationRule("R-V2", Severity.ERROR, "job-configuration task must be serverless"),
        ValidationRule("R-V3", Severity.ERROR, "dataSetType requires a FullDataSet data object"),
        ValidationRule("R-V4", Severity.ERROR, "ML event kind illegal at this position"),
        ValidationRule("R-V5", Severity.ERROR, "data fusion input/output cardinality"),
        ValidationRule("R-V6", Severity.ERROR, "preprocessing input cardinality"),
        ValidationRule("R-V7", Severity.ERROR, "feature engineering input cardinality"),
        ValidationRule("R-V8", Severity.ERROR, "feature enrichment input cardinality"),
        ValidationRule("R-V9", Severity.ERROR, "data split repository connection"),
        ValidationRule("R-V10", Severity.ERROR, "voting inference-result inputs"),
        ValidationRule("R-V11", Severity.ERROR, "training data source cardinality"),
        ValidationRule("R-V12", Severity.ERROR, "scoring validation-data source cardinality"),
        ValidationRule("R-V13", Severity.ERROR, "evaluation training-data source cardinality"),
        ValidationRule("R-V14", Severity.ERROR, "tuning training-data source cardinality"),
        ValidationRule("R-V15", Severity.ERROR, "serverless inference model-registry access"),
        ValidationRule("R-V16", Severity.ERROR, "environment attribute restricted to deployment"),
        ValidationRule("R-V17", Severity.WARNING, "task has no incoming or outgoing flow"),
        ValidationRule("R-W1", Severity.WARNING, "learning configuration type mismatch"),
    )
}

_CONFIG_EXPECTATION = {
    TaskKind.TRAINING: ConfigType.TRAINING,
    TaskKind.EVALUATION: ConfigType.EVALUATION,
    TaskKind.TUNING: ConfigType.TUNING,
}


class _Collector:
    def __init__(self) -> None:
        self.findings: list[Finding] = []

    def add(self, rule_id: str, element_id: str, message: str) -> None:
        rule = RULES[rule_id]
        self.findings.append(Finding(rule_id, element_id, rule.severity, message))


def _reads(model: Bpmn4smlModel, task: TaskNode):
    return model.associations_of(task.id, AssociationDirection.READ)


def _writes(model: Bpmn4smlModel, task: TaskNode):
    return model.associations_of(task.id, AssociationDirection.WRITE)


def _ml_data_reads(model: Bpmn4smlModel, task: TaskNode) -> list[MLDataObject]:
    return [
        obj
        for assoc in _reads(model, task)
        if isinstance(obj := model.artifact(assoc.artifact), MLDataObject)
    ]


def _repository_reads(
    model: Bpmn4smlModel, task: TaskNode, repo_type: RepositoryType | None = None
) -> list[DataStoreDecl]:
    stores = []
    for assoc in _reads(model, task):
        artifact = model.artifact(assoc.artifact)
        if isinstance(artifact, DataStoreDecl) and artifact.kind is DataStoreKind.DATA_REPOSITORY:
            if repo_type is None or artifact.repository_type is repo_type:
                stores.append(artifact)
    return stores


def _dataset_sources(model: Bpmn4smlModel, task: TaskNode, role: DataSetRole) -> tuple[int, int]:
    """(explicit object inputs with the given role, dataset-repository inputs)."""
    explicit = sum(
        1
        for obj in _ml_data_reads(model, task)
        if obj.data_object_type is MLDataType.FULL_DATA_SET and obj.data_set_type is role
    )
    repo = len(_repository_reads(model, task, RepositoryType.DATA_SET))
    return explicit, repo


def _check_binding(model: Bpmn4smlModel, task: TaskNode, out: _Collector) -> None:
    binding = task.execution
    problems: list[str] = []
    if binding.mode is ExecutionMode.FAAS:
        if not binding.platform:
            problems.append("platform is required for serverless tasks")
        if not binding.faas_configuration:
            problems.append("faasConfiguration is required for serverless tasks")
        else:
            try:
                parsed = json.loads(binding.faas_configuration)
            except json.JSONDecodeError:
                parsed = None
            if not isinstance(parsed, dict):
                problems.append("faasConfiguration must be a JSON object")
        if binding.offloading_technology is not None:
            problems.append("offloadingTechnology is not defined for serverless tasks")
        if binding.ml_platform is not None:
            problems.append("mlPlatform is not defined for serverless tasks")
    else:
        if not binding.offloading_technology:
            problems.append("offloadingTechnology is required for offloaded tasks")
        if binding.platform is not None:
            problems.append("platform is not defined for offloaded tasks")
        if binding.faas_configuration is not None:
            problems.append("faasConfiguration is not defined for offloaded tasks")
    for problem in problems:
        out.add("R-V1", task.id, problem)


def _check_task_rules(model: Bpmn4smlModel, task: TaskNode, out: _Collector) -> None:
    kind = task.kind
    if kind is TaskKind.JOB_CONFIGURATION and task.execution.mode is not ExecutionMode.FAAS:
        out.add("R-V2", task.id, "job-configuration tasks can only run as serverless functions")
    if task.environment is not None and kind is not TaskKind.DEPLOYMENT:
        out.add("R-V16", task.id, "environment is only defined for deployment tasks")

    if kind is TaskKind.DATA_FUSION:
        reads = len(_ml_data_reads(model, task))
        writes = sum(
            1
            for assoc in _writes(model, task)
            if isinstance(model.artifact(assoc.artifact), MLDataObject)
        )
        if reads < 2 or writes != 1:
            out.add(
                "R-V5",
                task.id,
                f"data fusion needs at least two MLData inputs and exactly one MLData output "
                f"(found {reads} inputs, {writes} outputs)",
            )
    elif kind in (TaskKind.PREPROCESSING, TaskKind.FEATURE_ENGINEERING):
        rule = "R-V6" if kind is TaskKind.PREPROCESSING else "R-V7"
        explicit = len(_ml_data_reads(model, task))
        repo = len(_repository_reads(model, task))
        if explicit > 1 or explicit + repo == 0:
            out.add(
                rule,
                task.id,
                f"task must operate on exactly one MLData input source "
                f"(found {explicit} object inputs, {repo} repository inputs)",
            )
    elif kind is TaskKind.FEATURE_ENRICHMENT:
        total = len(_ml_data_reads(model, task)) + len(_repository_reads(model, task))
        if total < 2:
            out.add("R-V8", task.id, f"feature enrichment needs at least two MLData input sources (found {total})")
    elif kind is TaskKind.DATA_SPLIT:
        repos = {
            store.id
            for assoc in model.associations_of(task.id)
            if isinstance(store := model.artifact(assoc.artifact), DataStoreDecl)
            and store.kind is DataStoreKind.DATA_REPOSITORY
            and store.repository_type is RepositoryType.DATA_SET
        }
        if len(repos) != 1:
            out.add(
                "R-V9",
                task.id,
                f"data split needs a unique dataset-repository connection (found {len(repos)})",
            )
    elif kind is TaskKind.VOTING:
        inference_results = sum(
            1
            for assoc in _reads(model, task)
            if isinstance(doc := model.artifact(assoc.artifact), DocumentObject)
            and doc.document_type is DocumentType.INFERENCE_RESULT
        )
        if inference_results < 2:
            out.add(
                "R-V10",
                task.id,
                f"voting needs inference results of at least two models (found {inference_results})",
            )
    elif kind in (TaskKind.TRAINING, TaskKind.EVALUATION, TaskKind.TUNING):
        rule = {TaskKind.TRAINING: "R-V11", TaskKind.EVALUATION: "R-V13", TaskKind.TUNING: "R-V14"}[kind]
        explicit, repo = _dataset_sources(model, task, DataSetRole.TRAINING)
        if explicit > 1 or explicit + repo == 0:
            out.add(
                rule,
                task.id,
                f"task needs exactly one training-data source "
                f"(found {explicit} training datasets, {repo} dataset repositories)",
            )
    elif kind is TaskKind.SCORING:
        explicit, repo = _dataset_sources(model, task, DataSetRole.VALIDATION)
        if explicit > 1 or explicit + repo == 0:
            out.add(
                "R-V12",
                task.id,
                f"scoring needs exactly one validation-data source "
                f"(found {explicit} validation datasets, {repo} dataset repositories)",
            )
    elif kind is TaskKind.INFERENCE and task.execution.mode is ExecutionMode.FAAS:
        registry_reads = sum(
            1
            for assoc in _reads(model, task)
            if isinstance(store := model.artifact(assoc.artifact), DataStoreDecl)
            and store.kind is DataStoreKind.MODEL_REGISTRY
        )
        if registry_reads == 0:
            out.add("R-V15", task.id, "serverless inference must load the model from a model registry")

    expected = _CONFIG_EXPECTATION.get(kind)
    if expected is not None:
        for assoc in _reads(model, task):
            config = model.artifact(assoc.artifact)
            if isinstance(config, LearningConfigurationObject) and config.config_type is not expected:
                out.add(
                    "R-W1",
                    task.id,
                    f"learning configuration {config.id!r} has configType "
                    f"{config.config_type.value!r}, expected {expected.value!r}",
                )


def validate(model: Bpmn4smlModel) -> ValidationReport:
    """Evaluate the full rule registry; faults become findings, never raises."""
    out = _Collector()

    connected = {f.source for f in model.flows} | {f.target for f in model.flows}
    for task in model.tasks():
        _check_binding(model, task, out)
        _check_task_rules(model, task, out)
        if task.id not in connected:
            out.add("R-V17", task.id, "task is not connected to the sequence flow")

    for node in model.nodes.values():
        if isinstance(node, EventNode) and node.kind in EXTENSION_EVENT_KINDS:
            legal = EVENT_POSITION_TABLE[node.kind]
            if node.position not in legal:
                positions = ", ".join(sorted(p.value for p in legal))
                out.add(
                    "R-V4",
                    node.id,
                    f"event kind {node.kind.value!r} is not legal at position "
                    f"{node.position.value!r} (legal: {positions})",
                )

    for obj in model.data_objects.values():
        if (
            isinstance(obj, MLDataObject)
            and obj.data_set_type is not None
            and obj.data_object_type is not MLDataType.FULL_DATA_SET
        ):
            out.add(
                "R-V3",
                obj.id,
                f"dataSetType {obj.data_set_type.value!r} requires dataObjectType "
                f"'FullDataSet', found {obj.data_object_type.value!r}",
            )

    ordered = tuple(sorted(out.findings, key=lambda f: (f.element_id, f.rule_id)))
    return ValidationReport(findings=ordered)

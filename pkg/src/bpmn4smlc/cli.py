"""Command-line front end: validate, compile, package.

Exit codes: 0 success, 1 usage/IO/malformed input, 2 validation errors.
No output files are written unless the whole pipeline succeeds.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .emit import MissingArtifact, emit_yaml, package_csar
from .ingest import IngestError, load_file, parse
from .mapping import MapMode, MapOptions, MappingError, builtin_profile, map_to_topology
from .model import ModelError, sanitize_name
from .orchestration import ExtractionError, extract, serialize_asl
from .validation import validate


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="workflow model document (.bpmn)")
    parser.add_argument("--format", choices=("text", "json"), default="text", dest="report_format",
                        help="validation report format (default: text)")


def _add_compile_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-o", "--out", default=".", help="output directory (created if absent)")
    parser.add_argument("--profile", default="aws", help="provider profile (aws or generic)")
    parser.add_argument("--aggregate-stores", action="store_true",
                        help="map all data stores onto one shared store node")
    parser.add_argument("--mode", choices=[m.value for m in MapMode],
                        default=MapMode.ORCHESTRATION.value,
                        help="workflow realization (default: orchestration)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bpmn4smlc",
        description="Validate serverless ML workflow models and compile them "
                    "to TOSCA service templates, orchestration definitions and CSAR archives.",
    )
    parser.add_argument("--version", action="version", version=f"bpmn4smlc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="parse a model and report rule findings")
    _add_common(p_validate)

    p_compile = sub.add_parser("compile", help="validate, then emit service.yaml and the orchestration definition")
    _add_common(p_compile)
    _add_compile_options(p_compile)

    p_package = sub.add_parser("package", help="compile and bundle everything into a CSAR archive")
    _add_common(p_package)
    _add_compile_options(p_package)
    p_package.add_argument("--created-by", default=f"bpmn4smlc {__version__}",
                           help="Created-By value for the archive manifest")
    return parser


def _fail(message: str) -> int:
    print(f"bpmn4smlc: error: {message}", file=sys.stderr)
    return 1


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract reserves 2 for
        # validation findings, so usage problems map to 1.
        code = exc.code or 0
        return 1 if code else 0

    if not os.path.isfile(args.input):
        return _fail(f"input {args.input!r} does not exist or is not a file")

    try:
        model = parse(load_file(args.input))
    except (IngestError, ModelError) as exc:
        return _fail(str(exc))
    except OSError as exc:
        return _fail(f"cannot read {args.input!r}: {exc}")

    report = validate(model)
    print(report.to_json() if args.report_format == "json" else report.to_text(), end="")
    if not report.passed:
        return 2
    if args.command == "validate":
        return 0

    mode = MapMode(args.mode)
    try:
        profile = builtin_profile(args.profile)
    except MappingError as exc:
        return _fail(str(exc))

    machine = None
    outputs: list[tuple[str, bytes]] = []
    try:
        if mode is MapMode.ORCHESTRATION:
            machine = extract(model)
            outputs.append((f"{sanitize_name(machine.name)}.asl.json", serialize_asl(machine)))
        options = MapOptions(profile=profile, aggregate_stores=args.aggregate_stores, mode=mode)
        topology = map_to_topology(model, machine, options)
        outputs.insert(0, ("service.yaml", emit_yaml(topology)))
    except (ExtractionError, MappingError) as exc:
        return _fail(str(exc))

    if args.command == "package":
        base_dir = os.path.dirname(os.path.abspath(args.input))
        artifact_files: dict[str, bytes] = {}
        for node in topology.node_templates:
            for artifact in node.artifacts:
                if artifact.path.startswith("orchestration/"):
                    continue
                resolved = os.path.join(base_dir, artifact.path)
                if not os.path.isfile(resolved):
                    return _fail(f"artifact {artifact.path!r} not found next to the input model")
                with open(resolved, "rb") as handle:
                    artifact_files[artifact.path] = handle.read()
        try:
            archive = package_csar(
                topology,
                serialize_asl(machine) if machine is not None else None,
                artifact_files,
                created_by=args.created_by,
            )
        except MissingArtifact as exc:
            return _fail(str(exc))
        name = sanitize_name(machine.name if machine is not None else (model.name or model.process_id))
        outputs.append((f"{name}.csar", archive))

    os.makedirs(args.out, exist_ok=True)
    for filename, data in outputs:
        path = os.path.join(args.out, filename)
        with open(path, "wb") as handle:
            handle.write(data)
        print(f"wrote {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    return run(list(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    sys.exit(main())

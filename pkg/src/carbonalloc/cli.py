"""Command-line entry point wiring the pipeline end to end.

Subcommands: ``calibrate`` (fit server power models from benchmark samples),
``compute`` (ingest one period's CSVs and write per-tenant reports),
``report`` (re-render from an existing report JSON without recomputation),
``audit`` (independently recompute a report and diff it), and ``synth``
(generate a deterministic synthetic fleet).

Exit codes: 0 success, 1 validation failure (bad inputs), 2 computation
failure, 3 audit mismatch. Diagnostics go to standard error; summary tables
to standard output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Sequence

from .allocation import (
    AuditReport,
    Footprint,
    compute_footprints,
    conservation_audit,
)
from .errors import (
    AllocationError,
    CarbonAllocError,
    IngestError,
    PowerModelError,
    ValidationFailure,
)
from .history import HistoryStore
from .ingest import RawData, load_input_dir
from .power import (
    fit_server_weights,
    read_calibration_samples,
    read_models,
    write_models,
)
from .report import (
    DEFAULT_TREND_THRESHOLDS,
    EquivalencyFactors,
    ReportError,
    factors_from_json,
    footprint_from_json,
    load_equivalency_factors,
    render_json,
    render_onepage,
)
from .synth import generate_fleet, write_fleet
from .units import Period, Share, UnitError

__all__ = ["RunConfig", "main", "entrypoint"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_COMPUTATION = 2
EXIT_AUDIT_MISMATCH = 3


@dataclass(frozen=True)
class RunConfig:
    """Everything a monthly compute run needs."""

    period: Period
    input_dir: Path
    models_file: Path
    equivalency_file: Path
    history_dir: Path
    output_dir: Path
    l_share_override: Share | None = None
    trend_thresholds: tuple[float, float] = DEFAULT_TREND_THRESHOLDS
    jobs: int = 0

    def effective_jobs(self) -> int:
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def _print_validation_failure(exc: ValidationFailure) -> None:
    _err(f"{len(exc.errors)} validation error(s):")
    for sub in exc.errors:
        _err(f"  {sub}")


def _apply_l_share(raw: RawData, override: Share | None) -> RawData:
    if override is None:
        return raw
    tenants = {tid: replace(t, l_share=override) for tid, t in raw.tenants.items()}
    return replace(raw, tenants=tenants)


def _print_audit_summary(audit: AuditReport) -> None:
    status = "PASS" if audit.passed else "FAIL"
    print(f"conservation audit: {status} ({len(audit.checks)} checks, "
          f"max residual {audit.max_residual:.3e})")
    for check in audit.failures:
        _err(f"  FAILED {check.name} in {check.datacenter_id}: "
             f"expected {check.expected!r}, got {check.actual!r} "
             f"(residual {check.residual:.3e})")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_calibrate(samples_file: Path, models_out: Path) -> int:
    """Fit one power model per device model and write the models file."""
    try:
        grouped = read_calibration_samples(samples_file)
    except IngestError as exc:
        _err(f"cannot read calibration samples: {exc}")
        return EXIT_VALIDATION
    if not grouped:
        _err("calibration samples file has no rows")
        return EXIT_VALIDATION

    models = {}
    failures = []
    for name in sorted(grouped):
        try:
            models[name] = fit_server_weights(grouped[name], device_model=name)
        except PowerModelError as exc:
            failures.append((name, exc))
    for name, model in models.items():
        print(f"{name}: n={len(grouped[name])} adjusted_r2={model.adjusted_r2:.4f}")
    for name, exc in failures:
        _err(f"calibration failed for {name}: {exc}")
    if models:
        write_models(models_out, models)
        print(f"wrote {len(models)} model(s) to {models_out}")
    return EXIT_COMPUTATION if failures else EXIT_OK


def _load_for_compute(config: RunConfig):
    raw = load_input_dir(config.input_dir, config.period)
    raw = _apply_l_share(raw, config.l_share_override)
    models = read_models(config.models_file)
    factors = load_equivalency_factors(config.equivalency_file)
    return raw, models, factors


def _render_pair(fp: Footprint, factors: EquivalencyFactors,
                 thresholds: tuple[float, float]):
    return (render_json(fp, factors),
            render_onepage(fp, factors, trend_thresholds=thresholds))


def _write_reports(footprints: Sequence[Footprint], factors: EquivalencyFactors,
                   config: RunConfig, history: HistoryStore) -> list[Path]:
    """Render in parallel, write serialized in deterministic order."""
    with ThreadPoolExecutor(max_workers=config.effective_jobs()) as pool:
        rendered = list(pool.map(
            lambda fp: _render_pair(fp, factors, config.trend_thresholds),
            footprints))
    written: list[Path] = []
    reports_root = config.output_dir / "reports"
    for fp, (json_doc, html_doc) in zip(footprints, rendered):
        tenant_dir = reports_root / fp.tenant_id
        tenant_dir.mkdir(parents=True, exist_ok=True)
        json_path = tenant_dir / f"{fp.period}.json"
        json_path.write_bytes(json_doc.content)
        html_path = tenant_dir / f"{fp.period}.html"
        html_path.write_bytes(html_doc.content)
        history.save(fp.tenant_id, fp.period, json_doc.content)
        written.extend([json_path, html_path])
    return written


def cmd_compute(config: RunConfig) -> int:
    """Run the full monthly pipeline: ingest, compute, audit, render."""
    try:
        raw, models, factors = _load_for_compute(config)
    except ValidationFailure as exc:
        _print_validation_failure(exc)
        return EXIT_VALIDATION
    except (IngestError, ReportError, UnitError) as exc:
        _err(str(exc))
        return EXIT_VALIDATION

    history = HistoryStore(config.history_dir)
    try:
        footprints = compute_footprints(raw, models, history)
    except (PowerModelError, AllocationError) as exc:
        _err(f"computation failed: {exc}")
        return EXIT_COMPUTATION

    audit = conservation_audit(footprints, raw, models)
    _print_audit_summary(audit)
    if not audit.passed:
        _err("conservation audit failed; no reports written")
        return EXIT_AUDIT_MISMATCH

    _write_reports(footprints, factors, config, history)

    print(f"{'tenant':<16} {'gross_g':>18} {'net_g':>18} {'per_agent_g':>14}")
    for fp in footprints:
        print(f"{fp.tenant_id:<16} {fp.gross_total.value:>18.3f} "
              f"{fp.net_total.value:>18.3f} {fp.per_agent.value:>14.6f}")
    print(f"wrote {len(footprints)} tenant report pair(s) under "
          f"{config.output_dir / 'reports'}")
    return EXIT_OK


def _diff_json(expected: Any, actual: Any, path: str,
               out: list[tuple[str, Any, Any]]) -> None:
    """Collect value-level differences between two parsed JSON trees."""
    if isinstance(expected, dict) and isinstance(actual, dict):
        for key in expected.keys() | actual.keys():
            child = f"{path}.{key}" if path else str(key)
            if key not in expected:
                out.append((child, "<absent>", actual[key]))
            elif key not in actual:
                out.append((child, expected[key], "<absent>"))
            else:
                _diff_json(expected[key], actual[key], child, out)
        return
    if isinstance(expected, list) and isinstance(actual, list):
        for i in range(max(len(expected), len(actual))):
            child = f"{path}[{i}]"
            if i >= len(expected):
                out.append((child, "<absent>", actual[i]))
            elif i >= len(actual):
                out.append((child, expected[i], "<absent>"))
            else:
                _diff_json(expected[i], actual[i], child, out)
        return
    if type(expected) is not type(actual) or expected != actual:
        out.append((path, expected, actual))


def cmd_audit(report_file: Path, input_dir: Path, models_file: Path,
              equivalency_file: Path | None, history_dir: Path | None,
              l_share_override: Share | None) -> int:
    """Recompute a report from its inputs and compare byte for byte."""
    try:
        stored_text = report_file.read_text(encoding="utf-8")
        stored_doc = json.loads(stored_text)
        tenant_id = str(stored_doc["tenant"]["tenantId"])
        period = Period.parse(stored_doc["period"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, UnitError) as exc:
        _err(f"cannot read report under audit: {exc!r}")
        return EXIT_VALIDATION

    try:
        raw = load_input_dir(input_dir, period)
        raw = _apply_l_share(raw, l_share_override)
        models = read_models(models_file)
        factors = (load_equivalency_factors(equivalency_file)
                   if equivalency_file is not None
                   else factors_from_json(stored_doc))
    except ValidationFailure as exc:
        _print_validation_failure(exc)
        return EXIT_VALIDATION
    except (IngestError, ReportError, UnitError) as exc:
        _err(str(exc))
        return EXIT_VALIDATION

    history = HistoryStore(history_dir) if history_dir is not None else None
    try:
        footprints = compute_footprints(raw, models, history)
    except (PowerModelError, AllocationError) as exc:
        _err(f"recomputation failed: {exc}")
        return EXIT_COMPUTATION

    fp = next((f for f in footprints if f.tenant_id == tenant_id), None)
    if fp is None:
        _err(f"tenant {tenant_id!r} not present in the provided inputs")
        return EXIT_COMPUTATION

    expected = render_json(fp, factors).content
    canonical_stored = (json.dumps(stored_doc, indent=2, ensure_ascii=False)
                        + "\n").encode("utf-8")
    if expected == canonical_stored:
        print(f"audit PASS: {report_file} matches recomputation "
              f"({tenant_id}, {period})")
        return EXIT_OK

    diffs: list[tuple[str, Any, Any]] = []
    _diff_json(json.loads(expected.decode("utf-8")), stored_doc, "", diffs)
    _err(f"audit FAIL: {report_file} differs from recomputation "
         f"in {len(diffs)} field(s):")
    for field_path, exp, act in diffs:
        _err(f"  {field_path}: recomputed {exp!r}, report has {act!r}")
    if not diffs:
        _err("  (byte-level difference only; values are equal after parsing)")
    return EXIT_AUDIT_MISMATCH


def cmd_report(report_file: Path, out_dir: Path,
               equivalency_file: Path | None,
               trend_thresholds: tuple[float, float]) -> int:
    """Re-render both formats from an existing report JSON."""
    try:
        content = report_file.read_bytes()
        fp = footprint_from_json(content)
        factors = (load_equivalency_factors(equivalency_file)
                   if equivalency_file is not None else factors_from_json(content))
    except (OSError, ReportError, UnitError) as exc:
        _err(f"cannot re-render {report_file}: {exc}")
        return EXIT_VALIDATION

    tenant_dir = out_dir / "reports" / fp.tenant_id
    tenant_dir.mkdir(parents=True, exist_ok=True)
    json_doc = render_json(fp, factors)
    html_doc = render_onepage(fp, factors, trend_thresholds=trend_thresholds)
    (tenant_dir / f"{fp.period}.json").write_bytes(json_doc.content)
    (tenant_dir / f"{fp.period}.html").write_bytes(html_doc.content)
    print(f"re-rendered {fp.tenant_id} {fp.period} under {tenant_dir}")
    return EXIT_OK


def cmd_synth(seed: int, n_tenants: int, n_dcs: int, out_dir: Path,
              with_offsets: bool, l_share: float) -> int:
    """Write a deterministic synthetic fleet plus its models file."""
    try:
        fleet = generate_fleet(seed, n_tenants, n_dcs,
                               with_offsets=with_offsets, l_share=l_share)
    except (ValueError, UnitError) as exc:
        _err(f"cannot generate fleet: {exc}")
        return EXIT_VALIDATION
    written = write_fleet(fleet, out_dir)
    print(f"wrote {len(written)} file(s) to {out_dir} "
          f"(seed {seed}, {n_tenants} tenant(s), {n_dcs} data center(s))")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _parse_period(text: str) -> Period:
    try:
        return Period.parse(text)
    except UnitError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _parse_share(text: str) -> Share:
    try:
        return Share(float(text))
    except (ValueError, UnitError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _parse_thresholds(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(
            "expected two comma-separated percentages, e.g. 5,5")
    try:
        improve, worsen = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if improve < 0 or worsen < 0:
        raise argparse.ArgumentTypeError("thresholds must be >= 0")
    return improve, worsen


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carbonalloc",
        description="Attribute data center carbon footprint to service "
                    "tenants and generate per-tenant reports.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate",
                       help="fit server power models from benchmark samples")
    p.add_argument("--samples", type=Path, required=True,
                   help="calibration samples CSV")
    p.add_argument("--models-out", type=Path, required=True,
                   help="where to write the fitted models CSV")

    p = sub.add_parser("compute",
                       help="compute footprints and write reports for one period")
    p.add_argument("--period", type=_parse_period, required=True,
                   help="reporting month, YYYY-MM")
    p.add_argument("--input-dir", type=Path, required=True,
                   help="directory with servers/network/datacenters/tenants CSVs")
    p.add_argument("--models", type=Path, required=True,
                   help="fitted models CSV")
    p.add_argument("--equivalencies", type=Path, required=True,
                   help="equivalency factors JSON")
    p.add_argument("--out-dir", type=Path, required=True,
                   help="output directory (reports/ is created inside)")
    p.add_argument("--history-dir", type=Path, default=None,
                   help="history store root (default: <out-dir>/history)")
    p.add_argument("--l-share", type=_parse_share, default=None,
                   help="override every tenant's load share (0..1)")
    p.add_argument("--jobs", type=int, default=0,
                   help="parallel rendering workers (default: CPU count)")
    p.add_argument("--trend-thresholds", type=_parse_thresholds,
                   default=DEFAULT_TREND_THRESHOLDS, metavar="IMP,WRS",
                   help="improving/worsening badge cutoffs in percent "
                        "(default: 5,5)")

    p = sub.add_parser("report",
                       help="re-render reports from an existing report JSON")
    p.add_argument("--report", type=Path, required=True,
                   help="previously generated report JSON")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--equivalencies", type=Path, default=None,
                   help="override the factors embedded in the report")
    p.add_argument("--trend-thresholds", type=_parse_thresholds,
                   default=DEFAULT_TREND_THRESHOLDS, metavar="IMP,WRS")

    p = sub.add_parser("audit",
                       help="recompute a report from inputs and diff it")
    p.add_argument("--report", type=Path, required=True,
                   help="report JSON under audit")
    p.add_argument("--input-dir", type=Path, required=True,
                   help="the inputs that produced the report")
    p.add_argument("--models", type=Path, required=True)
    p.add_argument("--equivalencies", type=Path, default=None,
                   help="factors config; defaults to those embedded in the report")
    p.add_argument("--history-dir", type=Path, default=None,
                   help="history store used when the report was computed")
    p.add_argument("--l-share", type=_parse_share, default=None)

    p = sub.add_parser("synth", help="generate a synthetic test fleet")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tenants", type=int, default=5)
    p.add_argument("--dcs", type=int, default=3)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--no-offsets", action="store_true",
                   help="zero out fuel, scope 3, and offsets")
    p.add_argument("--l-share", type=float, default=1.0)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "calibrate":
            return cmd_calibrate(args.samples, args.models_out)
        if args.command == "compute":
            config = RunConfig(
                period=args.period,
                input_dir=args.input_dir,
                models_file=args.models,
                equivalency_file=args.equivalencies,
                history_dir=args.history_dir or args.out_dir / "history",
                output_dir=args.out_dir,
                l_share_override=args.l_share,
                trend_thresholds=args.trend_thresholds,
                jobs=args.jobs,
            )
            return cmd_compute(config)
        if args.command == "report":
            return cmd_report(args.report, args.out_dir, args.equivalencies,
                              args.trend_thresholds)
        if args.command == "audit":
            return cmd_audit(args.report, args.input_dir, args.models,
                             args.equivalencies, args.history_dir, args.l_share)
        if args.command == "synth":
            return cmd_synth(args.seed, args.tenants, args.dcs, args.out_dir,
                             with_offsets=not args.no_offsets,
                             l_share=args.l_share)
        raise AssertionError(f"unhandled command {args.command!r}")
    except ValidationFailure as exc:
        _print_validation_failure(exc)
        return EXIT_VALIDATION
    except (IngestError, ReportError, UnitError) as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    except (PowerModelError, AllocationError) as exc:
        _err(str(exc))
        return EXIT_COMPUTATION
    except CarbonAllocError as exc:
        _err(str(exc))
        return EXIT_COMPUTATION


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

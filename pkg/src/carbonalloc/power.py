"""Device energy estimation: calibrated server models and fixed network cost.

Server energy is a linear function of four usage counters (CPU utilization,
cache bytes moved, DRAM bytes accessed, disk bytes moved) plus an intercept
covering idle draw. Weights are calibrated per device model with ordinary
least squares against metered energy readings.

Network device energy uses a fixed per-byte cost: 6e-8 Wh for every byte
sent or received.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    InsufficientSamples,
    MalformedRow,
    ModelMismatch,
    SingularDesign,
    ZeroDenominator,
)
from .ingest import (
    SCHEMA_LINE,
    NetworkUsage,
    ServerUsage,
    SharedDevice,
    _Header,
    _iter_csv,
    _parse_float,
    _parse_nonneg,
    _read_lines,
)
from .units import EnergyWh

__all__ = [
    "CalibrationSample",
    "ServerPowerModel",
    "fit_server_weights",
    "estimate_server_energy",
    "estimate_network_energy",
    "shared_energy_total",
    "allocate_shared_energy",
    "read_models",
    "write_models",
    "read_calibration_samples",
    "NETWORK_WH_PER_BYTE",
    "MIN_CALIBRATION_SAMPLES",
    "REGRESSOR_NAMES",
]

log = logging.getLogger(__name__)

# Nominal energy cost per byte crossing a network device, in Wh.
NETWORK_WH_PER_BYTE = 6e-8

# Four regressors plus an intercept need at least one residual degree of
# freedom to report adjusted R-squared, hence six samples minimum.
MIN_CALIBRATION_SAMPLES = 6

REGRESSOR_NAMES = ("cpu_utilization", "cache_moved", "dram_accessed", "disk_moved")


@dataclass(frozen=True, slots=True)
class CalibrationSample:
    """One metered observation pairing usage counters with energy drawn."""

    cpu_utilization: float
    cache_moved: float
    dram_accessed: float
    disk_moved: float
    measured_energy: EnergyWh


@dataclass(frozen=True, slots=True)
class ServerPowerModel:
    """Fitted per-device-model energy weights.

    ``estimate`` applies the weights in a fixed term order so a given model
    and usage row always reproduce the identical float result.
    """

    device_model: str
    intercept: float
    w_cpu: float
    w_cache: float
    w_dram: float
    w_disk: float
    adjusted_r2: float

    def estimate(self, usage: ServerUsage) -> EnergyWh:
        return estimate_server_energy(self, usage)


def fit_server_weights(samples: list[CalibrationSample] | tuple[CalibrationSample, ...],
                       device_model: str = "") -> ServerPowerModel:
    """Fit the five linear coefficients for one device model with OLS.

    Columns are scaled to unit max-abs before solving; byte counters sit ten
    orders of magnitude above CPU utilization and would otherwise dominate
    the normal equations' conditioning.

    Raises :class:`InsufficientSamples` below six samples and
    :class:`SingularDesign` when a regressor is constant or collinear.
    """
    n = len(samples)
    if n < MIN_CALIBRATION_SAMPLES:
        raise InsufficientSamples(n, MIN_CALIBRATION_SAMPLES)

    y = np.array([s.measured_energy.value for s in samples], dtype=np.float64)
    design = np.column_stack([
        np.ones(n),
        np.array([s.cpu_utilization for s in samples], dtype=np.float64),
        np.array([s.cache_moved for s in samples], dtype=np.float64),
        np.array([s.dram_accessed for s in samples], dtype=np.float64),
        np.array([s.disk_moved for s in samples], dtype=np.float64),
    ])

    scales = np.max(np.abs(design), axis=0)
    zero_cols = [REGRESSOR_NAMES[i - 1] for i in range(1, 5) if scales[i] == 0.0]
    if zero_cols:
        raise SingularDesign(
            "regressor(s) identically zero across all samples: " + ", ".join(zero_cols))
    normalized = design / scales

    singular_values = np.linalg.svd(normalized, compute_uv=False)
    if singular_values[-1] <= 1e-10 * singular_values[0]:
        _, _, vt = np.linalg.svd(normalized)
        null_vec = np.abs(vt[-1])
        involved = [
            ("intercept", *REGRESSOR_NAMES)[i]
            for i in range(5) if null_vec[i] > 0.1 * null_vec.max()
        ]
        raise SingularDesign(
            "collinear column(s): " + ", ".join(involved)
            + f" (singular value ratio {singular_values[-1] / singular_values[0]:.2e})")

    coef_scaled, _, _, _ = np.linalg.lstsq(normalized, y, rcond=None)
    coef = coef_scaled / scales

    fitted = design @ coef
    ssr = float(np.sum((y - fitted) ** 2))
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0.0:
        r2 = 1.0
    else:
        r2 = 1.0 - ssr / tss
    p = len(REGRESSOR_NAMES)
    adjusted_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)

    return ServerPowerModel(
        device_model=device_model,
        intercept=float(coef[0]),
        w_cpu=float(coef[1]),
        w_cache=float(coef[2]),
        w_dram=float(coef[3]),
        w_disk=float(coef[4]),
        adjusted_r2=adjusted_r2,
    )


def estimate_server_energy(model: ServerPowerModel, usage: ServerUsage) -> EnergyWh:
    """Apply a fitted model to one usage row.

    Terms are summed left to right in a fixed order (intercept, CPU, cache,
    DRAM, disk) so results are bit-for-bit reproducible. A fit against noisy
    data can produce slightly negative estimates near idle; those are clamped
    to zero with a warning rather than propagated as unphysical energy.
    """
    if model.device_model and usage.device_model and model.device_model != usage.device_model:
        raise ModelMismatch(model.device_model, usage.device_model)
    value = (model.intercept
             + model.w_cpu * usage.cpu_utilization
             + model.w_cache * usage.cache_moved
             + model.w_dram * usage.dram_accessed
             + model.w_disk * usage.disk_moved)
    if value < 0.0:
        log.warning("negative energy estimate %.6g Wh for device %s (model %s); "
                    "clamping to 0", value, usage.device_id, model.device_model)
        return EnergyWh(0.0)
    return EnergyWh(value)


def estimate_network_energy(row: NetworkUsage) -> EnergyWh:
    """Energy for traffic through a network device at 6e-8 Wh per byte.

    Computed as ``6.0 * total / 1e8`` rather than ``6e-8 * total``: the two
    are the same real number, but scaling the integer byte count first keeps
    the result exact for whole-number totals (6 * total is an exact float for
    realistic byte counts, and 1e8 is exactly representable), whereas
    multiplying by the rounded literal 6e-8 introduces one ulp of error.
    """
    total = row.bytes_sent + row.bytes_received
    return EnergyWh(6.0 * total / 1e8)


def shared_energy_total(devices: tuple[SharedDevice, ...] | list[SharedDevice]) -> EnergyWh:
    """Sum metered shared-device energies in device-id order.

    The order is fixed so reruns over the same inputs sum in the same
    sequence and reproduce identical floats.
    """
    total = 0.0
    for dev in sorted(devices, key=lambda d: d.device_id):
        total += dev.energy.value
    return EnergyWh(total)


def allocate_shared_energy(shared_devices: tuple[SharedDevice, ...] | list[SharedDevice],
                           tenant_direct: EnergyWh,
                           all_tenants_direct: EnergyWh,
                           context: str = "") -> EnergyWh:
    """Split shared (cooling/facility) energy by direct-energy ratio.

    A tenant's slice of the metered shared total is proportional to its share
    of direct IT energy (servers plus network) in the same data center. With
    no shared energy the answer is zero regardless of the denominator; shared
    energy with a zero denominator is unallocatable and raises
    :class:`ZeroDenominator`.
    """
    total = shared_energy_total(shared_devices)
    if total.value == 0.0:
        return EnergyWh(0.0)
    if all_tenants_direct.value == 0.0:
        raise ZeroDenominator(context)
    return EnergyWh(total.value * tenant_direct.value / all_tenants_direct.value)


# ---------------------------------------------------------------------------
# Model and calibration file I/O
# ---------------------------------------------------------------------------

_MODEL_COLUMNS = ("device_model", "intercept", "w_cpu", "w_cache", "w_dram",
                  "w_disk", "adjusted_r2")


def write_models(path: Path | str, models: dict[str, ServerPowerModel]) -> None:
    """Write fitted models as CSV, one row per device model, sorted by name."""
    path = Path(path)
    lines = [SCHEMA_LINE, ",".join(_MODEL_COLUMNS)]
    for name in sorted(models):
        m = models[name]
        lines.append(",".join([
            m.device_model,
            repr(m.intercept), repr(m.w_cpu), repr(m.w_cache),
            repr(m.w_dram), repr(m.w_disk), repr(m.adjusted_r2),
        ]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_models(path: Path | str, source: str | None = None) -> dict[str, ServerPowerModel]:
    """Read a fitted-models CSV keyed by device model."""
    path = Path(path)
    source = source or path.name
    rows = _iter_csv(_read_lines(path), source)
    header_line, header_cells = next(rows)
    header = _Header(source, header_line, header_cells, required=_MODEL_COLUMNS)
    out: dict[str, ServerPowerModel] = {}
    for line_no, cells in rows:
        name = header.get(cells, line_no, "device_model")
        if name in out:
            raise MalformedRow(source, line_no, f"duplicate device model {name!r}")
        r2 = _parse_float(header.get(cells, line_no, "adjusted_r2"),
                          source, line_no, "adjusted_r2")
        if r2 > 1.0 or math.isnan(r2):
            raise MalformedRow(source, line_no,
                               f"adjusted_r2 must be <= 1, got {r2!r}")
        out[name] = ServerPowerModel(
            device_model=name,
            intercept=_parse_float(header.get(cells, line_no, "intercept"),
                                   source, line_no, "intercept"),
            w_cpu=_parse_float(header.get(cells, line_no, "w_cpu"),
                               source, line_no, "w_cpu"),
            w_cache=_parse_float(header.get(cells, line_no, "w_cache"),
                                 source, line_no, "w_cache"),
            w_dram=_parse_float(header.get(cells, line_no, "w_dram"),
                                source, line_no, "w_dram"),
            w_disk=_parse_float(header.get(cells, line_no, "w_disk"),
                                source, line_no, "w_disk"),
            adjusted_r2=r2,
        )
    return out


def read_calibration_samples(path: Path | str,
                             source: str | None = None
                             ) -> dict[str, list[CalibrationSample]]:
    """Read calibration observations grouped by device model.

    Expected columns: device_model, cpu_utilization, cache_moved,
    dram_accessed, disk_moved, measured_energy_wh.
    """
    path = Path(path)
    source = source or path.name
    rows = _iter_csv(_read_lines(path), source)
    header_line, header_cells = next(rows)
    header = _Header(source, header_line, header_cells, required=(
        "device_model", "cpu_utilization", "cache_moved", "dram_accessed",
        "disk_moved", "measured_energy_wh",
    ))
    out: dict[str, list[CalibrationSample]] = {}
    for line_no, cells in rows:
        name = header.get(cells, line_no, "device_model")
        out.setdefault(name, []).append(CalibrationSample(
            cpu_utilization=_parse_float(
                header.get(cells, line_no, "cpu_utilization"),
                source, line_no, "cpu_utilization"),
            cache_moved=_parse_nonneg(header.get(cells, line_no, "cache_moved"),
                                      source, line_no, "cache_moved"),
            dram_accessed=_parse_nonneg(header.get(cells, line_no, "dram_accessed"),
                                        source, line_no, "dram_accessed"),
            disk_moved=_parse_nonneg(header.get(cells, line_no, "disk_moved"),
                                     source, line_no, "disk_moved"),
            measured_energy=EnergyWh(_parse_nonneg(
                header.get(cells, line_no, "measured_energy_wh"),
                source, line_no, "measured_energy_wh")),
        ))
    return out

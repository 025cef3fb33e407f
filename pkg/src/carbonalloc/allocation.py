"""The attribution engine: per-tenant scopes, responsibility ratios, TCF.

The computation is a strict pipeline with an acyclic dependency order:

1. Scope 2 per (tenant, data center) from estimated device energies and the
   proportional split of shared cooling/facility energy. Scope 2 depends only
   on energies and the grid intensity.
2. The responsibility ratio per (tenant, data center): the tenant's fraction
   of the data center's Scope 2 emissions, times its configured load share.
3. Scope 1 (on-site fuel) and Scope 3 (everything indirect) attributed by
   that ratio.
4. Gross total carbon footprint = Scope 1 + Scope 2 + Scope 3; net = gross
   minus the tenant's share of green-energy and certificate offsets.

All sums iterate in sorted key order so identical inputs reproduce identical
floats, which the conservation audit and report auditing rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping, Sequence

from .errors import MissingModel, ZeroDcScope2
from .ingest import DataCenter, RawData, Tenant
from .power import (
    ServerPowerModel,
    allocate_shared_energy,
    estimate_network_energy,
    estimate_server_energy,
)
from .units import (
    CarbonIntensity,
    EmissionsG,
    EnergyWh,
    Period,
    ScopeBreakdown,
    ScopeComponent,
    Share,
    UnitError,
)

if TYPE_CHECKING:
    from .history import HistoryStore

__all__ = [
    "DeviceShare",
    "ServerDeviceShare",
    "NetworkDeviceShare",
    "TenantDcScope2",
    "ResponsibilityRatio",
    "NetTcf",
    "HistoryEntry",
    "DcFootprint",
    "Footprint",
    "compute_scope2",
    "compute_responsibility_ratios",
    "compute_scope1",
    "compute_scope3",
    "compute_gross_tcf",
    "compute_net_tcf",
    "compute_footprints",
    "conservation_audit",
    "AuditCheck",
    "AuditReport",
    "AUDIT_TOLERANCE",
]

# Relative tolerance for conservation checks and breakdown invariants.
AUDIT_TOLERANCE = 1e-9


def _close(actual: float, expected: float, tol: float = AUDIT_TOLERANCE) -> bool:
    scale = max(abs(actual), abs(expected), 1.0)
    return abs(actual - expected) <= tol * scale


# ---------------------------------------------------------------------------
# Per-device detail
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeviceShare:
    """One device's contribution to a tenant's Scope 2 in one data center."""

    device_id: str
    category: str
    energy: EnergyWh
    emissions: EmissionsG


@dataclass(frozen=True)
class ServerDeviceShare(DeviceShare):
    """Server contribution, keeping the usage counters the estimate came from."""

    device_model: str = ""
    utilization: float = 0.0
    cache_moved: float = 0.0
    dram_accessed: float = 0.0
    disk_moved: float = 0.0


@dataclass(frozen=True)
class NetworkDeviceShare(DeviceShare):
    """Network contribution, keeping the byte counters behind the estimate."""

    device_type: str = ""
    bytes_sent: int = 0
    bytes_received: int = 0


# ---------------------------------------------------------------------------
# Stage results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TenantDcScope2:
    """One tenant's Scope 2 in one data center, split into energy categories.

    ``emissions`` is the product (e_server + e_network + e_cooling + e_other)
    x grid intensity x load share; the intensity and share are carried so the
    invariant is checkable on the object alone.
    """

    tenant_id: str
    datacenter_id: str
    e_server: EnergyWh
    e_network: EnergyWh
    e_cooling: EnergyWh
    e_other: EnergyWh
    emissions: EmissionsG
    per_device: tuple[DeviceShare, ...]
    c_dc: CarbonIntensity
    l_share: Share

    def __post_init__(self) -> None:
        total_energy = (self.e_server.value + self.e_network.value
                        + self.e_cooling.value + self.e_other.value)
        expected = total_energy * self.c_dc.value * self.l_share.value
        if not _close(self.emissions.value, expected):
            raise UnitError(
                f"scope2 emissions {self.emissions.value!r} != energy total "
                f"x intensity x load share = {expected!r}")
        by_category = {"server": 0.0, "network": 0.0, "cooling": 0.0, "other": 0.0}
        for dev in self.per_device:
            if dev.category not in by_category:
                raise UnitError(f"unknown device category {dev.category!r}")
            by_category[dev.category] += dev.energy.value
        for category, total in (("server", self.e_server), ("network", self.e_network),
                                ("cooling", self.e_cooling), ("other", self.e_other)):
            if not _close(by_category[category], total.value):
                raise UnitError(
                    f"{category} device energies sum to {by_category[category]!r}, "
                    f"category total is {total.value!r}")

    @property
    def direct_energy(self) -> EnergyWh:
        return EnergyWh(self.e_server.value + self.e_network.value)

    @property
    def total_energy(self) -> EnergyWh:
        return EnergyWh(self.e_server.value + self.e_network.value
                        + self.e_cooling.value + self.e_other.value)


@dataclass(frozen=True)
class ResponsibilityRatio:
    """A tenant's share of one data center's attributable emissions.

    ``scope2_share`` is the tenant's fraction of the data center's total
    Scope 2 emissions; ``ratio`` is that fraction times the tenant's load
    share and is what Scope 1/3 and offsets scale by.
    """

    tenant_id: str
    datacenter_id: str
    scope2_share: Share
    l_share: Share
    ratio: Share

    def __post_init__(self) -> None:
        expected = self.scope2_share.value * self.l_share.value
        if self.ratio.value != expected:
            raise UnitError(
                f"ratio {self.ratio.value!r} != scope2_share x l_share = {expected!r}")


@dataclass(frozen=True)
class NetTcf:
    """Net footprint for one (tenant, data center): gross minus offsets."""

    net: EmissionsG
    green_offset: EmissionsG
    rec_offset: EmissionsG
    over_offset: bool


@dataclass(frozen=True)
class HistoryEntry:
    """A prior period's headline figures, for the two-month comparison."""

    period: Period
    gross: EmissionsG
    net: EmissionsG


@dataclass(frozen=True)
class DcFootprint:
    """One tenant's full footprint within a single data center."""

    datacenter_id: str
    name: str
    region: str
    grid_intensity: CarbonIntensity
    responsibility: ResponsibilityRatio
    breakdown: ScopeBreakdown
    gross: EmissionsG
    net: EmissionsG
    green_offset: EmissionsG
    rec_offset: EmissionsG
    over_offset: bool
    devices: tuple[DeviceShare, ...]

    def __post_init__(self) -> None:
        expected_gross = (self.breakdown.scope1.value + self.breakdown.scope2.value
                          + self.breakdown.scope3.value)
        if not _close(self.gross.value, expected_gross):
            raise UnitError(
                f"gross {self.gross.value!r} != scope sum {expected_gross!r}")
        expected_net = (self.gross.value - self.green_offset.value
                        - self.rec_offset.value)
        if not _close(self.net.value, expected_net):
            raise UnitError(f"net {self.net.value!r} != gross - offsets {expected_net!r}")


@dataclass(frozen=True)
class Footprint:
    """One tenant's footprint for one reporting period, across data centers."""

    tenant_id: str
    display_name: str
    agent_count: int
    period: Period
    per_dc: tuple[DcFootprint, ...]
    gross_total: EmissionsG
    net_total: EmissionsG
    per_agent: EmissionsG
    history: tuple[HistoryEntry, ...] = ()

    def __post_init__(self) -> None:
        gross = 0.0
        net = 0.0
        for dc in self.per_dc:
            gross += dc.gross.value
            net += dc.net.value
        if gross != self.gross_total.value:
            raise UnitError(f"gross_total {self.gross_total.value!r} != "
                            f"sum of per-DC gross {gross!r}")
        if net != self.net_total.value:
            raise UnitError(f"net_total {self.net_total.value!r} != "
                            f"sum of per-DC net {net!r}")
        if self.per_agent.value != self.gross_total.value / self.agent_count:
            raise UnitError(f"per_agent {self.per_agent.value!r} != gross_total "
                            f"/ agent_count = {self.gross_total.value / self.agent_count!r}")
        if len(self.history) > 2:
            raise UnitError("history holds at most the two prior periods")


# ---------------------------------------------------------------------------
# Stage 1: Scope 2
# ---------------------------------------------------------------------------


def compute_scope2(raw: RawData,
                   models: Mapping[str, ServerPowerModel]) -> list[TenantDcScope2]:
    """Per (tenant, data center): estimated energies and Scope 2 emissions.

    Every (tenant, data center) pair the tenant declares gets an entry, even
    with no usage rows (all-zero), so downstream stages and reports cover the
    tenant's whole declared infrastructure.
    """
    missing = {row.device_model for row in raw.servers if row.device_model not in models}
    if missing:
        raise MissingModel(tuple(missing))

    server_rows: dict[tuple[str, str], list] = {}
    for row in raw.servers:
        server_rows.setdefault((row.tenant_id, row.datacenter_id), []).append(row)
    network_rows: dict[tuple[str, str], list] = {}
    for row in raw.network:
        network_rows.setdefault((row.tenant_id, row.datacenter_id), []).append(row)

    # First pass: direct (server + network) energy and device detail.
    direct: dict[tuple[str, str], EnergyWh] = {}
    detail: dict[tuple[str, str], list[DeviceShare]] = {}
    server_energy: dict[tuple[str, str], EnergyWh] = {}
    network_energy: dict[tuple[str, str], EnergyWh] = {}

    pairs = [
        (tenant_id, dc_id)
        for tenant_id in sorted(raw.tenants)
        for dc_id in sorted(raw.tenants[tenant_id].datacenter_ids)
    ]
    for key in pairs:
        tenant_id, dc_id = key
        c_dc = raw.datacenters[dc_id].grid_intensity
        l_share = raw.tenants[tenant_id].l_share
        devices: list[DeviceShare] = []
        e_server = 0.0
        for row in sorted(server_rows.get(key, []), key=lambda r: r.device_id):
            energy = estimate_server_energy(models[row.device_model], row)
            e_server += energy.value
            devices.append(ServerDeviceShare(
                device_id=row.device_id, category="server", energy=energy,
                emissions=EmissionsG(energy.value * c_dc.value * l_share.value),
                device_model=row.device_model, utilization=row.cpu_utilization,
                cache_moved=row.cache_moved, dram_accessed=row.dram_accessed,
                disk_moved=row.disk_moved,
            ))
        e_network = 0.0
        for row in sorted(network_rows.get(key, []), key=lambda r: r.device_id):
            energy = estimate_network_energy(row)
            e_network += energy.value
            devices.append(NetworkDeviceShare(
                device_id=row.device_id, category="network", energy=energy,
                emissions=EmissionsG(energy.value * c_dc.value * l_share.value),
                device_type=row.device_type, bytes_sent=row.bytes_sent,
                bytes_received=row.bytes_received,
            ))
        server_energy[key] = EnergyWh(e_server)
        network_energy[key] = EnergyWh(e_network)
        direct[key] = EnergyWh(e_server + e_network)
        detail[key] = devices

    dc_direct_total: dict[str, float] = {}
    for (tenant_id, dc_id), energy in direct.items():
        dc_direct_total[dc_id] = dc_direct_total.get(dc_id, 0.0) + energy.value

    # Second pass: shared allocations and the Scope 2 product.
    out: list[TenantDcScope2] = []
    for key in pairs:
        tenant_id, dc_id = key
        dc = raw.datacenters[dc_id]
        c_dc = dc.grid_intensity
        l_share = raw.tenants[tenant_id].l_share
        tenant_direct = direct[key]
        all_direct = EnergyWh(dc_direct_total[dc_id])
        devices = list(detail[key])

        category_energy: dict[str, EnergyWh] = {}
        for category, shared in (("cooling", dc.cooling_devices),
                                 ("other", dc.other_devices)):
            category_energy[category] = allocate_shared_energy(
                shared, tenant_direct, all_direct,
                context=f"{category} devices of {dc_id}")
            if all_direct.value > 0.0:
                ratio = tenant_direct.value / all_direct.value
                for dev in sorted(shared, key=lambda d: d.device_id):
                    share_energy = EnergyWh(dev.energy.value * ratio)
                    devices.append(DeviceShare(
                        device_id=dev.device_id, category=category,
                        energy=share_energy,
                        emissions=EmissionsG(
                            share_energy.value * c_dc.value * l_share.value),
                    ))

        e_server = server_energy[key]
        e_network = network_energy[key]
        e_cooling = category_energy["cooling"]
        e_other = category_energy["other"]
        total_energy = (e_server.value + e_network.value
                        + e_cooling.value + e_other.value)
        out.append(TenantDcScope2(
            tenant_id=tenant_id,
            datacenter_id=dc_id,
            e_server=e_server,
            e_network=e_network,
            e_cooling=e_cooling,
            e_other=e_other,
            emissions=EmissionsG(total_energy * c_dc.value * l_share.value),
            per_device=tuple(devices),
            c_dc=c_dc,
            l_share=l_share,
        ))
    return out


# ---------------------------------------------------------------------------
# Stage 2: responsibility ratios
# ---------------------------------------------------------------------------


def compute_responsibility_ratios(
        scope2: Sequence[TenantDcScope2],
        tenants: Mapping[str, Tenant],
        datacenters: Mapping[str, DataCenter] | None = None,
) -> list[ResponsibilityRatio]:
    """Each tenant's fraction of each data center's Scope 2, times load share.

    When a data center's Scope 2 total is zero the fraction is undefined; if
    that data center also has Scope 1 fuel or a Scope 3 total to distribute
    the computation fails with :class:`ZeroDcScope2` (an invented equal split
    would be unauditable), otherwise every tenant's share is simply zero.
    Passing ``datacenters`` enables that check; without it a zero total
    silently yields zero shares.
    """
    dc_total: dict[str, float] = {}
    for entry in scope2:
        dc_total[entry.datacenter_id] = (dc_total.get(entry.datacenter_id, 0.0)
                                         + entry.emissions.value)

    if datacenters is not None:
        for dc_id, total in sorted(dc_total.items()):
            if total == 0.0:
                dc = datacenters[dc_id]
                has_scope1 = any(f.amount * f.emission_factor > 0 for f in dc.fuel_log)
                if has_scope1 or dc.scope3_total.value > 0:
                    raise ZeroDcScope2(dc_id)

    out: list[ResponsibilityRatio] = []
    for entry in scope2:
        total = dc_total[entry.datacenter_id]
        lam = entry.emissions.value / total if total > 0.0 else 0.0
        l_share = tenants[entry.tenant_id].l_share
        out.append(ResponsibilityRatio(
            tenant_id=entry.tenant_id,
            datacenter_id=entry.datacenter_id,
            scope2_share=Share(lam),
            l_share=l_share,
            ratio=Share(lam * l_share.value),
        ))
    return out


# ---------------------------------------------------------------------------
# Stages 3-4: Scopes 1 and 3, gross and net
# ---------------------------------------------------------------------------


def compute_scope1(dc: DataCenter, responsibility: ResponsibilityRatio) -> EmissionsG:
    """The tenant's share of on-site fuel emissions (generators and the like)."""
    total = 0.0
    for entry in sorted(dc.fuel_log, key=lambda f: f.device_id):
        total += entry.amount * entry.emission_factor * responsibility.ratio.value
    return EmissionsG(total)


def compute_scope3(dc: DataCenter, responsibility: ResponsibilityRatio) -> EmissionsG:
    """The tenant's share of the data center's indirect emissions total."""
    return EmissionsG(dc.scope3_total.value * responsibility.ratio.value)


def compute_gross_tcf(breakdown: ScopeBreakdown) -> EmissionsG:
    """Total carbon footprint: the three scopes summed."""
    return EmissionsG(breakdown.scope1.value + breakdown.scope2.value
                      + breakdown.scope3.value)


def compute_net_tcf(gross: EmissionsG, dc: DataCenter,
                    responsibility: ResponsibilityRatio) -> NetTcf:
    """Gross minus the tenant's share of green energy and certificate offsets.

    Offsets scale by the tenant's responsibility ratio, so no tenant's net
    changes when another tenant's figures do. Net may be negative when a data
    center is over-offset; that is flagged, not clamped.
    """
    r = responsibility.ratio.value
    green = dc.green_energy.value * dc.grid_intensity.value * r
    rec = dc.rec_offset.value * r
    net = gross.value - green - rec
    return NetTcf(
        net=EmissionsG(net, allow_negative=True),
        green_offset=EmissionsG(green),
        rec_offset=EmissionsG(rec),
        over_offset=net < 0.0,
    )


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


def compute_footprints(raw: RawData,
                       models: Mapping[str, ServerPowerModel],
                       history_store: "HistoryStore | None" = None) -> list[Footprint]:
    """Run the full pipeline for every tenant in the period.

    Output order is deterministic (tenant id ascending, data center id
    ascending within each tenant). Up to two prior periods are attached from
    the history store when present.
    """
    scope2 = compute_scope2(raw, models)
    ratios = compute_responsibility_ratios(scope2, raw.tenants, raw.datacenters)
    scope2_by_key = {(s.tenant_id, s.datacenter_id): s for s in scope2}
    ratio_by_key = {(r.tenant_id, r.datacenter_id): r for r in ratios}

    footprints: list[Footprint] = []
    for tenant_id in sorted(raw.tenants):
        tenant = raw.tenants[tenant_id]
        per_dc: list[DcFootprint] = []
        gross_total = 0.0
        net_total = 0.0
        for dc_id in sorted(tenant.datacenter_ids):
            dc = raw.datacenters[dc_id]
            s2 = scope2_by_key[(tenant_id, dc_id)]
            resp = ratio_by_key[(tenant_id, dc_id)]
            c = dc.grid_intensity.value
            l = tenant.l_share.value
            breakdown = ScopeBreakdown(
                scope1=compute_scope1(dc, resp),
                scope2=s2.emissions,
                scope3=compute_scope3(dc, resp),
                scope2_components={
                    "server": ScopeComponent(
                        s2.e_server, EmissionsG(s2.e_server.value * c * l)),
                    "network": ScopeComponent(
                        s2.e_network, EmissionsG(s2.e_network.value * c * l)),
                    "cooling": ScopeComponent(
                        s2.e_cooling, EmissionsG(s2.e_cooling.value * c * l)),
                    "other": ScopeComponent(
                        s2.e_other, EmissionsG(s2.e_other.value * c * l)),
                },
            )
            gross = compute_gross_tcf(breakdown)
            net = compute_net_tcf(gross, dc, resp)
            per_dc.append(DcFootprint(
                datacenter_id=dc_id,
                name=dc.name,
                region=dc.region,
                grid_intensity=dc.grid_intensity,
                responsibility=resp,
                breakdown=breakdown,
                gross=gross,
                net=net.net,
                green_offset=net.green_offset,
                rec_offset=net.rec_offset,
                over_offset=net.over_offset,
                devices=s2.per_device,
            ))
            gross_total += gross.value
            net_total += net.net.value

        history: tuple[HistoryEntry, ...] = ()
        if history_store is not None:
            history = history_store.prior_entries(tenant_id, raw.period, limit=2)

        footprints.append(Footprint(
            tenant_id=tenant_id,
            display_name=tenant.display_name,
            agent_count=tenant.agent_count,
            period=raw.period,
            per_dc=tuple(per_dc),
            gross_total=EmissionsG(gross_total),
            net_total=EmissionsG(net_total, allow_negative=True),
            per_agent=EmissionsG(gross_total / tenant.agent_count),
            history=history,
        ))
    return footprints


# ---------------------------------------------------------------------------
# Conservation audit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditCheck:
    """One conservation check: an expected total against the engine's output."""

    name: str
    datacenter_id: str
    expected: float
    actual: float

    @property
    def residual(self) -> float:
        scale = max(abs(self.expected), abs(self.actual), 1.0)
        return abs(self.actual - self.expected) / scale

    @property
    def passed(self) -> bool:
        return self.residual < AUDIT_TOLERANCE


@dataclass(frozen=True)
class AuditReport:
    """All conservation checks for one computed period."""

    checks: tuple[AuditCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> tuple[AuditCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)


def conservation_audit(footprints: Sequence[Footprint], raw: RawData,
                       models: Mapping[str, ServerPowerModel]) -> AuditReport:
    """Verify that per-tenant figures add back up to data center totals.

    Expected values are recomputed from the raw inputs with plain loops (no
    engine code paths): per-device energies straight from the models,
    proportional shares from the direct-energy ratios, fuel and Scope 3
    totals straight from the data center records. Failures are returned as
    data, never raised: an audit's job is to report.
    """
    stored: dict[tuple[str, str], DcFootprint] = {}
    for fp in footprints:
        for dc_fp in fp.per_dc:
            stored[(fp.tenant_id, dc_fp.datacenter_id)] = dc_fp

    # Brute-force recomputation of direct energy per (tenant, DC).
    direct: dict[tuple[str, str], float] = {}
    for row in raw.servers:
        model = models[row.device_model]
        direct[(row.tenant_id, row.datacenter_id)] = (
            direct.get((row.tenant_id, row.datacenter_id), 0.0)
            + estimate_server_energy(model, row).value)
    for row in raw.network:
        direct[(row.tenant_id, row.datacenter_id)] = (
            direct.get((row.tenant_id, row.datacenter_id), 0.0)
            + estimate_network_energy(row).value)

    checks: list[AuditCheck] = []
    for dc_id in sorted(raw.datacenters):
        dc = raw.datacenters[dc_id]
        tenant_ids = sorted(t for t in raw.tenants
                            if dc_id in raw.tenants[t].datacenter_ids)
        if not tenant_ids:
            continue
        all_direct = sum(direct.get((t, dc_id), 0.0) for t in tenant_ids)
        cooling_total = sum(d.energy.value for d in dc.cooling_devices)
        other_total = sum(d.energy.value for d in dc.other_devices)

        # Expected per-tenant Scope 2 emissions, recomputed independently.
        expected_scope2: dict[str, float] = {}
        for t in tenant_ids:
            d = direct.get((t, dc_id), 0.0)
            shared = 0.0
            if all_direct > 0.0:
                shared = (cooling_total + other_total) * d / all_direct
            expected_scope2[t] = ((d + shared) * dc.grid_intensity.value
                                  * raw.tenants[t].l_share.value)
        dc_scope2_total = sum(expected_scope2.values())

        def stored_sum(value_of) -> float:
            total = 0.0
            for t in tenant_ids:
                entry = stored.get((t, dc_id))
                if entry is not None:
                    total += value_of(entry)
            return total

        # Scope 2 share conservation: stored per-tenant Scope 2 over the
        # recomputed DC total must sum to one. A corrupted tenant figure
        # shifts the sum away from one even though each stored/total ratio
        # alone would look plausible.
        if dc_scope2_total > 0.0:
            share_sum = stored_sum(
                lambda e: e.breakdown.scope2.value / dc_scope2_total)
            checks.append(AuditCheck("scope2_share_sum", dc_id, 1.0, share_sum))

        # Shared-energy conservation: tenant cooling/other allocations must
        # reproduce the metered totals.
        stored_cooling = stored_sum(
            lambda e: e.breakdown.scope2_components["cooling"].energy.value)
        stored_other = stored_sum(
            lambda e: e.breakdown.scope2_components["other"].energy.value)
        checks.append(AuditCheck("cooling_energy_total", dc_id,
                                 cooling_total if all_direct > 0 else 0.0,
                                 stored_cooling))
        checks.append(AuditCheck("other_energy_total", dc_id,
                                 other_total if all_direct > 0 else 0.0,
                                 stored_other))

        # Scope 1/3 conservation: stored sums must equal the DC totals scaled
        # by the summed responsibility ratios (with full load shares the sum
        # of ratios is one and the full totals are distributed).
        ratio_sum = 0.0
        if dc_scope2_total > 0.0:
            ratio_sum = sum(
                (expected_scope2[t] / dc_scope2_total)
                * raw.tenants[t].l_share.value
                for t in tenant_ids)
        fuel_total = sum(f.amount * f.emission_factor for f in dc.fuel_log)
        stored_scope1 = stored_sum(lambda e: e.breakdown.scope1.value)
        stored_scope3 = stored_sum(lambda e: e.breakdown.scope3.value)
        checks.append(AuditCheck("scope1_total", dc_id,
                                 fuel_total * ratio_sum, stored_scope1))
        checks.append(AuditCheck("scope3_total", dc_id,
                                 dc.scope3_total.value * ratio_sum, stored_scope3))

        # Gross conservation: stored per-tenant gross must add up to the
        # independently recomputed data center footprint.
        expected_gross = (fuel_total * ratio_sum + dc_scope2_total
                          + dc.scope3_total.value * ratio_sum)
        stored_gross = stored_sum(lambda e: e.gross.value)
        checks.append(AuditCheck("gross_total", dc_id, expected_gross, stored_gross))

    return AuditReport(checks=tuple(checks))

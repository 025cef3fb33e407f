"""Synthetic fleet generator and the command-line workflow around it."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from carbonalloc.cli import (
    EXIT_AUDIT_MISMATCH,
    EXIT_COMPUTATION,
    EXIT_OK,
    EXIT_VALIDATION,
    main,
)
from carbonalloc.ingest import load_input_dir
from carbonalloc.synth import generate_fleet, write_fleet
from carbonalloc.units import Period


def write_factors(tmp_path: Path) -> Path:
    path = tmp_path / "equivalencies.json"
    path.write_text(json.dumps({
        "flight_ams_nyc_g": 500000, "car_km_g": 250,
        "smartphone_charge_g": 8.22, "source_note": "test factors",
    }), encoding="utf-8")
    return path


@pytest.fixture
def workspace(tmp_path):
    """A synthetic fleet on disk plus the factors file tests compute against."""
    fleet_dir = tmp_path / "fleet"
    assert main(["synth", "--seed", "42", "--tenants", "4", "--dcs", "2",
                 "--out-dir", str(fleet_dir)]) == EXIT_OK
    return {
        "root": tmp_path,
        "fleet": fleet_dir,
        "models": fleet_dir / "models.csv",
        "factors": write_factors(tmp_path),
        "out": tmp_path / "out",
    }


def run_compute(ws, period="2025-06", extra=()):
    return main(["compute", "--period", period,
                 "--input-dir", str(ws["fleet"]),
                 "--models", str(ws["models"]),
                 "--equivalencies", str(ws["factors"]),
                 "--out-dir", str(ws["out"]), *extra])


def run_audit(ws, report: Path, extra=()):
    return main(["audit", "--report", str(report),
                 "--input-dir", str(ws["fleet"]),
                 "--models", str(ws["models"]), *extra])


class TestGenerateFleet:
    def test_same_seed_same_fleet(self):
        a = generate_fleet(seed=42, n_tenants=5, n_dcs=3)
        b = generate_fleet(seed=42, n_tenants=5, n_dcs=3)
        assert a.raw == b.raw
        assert a.models == b.models

    def test_different_seeds_differ(self):
        a = generate_fleet(seed=1, n_tenants=5, n_dcs=3)
        b = generate_fleet(seed=2, n_tenants=5, n_dcs=3)
        assert a.raw != b.raw

    def test_every_datacenter_covered(self):
        fleet = generate_fleet(seed=7, n_tenants=3, n_dcs=5)
        used = {dc for t in fleet.raw.tenants.values() for dc in t.datacenter_ids}
        assert used == set(fleet.raw.datacenters)

    def test_every_declared_pair_has_a_server(self):
        fleet = generate_fleet(seed=7, n_tenants=6, n_dcs=3)
        server_pairs = {(r.tenant_id, r.datacenter_id) for r in fleet.raw.servers}
        for tenant in fleet.raw.tenants.values():
            for dc_id in tenant.datacenter_ids:
                assert (tenant.tenant_id, dc_id) in server_pairs

    def test_no_offsets_mode(self):
        fleet = generate_fleet(seed=7, n_tenants=3, n_dcs=2, with_offsets=False)
        for dc in fleet.raw.datacenters.values():
            assert dc.fuel_log == ()
            assert dc.scope3_total.value == 0.0
            assert dc.green_energy.value == 0.0
            assert dc.rec_offset.value == 0.0

    def test_byte_counters_are_even(self):
        # Even counts keep 0.5x scaling exercises integral.
        fleet = generate_fleet(seed=13, n_tenants=5, n_dcs=3)
        assert fleet.raw.network, "expected some network rows"
        for row in fleet.raw.network:
            assert row.bytes_sent % 2 == 0
            assert row.bytes_received % 2 == 0

    def test_write_fleet_is_deterministic(self, tmp_path):
        fleet = generate_fleet(seed=42, n_tenants=4, n_dcs=2)
        dir_a, dir_b = tmp_path / "a", tmp_path / "b"
        write_fleet(fleet, dir_a)
        write_fleet(fleet, dir_b)
        for name in ("servers.csv", "network.csv", "datacenters.csv",
                     "tenants.csv", "models.csv"):
            assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()

    def test_written_fleet_loads_back_identically(self, tmp_path):
        fleet = generate_fleet(seed=42, n_tenants=4, n_dcs=2)
        write_fleet(fleet, tmp_path)
        loaded = load_input_dir(tmp_path, fleet.raw.period)
        assert loaded == fleet.raw


class TestComputeCommand:
    def test_writes_report_pair_per_tenant(self, workspace, capsys):
        assert run_compute(workspace) == EXIT_OK
        out = capsys.readouterr().out
        assert "conservation audit: PASS" in out
        reports = workspace["out"] / "reports"
        tenants = sorted(p.name for p in reports.iterdir())
        assert tenants == ["TENANT_01", "TENANT_02", "TENANT_03", "TENANT_04"]
        for tenant in tenants:
            assert (reports / tenant / "2025-06.json").exists()
            assert (reports / tenant / "2025-06.html").exists()
        assert (workspace["out"] / "history" / "TENANT_01" / "2025-06.json").exists()

    def test_rerun_is_byte_identical(self, workspace):
        assert run_compute(workspace) == EXIT_OK
        report = workspace["out"] / "reports" / "TENANT_01" / "2025-06.json"
        first = report.read_bytes()
        assert run_compute(workspace) == EXIT_OK
        assert report.read_bytes() == first

    def test_validation_error_exits_1(self, workspace, capsys):
        servers = workspace["fleet"] / "servers.csv"
        bad = servers.read_text() + "DC_01,SRV_X,MODEL_A,TENANT_GHOST,0.5,0,0,0\n"
        servers.write_text(bad)
        assert run_compute(workspace) == EXIT_VALIDATION
        assert "TENANT_GHOST" in capsys.readouterr().err

    def test_malformed_csv_exits_1(self, workspace, capsys):
        servers = workspace["fleet"] / "servers.csv"
        servers.write_text("no schema line here\n" + servers.read_text())
        assert run_compute(workspace) == EXIT_VALIDATION
        assert "schema_version" in capsys.readouterr().err

    def test_missing_models_file_exits_1(self, workspace, capsys):
        workspace["models"].unlink()
        assert run_compute(workspace) == EXIT_VALIDATION
        assert "cannot read file" in capsys.readouterr().err

    def test_missing_model_exits_2(self, workspace, capsys):
        models = workspace["models"]
        lines = models.read_text().splitlines()
        kept = [ln for ln in lines if not ln.startswith("MODEL_A")]
        assert len(kept) < len(lines), "fleet should use MODEL_A"
        models.write_text("\n".join(kept) + "\n")
        assert run_compute(workspace) == EXIT_COMPUTATION
        assert "MODEL_A" in capsys.readouterr().err

    def test_subsequent_month_reports_trend(self, workspace):
        assert run_compute(workspace, period="2025-05") == EXIT_OK
        assert run_compute(workspace, period="2025-06") == EXIT_OK
        doc = json.loads((workspace["out"] / "reports" / "TENANT_01" /
                          "2025-06.json").read_text())
        (entry,) = doc["summary"]["history"]
        assert entry["period"] == "2025-05"
        assert entry["pctChange"] == 0.0  # identical inputs both months

    def test_l_share_override_scales_scope2(self, workspace):
        assert run_compute(workspace) == EXIT_OK
        full = json.loads((workspace["out"] / "reports" / "TENANT_01" /
                           "2025-06.json").read_text())
        workspace["out2"] = workspace["root"] / "out2"
        assert main(["compute", "--period", "2025-06",
                     "--input-dir", str(workspace["fleet"]),
                     "--models", str(workspace["models"]),
                     "--equivalencies", str(workspace["factors"]),
                     "--out-dir", str(workspace["out2"]),
                     "--l-share", "0.5"]) == EXIT_OK
        halved = json.loads((workspace["out2"] / "reports" / "TENANT_01" /
                             "2025-06.json").read_text())
        dc_id = sorted(halved["datacenters"])[0]
        assert halved["datacenters"][dc_id]["lShare"] == 0.5
        full_s2 = full["datacenters"][dc_id]["scopes"]["scope2"]["emissions"]
        half_s2 = halved["datacenters"][dc_id]["scopes"]["scope2"]["emissions"]
        assert half_s2 == pytest.approx(full_s2 * 0.5, rel=1e-12)


class TestAuditCommand:
    def test_clean_report_passes(self, workspace, capsys):
        assert run_compute(workspace) == EXIT_OK
        report = workspace["out"] / "reports" / "TENANT_02" / "2025-06.json"
        assert run_audit(workspace, report,
                         extra=["--history-dir",
                                str(workspace["out"] / "history")]) == EXIT_OK
        assert "matches recomputation" in capsys.readouterr().out

    def test_whitespace_only_changes_still_pass(self, workspace):
        assert run_compute(workspace) == EXIT_OK
        report = workspace["out"] / "reports" / "TENANT_02" / "2025-06.json"
        doc = json.loads(report.read_text())
        report.write_text(json.dumps(doc, indent=4))  # reflow, same values
        assert run_audit(workspace, report) == EXIT_OK

    def test_tampered_value_fails_with_field_path(self, workspace, capsys):
        assert run_compute(workspace) == EXIT_OK
        report = workspace["out"] / "reports" / "TENANT_02" / "2025-06.json"
        doc = json.loads(report.read_text())
        doc["summary"]["grossEmissions"] *= 1.001
        report.write_text(json.dumps(doc))
        assert run_audit(workspace, report) == EXIT_AUDIT_MISMATCH
        captured = capsys.readouterr()
        assert "summary.grossEmissions" in captured.out + captured.err

    def test_l_share_mismatch_detected(self, workspace, capsys):
        assert run_compute(workspace) == EXIT_OK
        report = workspace["out"] / "reports" / "TENANT_02" / "2025-06.json"
        assert run_audit(workspace, report,
                         extra=["--l-share", "0.5"]) == EXIT_AUDIT_MISMATCH
        captured = capsys.readouterr()
        assert "lShare" in captured.out + captured.err

    def test_unparseable_report_exits_1(self, workspace, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{", encoding="utf-8")
        assert run_audit(workspace, bad) == EXIT_VALIDATION


class TestReportCommand:
    def test_rerender_reproduces_json_byte_for_byte(self, workspace):
        assert run_compute(workspace) == EXIT_OK
        original = workspace["out"] / "reports" / "TENANT_03" / "2025-06.json"
        rerender_dir = workspace["root"] / "rerender"
        assert main(["report", "--report", str(original),
                     "--out-dir", str(rerender_dir)]) == EXIT_OK
        copy = rerender_dir / "reports" / "TENANT_03" / "2025-06.json"
        assert copy.read_bytes() == original.read_bytes()
        assert (rerender_dir / "reports" / "TENANT_03" / "2025-06.html").exists()


class TestCalibrateCommand:
    SAMPLES_HEADER = ("device_model,cpu_utilization,cache_moved,dram_accessed,"
                      "disk_moved,measured_energy_wh")

    def _write_samples(self, path: Path, rows: list[str]) -> Path:
        path.write_text("\n".join(["# schema_version=1", self.SAMPLES_HEADER,
                                   *rows]) + "\n", encoding="utf-8")
        return path

    def _noiseless_rows(self, model: str, n: int, constant_cpu=None) -> list[str]:
        import random
        rng = random.Random(99)
        rows = []
        for _ in range(n):
            u = constant_cpu if constant_cpu is not None else rng.uniform(0, 1)
            cache = rng.uniform(0, 5e7)
            dram = rng.uniform(0, 1e10)
            disk = rng.uniform(0, 5e10)
            energy = 10 + 500 * u + 1e-6 * cache + 2e-9 * dram + 5e-10 * disk
            rows.append(f"{model},{u!r},{cache!r},{dram!r},{disk!r},{energy!r}")
        return rows

    def test_fits_and_reports_r2(self, tmp_path, capsys):
        samples = self._write_samples(tmp_path / "samples.csv",
                                      self._noiseless_rows("ABC_987", 50))
        out = tmp_path / "models.csv"
        assert main(["calibrate", "--samples", str(samples),
                     "--models-out", str(out)]) == EXIT_OK
        stdout = capsys.readouterr().out
        assert "ABC_987: n=50 adjusted_r2=1.0000" in stdout
        assert out.exists()

    def test_singular_design_exits_2_and_names_column(self, tmp_path, capsys):
        samples = self._write_samples(
            tmp_path / "samples.csv",
            self._noiseless_rows("ABC_987", 20, constant_cpu=0.5))
        assert main(["calibrate", "--samples", str(samples),
                     "--models-out", str(tmp_path / "m.csv")]) == EXIT_COMPUTATION
        assert "cpu_utilization" in capsys.readouterr().err

    def test_too_few_samples_exits_2(self, tmp_path, capsys):
        samples = self._write_samples(tmp_path / "samples.csv",
                                      self._noiseless_rows("ABC_987", 3))
        assert main(["calibrate", "--samples", str(samples),
                     "--models-out", str(tmp_path / "m.csv")]) == EXIT_COMPUTATION
        assert "3" in capsys.readouterr().err


def test_console_script_is_wired():
    proc = subprocess.run([sys.executable, "-m", "carbonalloc.cli", "--help"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    for command in ("calibrate", "compute", "report", "audit", "synth"):
        assert command in proc.stdout


def test_synth_default_period_is_stable():
    fleet = generate_fleet(seed=1, n_tenants=2, n_dcs=1)
    assert fleet.raw.period == Period(2025, 1)

"""Prior-period storage for the month-over-month comparison.

Layout: ``<root>/<tenant_id>/<YYYY-MM>.json``, each file being the tenant's
full JSON report for that period. Only the headline figures are read back
(``summary.grossEmissions`` / ``summary.netEmissions``); the rest of the file
is carried for auditability.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from .allocation import HistoryEntry
from .units import EmissionsG, Period

__all__ = ["HistoryStore"]

log = logging.getLogger(__name__)


class HistoryStore:
    """Filesystem-backed store of per-tenant, per-period report JSON."""

    def __init__(self, root: Path | str):
        self.root = Path(root)

    def path_for(self, tenant_id: str, period: Period) -> Path:
        return self.root / tenant_id / f"{period}.json"

    def load_entry(self, tenant_id: str, period: Period) -> HistoryEntry | None:
        """Read one period's headline figures, or None when absent/unreadable.

        A corrupt history file degrades the trend section of the next report,
        which is not worth failing a whole monthly run over; it is logged and
        skipped.
        """
        path = self.path_for(tenant_id, period)
        if not path.is_file():
            return None
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            summary = doc["summary"]
            return HistoryEntry(
                period=period,
                gross=EmissionsG(float(summary["grossEmissions"])),
                net=EmissionsG(float(summary["netEmissions"]), allow_negative=True),
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            log.warning("unreadable history file %s: %s", path, exc)
            return None

    def prior_entries(self, tenant_id: str, period: Period,
                      limit: int = 2) -> tuple[HistoryEntry, ...]:
        """The up-to-``limit`` immediately preceding months, most recent first.

        Only consecutive prior months are considered: a gap in the store ends
        the lookback (comparing against a stale non-adjacent month would be
        presented as if it were last month).
        """
        entries: list[HistoryEntry] = []
        cursor = period
        for _ in range(limit):
            cursor = cursor.prev()
            entry = self.load_entry(tenant_id, cursor)
            if entry is None:
                break
            entries.append(entry)
        return tuple(entries)

    def save(self, tenant_id: str, period: Period, document: bytes) -> Path:
        """Write (or replace) one period's report JSON for a tenant."""
        path = self.path_for(tenant_id, period)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(document)
        return path

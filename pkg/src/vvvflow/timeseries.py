"""CSV time series of diagnostics records.

Fixed column order, one header row, 17 significant digits per value so the
file round-trips doubles exactly and reruns are byte comparable.
"""

from __future__ import annotations

from .diagnostics import DiagnosticsRecord

CSV_COLUMNS = (
    "t",
    "l2_u",
    "h1_u",
    "l2_w",
    "h1_w",
    "div_w_l2",
    "curl_mismatch_l2",
    "curl_mismatch_h1",
    "energy_budget_residual",
    "blow_up_indicator",
)


def format_row(record: DiagnosticsRecord) -> str:
    return ",".join(f"{getattr(record, name):.17g}" for name in CSV_COLUMNS)


class TimeseriesWriter:
    """Appends one CSV row per record, flushing so partial runs persist."""

    def __init__(self, path):
        self._fh = open(path, "w", encoding="utf-8", newline="\n")
        self._fh.write(",".join(CSV_COLUMNS) + "\n")
        self._fh.flush()

    def append(self, record: DiagnosticsRecord) -> None:
        self._fh.write(format_row(record) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False

"""
Result Serialization
CSV/JSON writers with fixed numeric formatting and all-or-nothing writes
"""

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

import pandas as pd

from .models import BatteryReport, MetricsRow, RunSummary, SensitivityCell, SweepResult
from .network import Link

logger = logging.getLogger(__name__)

# 17 significant digits round-trip every double; '%' formatting ignores locale
FLOAT_FORMAT = "%.17g"

TIMESERIES_COLUMNS = [
    "step", "density", "mean_net_size", "clustering", "mean_affinity", "std_affinity",
    "low_outliers", "high_outliers",
    "links_strongest", "links_strong", "links_medium", "links_weak", "links_weakest",
]


def _csv_text(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def timeseries_frame(rows: Sequence[MetricsRow]) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in rows], columns=TIMESERIES_COLUMNS)


def timeseries_csv(rows: Sequence[MetricsRow]) -> str:
    return _csv_text(timeseries_frame(rows))


def edges_csv(links: Iterable[Link]) -> str:
    frame = pd.DataFrame(
        [(link.source, link.target, link.tier.label) for link in links],
        columns=["source", "target", "tier"],
    )
    return _csv_text(frame)


def summary_json(summary: RunSummary) -> str:
    """Self-describing run summary: effective params, seed, initial and final rows"""
    document = {
        "params": summary.params.model_dump(mode="json", by_alias=True),
        "seed": summary.seed,
        "steps": len(summary.time_series),
        "initial": summary.initial_row.model_dump(mode="json"),
        "final": summary.final_row.model_dump(mode="json"),
        "total_deaths": sum(summary.deaths_per_step),
    }
    return json.dumps(document, indent=2) + "\n"


def sweep_csv(result: SweepResult) -> str:
    frame = pd.DataFrame([row.model_dump() for row in result.rows])
    frame.insert(0, "param", result.param_name.replace("_", "-"))
    return _csv_text(frame)


def sensitivity_csv(cells: Sequence[SensitivityCell]) -> str:
    columns = list(SensitivityCell.model_fields)
    frame = pd.DataFrame([cell.model_dump() for cell in cells], columns=columns)
    frame["param"] = frame["param"].str.replace("_", "-")
    return _csv_text(frame)


def battery_csv(report: BatteryReport) -> str:
    records: List[Dict[str, object]] = []
    for scenario in report.scenarios:
        record: Dict[str, object] = {"scenario": scenario.name, "replications": scenario.replications}
        record.update(scenario.final_means)
        record["passed"] = scenario.passed
        records.append(record)
    return _csv_text(pd.DataFrame(records))


def write_files(out_dir: Path, contents: Dict[str, str]) -> List[Path]:
    """
    Write several files atomically as a group

    Everything is first written to temporary files in out_dir and only then
    renamed into place; on any failure the temporaries are removed and no
    target file is created or replaced.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    staged: List[tuple] = []
    try:
        for name, text in contents.items():
            fd, tmp_name = tempfile.mkstemp(prefix=f".{name}.", suffix=".tmp", dir=out_dir)
            staged.append((Path(tmp_name), out_dir / name))
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
        for tmp_path, final_path in staged:
            os.replace(tmp_path, final_path)
    except BaseException:
        for tmp_path, _ in staged:
            tmp_path.unlink(missing_ok=True)
        raise

    written = [final_path for _, final_path in staged]
    logger.info(f"Wrote {', '.join(p.name for p in written)} to {out_dir}")
    return written


def run_outputs(summary: RunSummary, links: Iterable[Link] | None = None) -> Dict[str, str]:
    """File name -> content for a single run"""
    contents = {
        "timeseries.csv": timeseries_csv(summary.time_series),
        "summary.json": summary_json(summary),
    }
    if links is not None:
        contents["edges.csv"] = edges_csv(links)
    return contents

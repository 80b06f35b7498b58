"""
CSV report writing.

Schema: experiment,param_json,n_index,estimate,exact,std_error,z_score.
UTF-8, LF line endings, reals with 17 significant digits. The file is
written to a temporary sibling and renamed into place.
"""

import json
import logging
import os
import tempfile
from pathlib import Path

import pandas as pd

from .experiments import ExperimentOutcome

logger = logging.getLogger(__name__)

COLUMNS = ["experiment", "param_json", "n_index", "estimate", "exact", "std_error", "z_score"]


def report_frame(outcome: ExperimentOutcome) -> pd.DataFrame:
    """One row per report entry."""
    param_json = json.dumps(outcome.params, sort_keys=True, separators=(",", ":"))
    rows = [
        {
            "experiment": outcome.experiment,
            "param_json": param_json,
            "n_index": entry.index,
            "estimate": entry.estimate,
            "exact": entry.exact,
            "std_error": entry.std_error,
            "z_score": entry.z_score,
        }
        for entry in outcome.report
    ]
    return pd.DataFrame(rows, columns=COLUMNS)


def write_report(outcome: ExperimentOutcome, path: str) -> Path:
    """Atomically write the CSV report and return its path."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    frame = report_frame(outcome)

    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            frame.to_csv(f, index=False, float_format="%.17g", lineterminator="\n")
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.info("Wrote %d rows to %s", len(frame), target)
    return target


def read_report(path: str) -> pd.DataFrame:
    """Load a report written by write_report."""
    return pd.read_csv(path, dtype={"n_index": str}, keep_default_na=False)

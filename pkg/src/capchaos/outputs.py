"""CSV / JSON persistence and run manifests."""
from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np


def tool_version():
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def fmt(x):
    """17 significant digits: a lossless decimal for any double."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
    return path


def read_csv(path):
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # json writes repr(), already a round-trip decimal; non-finite values become strings
        return x if math.isfinite(x) else str(x)
    return obj


def dumps(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False)


def sha256_file(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    config_digest: str
    tool_version: str
    timestamp: str
    master_seed: int
    files: dict

    def write(self, directory):
        path = Path(directory) / "manifest.json"
        path.write_text(dumps(asdict(self)) + "\n")
        return path


def build_manifest(config, directory, names):
    directory = Path(directory)
    return RunManifest(
        config_digest=config.digest(),
        tool_version=tool_version(),
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        master_seed=config.master_seed,
        files={n: sha256_file(directory / n) for n in sorted(names)},
    )


REPLICATE_HEADER = ("ell", "replicate", "area", "h1", "h2")
SUMMARY_HEADER = (
    "ell", "eps", "v1", "v2", "var_total", "dw_bound", "tail_sum", "expected_area", "mean", "mean_se",
    "variance", "variance_se", "var_ratio", "skewness", "excess_kurtosis", "w1", "w1_se", "bias_budget",
    "admissible",
)


def run_directory(config):
    d = Path(config.output_dir) / config.digest()
    d.mkdir(parents=True, exist_ok=True)
    return d


def write_replicates(directory, samples):
    return write_csv(Path(directory) / "replicates.csv", REPLICATE_HEADER,
                     [(s.ell, s.replicate, s.area, s.h1, s.h2) for s in samples])


def write_summary(directory, rows):
    return write_csv(Path(directory) / "summary.csv", SUMMARY_HEADER,
                     [tuple(getattr(r, h) for h in SUMMARY_HEADER) for r in rows])


def write_report(directory, config, rows):
    payload = {
        "config": config.canonical(),
        "config_digest": config.digest(),
        "rows": [{**{h: getattr(r, h) for h in SUMMARY_HEADER}, **r.extra} for r in rows],
    }
    path = Path(directory) / "report.json"
    path.write_text(dumps(payload) + "\n")
    return path


def write_field_csv(path, grid):
    """theta,phi,value rows for every node of a FieldGrid."""
    th = np.repeat(grid.thetas, grid.n_phi)
    ph = np.tile(grid.phis, grid.thetas.size)
    return write_csv(path, ("theta", "phi", "value"), zip(th, ph, grid.values.ravel()))

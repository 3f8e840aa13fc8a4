"""Deterministic CSV/JSON emission for experiment outputs.

CSV files are RFC-4180 style (header row, CRLF records) with floats printed
to 17 significant digits so files round-trip bit-exactly.  Every run also
writes a JSON sidecar echoing the full configuration and package version;
nothing time- or host-dependent goes into any output file, so repeated runs
are byte-identical.
"""

import csv
import json
from pathlib import Path


def fmt(value):
    """Render one CSV field; floats at 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_measure_csv(path, measure):
    from .measures import measure_to_rows

    return write_csv(path, ["cell_index", "cell_center", "weight"], measure_to_rows(measure))


def write_sidecar(path, config_echo, audits, version):
    """Config echo + audit results; `passed` must be true for exit code 0."""
    return write_json(path, {
        "artifact_version": version,
        "config": config_echo,
        "audits": audits,
        "passed": all(a.get("ok", False) for a in audits),
    })

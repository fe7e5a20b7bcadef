"""Tabular results with provenance, written as '#'-headed CSV."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field

from . import __version__

# RFC 4180 record separator, used for the metadata lines as well
EOL = "\r\n"


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config):
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def format_value(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    if hasattr(value, "item"):  # numpy scalar
        return format_value(value.item())
    return str(value)


@dataclass
class CurveDataset:
    columns: list
    units: dict
    rows: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    flag_columns: tuple = ()

    def __post_init__(self):
        missing = [c for c in self.columns if c not in self.units]
        if missing:
            raise ValueError(f"units missing for columns {missing}")

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(list(values))

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def where(self, **equal):
        idx = {k: self.columns.index(k) for k in equal}
        return [r for r in self.rows if all(r[i] == equal[k] for k, i in idx.items())]

    def check_finite(self):
        """Non-finite numbers are only allowed in rows that raise a flag column."""
        flags = [self.columns.index(c) for c in self.flag_columns]
        for n, row in enumerate(self.rows):
            bad = any(isinstance(v, float) and not math.isfinite(v) for v in row)
            if bad and not any(row[i] for i in flags):
                raise ValueError(f"row {n} holds non-finite values without a flag")

    def to_csv(self, stream=None):
        self.check_finite()
        out = stream if stream is not None else io.StringIO()
        prov = dict(self.provenance)
        meta = [f"interferoq {prov.pop('version', __version__)}"]
        for key in ("command", "config_sha256", "seed"):
            if key in prov:
                meta.append(f"{key}: {prov.pop(key)}")
        if "config" in prov:
            meta.append(f"config: {canonical_json(prov.pop('config'))}")
        meta.extend(f"{key}: {prov[key]}" for key in sorted(prov))
        meta.append("units: " + "; ".join(f"{c}={self.units[c]}" for c in self.columns))
        for line in meta:
            out.write(f"# {line}{EOL}")
        writer = csv.writer(out, lineterminator=EOL)
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(v) for v in row])
        return out.getvalue() if stream is None else None


def read_csv(path_or_text):
    """Parse a dataset file back into (metadata dict, header, rows of strings)."""
    if "\n" in path_or_text:
        text = path_or_text
    else:
        with open(path_or_text, newline="") as fh:
            text = fh.read()
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = value
        elif line:
            body.append(line)
    rows = list(csv.reader(body))
    return meta, rows[0], rows[1:]

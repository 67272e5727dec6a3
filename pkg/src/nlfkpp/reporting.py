"""CSV and metadata-sidecar writers.

Floats are written with shortest round-trip repr so identical runs produce
byte-identical files; every CSV gets a header row, and callers may attach a
JSON sidecar recording the fully resolved configuration that produced it.
"""

import json
import os


def _fmt(v):
    if hasattr(v, "item"):  # numpy scalar -> python scalar first
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, header, rows, meta=None):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    if meta is not None:
        write_sidecar(path, meta)
    return path


def write_sidecar(path, meta):
    side = path + ".meta.json"
    with open(side, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return side

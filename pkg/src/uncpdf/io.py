"""JSON observable schema, grid specs and CSV output."""

from __future__ import annotations

import csv
import io as _io
import json
import math
from typing import Iterable, Sequence, TextIO, Union

import numpy as np

from .observables import HermitianObservable, QubitObservable, Spectrum

Observable = Union[Spectrum, QubitObservable, HermitianObservable]


class SchemaError(ValueError):
    pass


def parse_observable(obj: dict) -> Observable:
    """One of ``{"spectrum": [...]}``, ``{"qubit": {"a0": r, "a": [r, r, r]}}`` or
    ``{"matrix": {"re": [[...]], "im": [[...]]}}``."""
    if not isinstance(obj, dict) or len(obj) != 1:
        raise SchemaError("observable must be an object with exactly one of 'spectrum', 'qubit', 'matrix'")
    (key, val), = obj.items()
    if key == "spectrum":
        return Spectrum([float(v) for v in val])
    if key == "qubit":
        if set(val) != {"a0", "a"}:
            raise SchemaError("qubit needs fields 'a0' and 'a'")
        return QubitObservable(float(val["a0"]), [float(v) for v in val["a"]])
    if key == "matrix":
        re = np.asarray(val["re"], dtype=float)
        im = np.asarray(val.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise SchemaError("matrix 're' and 'im' must have the same shape")
        return HermitianObservable(re + 1j * im)
    raise SchemaError(f"unknown observable kind {key!r}")


def dump_observable(obs: Observable) -> dict:
    if isinstance(obs, Spectrum):
        return {"spectrum": obs.values.tolist()}
    if isinstance(obs, QubitObservable):
        return {"qubit": {"a0": obs.a0, "a": obs.a.tolist()}}
    if isinstance(obs, HermitianObservable):
        return {"matrix": {"re": obs.matrix.real.tolist(), "im": obs.matrix.imag.tolist()}}
    raise TypeError(f"cannot serialise {type(obs).__name__}")


def load_observables(path: str) -> list[Observable]:
    """A file holds one observable object or a list of them."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    items = data if isinstance(data, list) else [data]
    return [parse_observable(item) for item in items]


def save_observables(path: str, observables: Sequence[Observable]) -> None:
    items = [dump_observable(o) for o in observables]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(items[0] if len(items) == 1 else items, fh, indent=2)
        fh.write("\n")


def parse_grid(text: str) -> list[tuple[float, float, int]]:
    """``lo:hi:n`` per axis, axes separated by commas; endpoints inclusive, ``n >= 2``."""
    axes = []
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 3:
            raise ValueError(f"grid axis {part!r} is not lo:hi:n")
        lo, hi, n = float(bits[0]), float(bits[1]), int(bits[2])
        if n < 2:
            raise ValueError("grid needs n >= 2 points per axis")
        if not hi > lo:
            raise ValueError("grid needs hi > lo")
        axes.append((lo, hi, n))
    return axes


def fmt(value: float) -> str:
    """12 significant digits; divergent values as the token ``inf``."""
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return f"{v:.12g}"


def write_csv(out: TextIO, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([c if isinstance(c, str) else fmt(c) for c in row])


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    write_csv(buf, header, rows)
    return buf.getvalue()

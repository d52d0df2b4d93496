"""Plot data and table files.  All numbers use C-locale formatting."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from fronttrack.piecewise import PiecewiseConstantFn

PathLike = Union[str, Path]


def _num(x: float) -> str:
    # shortest representation that round-trips
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def staircase_rows(fn: PiecewiseConstantFn, window: Sequence[float]) -> list[tuple[float, float]]:
    """``(x, value)`` rows; every jump inside the window appears twice."""
    lo, hi = float(window[0]), float(window[1])
    rows = [(lo, fn.sample(lo))]
    inner = fn.restrict_breakpoints(lo, hi)
    for x in inner:
        k = int(np.searchsorted(fn.breakpoints, x, side="left"))
        rows.append((float(x), float(fn.values[k])))
        rows.append((float(x), float(fn.values[k + 1])))
    rows.append((hi, rows[-1][1]))
    return rows


def emit_plot_data(fn: PiecewiseConstantFn, window: Sequence[float], path: PathLike,
                   metadata: Optional[Mapping[str, object]] = None,
                   fmt: str = "txt") -> Path:
    """Write a staircase as two columns (``txt``: whitespace, ``csv``: comma)."""
    path = Path(path)
    rows = staircase_rows(fn, window)
    out = io.StringIO()
    meta = " ".join(f"{k}={v}" for k, v in (metadata or {}).items())
    out.write(f"# {meta}\n" if meta else "# staircase\n")
    if fmt == "csv":
        out.write("x,u\n")
        sep = ","
    else:
        sep = " "
    for x, v in rows:
        out.write(f"{_num(x)}{sep}{_num(v)}\n")
    try:
        path.write_text(out.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write plot data to {path}: {exc.strerror or exc}") from exc
    return path


def read_plot_data(path: PathLike) -> tuple[PiecewiseConstantFn, tuple[float, float]]:
    """Parse a staircase file back into a step function and its window."""
    xs, vs = [], []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line == "x,u":
            continue
        a, b = line.replace(",", " ").split()
        xs.append(float(a))
        vs.append(float(b))
    if len(xs) < 2:
        raise ValueError(f"{path}: need at least two rows")
    window = (xs[0], xs[-1])
    bps, vals = [], [vs[0]]
    k = 1
    while k < len(xs) - 1:
        if xs[k + 1] == xs[k]:
            bps.append(xs[k])
            vals.append(vs[k + 1])
            k += 2
        else:
            k += 1
    return PiecewiseConstantFn(np.array(bps), np.array(vals)), window


def format_table(rows, fmt: str = "csv") -> str:
    """Convergence rows as CSV (``n,l1_error,ooc``) or an aligned text table."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "l1_error", "ooc"])
        for r in rows:
            w.writerow([r.n, "%.3e" % r.error, "" if r.ooc is None else "%.2f" % r.ooc])
        return buf.getvalue()
    lines = [f"{'n':>6}  {'L1 error':>10}  {'L1 OOC':>6}"]
    for r in rows:
        ooc = "--" if r.ooc is None else "%.2f" % r.ooc
        lines.append(f"{r.n:>6}  {r.error:>10.3e}  {ooc:>6}")
    return "\n".join(lines) + "\n"


def write_text(path: PathLike, text: str) -> Path:
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path

"""Run configuration and file formats.

Config files are JSON objects with the sections ``space``, ``system``,
``iteration``, ``higuchi``, ``oracle`` and ``outputs`` (see README).  Output
formats are byte-deterministic:

* density CSV: ``index,x,lambda,u`` (1D) or ``i,j,x,y,lambda,u`` (2D), one row
  per grid point, finite values with 17 significant digits, bottom as
  ``-inf``;
* fuzzy CSV: the same without the ``lambda`` column;
* PGM: plain ``P2`` (or binary ``P5``), maxval 255, pixel
  ``floor(255 u + 1/2)``; row 0 is the top edge ``x2 = 1`` and column ``c``
  is ``x1 = c / M``;
* fit CSV: ``k,measure,abscissa,ordinate,cumulative_dimension``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .engine import DEFAULT_ORACLE_BUDGET, IterationConfig
from .errors import ConfigError, InvalidScale
from .grid import UniformGrid
from .higuchi import HiguchiResult, dimension_curve
from .ifs import AffineMap, CountableSystem, builtin_family

OUTPUT_KEYS = ("density_path", "fuzzy_path", "image_path", "fit_path")


@dataclass
class RunConfig:
    grid: UniformGrid
    system: CountableSystem
    n: int
    iteration: IterationConfig
    k_max: tuple = ()
    oracle_depth: int = 0
    oracle_budget: int = DEFAULT_ORACLE_BUDGET
    outputs: dict = field(default_factory=dict)
    pgm_binary: bool = False


# --- config parsing ----------------------------------------------------------

def _section(raw: dict, name: str, allowed, required=False) -> dict:
    sec = raw.get(name)
    if sec is None:
        if required:
            raise ConfigError(name, "section is required")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(name, "must be an object")
    unknown = sorted(set(sec) - set(allowed))
    if unknown:
        raise ConfigError(f"{name}.{unknown[0]}", "unknown key")
    return sec


def _int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(path, f"must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value}")
    return value


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"must be a number, got {value!r}")
    return float(value)


def _parse_map(entry, path: str) -> AffineMap:
    if not isinstance(entry, dict):
        raise ConfigError(path, "map must be an object")
    try:
        if "slope" in entry:
            return AffineMap.line(_number(entry["slope"], f"{path}.slope"),
                                  _number(entry.get("offset", 0.0), f"{path}.offset"))
        return AffineMap.planar(entry["matrix"], entry["offset"])
    except KeyError as exc:
        raise ConfigError(path, f"missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, str(exc)) from None


def _parse_system(sec: dict, dimension: int):
    n = _int(sec["n"], "system.n", minimum=1) if "n" in sec else None
    if "family" in sec:
        if n is None:
            raise ConfigError("system.n", "truncation order is required for a family")
        if "maps" in sec:
            raise ConfigError("system", "give either 'family' or 'maps', not both")
        weights = sec.get("weights", "neg-square")
        if not isinstance(weights, (str, list)):
            raise ConfigError("system.weights", "must be a family name or a list")
        system = builtin_family(sec["family"], weights)
    elif "maps" in sec:
        maps = sec["maps"]
        if not isinstance(maps, list) or not maps:
            raise ConfigError("system.maps", "must be a non-empty list")
        parsed = [_parse_map(m, f"system.maps[{i}]") for i, m in enumerate(maps)]
        weights = sec.get("weights")
        if not isinstance(weights, list):
            raise ConfigError("system.weights", "explicit maps need a weight list")
        system = CountableSystem.from_lists(
            parsed, [_number(w, f"system.weights[{i}]") for i, w in enumerate(weights)],
            clamp=bool(sec.get("clamp", False)))
        if n is None:
            n = len(parsed)
    else:
        raise ConfigError("system", "needs 'family' or 'maps'")
    if system.dimension != dimension:
        raise ConfigError("system.family" if "family" in sec else "system.maps",
                          f"{system.dimension}D system does not match space.dimension={dimension}")
    if system.length is not None and n > system.length:
        raise ConfigError("system.n", f"n={n} exceeds the {system.length} maps/weights given")
    return system, n


def _parse_support(value, dimension: int):
    path = "iteration.initial_support"
    if value is None or value == "full":
        return None
    if not isinstance(value, list) or not value:
        raise ConfigError(path, "must be 'full' or a non-empty index list")
    if dimension == 1:
        return tuple(_int(v, f"{path}[{i}]", 0) for i, v in enumerate(value))
    out = []
    for i, v in enumerate(value):
        if not isinstance(v, list) or len(v) != 2:
            raise ConfigError(f"{path}[{i}]", "2D indices are [i1, i2] pairs")
        out.append((_int(v[0], f"{path}[{i}][0]", 0), _int(v[1], f"{path}[{i}][1]", 0)))
    return tuple(out)


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("", "config must be a JSON object")
    unknown = sorted(set(raw) - {"space", "system", "iteration", "higuchi", "oracle", "outputs"})
    if unknown:
        raise ConfigError(unknown[0], "unknown section")
    space = _section(raw, "space", ("dimension", "M"), required=True)
    dimension = _int(space.get("dimension"), "space.dimension")
    if dimension not in (1, 2):
        raise ConfigError("space.dimension", "must be 1 or 2")
    grid = UniformGrid(dimension, _int(space.get("M"), "space.M", minimum=2))

    sys_sec = _section(raw, "system", ("family", "weights", "maps", "n", "clamp"), required=True)
    system, n = _parse_system(sys_sec, dimension)

    it = _section(raw, "iteration", ("N", "tolerance", "initial_support"))
    support = _parse_support(it.get("initial_support", "full"), dimension)
    if support is not None:
        flat = np.array(support).ravel()
        if (flat > grid.M).any():
            raise ConfigError("iteration.initial_support", f"indices must lie in 0..{grid.M}")
    tolerance = _number(it.get("tolerance", 0.0), "iteration.tolerance")
    iteration = IterationConfig(_int(it.get("N", 30), "iteration.N", minimum=1),
                                tolerance, support)

    hig = _section(raw, "higuchi", ("k_max",))
    k_raw = hig.get("k_max", [])
    k_list = k_raw if isinstance(k_raw, list) else [k_raw]
    limit = math.ceil(grid.side / 2)
    k_max = []
    for i, k in enumerate(k_list):
        path = "higuchi.k_max" if not isinstance(k_raw, list) else f"higuchi.k_max[{i}]"
        k = _int(k, path)
        if not 2 <= k <= limit:
            raise InvalidScale(f"k_max must lie in [2, {limit}], got {k}", path=path)
        k_max.append(k)

    orc = _section(raw, "oracle", ("depth", "budget"))
    depth = _int(orc.get("depth", 0), "oracle.depth", minimum=0)
    budget = _int(orc.get("budget", DEFAULT_ORACLE_BUDGET), "oracle.budget", minimum=1)

    outs = _section(raw, "outputs", OUTPUT_KEYS + ("pgm_binary",))
    outputs = {}
    for key in OUTPUT_KEYS:
        val = outs.get(key)
        if val is not None and not isinstance(val, str):
            raise ConfigError(f"outputs.{key}", "must be a path string or null")
        if val:
            outputs[key] = val
    return RunConfig(grid, system, n, iteration, tuple(k_max), depth, budget, outputs,
                     bool(outs.get("pgm_binary", False)))


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError("", f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"{path}: invalid JSON ({exc})") from None
    return parse_config(raw)


# --- CSV ---------------------------------------------------------------------

def format_value(v: float) -> str:
    if v == -math.inf:
        return "-inf"
    if v == math.inf:
        return "inf"
    if v == 0:
        return "0"  # also folds -0.0
    return format(float(v), ".17g")


def _grid_rows(grid: UniformGrid):
    coords = grid.coordinates()
    idx = grid.unflat(np.arange(grid.size))
    return idx, coords


def _write_grid_csv(path, grid: UniformGrid, columns: dict):
    idx, coords = _grid_rows(grid)
    head = ["index", "x"] if grid.dimension == 1 else ["i", "j", "x", "y"]
    buf = io.StringIO()
    buf.write(",".join(head + list(columns)) + "\n")
    flat_cols = [np.asarray(c).ravel() for c in columns.values()]
    for p in range(grid.size):
        cells = [str(int(v)) for v in idx[p]]
        cells += [format_value(v) for v in coords[p]]
        cells += [format_value(c[p]) for c in flat_cols]
        buf.write(",".join(cells) + "\n")
    _write_text(path, buf.getvalue())


def _write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def write_density_csv(path, density, grid: UniformGrid):
    density = np.asarray(density)
    _write_grid_csv(path, grid, {"lambda": density, "u": np.exp(density)})


def write_fuzzy_csv(path, field_u, grid: UniformGrid):
    _write_grid_csv(path, grid, {"u": np.asarray(field_u)})


def _read_grid_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigError("", f"{path}: empty file")
    head, body = rows[0], rows[1:]
    dimension = 2 if head[:2] == ["i", "j"] else 1
    if dimension == 1 and head[:1] != ["index"]:
        raise ConfigError("", f"{path}: not a grid CSV (header {head})")
    side = round(len(body) ** (1 / dimension))
    if side ** dimension != len(body) or side < 3:
        raise ConfigError("", f"{path}: {len(body)} rows do not form a grid")
    grid = UniformGrid(dimension, side - 1)
    table = {name: np.array([float(r[i]) for r in body]) for i, name in enumerate(head)}
    if dimension == 1:
        order = table["index"].astype(int)
    else:
        order = table["i"].astype(int) * side + table["j"].astype(int)
    for name in table:
        col = np.empty(grid.size)
        col[order] = table[name]
        table[name] = col.reshape(grid.shape)
    return grid, table


def read_density_csv(path):
    """Return ``(density, grid)`` from a density CSV."""
    grid, table = _read_grid_csv(path)
    if "lambda" not in table:
        raise ConfigError("", f"{path}: no 'lambda' column")
    return table["lambda"], grid


def read_field_csv(path):
    """Return ``(u, grid)`` from a density or fuzzy CSV."""
    grid, table = _read_grid_csv(path)
    if "u" in table:
        return table["u"], grid
    if "lambda" in table:
        return np.exp(table["lambda"]), grid
    raise ConfigError("", f"{path}: no 'u' or 'lambda' column")


# --- PGM ---------------------------------------------------------------------

def field_to_image(field_u) -> np.ndarray:
    """Grey levels ``u[i1, i2]`` to 8-bit pixels, top row ``x2 = 1``."""
    u = np.asarray(field_u, dtype=np.float64)
    if u.ndim != 2:
        raise ValueError("image output needs a 2D field")
    pix = np.floor(255.0 * np.clip(u, 0.0, 1.0) + 0.5).astype(np.uint8)
    return np.ascontiguousarray(pix.T[::-1, :])


def image_to_field(pixels) -> np.ndarray:
    """Inverse orientation of :func:`field_to_image`, scaled to [0, 1]."""
    pix = np.asarray(pixels, dtype=np.float64)
    return np.ascontiguousarray(pix[::-1, :].T) / 255.0


def write_pgm(path, field_u, binary: bool = False):
    img = field_to_image(field_u)
    h, w = img.shape
    header = f"{'P5' if binary else 'P2'}\n{w} {h}\n255\n"
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if binary:
        path.write_bytes(header.encode("ascii") + img.tobytes())
        return
    lines = [header.rstrip("\n")]
    for row in img:
        # plain PGM lines stay within 70 characters
        line = ""
        for v in row:
            tok = str(int(v))
            if line and len(line) + 1 + len(tok) > 70:
                lines.append(line)
                line = tok
            else:
                line = f"{line} {tok}" if line else tok
        lines.append(line)
    _write_text(path, "\n".join(lines) + "\n")


def read_pgm(path) -> np.ndarray:
    """Read a P2 or P5 image with maxval 255 into a uint8 array (rows, cols)."""
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise ConfigError("", f"{path}: not a P2/P5 PGM file")
    # header tokens, skipping comments
    tokens, pos = [], 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(int(data[start:pos]))
    w, h, maxval = tokens
    if maxval != 255:
        raise ConfigError("", f"{path}: only maxval 255 is supported")
    if magic == b"P5":
        raw = np.frombuffer(data[pos + 1:pos + 1 + w * h], dtype=np.uint8)
    else:
        text = b"\n".join(ln.split(b"#")[0] for ln in data[pos:].splitlines())
        raw = np.array(text.split(), dtype=np.int64).astype(np.uint8)
    if raw.size != w * h:
        raise ConfigError("", f"{path}: expected {w * h} pixels, found {raw.size}")
    return raw.reshape(h, w)


# --- series input and fit output ----------------------------------------------

def read_series(path) -> np.ndarray:
    """Load a series for HFD: PGM (pixels / 255), grid CSV (``u`` column) or
    a plain numeric text file (one column for 1D, a square matrix for 2D)."""
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return image_to_field(read_pgm(path))
    with open(path) as fh:
        first = fh.readline()
    if first.startswith(("index,", "i,j,")):
        return read_field_csv(path)[0]
    delim = "," if "," in first else None
    arr = np.loadtxt(path, delimiter=delim, ndmin=2)
    return arr[:, 0] if arr.shape[1] == 1 else (arr[0] if arr.shape[0] == 1 else arr)


def write_fit_csv(path, result: HiguchiResult):
    curve = dimension_curve(result)
    k = result.k.astype(np.float64)
    absc = np.log(1.0 / k ** 2) if result.surface else np.log(1.0 / k)
    buf = io.StringIO()
    buf.write("k,measure,abscissa,ordinate,cumulative_dimension\n")
    for i, kk in enumerate(result.k):
        m = result.measure[i]
        ordinate = format_value(math.log(m)) if m > 0 else ""
        cum = format_value(curve[i - 1]) if i >= 1 else ""
        buf.write(f"{int(kk)},{format_value(m)},{format_value(absc[i])},{ordinate},{cum}\n")
    _write_text(path, buf.getvalue())

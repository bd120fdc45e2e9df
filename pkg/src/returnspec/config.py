"""Experiment config files: flat key-value text with typed literals.

One experiment per file.  Lines are `key = value`; blank lines and lines
starting with '#' are skipped, and a trailing ' # comment' is stripped.
Every key is validated against the experiment kind before any computation
starts, unknown or duplicate keys are rejected, and all errors carry the
offending line number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .exactnum import QuadraticNumber, parse_exact
from .groups import GroupDescriptor, GroupPoint
from .gset import expand_catalog_names
from .opensets import OpenSet
from .orbits import IntegerPolynomial


class ConfigError(ValueError):
    """Config file problem, anchored to a line when one is known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


EXPERIMENT_KINDS = (
    "simulate",
    "spectrum",
    "reconstruct",
    "compare",
    "gset-search",
    "gset-reconstruct",
)

_COMMON_KEYS = {"experiment", "seed", "cache"}
_SYSTEM_KEYS = {"K", "alpha", "x0", "U", "P", "system"}
_SYSTEM_KEYS_B = {k + "2" for k in _SYSTEM_KEYS}

# window and N are deliberately unsuffixed: a compare runs both systems
# over one shared window, so window2/N2 are rejected as unknown keys.
_ALLOWED = {
    "simulate": _COMMON_KEYS | _SYSTEM_KEYS | {"window"},
    "spectrum": _COMMON_KEYS | _SYSTEM_KEYS | {"window", "N", "threshold", "max_peaks"},
    "reconstruct": _COMMON_KEYS
    | _SYSTEM_KEYS
    | {"window", "N", "threshold", "max_peaks", "height", "resolution", "verify_tol"},
    "compare": _COMMON_KEYS
    | _SYSTEM_KEYS
    | _SYSTEM_KEYS_B
    | {"window", "N", "theta_tol", "amp_tol", "mode"},
    "gset-search": _COMMON_KEYS | {"catalog", "exhaustive_degree", "samples", "sweep"},
    "gset-reconstruct": _COMMON_KEYS
    | {"group", "generators", "degree", "action", "x0", "U", "S"},
}


def read_pairs(text: str) -> list[tuple[int, str, str]]:
    """Split config text into (line_number, key, value) triples."""
    out = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if " #" in line:
            line = line[: line.index(" #")].rstrip()
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key):
            raise ConfigError(f"bad key {key!r}", lineno)
        if not value:
            raise ConfigError(f"empty value for key {key!r}", lineno)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        out.append((lineno, key, value))
    return out


def _split_top(text: str, sep: str) -> list[str]:
    """Split on a separator, ignoring occurrences inside (), {} brackets."""
    parts, depth, cur = [], 0, []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if depth == 0 and text.startswith(sep, i):
            parts.append("".join(cur))
            cur = []
            i += len(sep)
            continue
        cur.append(ch)
        i += 1
    parts.append("".join(cur))
    return [p.strip() for p in parts]


# -- literal parsers ----------------------------------------------------------


def parse_group(text: str) -> GroupDescriptor:
    """Group literals: 'T^2', 'T^1 x Z/2', 'Z/3 x Z/15', '1'."""
    text = text.strip()
    if text == "1":
        return GroupDescriptor(0)
    rank = 0
    torsion = []
    for factor in _split_top(text, " x "):
        f = factor.strip()
        if f == "T":
            if torsion:
                raise ValueError("torus factors must precede torsion factors")
            rank += 1
        elif f.startswith("T^"):
            if torsion:
                raise ValueError("torus factors must precede torsion factors")
            rank += int(f[2:])
        elif f.startswith("Z/"):
            torsion.append(int(f[2:]))
        else:
            raise ValueError(f"unknown group factor {f!r}")
    if torsion != sorted(torsion):
        raise ValueError("torsion orders must be listed in ascending order")
    return GroupDescriptor(rank, tuple(torsion))


def parse_point(text: str, K: GroupDescriptor) -> GroupPoint:
    """Point literals: '(sqrt2-1, 1)', '3/10', '(0.25, 0.1)'."""
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    coords = _split_top(text, ",")
    want = K.torus_rank + len(K.torsion_orders)
    if len(coords) != want:
        raise ValueError(f"expected {want} coordinates for {K}, got {len(coords)}")
    vals: list = []
    for i, c in enumerate(coords):
        if i < K.torus_rank:
            vals.append(parse_exact(c))
        else:
            vals.append(int(c))
    return K.point(*vals)


def _parse_arc_factor(text: str):
    text = text.strip()
    if text == "T":
        return None
    if not (text.startswith("(") and text.endswith(")")):
        raise ValueError(f"expected arc '(lo, hi)' or 'T', got {text!r}")
    parts = _split_top(text[1:-1], ",")
    if len(parts) != 2:
        raise ValueError(f"arc needs two endpoints: {text!r}")
    lo, hi = parse_exact(parts[0]), parse_exact(parts[1])
    return (lo, hi)


def _parse_torsion_factor(text: str, m: int):
    text = text.strip()
    if text in ("T", "Z"):
        return None
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"expected residue set '{{a, b}}' or 'T', got {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        raise ValueError("empty residue set makes an empty box")
    return frozenset(int(v) % m for v in _split_top(inner, ","))


def parse_open_set(text: str, K: GroupDescriptor) -> OpenSet:
    """Open set literals: unions of boxes, e.g. '(0,0.4) x {0}' or
    '(-0.1,0.1)+(0.4,0.6)'; 'T' leaves a coordinate unconstrained."""
    boxes = []
    for box_text in _split_top(text, "+"):
        factors = _split_top(box_text, " x ")
        want = K.torus_rank + len(K.torsion_orders)
        if len(factors) != want:
            raise ValueError(
                f"box {box_text!r} has {len(factors)} factors, {K} needs {want}"
            )
        spec = []
        for i, f in enumerate(factors):
            if i < K.torus_rank:
                spec.append(_parse_arc_factor(f))
            else:
                spec.append(_parse_torsion_factor(f, K.torsion_orders[i - K.torus_rank]))
        boxes.append(tuple(spec))
    return OpenSet.build(K, *boxes)


_POLY_TERM_RE = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?P<coef>\d+)?\s*\*?\s*(?P<var>n)?(?:\^(?P<pow>\d+))?\s*"
)


def parse_polynomial(text: str) -> IntegerPolynomial:
    """Polynomial literals: 'n^5 - n', '2*n^3 + n', 'n'."""
    coeffs: dict[int, int] = {}
    pos = 0
    text = text.strip()
    first = True
    while pos < len(text):
        m = _POLY_TERM_RE.match(text, pos)
        if not m or m.end() == pos or (m.group("coef") is None and m.group("var") is None):
            raise ValueError(f"cannot parse polynomial {text!r} at offset {pos}")
        if not first and m.group("sign") is None:
            raise ValueError(f"missing +/- between terms in {text!r}")
        sign = -1 if m.group("sign") == "-" else 1
        coef = int(m.group("coef")) if m.group("coef") else 1
        if m.group("var"):
            power = int(m.group("pow")) if m.group("pow") else 1
        else:
            if m.group("pow") is not None:
                raise ValueError(f"exponent without variable in {text!r}")
            power = 0
        coeffs[power] = coeffs.get(power, 0) + sign * coef
        pos = m.end()
        first = False
    deg = max(coeffs)
    return IntegerPolynomial(tuple(coeffs.get(i, 0) for i in range(deg + 1)))


def parse_window(text: str) -> tuple[int, int]:
    """Window literals: '-10000..10000', '0..19'."""
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", text)
    if not m:
        raise ValueError(f"expected 'lo..hi', got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if hi < lo:
        raise ValueError(f"empty window {text!r}")
    return lo, hi


def parse_int(text: str) -> int:
    """Integer literals, allowing '2^20' powers."""
    m = re.fullmatch(r"\s*(\d+)\^(\d+)\s*", text)
    if m:
        return int(m.group(1)) ** int(m.group(2))
    return int(text)


def parse_generators(text: str) -> list[tuple[int, ...]]:
    """Cycle-notation generators: '(0 1)(2 3), (0 1 2)'; 'e' is identity.

    Cycles within one generator are applied left to right; the degree is
    one past the largest point mentioned anywhere.
    """
    gen_texts = _split_top(text, ",")
    cycles_per_gen = []
    top = -1
    for g in gen_texts:
        g = g.strip()
        if g == "e":
            cycles_per_gen.append([])
            continue
        if not re.fullmatch(r"(\(\s*\d+(\s+\d+)*\s*\)\s*)+", g):
            raise ValueError(f"bad cycle notation {g!r}")
        cycles = [[int(v) for v in c.split()] for c in re.findall(r"\(([^)]*)\)", g)]
        for c in cycles:
            if len(set(c)) != len(c):
                raise ValueError(f"repeated point in cycle {c}")
            top = max(top, max(c))
        cycles_per_gen.append(cycles)
    degree = max(top + 1, 1)  # identity-only lists still need one point
    out = []
    for cycles in cycles_per_gen:
        perm = list(range(degree))
        for c in cycles:
            step = list(range(degree))
            for i, v in enumerate(c):
                step[v] = c[(i + 1) % len(c)]
            perm = [step[p] for p in perm]
        out.append(tuple(perm))
    return out


def parse_point_set(text: str) -> frozenset[int]:
    """Point subsets for finite actions: '{0, 2, 5}' or '{}'."""
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"expected '{{points}}', got {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        return frozenset()
    return frozenset(int(v) for v in _split_top(inner, ","))


# -- experiment assembly -------------------------------------------------------


@dataclass
class ExperimentConfig:
    """A parsed experiment: typed values plus raw text for fingerprinting."""

    experiment: str
    values: dict
    raw: dict
    lines: dict
    text: str
    path: Optional[str] = None

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)

    @property
    def seed(self) -> int:
        return self.values.get("seed", 0)

    def system_fingerprint(self, suffix: str = "") -> str:
        """Canonical description of one simulated system, for cache keys.

        Built from the normalized raw literals of the system keys, so two
        configs naming the same system the same way share cache entries
        and any textual change is a miss.
        """
        parts = [f"system={self.values.get('system' + suffix, 'rotation')}"]
        for key in ("K", "alpha", "x0", "P", "U"):
            raw = self.raw.get(key + suffix)
            if raw is not None:
                parts.append(f"{key}={' '.join(raw.split())}")
        for key in ("window", "N"):  # shared between compare sides
            raw = self.raw.get(key)
            if raw is not None:
                parts.append(f"{key}={' '.join(raw.split())}")
        return "|".join(parts)


def _window_for(values: dict, kind: str) -> None:
    if "window" not in values:
        if "N" in values:
            values["window"] = (1, values["N"])
        elif kind != "simulate":
            raise ConfigError(f"{kind} needs either N or window")
        else:
            raise ConfigError("simulate needs a window")


def _parse_system_keys(values, raw, lines, suffix: str):
    """Typed parsing for one system's K/alpha/x0/U/P/system keys."""

    def fail(key, err):
        raise ConfigError(str(err), lines.get(key))

    kkey = "K" + suffix
    system = raw.get("system" + suffix, "rotation")
    if system not in ("rotation", "polynomial", "skew"):
        fail("system" + suffix, f"unknown system {system!r}")
    values["system" + suffix] = system
    if system == "skew":
        K = GroupDescriptor(2)
        if kkey in raw and raw[kkey].replace(" ", "") not in ("T^2", "TxT"):
            fail(kkey, "skew systems live on T^2")
    elif kkey in raw:
        try:
            K = parse_group(raw[kkey])
        except ValueError as e:
            fail(kkey, e)
    else:
        raise ConfigError(f"missing key {kkey}")
    values[kkey] = K

    akey = "alpha" + suffix
    if akey not in raw:
        raise ConfigError(f"missing key {akey}")
    try:
        if system == "skew":
            values[akey] = parse_exact(raw[akey])
        else:
            values[akey] = parse_point(raw[akey], K)
    except ValueError as e:
        fail(akey, e)

    xkey = "x0" + suffix
    if xkey in raw:
        try:
            values[xkey] = parse_point(raw[xkey], K)
        except ValueError as e:
            fail(xkey, e)

    ukey = "U" + suffix
    if ukey not in raw:
        raise ConfigError(f"missing key {ukey}")
    try:
        values[ukey] = parse_open_set(raw[ukey], K)
    except ValueError as e:
        fail(ukey, e)

    pkey = "P" + suffix
    if pkey in raw:
        if system != "polynomial":
            fail(pkey, f"{pkey} requires system{suffix} = polynomial")
        try:
            values[pkey] = parse_polynomial(raw[pkey])
        except ValueError as e:
            fail(pkey, e)
    elif system == "polynomial":
        raise ConfigError(f"system{suffix} = polynomial needs {pkey}")


def parse_config(text: str, path: Optional[str] = None) -> ExperimentConfig:
    """Parse and validate a full experiment config."""
    pairs = read_pairs(text)
    raw = {k: v for _, k, v in pairs}
    lines = {k: ln for ln, k, _ in pairs}
    if "experiment" not in raw:
        raise ConfigError("missing key 'experiment'")
    kind = raw["experiment"]
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(
            f"unknown experiment {kind!r} (expected one of {', '.join(EXPERIMENT_KINDS)})",
            lines["experiment"],
        )
    allowed = _ALLOWED[kind]
    for ln, k, _ in pairs:
        if k not in allowed:
            raise ConfigError(f"key {k!r} not allowed for experiment {kind}", ln)

    values: dict = {"experiment": kind}

    def parse_scalar(key, fn, default=None):
        if key in raw:
            try:
                values[key] = fn(raw[key])
            except ValueError as e:
                raise ConfigError(str(e), lines.get(key))
        elif default is not None:
            values[key] = default

    parse_scalar("seed", int, 0)
    if "cache" in raw:
        values["cache"] = raw["cache"]

    if kind in ("simulate", "spectrum", "reconstruct", "compare"):
        _parse_system_keys(values, raw, lines, "")
        parse_scalar("window", parse_window)
        parse_scalar("N", parse_int)
        _window_for(values, kind)
    if kind == "compare":
        _parse_system_keys(values, raw, lines, "2")
        parse_scalar("theta_tol", float, 1e-3)
        parse_scalar("amp_tol", float, 1e-3)
        mode = raw.get("mode", "auto")
        if mode not in ("auto", "spectra"):
            raise ConfigError(f"unknown compare mode {mode!r}", lines.get("mode"))
        values["mode"] = mode
    if kind in ("spectrum", "reconstruct"):
        parse_scalar("threshold", float)
        parse_scalar("max_peaks", int, 25)
    if kind == "reconstruct":
        parse_scalar("height", int, 20)
        parse_scalar("resolution", float, 1e-8)
        parse_scalar("verify_tol", float, 1e-4)

    if kind == "gset-search":
        if "catalog" not in raw:
            raise ConfigError("gset-search needs a catalog")
        try:
            values["catalog"] = tuple(expand_catalog_names(raw["catalog"]))
        except ValueError as e:
            raise ConfigError(str(e), lines.get("catalog"))
        parse_scalar("exhaustive_degree", int, 16)
        parse_scalar("samples", int, 1024)
        sweep = raw.get("sweep", "off")
        if sweep not in ("on", "off"):
            raise ConfigError(f"sweep must be on or off, not {sweep!r}", lines.get("sweep"))
        values["sweep"] = sweep == "on"

    if kind == "gset-reconstruct":
        if ("group" in raw) == ("generators" in raw):
            raise ConfigError("gset-reconstruct needs exactly one of 'group' or 'generators'")
        if "group" in raw:
            values["group"] = raw["group"]
        else:
            parse_scalar("generators", parse_generators)
            parse_scalar("degree", int)
            if "degree" in values:
                want = values["degree"]
                gens = values["generators"]
                if any(len(g) > want for g in gens):
                    raise ConfigError(
                        "degree smaller than a point used in the generators",
                        lines.get("degree"),
                    )
                values["generators"] = [
                    g + tuple(range(len(g), want)) for g in gens
                ]
        if "S" in raw:
            parse_scalar("S", parse_generators)
            for k in ("action", "x0", "U"):
                if k in raw:
                    raise ConfigError(f"key {k!r} conflicts with a direct S", lines[k])
        else:
            action = raw.get("action", "regular")
            if action not in ("regular", "natural") and not re.fullmatch(r"index:\d+", action):
                raise ConfigError(f"bad action {action!r}", lines.get("action"))
            values["action"] = action
            parse_scalar("x0", int, 0)
            if "U" not in raw:
                raise ConfigError("gset-reconstruct needs U (or a direct S)")
            parse_scalar("U", parse_point_set)

    return ExperimentConfig(kind, values, raw, lines, text, path)


def load_config(path) -> ExperimentConfig:
    """Read and parse a config file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, path=str(path))

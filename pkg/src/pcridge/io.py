"""Plain-text matrix IO, fit artifacts and key=value run configs.

Matrices travel as headerless or single-header CSV / whitespace tables;
fit results are JSON documents with an explicit schema version so stale
artifacts fail loudly instead of half-loading.
"""

import json
import math
import os

import numpy as np

from .errors import (
    ArtifactError,
    ConfigError,
    DimensionMismatch,
    EmptyFile,
    ParseError,
    RaggedRows,
)
from .simulate import GenotypeSpec, scenario_table

ARTIFACT_SCHEMA_VERSION = 1

__all__ = [
    "load_matrix",
    "load_vector",
    "save_matrix",
    "save_vector",
    "write_artifact",
    "read_artifact",
    "parse_config",
    "spec_from_config",
]


def _split(line, fmt):
    if fmt == "csv":
        return [tok.strip() for tok in line.split(",")]
    return line.split()


def _sniff_format(path, first_line):
    if path.endswith(".csv"):
        return "csv"
    return "csv" if "," in first_line else "ws"


def load_matrix(path, fmt="auto"):
    """Read a numeric table, skipping one header row if present.

    The first row is treated as a header when any of its tokens fails to
    parse as a number.  Blank lines are ignored.  Raises EmptyFile,
    RaggedRows or ParseError (with 1-based line and column) on bad input.
    """
    with open(path) as fh:
        raw = fh.read().split("\n")
    lines = [(i + 1, ln) for i, ln in enumerate(raw) if ln.strip()]
    if not lines:
        raise EmptyFile(path)
    if fmt == "auto":
        fmt = _sniff_format(path, lines[0][1])
    elif fmt not in ("csv", "ws"):
        raise ConfigError(f"unknown format {fmt!r}")

    start = 0
    try:
        [float(tok) for tok in _split(lines[0][1], fmt)]
    except ValueError:
        start = 1
    if start == len(lines):
        raise EmptyFile(f"{path}: header only")

    width = len(_split(lines[start][1], fmt))
    rows = np.empty((len(lines) - start, width))
    for out_i, (lineno, ln) in enumerate(lines[start:]):
        toks = _split(ln, fmt)
        if len(toks) != width:
            raise RaggedRows(lineno, width, len(toks))
        for j, tok in enumerate(toks):
            try:
                rows[out_i, j] = float(tok)
            except ValueError:
                raise ParseError(lineno, j + 1) from None
    return rows


def load_vector(path, fmt="auto"):
    """Read a single-column (or single-row) table as a 1-d array."""
    M = load_matrix(path, fmt)
    if M.shape[1] == 1:
        return M[:, 0]
    if M.shape[0] == 1:
        return M[0]
    raise DimensionMismatch(
        f"{path}: expected a vector, got shape {M.shape}"
    )


def _fmt_value(v):
    v = float(v)
    if math.isfinite(v) and v.is_integer():
        return str(int(v))
    return repr(v)


def save_matrix(path, X, fmt="csv", header=None):
    """Write a table; integers print without a decimal point."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    sep = "," if fmt == "csv" else " "
    with open(path, "w") as fh:
        if header is not None:
            fh.write(sep.join(header) + "\n")
        for row in X:
            fh.write(sep.join(_fmt_value(v) for v in row) + "\n")


def save_vector(path, v, fmt="csv", header=None):
    v = np.asarray(v, dtype=np.float64).reshape(-1, 1)
    save_matrix(path, v, fmt, [header] if isinstance(header, str) else header)


def write_artifact(path, payload):
    """Write a fit artifact, stamping the schema version."""
    doc = {"schema_version": ARTIFACT_SCHEMA_VERSION}
    doc.update(payload)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_artifact(path):
    """Read a fit artifact, rejecting unknown schema versions."""
    if not os.path.exists(path):
        raise ArtifactError(f"no such artifact: {path}")
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ArtifactError(f"{path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ArtifactError(f"{path}: artifact must be a JSON object")
    version = doc.get("schema_version")
    if version != ARTIFACT_SCHEMA_VERSION:
        raise ArtifactError(
            f"{path}: schema_version {version!r}, expected {ARTIFACT_SCHEMA_VERSION}"
        )
    return doc


def parse_config(path):
    """Parse key=value lines; '#' starts a comment, blank lines are skipped."""
    cfg = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"expected key=value, got {line!r}", lineno)
            key, _, value = line.partition("=")
            key = key.strip().lower()
            value = value.strip()
            if not key:
                raise ConfigError("empty key", lineno)
            if key in cfg:
                raise ConfigError(f"duplicate key {key!r}", lineno)
            cfg[key] = value
    return cfg


def _take(cfg, key, conv, default):
    if key not in cfg:
        return default
    raw = cfg.pop(key)
    try:
        return conv(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def spec_from_config(cfg):
    """Build a simulation spec from a parsed config dict.

    ``kind=scenario`` takes ``preset`` (1..4) plus optional n_test / seed;
    ``kind=genotype`` exposes the GenotypeSpec fields.  Unknown keys are
    rejected so typos never silently fall back to defaults.
    """
    cfg = dict(cfg)
    kind = cfg.pop("kind", None)
    if kind == "scenario":
        preset = _take(cfg, "preset", int, None)
        if preset is None:
            raise ConfigError("scenario config needs preset=1..4")
        n_test = _take(cfg, "n_test", int, 1000)
        seed = _take(cfg, "seed", int, 0)
        spec = scenario_table(preset, n_test=n_test, seed=seed)
    elif kind == "genotype":
        d = GenotypeSpec()  # unset keys fall back to the dataclass defaults
        spec = GenotypeSpec(
            p=_take(cfg, "p", int, d.p),
            n_train=_take(cfg, "n_train", int, d.n_train),
            n_test=_take(cfg, "n_test", int, d.n_test),
            n_causal=_take(cfg, "n_causal", int, d.n_causal),
            maf_range=(
                _take(cfg, "maf_low", float, d.maf_range[0]),
                _take(cfg, "maf_high", float, d.maf_range[1]),
            ),
            effect_range=(
                _take(cfg, "effect_low", float, d.effect_range[0]),
                _take(cfg, "effect_high", float, d.effect_range[1]),
            ),
            haplotype_pool_size=_take(cfg, "pool_size", int, d.haplotype_pool_size),
            ld_block_length=_take(cfg, "block_length", int, d.ld_block_length),
            link=cfg.pop("link", d.link),
            noise_sigma=_take(cfg, "noise_sigma", float, d.noise_sigma),
            intercept=_take(cfg, "intercept", float, d.intercept),
            seed=_take(cfg, "seed", int, d.seed),
        )
        if spec.link not in ("identity", "logit"):
            raise ConfigError(f"unknown link {spec.link!r}")
    else:
        raise ConfigError(f"kind must be scenario or genotype, got {kind!r}")
    if cfg:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(cfg))}")
    return spec

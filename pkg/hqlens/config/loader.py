"""
Run configuration loading, validation and hashing.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from collections.abc import Callable
from functools import partial
from pathlib import Path
from typing import Any

import yaml
from pydantic import TypeAdapter, ValidationError

from hqlens.errors import ConfigError
from hqlens.extract.lexicon import default_lexicon_path
from hqlens.model.taxonomy import default_taxonomy_path

from . import BackendConfig, RunConfig

logger = logging.getLogger(__name__)

_ADAPTER: TypeAdapter[RunConfig] = TypeAdapter(RunConfig)

_HASH_EXCLUDED = ("output_dir", "workers")


def _read_document(path: Path) -> Any:
    """
    Read a JSON or YAML configuration document.

    Parameters
    ----------
    path : Path
        Configuration file.

    Returns
    -------
    Any
        Decoded document.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc

    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            return yaml.safe_load(text) or {}
        return json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError("config", f"malformed document {path}: {exc}") from exc


def parse_run_config(obj: Any) -> RunConfig:
    """
    Validate a decoded configuration document.

    Parameters
    ----------
    obj : Any
        Decoded document.

    Returns
    -------
    RunConfig
        Typed configuration; paths are not resolved.

    Raises
    ------
    ConfigError
        If a field has the wrong type or an invalid value.
    """
    try:
        return _ADAPTER.validate_python(obj)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(p) for p in first.get("loc", ())) or "config"
        raise ConfigError(loc, first.get("msg", "invalid value")) from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError("config", str(exc)) from exc


PathMap = Callable[[str | None], str | None]


def _resolve(base: Path, value: str | None) -> str | None:
    """
    Resolve a path relative to the configuration directory.

    Parameters
    ----------
    base : Path
        Directory of the configuration file.
    value : str | None
        Path as written.

    Returns
    -------
    str | None
        Absolute path, or None.
    """
    if value is None:
        return None
    p = Path(value).expanduser()
    if not p.is_absolute():
        p = base / p
    return str(p)


def _map_backend(backend: BackendConfig, fn: PathMap) -> BackendConfig:
    """
    Apply a path mapping to the files a backend selection names.

    Parameters
    ----------
    backend : BackendConfig
        Backend selection.
    fn : PathMap
        Mapping applied to every path field.

    Returns
    -------
    BackendConfig
        Backend with mapped paths.
    """
    llm = dataclasses.replace(
        backend.llm, exemplars_path=fn(backend.llm.exemplars_path)
    )
    return dataclasses.replace(
        backend, predictions_path=fn(backend.predictions_path), llm=llm
    )


def _map_input_paths(cfg: RunConfig, fn: PathMap) -> RunConfig:
    """
    Apply a path mapping to every input file of a configuration.

    The output directory is not an input and is left alone.

    Parameters
    ----------
    cfg : RunConfig
        Configuration.
    fn : PathMap
        Mapping applied to every input path field.

    Returns
    -------
    RunConfig
        Configuration with mapped paths.
    """
    return dataclasses.replace(
        cfg,
        inputs=tuple(
            dataclasses.replace(src, path=fn(src.path) or src.path)
            for src in cfg.inputs
        ),
        taxonomy=fn(cfg.taxonomy),
        lexicon=fn(cfg.lexicon),
        communities=fn(cfg.communities),
        pois=fn(cfg.pois),
        gold=fn(cfg.gold),
        backend=_map_backend(cfg.backend, fn),
        baselines=tuple(_map_backend(b, fn) for b in cfg.baselines),
    )


def resolve_paths(cfg: RunConfig, base: Path) -> RunConfig:
    """
    Make every path in the configuration absolute.

    Parameters
    ----------
    cfg : RunConfig
        Configuration as written.
    base : Path
        Directory relative paths are anchored to.

    Returns
    -------
    RunConfig
        Configuration with absolute paths.
    """
    resolved = _map_input_paths(cfg, partial(_resolve, base))
    return dataclasses.replace(
        resolved, output_dir=_resolve(base, cfg.output_dir) or cfg.output_dir
    )


def check_paths(cfg: RunConfig) -> None:
    """
    Verify that every referenced input path exists.

    Parameters
    ----------
    cfg : RunConfig
        Configuration with resolved paths.

    Raises
    ------
    ConfigError
        Naming the first field whose path is missing.
    """
    checks: list[tuple[str, str | None]] = [
        (f"inputs.{i}.path", src.path) for i, src in enumerate(cfg.inputs)
    ]
    checks += [
        ("taxonomy", cfg.taxonomy),
        ("lexicon", cfg.lexicon),
        ("communities", cfg.communities),
        ("pois", cfg.pois),
        ("gold", cfg.gold),
    ]
    for label, backend in [("backend", cfg.backend)] + [
        (f"baselines.{i}", b) for i, b in enumerate(cfg.baselines)
    ]:
        checks.append((f"{label}.predictions_path", backend.predictions_path))
        checks.append((f"{label}.llm.exemplars_path", backend.llm.exemplars_path))
        if backend.kind == "predictions" and backend.predictions_path is None:
            raise ConfigError(f"{label}.predictions_path", "required for predictions")

    for name, value in checks:
        if value is not None and not Path(value).exists():
            raise ConfigError(name, f"path does not exist: {value}")


def load_run_config(
    path: str | Path,
    *,
    backend: str | None = None,
    output_dir: str | None = None,
) -> RunConfig:
    """
    Load, validate and resolve a run configuration file.

    Parameters
    ----------
    path : str | Path
        JSON (.json) or YAML (.yaml / .yml) document.
    backend : str | None
        Command-line backend selector overriding the file.
    output_dir : str | None
        Command-line output directory overriding the file.

    Returns
    -------
    RunConfig
        Validated configuration with absolute paths.

    Raises
    ------
    ConfigError
        If the document is unreadable, invalid, or references missing paths.
    """
    p = Path(path)
    cfg = parse_run_config(_read_document(p))
    cfg = resolve_paths(cfg, p.resolve().parent)

    if backend is not None:
        try:
            selected = BackendConfig.parse(backend)
        except ValueError as exc:
            raise ConfigError("backend", str(exc)) from exc
        selected = dataclasses.replace(selected, llm=cfg.backend.llm)
        cfg = dataclasses.replace(
            cfg, backend=_map_backend(selected, partial(_resolve, Path.cwd()))
        )
    if output_dir is not None:
        cfg = dataclasses.replace(cfg, output_dir=str(Path(output_dir).resolve()))

    check_paths(cfg)
    logger.debug("Loaded run config %s", p)
    return cfg


def _file_digest(value: str | None) -> str | None:
    """
    Replace a path by the SHA-256 of the file it names.

    Parameters
    ----------
    value : str | None
        Path, or None.

    Returns
    -------
    str | None
        "sha256:<hex>" for a readable file; otherwise the value unchanged.
    """
    if value is None or not Path(value).is_file():
        return value
    digest = hashlib.sha256()
    with Path(value).open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return f"sha256:{digest.hexdigest()}"


def config_hash(cfg: RunConfig) -> str:
    """
    Hash the semantically meaningful configuration fields.

    Output location and worker count do not change results and are excluded.
    Input files are keyed by content, and an unset taxonomy or lexicon counts
    as the shipped default, so moving identical files or spelling out a default
    leaves the hash unchanged.

    Parameters
    ----------
    cfg : RunConfig
        Configuration to hash.

    Returns
    -------
    str
        Hex SHA-256 digest of the canonical JSON form.
    """
    explicit = dataclasses.replace(
        cfg,
        taxonomy=cfg.taxonomy or str(default_taxonomy_path()),
        lexicon=cfg.lexicon or str(default_lexicon_path()),
    )
    doc = _ADAPTER.dump_python(_map_input_paths(explicit, _file_digest), mode="json")
    for key in _HASH_EXCLUDED:
        doc.pop(key, None)
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

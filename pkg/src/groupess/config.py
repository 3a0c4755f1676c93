"""Scenario configuration: JSON documents validated against a fixed schema."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .game import GroupGame, GroupWeights, PayoffMatrix2
from .mac import MacParams
from .oracle import InvasionGrid

GAME_KINDS = ("generic-2x2", "hawk-dove", "stag-hunt", "prisoners-dilemma", "mac-aloha")

_number = {"type": "number"}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "groupess scenario",
    "type": "object",
    "additionalProperties": False,
    "required": ["game"],
    "properties": {
        "name": {"type": "string"},
        "game": {"enum": list(GAME_KINDS)},
        "payoff": {
            "type": "object",
            "additionalProperties": False,
            "required": ["a", "b", "c", "d"],
            "properties": {k: _number for k in "abcd"},
        },
        "hawk_dove": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"V": _number, "C": _number},
        },
        "weights": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "number", "exclusiveMinimum": 0},
        },
        "mac": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"delta": _number, "gamma": _number, "mu": _number},
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["variable", "start", "stop", "step"],
            "properties": {
                "variable": {"enum": ["alpha", "gamma"]},
                "start": _number,
                "stop": _number,
                "step": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "eps_min": {"type": "number", "exclusiveMinimum": 0},
                "eps_max": {"type": "number", "exclusiveMaximum": 1},
                "eps_points": {"type": "integer", "minimum": 1},
                "deviation_resolution": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dir": {"type": "string"},
                "csv": {"type": "string"},
                "report": {"type": "string"},
            },
        },
    },
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Sweep:
    variable: str
    start: float
    stop: float
    step: float

    def values(self) -> list[float]:
        if self.stop < self.start:
            return []
        n = int(np.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + k * self.step, 12) for k in range(n)]


@dataclass(frozen=True)
class ScenarioConfig:
    game: str
    name: str = ""
    payoff: Optional[PayoffMatrix2] = None
    weights: Optional[tuple[float, ...]] = None
    mac: dict = field(default_factory=dict)
    sweep: Optional[Sweep] = None
    tolerance: float = 1e-9
    grid: InvasionGrid = InvasionGrid()
    out_dir: str = "out"
    csv_name: str = "sweep.csv"
    report_name: str = "report.json"

    @property
    def is_mac(self) -> bool:
        return self.game == "mac-aloha"

    def swept(self, value: Optional[float]) -> "ScenarioConfig":
        return self if value is None else _with_value(self, value)

    def group_game(self, alpha: Optional[float] = None) -> GroupGame:
        weights = (alpha, 1.0 - alpha) if alpha is not None else self.weights
        return GroupGame(GroupWeights(tuple(weights)), self.payoff)

    def mac_params(self, gamma: Optional[float] = None, alpha: Optional[float] = None) -> MacParams:
        weights = (alpha, 1.0 - alpha) if alpha is not None else self.weights
        g = self.mac.get("gamma") if gamma is None else gamma
        return MacParams(self.mac.get("delta", 0.2), g, self.mac.get("mu", 1.0), GroupWeights(tuple(weights)))


def _with_value(cfg: ScenarioConfig, value: float) -> ScenarioConfig:
    from dataclasses import replace

    if cfg.sweep.variable == "alpha":
        return replace(cfg, weights=(value, 1.0 - value), sweep=None)
    return replace(cfg, mac={**cfg.mac, "gamma": value}, sweep=None)


def _default_payoff(game: str, doc: dict) -> Optional[PayoffMatrix2]:
    if "payoff" in doc:
        p = doc["payoff"]
        return PayoffMatrix2(p["a"], p["b"], p["c"], p["d"])
    if game == "hawk-dove":
        hd = doc.get("hawk_dove", {})
        return PayoffMatrix2.hawk_dove(hd.get("V", 2.0), hd.get("C", 3.0))
    if game == "stag-hunt":
        return PayoffMatrix2.stag_hunt()
    if game == "prisoners-dilemma":
        return PayoffMatrix2.prisoners_dilemma()
    return None


def from_dict(doc: dict) -> ScenarioConfig:
    errors = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        where = "/".join(str(x) for x in e.path) or "<root>"
        raise ConfigError(f"field {where}: {e.message}")

    game = doc["game"]
    payoff = _default_payoff(game, doc)
    if game == "generic-2x2" and payoff is None:
        raise ConfigError("field payoff: required for generic-2x2")
    if "hawk_dove" in doc and game != "hawk-dove":
        raise ConfigError("field hawk_dove: only valid for the hawk-dove game")

    sweep = None
    if "sweep" in doc:
        s = doc["sweep"]
        sweep = Sweep(s["variable"], float(s["start"]), float(s["stop"]), float(s["step"]))
        if sweep.variable == "gamma" and game != "mac-aloha":
            raise ConfigError("field sweep/variable: gamma sweeps need the mac-aloha game")
        if sweep.variable == "alpha" and "weights" in doc:
            raise ConfigError("field weights: cannot be combined with an alpha sweep")

    weights = tuple(float(x) for x in doc["weights"]) if "weights" in doc else None
    if weights is None and not (sweep and sweep.variable == "alpha"):
        raise ConfigError("field weights: required unless alpha is swept")
    if weights is not None:
        try:
            GroupWeights(weights)
        except ValueError as exc:
            raise ConfigError(f"field weights: {exc}") from None

    mac = dict(doc.get("mac", {}))
    if game == "mac-aloha":
        if "gamma" not in mac and not (sweep and sweep.variable == "gamma"):
            raise ConfigError("field mac/gamma: required unless gamma is swept")
        try:
            probe = dict(mac)
            probe.setdefault("gamma", sweep.start if sweep and sweep.variable == "gamma" else 0.0)
            MacParams(probe.get("delta", 0.2), probe["gamma"], probe.get("mu", 1.0), GroupWeights((1.0,)))
        except ValueError as exc:
            raise ConfigError(f"field mac: {exc}") from None
    elif mac:
        raise ConfigError("field mac: only valid for the mac-aloha game")

    g = doc.get("grid", {})
    try:
        grid = InvasionGrid(
            tuple(np.geomspace(g.get("eps_min", 1e-4), g.get("eps_max", 0.2), g.get("eps_points", 20))),
            g.get("deviation_resolution", 0.01),
        )
    except ValueError as exc:
        raise ConfigError(f"field grid: {exc}") from None

    out = doc.get("output", {})
    return ScenarioConfig(
        game=game,
        name=doc.get("name", game),
        payoff=payoff,
        weights=weights,
        mac=mac,
        sweep=sweep,
        tolerance=float(doc.get("tolerance", 1e-9)),
        grid=grid,
        out_dir=out.get("dir", "out"),
        csv_name=out.get("csv", "sweep.csv"),
        report_name=out.get("report", "report.json"),
    )


def load(path) -> ScenarioConfig:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(doc)

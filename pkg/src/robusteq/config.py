"""Experiment configuration: JSON schema, loading, validation, overrides.

A config file fully determines an experiment; together with the seed it
pins every byte of the outputs.  Validation happens in two passes: a JSON
schema pass for structure, then cross-field checks (dimensions, registered
mirror pairs, sampling-radius feasibility) that name the offending key.
"""

import json
from dataclasses import dataclass

import jsonschema
import numpy as np

from . import games as games_mod
from .domains import ProductDomain, Tolerances, box, interval, simplex
from .dynamics import RunConfig, StepSchedule
from .errors import ConfigError, RobustEqError
from .feedback import perfect, sfo_gaussian, sfo_rademacher, spsa
from .regularizers import RegularizerSpec, supports_pair

SCHEMA = {
    "type": "object",
    "required": ["game", "regularizer", "oracle", "run"],
    "additionalProperties": False,
    "properties": {
        "game": {
            "type": "object",
            "required": ["name"],
            "properties": {
                "name": {
                    "enum": [
                        "linear_interval",
                        "boundary_quartic",
                        "interior_quadratic",
                        "bimatrix",
                        "zero",
                    ]
                },
                "c": {"type": "number"},
                "A1": {"type": "array"},
                "A2": {"type": "array"},
                "file": {"type": "string"},
            },
        },
        "domain": {
            "type": "object",
            "required": ["players"],
            "properties": {"players": {"type": "array", "minItems": 1}},
        },
        "regularizer": {
            "anyOf": [
                {"type": "string"},
                {"type": "array", "items": {"type": "string"}},
                {"type": "object", "required": ["kernel"]},
            ]
        },
        "oracle": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["perfect", "sfo", "spsa"]},
                "noise": {"type": "object"},
                "delta0": {"type": "number", "exclusiveMinimum": 0},
                "rho": {"type": "number"},
                "pivots": {"type": "array"},
                "radii": {"type": "array"},
            },
        },
        "run": {
            "type": "object",
            "required": ["algorithm", "step", "horizon", "init"],
            "additionalProperties": False,
            "properties": {
                "algorithm": {"enum": ["ftrl", "md"]},
                "step": {"type": "object"},
                "horizon": {"type": "integer", "minimum": 1},
                "init": {"type": "object"},
                "seed": {"type": "integer"},
                "thinning": {"type": "integer", "minimum": 0},
                "norm": {"enum": ["l2", "l1", "linf"]},
                "window_frac": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            },
        },
        "reference": {"type": "array", "items": {"type": "number"}},
        "analysis": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "eps_conv": {"type": "number", "exclusiveMinimum": 0},
                "window_frac": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "seeds": {"type": "integer", "minimum": 1},
                "base_seed": {"type": "integer"},
                "thresholds": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "min_fraction": {"type": "number"},
                        "max_fraction": {"type": "number"},
                    },
                },
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "stat_tol": {"type": "number"},
                "robust_tol": {"type": "number"},
                "membership_tol": {"type": "number"},
            },
        },
        "perturb": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "player": {"type": "integer", "minimum": 0},
                "y": {"type": "array", "items": {"type": "number"}},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}},
        },
    },
}

_EPS_CONV_NOISY = 1e-3
_EPS_CONV_PERFECT = 1e-9


@dataclass
class ExperimentConfig:
    raw: dict
    game: object
    domain: ProductDomain
    reg: RegularizerSpec
    oracle: object
    run: RunConfig
    reference: np.ndarray
    tolerances: Tolerances
    eps_conv: float
    analysis_window_frac: float
    seeds: int
    base_seed: int
    thresholds: dict
    perturb_player: int
    perturb_y: np.ndarray
    output_dir: str

    def to_dict(self):
        return json.loads(json.dumps(self.raw))


def _schema_check(data):
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as e:
        key = ".".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(e.message, key=key, code="config/schema") from None


def _build_domain(spec):
    players = []
    for k, entry in enumerate(spec["players"]):
        if "interval" in entry:
            lo, hi = entry["interval"]
            players.append(interval(lo, hi))
        elif "box" in entry:
            lo, hi = entry["box"]
            players.append(box(lo, hi))
        elif "simplex" in entry:
            players.append(simplex(int(entry["simplex"])))
        else:
            raise ConfigError("unknown player domain", key=f"domain.players.{k}")
    return ProductDomain(players=tuple(players))


def _build_game(data):
    spec = data["game"]
    name = spec["name"]
    if name == "bimatrix":
        if "file" in spec:
            with open(spec["file"]) as fh:
                mats = json.load(fh)
            try:
                A1, A2 = mats["A1"], mats["A2"]
            except (TypeError, KeyError):
                raise ConfigError(
                    "bimatrix file must contain A1 and A2", key="game.file"
                ) from None
        else:
            if "A1" not in spec or "A2" not in spec:
                raise ConfigError("bimatrix needs A1 and A2 (inline or file)", key="game")
            A1, A2 = spec["A1"], spec["A2"]
        try:
            return games_mod.make_bimatrix(A1, A2)
        except ValueError as e:
            raise ConfigError(str(e), key="game.A1") from None
    if name == "zero":
        if "domain" not in data:
            raise ConfigError("the zero game needs an explicit domain", key="domain")
        return games_mod.make_zero(_build_domain(data["domain"]))
    if name == "interior_quadratic":
        return games_mod.make_interior_quadratic(spec.get("c", 0.5))
    return games_mod.make_game(games_mod.GameSpec(name=name))


def _build_reg(spec, nplayers):
    from .errors import UnsupportedPairError

    try:
        if isinstance(spec, str):
            return RegularizerSpec.uniform(spec, nplayers)
        if isinstance(spec, dict):
            return RegularizerSpec.uniform(spec["kernel"], nplayers)
        if len(spec) != nplayers:
            raise ConfigError(
                f"regularizer list has {len(spec)} entries for {nplayers} players",
                key="regularizer",
            )
        return RegularizerSpec.of(spec)
    except UnsupportedPairError as e:
        raise ConfigError(str(e), key="regularizer") from None


def _build_oracle(spec, domain):
    kind = spec["kind"]
    if kind == "perfect":
        return perfect()
    if kind == "sfo":
        noise = spec.get("noise", {})
        if "gaussian" in noise:
            return sfo_gaussian(noise["gaussian"])
        if "rademacher" in noise:
            return sfo_rademacher(noise["rademacher"])
        raise ConfigError("sfo noise must be gaussian or rademacher", key="oracle.noise")
    return spsa(
        domain,
        delta0=spec.get("delta0", 0.1),
        rho=spec.get("rho", 0.25),
        pivots=spec.get("pivots"),
        radii=spec.get("radii"),
    )


def _build_step(spec):
    if "constant" in spec:
        return StepSchedule(kind="constant", gamma0=float(spec["constant"]))
    if "power" in spec:
        g0, p = spec["power"]
        return StepSchedule(kind="power", gamma0=float(g0), p=float(p))
    raise ConfigError("step must be {'constant': g} or {'power': [g0, p]}", key="run.step")


def _build_init(spec, dim):
    if "dual" in spec:
        vec = np.asarray(spec["dual"], dtype=float)
        kind = "dual"
    elif "primal" in spec:
        vec = np.asarray(spec["primal"], dtype=float)
        kind = "primal"
    else:
        raise ConfigError("init must carry 'dual' or 'primal'", key="run.init")
    if vec.shape != (dim,):
        raise ConfigError(
            f"init vector has length {vec.size}, domain dimension is {dim}", key="run.init"
        )
    return (kind, vec)


def load_config(path, overrides=()):
    with open(path) as fh:
        data = json.load(fh)
    for key, value in overrides:
        apply_override(data, key, value)
    return parse_config(data)


def apply_override(data, dotted_key, value):
    parts = dotted_key.split(".")
    node = data
    for p in parts[:-1]:
        if isinstance(node, list):
            node = node[int(p)]
        else:
            node = node.setdefault(p, {})
    leaf = parts[-1]
    if isinstance(node, list):
        node[int(leaf)] = value
    else:
        node[leaf] = value


def parse_config(data):
    _schema_check(data)
    game = _build_game(data)
    domain = game.domain
    if "domain" in data and data["game"]["name"] != "zero":
        declared = _build_domain(data["domain"])
        if declared.total_dim != domain.total_dim:
            raise ConfigError(
                f"declared domain dimension {declared.total_dim} does not match the "
                f"game's domain dimension {domain.total_dim}",
                key="domain",
            )
    reg = _build_reg(data["regularizer"], domain.nplayers)
    for i, p in enumerate(domain.players):
        if not supports_pair(reg.kernel(i), p):
            raise ConfigError(
                f"no registered mirror map for ({reg.kernel(i).name}, {p.kind}) of player {i}",
                key="regularizer",
            )
    try:
        oracle = _build_oracle(data["oracle"], domain)
    except RobustEqError:
        raise
    run_spec = data["run"]
    run_cfg = RunConfig(
        algorithm=run_spec["algorithm"],
        step=_build_step(run_spec["step"]),
        horizon=int(run_spec["horizon"]),
        init=_build_init(run_spec["init"], domain.total_dim),
        seed=int(run_spec.get("seed", 0)),
        thinning=int(run_spec.get("thinning", 1)),
        norm=run_spec.get("norm", "l2"),
        window_frac=float(run_spec.get("window_frac", 0.5)),
        x_ref=np.asarray(data["reference"], dtype=float) if "reference" in data else None,
    )
    reference = None
    if "reference" in data:
        reference = np.asarray(data["reference"], dtype=float)
        if reference.shape != (domain.total_dim,):
            raise ConfigError(
                f"reference has length {reference.size}, domain dimension is "
                f"{domain.total_dim}",
                key="reference",
            )
        if not domain.contains(reference, 1e-7):
            raise ConfigError("reference point is infeasible", key="reference")
    ana = data.get("analysis", {})
    default_eps = _EPS_CONV_PERFECT if oracle.kind == "perfect" else _EPS_CONV_NOISY
    tol = data.get("tolerances", {})
    per = data.get("perturb", {})
    p_player = int(per.get("player", 0))
    p_y = np.asarray(per.get("y", np.ones(domain.players[p_player].dim)), dtype=float)
    return ExperimentConfig(
        raw=data,
        game=game,
        domain=domain,
        reg=reg,
        oracle=oracle,
        run=run_cfg,
        reference=reference,
        tolerances=Tolerances(
            stat_tol=float(tol.get("stat_tol", 1e-8)),
            robust_tol=float(tol.get("robust_tol", 1e-6)),
            membership_tol=float(tol.get("membership_tol", 1e-9)),
        ),
        eps_conv=float(ana.get("eps_conv", default_eps)),
        analysis_window_frac=float(ana.get("window_frac", 0.5)),
        seeds=int(ana.get("seeds", 100)),
        base_seed=int(ana.get("base_seed", 0)),
        thresholds=dict(ana.get("thresholds", {})),
        perturb_player=p_player,
        perturb_y=p_y,
        output_dir=data.get("output", {}).get("dir", "out"),
    )

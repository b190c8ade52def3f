"""Batch experiment harness: seeded sweeps with paired solver runs.

A config names one graph model, a parameter grid (list-valued params are
swept as a cross product), the methods to run, and a repetition count. For
every (parameter cell, repetition) one graph and ONE init permutation are
derived from stable hashes of the base seed, and every method runs on that
same graph from that same init (a paired design), so per-seed differences
between methods are meaningful. Records are merged in (cell, repetition,
method) order regardless of worker interleaving.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from graphsym.afp import AfpOptions, afp_solve
from graphsym.generators import distort_lrm, gen_ba, gen_er, gen_grid, gen_lrm, gen_sbm, reshuffle_perm, rewire_k
from graphsym.graphs import Graph, Permutation, hamming
from graphsym.qsa import QsaOptions, qsa_solve
from graphsym.reports import InitSpec, stable_seed

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentRecord",
    "run_experiment",
    "write_records_csv",
    "read_records_csv",
    "records_to_csv_text",
    "CSV_HEADER",
]

CSV_HEADER = "model,params,method,seed,run_index,S,epsilon,fixed_points,hd_to_reference,is_identity,iterations,wall_ms"

KNOWN_MODELS = ("grid", "er", "ba", "sbm", "lrm", "lrm-rewired", "lrm-distorted")
LR_MODELS = ("lrm", "lrm-rewired", "lrm-distorted")
KNOWN_METHODS = ("afp", "qsa")
INIT_KINDS = ("random", "identity", "lr", "reshuffled-lr")

MODEL_PARAMS = {
    "grid": ("dims",),
    "er": ("n", "p"),
    "ba": ("n", "m_attach"),
    "sbm": ("sizes", "probs", "within", "across"),
    "lrm": ("n", "p", "q"),
    "lrm-rewired": ("n", "p", "q", "k"),
    "lrm-distorted": ("n", "p", "q", "r", "t"),
}


class ConfigError(ValueError):
    """The experiment config violates the documented schema."""


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    params: dict
    methods: tuple[str, ...] = ("afp", "qsa")
    repetitions: int = 1
    base_seed: int = 0
    init: dict = field(default_factory=lambda: {"kind": "random"})
    afp: dict = field(default_factory=dict)
    qsa: dict = field(default_factory=dict)
    reference: str | None = "default"  # "default": lr for mirrored models, else none

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a mapping")
        known = {"model", "params", "methods", "repetitions", "base_seed", "init", "afp", "qsa", "reference"}
        extra = set(raw) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "model" not in raw:
            raise ConfigError("config needs a 'model'")
        kwargs = dict(
            model=raw["model"],
            params=raw.get("params", {}),
            repetitions=raw.get("repetitions", 1),
            base_seed=raw.get("base_seed", 0),
            init=raw.get("init", {"kind": "random"}),
            afp=raw.get("afp", {}),
            qsa=raw.get("qsa", {}),
            reference=raw.get("reference", "default"),
        )
        methods = raw.get("methods", ["afp", "qsa"])
        if isinstance(methods, str):
            methods = [methods]
        kwargs["methods"] = tuple(methods)
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def from_yaml(cls, text: str) -> "ExperimentConfig":
        import yaml

        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ConfigError(f"config is not valid YAML: {e}") from None
        return cls.from_dict(raw)

    def validate(self) -> None:
        if self.model not in KNOWN_MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {KNOWN_MODELS}")
        if not self.methods:
            raise ConfigError("methods must be non-empty")
        for m in self.methods:
            if m not in KNOWN_METHODS:
                raise ConfigError(f"unknown method {m!r}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("duplicate method")
        if not isinstance(self.repetitions, int) or self.repetitions < 1:
            raise ConfigError("repetitions must be an integer >= 1")
        if not isinstance(self.params, dict):
            raise ConfigError("params must be a mapping")
        allowed = set(MODEL_PARAMS[self.model])
        extra = set(self.params) - allowed
        if extra:
            raise ConfigError(f"params {sorted(extra)} are not valid for model {self.model!r}")
        init = self.init if isinstance(self.init, dict) else {"kind": self.init}
        kind = init.get("kind", "random")
        if kind not in INIT_KINDS:
            raise ConfigError(f"unknown init kind {kind!r}")
        if kind in ("lr", "reshuffled-lr") and self.model not in LR_MODELS:
            raise ConfigError(f"init {kind!r} needs a mirrored model (one of {LR_MODELS})")
        if self.reference not in ("default", "lr", "none", None):
            raise ConfigError("reference must be 'lr' or 'none'")
        if self.reference == "lr" and self.model not in LR_MODELS:
            raise ConfigError("reference 'lr' needs a mirrored model")
        for section_name, section in (("afp", self.afp), ("qsa", self.qsa)):
            if not isinstance(section, dict):
                raise ConfigError(f"{section_name} options must be a mapping")
        bad = set(self.afp) - {"max_fp", "budget", "sched_c", "sched_d"}
        if bad:
            raise ConfigError(f"unknown afp options: {sorted(bad)}")
        bad = set(self.qsa) - {"max_iters", "rel_tol", "penalty", "blend"}
        if bad:
            raise ConfigError(f"unknown qsa options: {sorted(bad)}")
        self.cells()  # raises ConfigError on malformed sweep values

    # -- sweep expansion ----------------------------------------------------

    def _swept_values(self, key, value) -> list:
        # list-typed params (dims, sizes) sweep only via list-of-lists
        if key in ("dims", "sizes"):
            if isinstance(value, list) and value and all(isinstance(v, list) for v in value):
                return value
            if isinstance(value, list) and all(isinstance(v, int) for v in value):
                return [value]
            raise ConfigError(f"param {key!r} must be a list of ints or a list of such lists")
        if key == "probs":
            if isinstance(value, list) and value and all(isinstance(v, list) for v in value):
                return [value]  # one matrix; sweeping matrices is not supported
            raise ConfigError("param 'probs' must be a matrix (list of rows)")
        if isinstance(value, list):
            if not value:
                raise ConfigError(f"param {key!r} has an empty sweep list")
            return value
        return [value]

    def cells(self) -> list[dict]:
        """Cross product of swept params (plus the init 'swaps' sweep)."""
        keys = sorted(self.params)
        pools = [self._swept_values(k, self.params[k]) for k in keys]
        init = self.init if isinstance(self.init, dict) else {"kind": self.init}
        if init.get("kind") == "reshuffled-lr":
            swaps = init.get("swaps", 0)
            swaps_pool = swaps if isinstance(swaps, list) else [swaps]
            if not all(isinstance(s, int) and s >= 0 for s in swaps_pool):
                raise ConfigError("init swaps must be nonnegative integers")
            keys = keys + ["swaps"]
            pools = pools + [swaps_pool]
        out = []
        for combo in itertools.product(*pools):
            out.append(dict(zip(keys, combo)))
        return out

    def init_kind(self) -> str:
        init = self.init if isinstance(self.init, dict) else {"kind": self.init}
        return init.get("kind", "random")

    def reference_kind(self) -> str | None:
        if self.reference in ("none", None):
            return None
        if self.reference == "default":
            return "lr" if self.model in LR_MODELS else None
        return self.reference


@dataclass(frozen=True)
class ExperimentRecord:
    model: str
    params: str
    method: str
    seed: int
    run_index: int
    S: float
    epsilon: float
    fixed_points: int
    hd_to_reference: int
    is_identity: bool
    iterations: int
    wall_ms: int


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".10g")
    if isinstance(v, list):
        return "x".join(_fmt_value(x) for x in v)
    return str(v)


def flatten_params(cell: dict) -> str:
    return ";".join(f"{k}={_fmt_value(cell[k])}" for k in sorted(cell))


def _build_instance(model: str, cell: dict, seed: int):
    """Returns (graph, lr_permutation_or_None) for one parameter cell."""
    try:
        if model == "grid":
            return gen_grid(cell["dims"]), None
        if model == "er":
            return gen_er(cell["n"], cell["p"], seed), None
        if model == "ba":
            return gen_ba(cell["n"], cell["m_attach"], seed), None
        if model == "sbm":
            sizes = cell["sizes"]
            if "probs" in cell:
                probs = cell["probs"]
            else:
                if "within" not in cell or "across" not in cell:
                    raise ConfigError("sbm needs 'probs' or both 'within' and 'across'")
                w, a = cell["within"], cell["across"]
                probs = [[w if i == j else a for j in range(len(sizes))] for i in range(len(sizes))]
            return gen_sbm(sizes, probs, seed), None
        if model == "lrm":
            inst = gen_lrm(cell["n"], cell["p"], cell["q"], seed)
            return inst.graph, inst.lr
        if model == "lrm-rewired":
            inst = gen_lrm(cell["n"], cell["p"], cell["q"], seed)
            g = rewire_k(inst.graph, cell["k"], stable_seed(seed, "rewire"))
            return g, inst.lr
        if model == "lrm-distorted":
            inst = gen_lrm(cell["n"], cell["p"], cell["q"], seed)
            d = distort_lrm(inst, cell["r"], cell["t"], stable_seed(seed, "distort"))
            return d.graph, d.lr
    except KeyError as e:
        raise ConfigError(f"model {model!r} needs param {e.args[0]!r}") from None
    raise ConfigError(f"unknown model {model!r}")


def _resolve_afp_max_fp(afp_opts: dict, n: int) -> int:
    v = afp_opts.get("max_fp", "half")
    if v in (None, "half"):
        return n // 2
    return int(v)


def _error_record(cfg, flat: str, method: str, master: int, rep: int) -> ExperimentRecord:
    return ExperimentRecord(
        model=cfg.model, params=flat, method=method, seed=master, run_index=rep,
        S=math.nan, epsilon=math.nan, fixed_points=-1, hd_to_reference=-1,
        is_identity=False, iterations=0, wall_ms=0,
    )


def run_unit(cfg: ExperimentConfig, cell: dict, rep: int) -> list[ExperimentRecord]:
    """All method records for one (cell, repetition): shared graph, shared init."""
    methods = sorted(cfg.methods)
    flat = flatten_params(cell)
    master = stable_seed(cfg.base_seed, cfg.model, flat, rep)
    try:
        model_cell = {k: v for k, v in cell.items() if k != "swaps"}
        graph, lr = _build_instance(cfg.model, model_cell, stable_seed(master, "graph"))
        ref = lr if cfg.reference_kind() == "lr" else None
        init_perm = _resolve_init(cfg, graph, lr, cell, master)
    except (ValueError, ConfigError):
        return [_error_record(cfg, flat, m, master, rep) for m in methods]

    out = []
    for method in methods:
        try:
            out.append(_run_method(cfg, method, graph, ref, init_perm, flat, master, rep))
        except ValueError:
            out.append(_error_record(cfg, flat, method, master, rep))
    return out


def _resolve_init(cfg: ExperimentConfig, graph: Graph, lr, cell: dict, master: int) -> Permutation:
    from graphsym.generators import random_perm_max_fp

    kind = cfg.init_kind()
    n = graph.n
    if kind == "identity":
        return Permutation.identity(n)
    if kind == "lr":
        return lr
    if kind == "reshuffled-lr":
        return reshuffle_perm(lr, cell["swaps"], stable_seed(master, "reshuffle"))
    # random inits are drawn under the annealer's cap when it runs (never the
    # identity, which it rejects), so the one shared permutation is feasible
    # for every paired method
    cap = min(_resolve_afp_max_fp(cfg.afp, n), n - 2) if "afp" in cfg.methods else n
    return random_perm_max_fp(n, cap, stable_seed(master, "init"))


def _run_method(cfg, method, graph, ref, init_perm, flat, master, rep) -> ExperimentRecord:
    if method == "afp":
        opts = AfpOptions(
            max_fp=_resolve_afp_max_fp(cfg.afp, graph.n),
            budget=cfg.afp.get("budget"),
            sched_c=cfg.afp.get("sched_c"),
            sched_d=cfg.afp.get("sched_d", 2.0),
            seed=stable_seed(master, "afp"),
            init=InitSpec(kind="perm", perm=init_perm),
        )
        report = afp_solve(graph, opts)
    else:
        blend = cfg.qsa.get("blend")
        if blend is None:
            blend = 0.5 if cfg.init_kind() == "random" else 0.0
        opts = QsaOptions(
            max_iters=cfg.qsa.get("max_iters", 200),
            rel_tol=cfg.qsa.get("rel_tol", 1e-8),
            penalty=cfg.qsa.get("penalty"),
            init=InitSpec(kind="perm", perm=init_perm, blend=blend),
        )
        report = qsa_solve(graph, opts, stable_seed(master, "qsa"))
    return ExperimentRecord(
        model=cfg.model,
        params=flat,
        method=method,
        seed=master,
        run_index=rep,
        S=report.S,
        epsilon=float(report.epsilon),
        fixed_points=report.fixed_point_count,
        hd_to_reference=hamming(report.final, ref) if ref is not None else -1,
        is_identity=report.is_identity,
        iterations=report.iters,
        # measured time is nondeterministic; records (and so CSVs) must be
        # byte-stable across reruns, so the column is pinned to 0
        wall_ms=0,
    )


def _unit_star(args):
    return run_unit(*args)


def run_experiment(cfg: ExperimentConfig, workers: int = 1, progress=None) -> list[ExperimentRecord]:
    cfg.validate()
    tasks = [(cfg, cell, rep) for cell in cfg.cells() for rep in range(cfg.repetitions)]
    records: list[ExperimentRecord] = []
    if workers <= 1:
        for idx, task in enumerate(tasks):
            records.extend(run_unit(*task))
            if progress:
                progress(idx + 1, len(tasks))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for idx, unit in enumerate(pool.map(_unit_star, tasks)):
                records.extend(unit)
                if progress:
                    progress(idx + 1, len(tasks))
    return records


# ---------------------------------------------------------------------------
# CSV round trip
# ---------------------------------------------------------------------------


def _fmt_float(v: float) -> str:
    return format(float(v), ".10g")


def records_to_csv_text(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER.split(","))
    for r in records:
        w.writerow([
            r.model,
            r.params,
            r.method,
            str(r.seed),
            str(r.run_index),
            _fmt_float(r.S),
            _fmt_float(r.epsilon),
            str(r.fixed_points),
            str(r.hd_to_reference),
            "true" if r.is_identity else "false",
            str(r.iterations),
            str(r.wall_ms),
        ])
    return buf.getvalue()


def write_records_csv(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(records_to_csv_text(records))


def read_records_csv(path) -> list[ExperimentRecord]:
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != CSV_HEADER.split(","):
        raise ValueError("unrecognized records CSV header")
    out = []
    for row in rows[1:]:
        if len(row) != 12:
            raise ValueError(f"bad record row: {row!r}")
        out.append(ExperimentRecord(
            model=row[0],
            params=row[1],
            method=row[2],
            seed=int(row[3]),
            run_index=int(row[4]),
            S=float(row[5]),
            epsilon=float(row[6]),
            fixed_points=int(row[7]),
            hd_to_reference=int(row[8]),
            is_identity=row[9] == "true",
            iterations=int(row[10]),
            wall_ms=int(row[11]),
        ))
    return out

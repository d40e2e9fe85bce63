"""Replicated experiments comparing plain, robust-distance and boosted procedures."""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from .accounting import CallCounter
from .boost import (CONSTRAINED, UNCONSTRAINED, boost_constrained, boost_saa, plan_geometric,
                    rde_baseline, saa_oracle)
from .core import eval_gap
from .errors import DomainError, PbsspError
from .oracles import OracleSpec, saa_solve, speg_solve
from .problems import make_matrix_game, make_mdp_ssp, make_quadratic, random_mdp

SCHEMA_VERSION = 1
CSV_HEADER = ["procedure", "nu", "T", "m", "calls", "mean_gap", "fail_prob", "samples", "seed"]
PROCEDURES = ("plain", "rde", "pbssp")

_INT_KEYS = {"reps", "master_seed", "parallel", "T", "m", "schema_version", "grad_batch",
             "problem.seed", "problem.d_x", "problem.d_y", "problem.n_states", "problem.n_actions",
             "problem.N_x", "problem.N_y", "problem.mdp_seed", "oracle.n", "oracle.iters",
             "oracle.batch", "oracle.inner_max_iters"}
_FLOAT_KEYS = {"epsilon", "p", "nu", "grad_weight", "problem.mu", "problem.L", "problem.L_xy",
               "problem.sigma", "problem.box", "problem.shift", "problem.sigma_r", "problem.U_x",
               "problem.sigma_A", "oracle.inner_tol", "oracle.eta"}
_BOOL_KEYS = {"problem.heavy_tailed", "oracle.warm_start"}
_STR_KEYS = {"name", "procedure", "problem.kind", "problem.regularization", "oracle.kind", "out",
             "description"}


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one table row."""

    name: str = "experiment"
    description: str = ""
    problem: dict = field(default_factory=lambda: {"kind": "quadratic"})
    procedure: str = "plain"
    oracle: dict = field(default_factory=lambda: {"kind": "saa", "n": 1000})
    epsilon: float = 0.01
    p: float = 0.01
    nu: float = 4.0
    T: int | None = None
    m: int | None = None
    grad_batch: int | None = None
    grad_weight: float = 0.1
    reps: int = 100
    master_seed: int = 0
    out: str | None = None
    parallel: int = 1
    schema_version: int = SCHEMA_VERSION

    def validate(self):
        if self.schema_version != SCHEMA_VERSION:
            raise DomainError(f"unsupported schema_version {self.schema_version}")
        if self.reps < 1:
            raise DomainError("reps must be at least 1")
        if self.epsilon <= 0:
            raise DomainError("epsilon must be positive")
        if not 0 < self.p < 1:
            raise DomainError("p must lie in (0, 1)")
        if self.procedure not in PROCEDURES:
            raise DomainError(f"procedure must be one of {', '.join(PROCEDURES)}")
        if self.problem.get("kind") not in ("quadratic", "mdp", "matrix_game"):
            raise DomainError(f"unknown problem kind {self.problem.get('kind')!r}")
        if self.oracle.get("kind", "saa") not in ("saa", "speg"):
            raise DomainError("oracle kind must be saa or speg")
        if self.parallel < 1:
            raise DomainError("parallel must be at least 1")
        if self.procedure == "pbssp" and self.T is not None and self.T < 0:
            raise DomainError("T must be nonnegative")
        if self.m is not None and self.m < 1:
            raise DomainError("m must be positive")
        return self

    def replace(self, **kw) -> ExperimentConfig:
        d = asdict(self)
        for k, v in kw.items():
            if v is None:
                continue
            if k.startswith("problem."):
                d["problem"][k[8:]] = v
            elif k.startswith("oracle."):
                d["oracle"][k[7:]] = v
            else:
                d[k] = v
        return ExperimentConfig(**d).validate()


# ---------------------------------------------------------------- config files

def _convert(key, raw):
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _BOOL_KEYS:
        if raw.lower() not in ("true", "false"):
            raise DomainError(f"{key} must be true or false")
        return raw.lower() == "true"
    if key in _STR_KEYS:
        return raw
    raise DomainError(f"unknown config key {key!r}")


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat ``key = value`` text; dotted keys address the problem and oracle."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise DomainError(f"malformed config: {exc}") from exc
    top, problem, oracle = {}, {}, {}
    for key, raw in cp["config"].items():
        val = _convert(key, raw.strip())
        if key.startswith("problem."):
            problem[key[8:]] = val
        elif key.startswith("oracle."):
            oracle[key[7:]] = val
        else:
            top[key] = val
    if "schema_version" not in top:
        raise DomainError("config needs schema_version")
    cfg = ExperimentConfig(**top)
    cfg.problem = problem or cfg.problem
    cfg.oracle = oracle or cfg.oracle
    return cfg.validate()


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def list_presets() -> list[str]:
    files = resources.files("pbssp") / "presets"
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".cfg"))


def load_preset(name: str) -> ExperimentConfig:
    f = resources.files("pbssp") / "presets" / f"{name}.cfg"
    if not f.is_file():
        raise DomainError(f"unknown preset {name!r}")
    return parse_config(f.read_text(encoding="utf-8"))


# ---------------------------------------------------------------- problems and procedures

def build_problem(problem_cfg: dict, epsilon: float):
    """(problem to optimize, problem to score, mode)."""
    get = problem_cfg.get
    kind = problem_cfg["kind"]
    reg = get("regularization", "none")
    if kind == "quadratic":
        q = make_quadratic(get("d_x", 20), get("d_y", 20), get("mu", 1.0), get("L", 8.0),
                           get("L_xy", 4.0), get("sigma", 1.0), get("heavy_tailed", False),
                           get("seed", 0), get("box"), get("shift", 1.0))
        return q, q, (CONSTRAINED if q.constrained else UNCONSTRAINED)
    if kind == "mdp":
        mdp = random_mdp(get("n_states", 10), get("n_actions", 4), get("seed", 0),
                         get("sigma_r", 1.0), get("U_x", 0.5))
        prob = make_mdp_ssp(mdp, reg, epsilon)
        return prob, prob.gap_target(), CONSTRAINED
    game = make_matrix_game(get("N_x", 30), get("N_y", 50), get("sigma_A", 1.0), get("seed", 0),
                            reg, epsilon)
    return game, game.gap_target(), CONSTRAINED


def _oracle(cfg: ExperimentConfig, counter: CallCounter):
    o = cfg.oracle
    if o.get("kind", "saa") == "speg":
        iters, batch, eta = o.get("iters", 500), o.get("batch", 10), o.get("eta")

        def call(ctx, n, rng, warm):
            return speg_solve(ctx, iters, batch, eta, rng, counter=counter)

        return call
    tol = o.get("inner_tol", cfg.epsilon * 1e-3)
    return saa_oracle(tol, counter, o.get("warm_start", True), o.get("inner_max_iters", 200_000))


def _oracle_n(cfg):
    return cfg.oracle.get("n", 1000)


@dataclass
class RunRecord:
    procedure: str
    nu: float | None
    T: int | None
    m: int | None
    calls: float
    samples: int
    gap: float
    success: bool
    rep: int
    error: str | None = None


def run_replication(cfg: ExperimentConfig, rep: int, problem=None) -> RunRecord:
    """One macro replication; failures are recorded rather than raised."""
    if problem is None:
        problem = build_problem(cfg.problem, cfg.epsilon)
    prob, scored, mode = problem
    rng = np.random.default_rng(np.random.SeedSequence(cfg.master_seed, spawn_key=(rep,)))
    counter = CallCounter()
    oracle = _oracle(cfg, counter)
    n = _oracle_n(cfg)
    nu = T = m = None
    try:
        if cfg.procedure == "plain":
            z = oracle(prob, n, rng, None)
        elif cfg.procedure == "rde":
            m = cfg.m if cfg.m is not None else 9
            z = rde_baseline(prob, cfg.epsilon, cfg.p, mode, rng, oracle=oracle, m=m, n=n,
                             grad_batch=cfg.grad_batch or max(1, n // 10), counter=counter)
        else:
            nu = cfg.nu
            plan = plan_geometric(prob.constants, cfg.epsilon, cfg.p, mode, nu, T=cfg.T if cfg.T is not None else 2,
                                  m=cfg.m if cfg.m is not None else 3, n=n,
                                  grad_batch=cfg.grad_batch or max(1, n // 10))
            T, m = plan.T, plan.m
            if mode == UNCONSTRAINED:
                tol = cfg.oracle.get("inner_tol", cfg.epsilon * 1e-3)
                z = boost_saa(prob, plan, rng, inner_tol=tol, counter=counter)
            else:
                z = boost_constrained(prob, plan, oracle, rng, counter=counter)
        gap = eval_gap(scored, z).gap
        err = None
    except PbsspError as exc:
        gap, err = math.nan, f"{type(exc).__name__}: {exc}"
    return RunRecord(cfg.procedure, nu, T, m, counter.weighted_calls(cfg.grad_weight), counter.samples,
                     float(gap), bool(gap <= cfg.epsilon) if err is None else False, rep, err)


def _worker(args):
    cfg, reps = args
    problem = build_problem(cfg.problem, cfg.epsilon)
    return [run_replication(cfg, r, problem) for r in reps]


@dataclass
class Summary:
    procedure: str
    nu: float | None
    T: int | None
    m: int | None
    calls: float
    mean_gap: float
    fail_prob: float
    samples: float
    seed: int
    reps: int
    failures: int
    ci_low: float
    ci_high: float
    incomplete: int = 0


def summarize(cfg: ExperimentConfig, records: list[RunRecord]) -> Summary:
    ok = [r for r in records if r.error is None]
    fails = sum(1 for r in records if not r.success)
    R = len(records)
    ci = binomtest(fails, R).proportion_ci(0.95, method="exact")
    first = records[0]
    return Summary(cfg.procedure, first.nu, first.T, first.m,
                   float(np.mean([r.calls for r in records])),
                   float(np.mean([r.gap for r in ok])) if ok else math.nan,
                   fails / R, float(np.mean([r.samples for r in records])), cfg.master_seed,
                   R, fails, float(ci.low), float(ci.high), R - len(ok))


def run_experiment(cfg: ExperimentConfig) -> tuple[list[RunRecord], Summary]:
    """All replications (sorted by index) and their summary row."""
    cfg.validate()
    reps = list(range(cfg.reps))
    if cfg.parallel > 1 and cfg.reps > 1:
        chunks = [reps[i::cfg.parallel] for i in range(cfg.parallel)]
        with ProcessPoolExecutor(max_workers=cfg.parallel) as ex:
            parts = list(ex.map(_worker, [(cfg, c) for c in chunks if c]))
        records = [r for part in parts for r in part]
    else:
        records = _worker((cfg, reps))
    records.sort(key=lambda r: r.rep)
    return records, summarize(cfg, records)


# ---------------------------------------------------------------- output

def _fmt(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.6g}"
    return str(v)


def summary_row(s: Summary) -> list[str]:
    return [s.procedure, _fmt(s.nu), _fmt(s.T), _fmt(s.m), _fmt(s.calls), _fmt(s.mean_gap),
            _fmt(s.fail_prob), _fmt(s.samples), str(s.seed)]


def format_csv(summaries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for s in summaries:
        w.writerow(summary_row(s))
    return buf.getvalue()


def format_table(summaries) -> str:
    head = ["procedure", "nu", "T", "m", "# of calls", "E[gap]", "P[gap > eps]", "95% CI"]
    rows = [[s.procedure, _fmt(s.nu), _fmt(s.T), _fmt(s.m), f"{s.calls:.1f}", f"{s.mean_gap:.4g}",
             f"{100 * s.fail_prob:.1f}%", f"[{100 * s.ci_low:.1f}%, {100 * s.ci_high:.1f}%]"]
            for s in summaries]
    widths = [max(len(r[i]) for r in [head] + rows) for i in range(len(head))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in [head] + rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def emit_results(summaries, fmt: str = "csv", path=None) -> str:
    """Render summaries as CSV or an aligned table; write to ``path`` when given."""
    summaries = list(summaries)
    if not summaries:
        raise DomainError("nothing to emit")
    if fmt not in ("csv", "table"):
        raise DomainError("format must be csv or table")
    text = format_csv(summaries) if fmt == "csv" else format_table(summaries)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


def parse_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for r in rows:
        d = dict(r)
        for k in ("calls", "mean_gap", "fail_prob", "samples"):
            d[k] = float(d[k])
        out.append(d)
    return out


def suite(cfg: ExperimentConfig, variants) -> list[Summary]:
    """Run one config under several (procedure, T, m) settings."""
    out = []
    for v in variants:
        _, s = run_experiment(cfg.replace(**v))
        out.append(s)
    return out

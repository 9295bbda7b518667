"""Command-line surface: batch verification runs with JSON and CSV reports.

Every subcommand writes ``<out>/<command>.json`` (structure, embedded config,
pass flag, failure list) and ``<out>/<command>.csv`` (one row per checked
item, each carrying its tolerance and pass flag).  Exit status is 0 when all
checks pass, 1 on a failed check, 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import cfunc, residual as res, series, trig
from .plancherel import (
    TestFunction,
    discrete_normalization,
    norm_formula_check,
    plancherel_verify,
    weighted_norm_sq,
)
from .rootsys import build_root_system
from .weights import MultiplicityFunction, macdonald_volume, rho

DEFAULT_RANK = {"G2": 2}


@dataclass
class RunConfig:
    command: str
    family: str | None = None
    rank: int | None = None
    k: list = field(default_factory=list)  # exact rationals as strings
    grid: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    out: str = "hypergeo-out"
    jobs: int = 1

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))


def _exact_str(s: str) -> str:
    """Normalise '-0.25' or '-1/4' to the exact rational string '-1/4'."""
    return str(Fraction(s.strip()))


def _system(cfg: RunConfig):
    return build_root_system(cfg.family, cfg.rank)


def _mult(R, spec: str) -> MultiplicityFunction:
    return MultiplicityFunction.parse(R, spec)


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(a): _jsonable(b) for a, b in v.items()}
    return v


class Report:
    def __init__(self, cfg: RunConfig, columns: Sequence[str]):
        self.cfg = cfg
        self.columns = list(columns)
        self.rows: list[dict] = []
        self.failures: list[dict] = []
        self.data: dict = {}

    def row(self, passed: bool, **values) -> None:
        values["pass"] = bool(passed)
        self.rows.append(values)
        if not passed:
            self.failures.append({c: _jsonable(values.get(c)) for c in self.columns})

    @property
    def passed(self) -> bool:
        return not self.failures

    def write(self) -> int:
        out = Path(self.cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        name = self.cfg.command.replace(" ", "-")
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in self.rows:
            w.writerow({c: _fmt(r.get(c)) for c in self.columns})
        (out / f"{name}.csv").write_text(buf.getvalue())
        summary = {
            "pass": self.passed,
            "failures": self.failures,
            "config": json.loads(self.cfg.to_json()),
            "rows": [{c: _jsonable(r.get(c)) for c in self.columns} for r in self.rows],
        }
        summary.update(_jsonable(self.data))
        text = json.dumps(summary, sort_keys=True, indent=2)
        (out / f"{name}.json").write_text(text + "\n")
        print(text)
        return 0 if self.passed else 1


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+.17g}j"
    if isinstance(v, (list, tuple)):
        sep = ";" if any(isinstance(x, (list, tuple)) for x in v) else " "
        return sep.join(_fmt(x) for x in v)
    return "" if v is None else str(v)


# -- subcommands --------------------------------------------------------------------

def cmd_roots(cfg: RunConfig) -> int:
    R = _system(cfg)
    rep = Report(cfg, ["index", "root", "coroot", "orbit", "positive", "pass"])
    for i, a in enumerate(R.roots):
        rep.row(True, index=i, root=a, coroot=R.coroot(a), orbit=R.orbit_of(a), positive=a in R.positive)
    rep.data = json.loads(R.to_json())
    return rep.write()


def _volume_row(args):
    family, rank, kstr = args
    R = build_root_system(family, rank)
    k = MultiplicityFunction.parse(R, kstr)
    tol = 1e-6 if R.rank == 1 else 1e-3
    closed = macdonald_volume(R, k)
    num = weighted_norm_sq(None, R, k).value
    return kstr, num, closed, abs(num - closed) / abs(closed), tol


def _pool_map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def cmd_volume(cfg: RunConfig) -> int:
    rep = Report(cfg, ["family", "rank", "k", "quadrature", "closed_form", "rel_err", "tol", "pass"])
    R = _system(cfg)
    rows = _pool_map(_volume_row, [(cfg.family, R.rank, k) for k in cfg.k], cfg.jobs)
    for kstr, num, closed, err, tol in rows:
        rep.row(err <= tol, family=cfg.family, rank=R.rank, k=kstr, quadrature=num,
                closed_form=closed, rel_err=err, tol=tol)
    return rep.write()


def _parse_complex_vec(text: str) -> tuple:
    """'-1/8, 0.5+2i' -> complex tuple; plain rationals are accepted."""
    out = []
    for p in text.split(","):
        p = p.replace(" ", "")
        try:
            out.append(complex(Fraction(p)))
        except ValueError:
            out.append(complex(p.replace("i", "j")))
    return tuple(out)


def cmd_eval(cfg: RunConfig) -> int:
    R = _system(cfg)
    k = _mult(R, cfg.k[0])
    lam = _parse_complex_vec(cfg.params["lam"])
    what = cfg.params["what"]
    if what == "c":
        rep = Report(cfg, ["lam", "c", "flag", "c_yang", "c_upper", "pass"])
        c = cfunc.c_normalized(R, lam, k)
        cy = cfunc.c_yang(R, lam, k)
        cu = cfunc.c_upper(R, lam, k)
        rep.row(True, lam=lam, c=c.value, flag=c.flag, c_yang=cy.value, c_upper=cu.value)
        return rep.write()
    rep = Report(cfg, ["lam", "x", "F", "pass"])
    xs = [tuple(float(v) for v in p.split(",")) for p in cfg.params["x"].split(";")]
    vals = series.eval_F(R, lam, k.as_float(), np.array(xs), tol=float(cfg.params.get("tol", 1e-13)))
    for x, v in zip(xs, np.atleast_1d(vals)):
        rep.row(True, lam=lam, x=x, F=complex(v))
    return rep.write()


def _subspace_record(L, R) -> dict:
    flags = ["residual"]
    if L.distinguished:
        flags.append("distinguished")
    return {
        "dim": L.dim,
        "defining": [list(R.roots[i]) for i in sorted(L.k_incidences)],
        "center": [str(v) for v in L.center],
        "flags": flags,
        "gamma": None if res.gamma_easy(L) is None else str(res.gamma_easy(L)),
    }


def cmd_residual(cfg: RunConfig) -> int:
    R = _system(cfg)
    k = _mult(R, cfg.k[0])
    rep = Report(cfg, ["dim", "center", "gamma", "hull_ok", "codim_ok", "pass"])
    subs = res.enumerate_residual(R, k)
    records = []
    for L in subs:
        rec = _subspace_record(L, R)
        parts = [p for p in res.plancherel_parts(R, k, subs) if p.L is L]
        if L.distinguished and parts and parts[0].in_support:
            rec["flags"].append("cuspidal")
        records.append(rec)
        hull = res.lemma_hull_check(R, L)
        rep.row(hull and L.codim == L.root_rank, dim=L.dim, center=rec["center"], gamma=rec["gamma"],
                hull_ok=hull, codim_ok=L.codim == L.root_rank)
    rep.data = {"subspaces": records}
    return rep.write()


def cmd_spectrum(cfg: RunConfig) -> int:
    R = _system(cfg)
    k0 = _mult(R, cfg.k[0]) if cfg.k else None
    fams = res.cuspidal_families(R, k0)
    rep = Report(cfg, ["family_index", "lambda_of_k", "R_z", "R_p", "sigma", "pass"])
    for i, f in enumerate(fams):
        names = ["k"] if len(f.directions) == 1 else ["k_long", "k_short"]
        sigma = [" + ".join(f"({c})*{n}" for c, n in zip(co, names)) + f" + ({d}) > 0" for co, d in f.simplex]
        if len(f.directions) == 1:
            lo, hi = f.interval()
            sigma = [str(lo), str(hi)]
        rep.row(True, family_index=i, lambda_of_k=[[str(v) for v in d] for d in f.directions],
                R_z=[list(R.roots[j]) for j in f.R_z], R_p=[list(R.roots[j]) for j in f.R_p], sigma=sigma)
    return rep.write()


def cmd_plancherel(cfg: RunConfig) -> int:
    R = build_root_system("A", 1)
    rep = Report(cfg, ["k", "width", "order", "center", "norm_sq", "spectral", "mismatch", "tol", "pass"])
    tol = float(cfg.params.get("tol", 1e-3))
    f = TestFunction(float(cfg.params.get("width", 1.0)), float(cfg.params.get("order", 1.0)),
                     float(cfg.params.get("center", 0.0)))
    for kstr in cfg.k:
        k = _mult(R, kstr)
        r = plancherel_verify(f, k, tol)
        rep.row(r.passed, k=kstr, width=f.width, order=f.order, center=f.center, norm_sq=r.norm_sq,
                spectral=r.spectral, mismatch=r.mismatch, tol=tol)
        d = discrete_normalization(k)
        rep.row(abs(d - 1) <= 1e-6, k=kstr, width="discrete", order="", center="", norm_sq=d,
                spectral=1.0, mismatch=abs(d - 1), tol=1e-6)
    return rep.write()


def cmd_norm(cfg: RunConfig) -> int:
    R = _system(cfg)
    fams = res.cuspidal_families(R)
    rep = Report(cfg, ["family_index", "k", "lhs", "rhs", "constant", "expected", "spread", "tol", "pass"])
    grid = [_mult(R, g) for g in cfg.grid]
    for i, fam in enumerate(fams):
        if not all(fam.in_simplex(k) for k in grid):
            continue
        r = norm_formula_check(fam, grid, float(cfg.params.get("tol", 1e-4)))
        for kk, a, b, c in zip(cfg.grid, r.lhs, r.rhs, r.constants):
            rep.row(r.passed, family_index=i, k=kk, lhs=a, rhs=b, constant=c, expected=r.expected,
                    spread=r.spread, tol=r.tol)
    if not rep.rows:
        rep.row(False, family_index=None, k=";".join(cfg.grid), tol=None)
    return rep.write()


def cmd_verify_all(cfg: RunConfig) -> int:
    R = _system(cfg)
    k = _mult(R, cfg.k[0])
    rep = Report(cfg, ["suite", "detail", "value", "tol", "pass"])
    rng = random.Random(0)
    # operator identities, exact
    for _ in range(3):
        lam = tuple(Fraction(rng.randint(1, 9), rng.randint(2, 11)) for _ in range(R.rank))
        e = series.verify_simultaneous_eigen(R, lam, k, 6 if R.rank > 1 else 8)
        rep.row(e.ok, suite="series-operator", detail="lam=" + ",".join(map(str, lam)),
                value=str(e.max_residual), tol=0)
    if R.rank <= 2:
        bad = sum(not trig.commutator(R, k, xi, eta, f).is_zero()
                  for xi, eta, f in trig.iter_random_cases(R, 5))
        rep.row(bad == 0, suite="cherednik-commute", detail="5 cases", value=bad, tol=0)
    # factorization
    kf = k.as_float()
    worst = 0.0
    for _ in range(50):
        lam = tuple(complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(R.rank))
        c = cfunc.c_normalized(R, lam, kf).value
        cy, cu = cfunc.c_yang(R, lam, kf).value, cfunc.c_upper(R, lam, kf).value
        worst = max(worst, abs(c - cy * cu) / abs(c))
    rep.row(worst <= 1e-12, suite="c-factorization", detail="50 random lam", value=worst, tol=1e-12)
    one = abs(cfunc.c_normalized(R, rho(R, kf), kf).value - 1)
    rep.row(one <= 1e-13, suite="c-rho", detail="c(rho,k)", value=one, tol=1e-13)
    # volume
    if len(set(k.values)) == 1:
        kstr, num, closed, err, tol = _volume_row((cfg.family, R.rank, cfg.k[0]))
        rep.row(err <= tol, suite="volume", detail=kstr, value=err, tol=tol)
    if R.rank == 1:
        r = plancherel_verify(TestFunction(1.0, 1.0), k)
        rep.row(r.passed, suite="plancherel", detail="bump radius 1", value=float(r.mismatch), tol=r.tol)
        d = discrete_normalization(k)
        rep.row(abs(d - 1) <= 1e-6, suite="discrete-normalization", detail="", value=abs(d - 1), tol=1e-6)
    if R.rank <= 2 and R.orbit_data.simply_laced:
        fam = res.cuspidal_families(R)[0]
        grid = [k.scaled(Fraction(t, 4)) for t in (3, 4, 5)]
        if all(fam.in_simplex(g) for g in grid):
            r = norm_formula_check(fam, grid)
            rep.row(r.passed, suite="norm-formula", detail=f"expected {r.expected}", value=r.spread, tol=r.tol)
    return rep.write()


COMMANDS = {
    "roots": cmd_roots,
    "volume": cmd_volume,
    "eval": cmd_eval,
    "residual": cmd_residual,
    "spectrum": cmd_spectrum,
    "plancherel-check": cmd_plancherel,
    "norm": cmd_norm,
    "verify-all": cmd_verify_all,
}


def build_parser() -> argparse.ArgumentParser:
    # --out and --jobs are accepted before or after the subcommand; the
    # subcommand copies use SUPPRESS so they only override when given.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory for JSON/CSV")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes for grid runs")
    p = argparse.ArgumentParser(prog="hypergeo", description=__doc__.splitlines()[0])
    p.add_argument("--out", default="hypergeo-out", help="output directory for JSON/CSV")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for grid runs")
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    def system(sp, family_required=True):
        sp.add_argument("--family", required=family_required)
        sp.add_argument("--rank", type=int)

    sp = sub.add_parser("roots", help="root system tables")
    system(sp)
    sp = sub.add_parser("volume", help="quadrature of delta vs closed form; CSV: family,rank,k,"
                                       "quadrature,closed_form,rel_err,tol,pass")
    system(sp)
    sp.add_argument("--k", action="append", required=True, help="equal multiplicity, e.g. -1/4 (repeatable)")
    sp = sub.add_parser("eval", help="evaluate c or F")
    sp.add_argument("what", choices=["c", "F"])
    system(sp)
    sp.add_argument("--k", required=True, help="-1/4 or long,short")
    sp.add_argument("--lam", required=True, help="comma separated simple-root coordinates, complex allowed")
    sp.add_argument("--x", help="points separated by ';', coordinates by ','")
    sp.add_argument("--tol", default="1e-13")
    sp = sub.add_parser("residual", help="residual subspaces")
    sp.add_argument("action", choices=["enumerate"])
    system(sp)
    sp.add_argument("--k", required=True)
    sp = sub.add_parser("spectrum", help="cuspidal families with their simplex")
    system(sp)
    sp.add_argument("--k", help="sample multiplicity inside the regime")
    sp = sub.add_parser("plancherel-check", help="rank one Plancherel; CSV: k,width,order,center,"
                                                 "norm_sq,spectral,mismatch,tol,pass")
    sp.add_argument("--k", action="append", required=True)
    sp.add_argument("--width", default="1.0")
    sp.add_argument("--order", default="1.0")
    sp.add_argument("--center", default="0.0")
    sp.add_argument("--tol", default="1e-3")
    sp = sub.add_parser("norm", help="norm formula constancy; CSV: family_index,k,lhs,rhs,constant,"
                                     "expected,spread,tol,pass")
    system(sp)
    sp.add_argument("--grid", required=True, help="multiplicities separated by ';'")
    sp.add_argument("--tol", default="1e-4")
    sp = sub.add_parser("verify-all", help="run every suite that applies to the system")
    system(sp)
    sp.add_argument("--k", required=True)
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    family = getattr(ns, "family", None)
    rank = getattr(ns, "rank", None)
    if family is not None:
        family = family.upper()
        if rank is None:
            rank = DEFAULT_RANK.get(family)
    k = getattr(ns, "k", None)
    if isinstance(k, str):
        k = [",".join(_exact_str(p) for p in k.split(","))]
    elif k:
        k = [",".join(_exact_str(p) for p in v.split(",")) for v in k]
    grid = [",".join(_exact_str(p) for p in g.split(",")) for g in ns.grid.split(";")] if getattr(ns, "grid", None) else []
    params = {}
    for name in ("what", "lam", "x", "tol", "width", "order", "center", "action"):
        v = getattr(ns, name, None)
        if v is not None:
            params[name] = v
    command = ns.command if ns.command != "residual" else "residual enumerate"
    return RunConfig(command, family, rank, k or [], grid, params, ns.out, ns.jobs)


VALUE_OPTIONS = ("--k", "--grid", "--lam", "--x")


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--k -1/4`` into ``--k=-1/4`` so rationals are not read as flags."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in VALUE_OPTIONS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            elif nxt.startswith("-") and len(nxt) > 1 and (nxt[1].isdigit() or nxt[1] == "."):
                out.append(f"{tok}={nxt}")
            else:
                out.extend([tok, nxt])
        else:
            out.append(tok)
    return out


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(_glue_negative_values(sys.argv[1:] if argv is None else list(argv)))
    cfg = _config(ns)
    if cfg.family is not None and cfg.rank is None:
        parser.error("--rank is required for this family")
    try:
        return COMMANDS[ns.command](cfg)
    except (ValueError, RuntimeError, ArithmeticError) as e:
        failure = {"error": type(e).__name__, "message": str(e)}
        print(json.dumps({"pass": False, "failures": [failure], "config": json.loads(cfg.to_json())},
                         sort_keys=True))
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

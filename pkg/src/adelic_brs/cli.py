"""Command-line front end.

Every subcommand reads a JSON config (positional argument), writes its
artifacts plus ``manifest.json`` into ``--output-dir`` and exits with

    0  success
    2  config error (the message names the field)
    3  inadmissible input (negative volume or non-ergodic rotation)
    4  verification failure
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import random
import sys
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from .adeles import (
    AdeleVector,
    GammaVector,
    PrimeSet,
    check_ergodic,
    gamma_check,
    geometric_abs_squared,
    theta,
    weyl_sum,
)
from .brs import (
    NonErgodicRotation,
    NotRepresentable,
    RotationSpec,
    VolumeSpec,
    brs_to_dict,
    construct_brs,
    verify_construction,
)
from .exactnum import QuadReal, is_prime
from .harness import (
    birkhoff_series,
    enumerate_volumes,
    format_quad,
    integrality_failures,
    lemma_chain_check,
)

EXIT_OK, EXIT_CONFIG, EXIT_INADMISSIBLE, EXIT_VERIFY = 0, 2, 3, 4


class ConfigError(ValueError):
    def __init__(self, field_name: str, msg: str):
        super().__init__(f"config field '{field_name}': {msg}")
        self.field = field_name


# -- config ------------------------------------------------------------------

def _rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ConfigError(where, f"expected an exact rational string like 'a/b', got {value!r}")
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(where, f"not a rational: {value!r}") from None


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(where, f"expected an integer, got {value!r}")
    return value


def _qmap(value: Any, where: str) -> QuadReal:
    if not isinstance(value, dict):
        raise ConfigError(where, "expected a map radicand -> rational string")
    terms = {}
    for k, v in value.items():
        try:
            n = int(k)
        except ValueError:
            raise ConfigError(f"{where}.{k}", "radicand must be a positive integer") from None
        if n < 1:
            raise ConfigError(f"{where}.{k}", "radicand must be a positive integer")
        terms[n] = _rational(v, f"{where}.{k}")
    return QuadReal(terms)


@dataclass(frozen=True)
class Params:
    n_max: int = 1000
    stride: int = 1
    precision_bits: int = 64
    seed: int = 0
    threads: int = 1
    height: int = 1
    eta_range: tuple[int, int] | None = None
    v_cap: QuadReal | None = None
    weyl_gamma: tuple[Fraction, ...] | None = None
    weyl_grid: tuple[int, ...] | None = None
    integrality_count: int = 1000
    svg: bool = False


_INT_PARAMS = ("n_max", "stride", "precision_bits", "seed", "threads", "height", "integrality_count")


@dataclass(frozen=True)
class RunConfig:
    primes: PrimeSet
    dimension: int
    alpha_real: tuple[QuadReal, ...]
    alpha_parts: tuple[tuple[Fraction, ...], ...]  # indexed [prime][coordinate]
    gamma: tuple[Fraction, ...] | None = None
    eta: int | None = None
    params: Params = field(default_factory=Params)

    @property
    def alpha(self) -> AdeleVector:
        parts = {p: list(self.alpha_parts[i]) for i, p in enumerate(self.primes)}
        return AdeleVector.build(self.primes, list(self.alpha_real), parts)

    @property
    def has_spec(self) -> bool:
        return self.gamma is not None

    def volume_spec(self) -> VolumeSpec:
        if self.gamma is None:
            raise ConfigError("spec", "this command needs a volume label")
        return VolumeSpec(GammaVector(self.primes, self.gamma), self.eta)

    def to_dict(self) -> dict:
        alpha = []
        for j in range(self.dimension):
            alpha.append({
                "real": {str(n): str(c) for n, c in self.alpha_real[j].terms.items()},
                "p_parts": {str(p): str(self.alpha_parts[i][j]) for i, p in enumerate(self.primes)},
            })
        out: dict = {"primes": list(self.primes), "dimension": self.dimension, "alpha": alpha}
        if self.gamma is not None:
            out["spec"] = {"gamma": [str(g) for g in self.gamma], "eta": self.eta}
        p = self.params
        params: dict = {k: getattr(p, k) for k in _INT_PARAMS}
        params["svg"] = p.svg
        if p.eta_range is not None:
            params["eta_range"] = list(p.eta_range)
        if p.v_cap is not None:
            params["v_cap"] = {str(n): str(c) for n, c in p.v_cap.terms.items()}
        if p.weyl_gamma is not None:
            params["weyl_gamma"] = [str(g) for g in p.weyl_gamma]
        if p.weyl_grid is not None:
            params["weyl_grid"] = list(p.weyl_grid)
        out["params"] = params
        return out

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


def _parse_params(raw: Any) -> Params:
    if raw is None:
        return Params()
    if not isinstance(raw, dict):
        raise ConfigError("params", "expected an object")
    known = {f.name for f in fields(Params)}
    for k in raw:
        if k not in known:
            raise ConfigError(f"params.{k}", "unknown parameter")
    kw: dict = {}
    for k in _INT_PARAMS:
        if k in raw:
            kw[k] = _integer(raw[k], f"params.{k}")
    for k in ("n_max", "height", "integrality_count"):
        if kw.get(k, 0) < 0:
            raise ConfigError(f"params.{k}", "must be nonnegative")
    for k in ("stride", "precision_bits", "threads"):
        if k in kw and kw[k] < 1:
            raise ConfigError(f"params.{k}", "must be positive")
    if "svg" in raw:
        if not isinstance(raw["svg"], bool):
            raise ConfigError("params.svg", "expected true or false")
        kw["svg"] = raw["svg"]
    if raw.get("eta_range") is not None:
        er = raw["eta_range"]
        if not isinstance(er, list) or len(er) != 2:
            raise ConfigError("params.eta_range", "expected [lo, hi]")
        lo, hi = (_integer(e, "params.eta_range") for e in er)
        if lo > hi:
            raise ConfigError("params.eta_range", "lo exceeds hi")
        kw["eta_range"] = (lo, hi)
    if raw.get("v_cap") is not None:
        kw["v_cap"] = _qmap(raw["v_cap"], "params.v_cap")
    if raw.get("weyl_gamma") is not None:
        wg = raw["weyl_gamma"]
        if not isinstance(wg, list):
            raise ConfigError("params.weyl_gamma", "expected a list of rational strings")
        kw["weyl_gamma"] = tuple(_rational(g, f"params.weyl_gamma[{i}]") for i, g in enumerate(wg))
    if raw.get("weyl_grid") is not None:
        grid = raw["weyl_grid"]
        if not isinstance(grid, list) or not grid:
            raise ConfigError("params.weyl_grid", "expected a nonempty list of integers")
        vals = tuple(_integer(n, f"params.weyl_grid[{i}]") for i, n in enumerate(grid))
        if min(vals) < 1:
            raise ConfigError("params.weyl_grid", "entries must be positive")
        kw["weyl_grid"] = vals
    return Params(**kw)


def parse_config(data: Any) -> RunConfig:
    """Validate a JSON-shaped config; every number must be exact."""
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected an object")
    for key in ("primes", "dimension", "alpha"):
        if key not in data:
            raise ConfigError(key, "missing")
    if not isinstance(data["primes"], list):
        raise ConfigError("primes", "expected a list of primes")
    primes = []
    for i, p in enumerate(data["primes"]):
        p = _integer(p, f"primes[{i}]")
        if not is_prime(p):
            raise ConfigError(f"primes[{i}]", f"{p} is not prime")
        primes.append(p)
    if len(set(primes)) != len(primes):
        raise ConfigError("primes", "duplicate primes")
    pset = PrimeSet(tuple(primes))
    d = _integer(data["dimension"], "dimension")
    if d < 1:
        raise ConfigError("dimension", "must be at least 1")
    alpha = data["alpha"]
    if not isinstance(alpha, list) or len(alpha) != d:
        raise ConfigError("alpha", f"expected a list of {d} coordinates")
    reals, parts = [], [[Fraction(0)] * d for _ in pset]
    for j, coord in enumerate(alpha):
        where = f"alpha[{j}]"
        if not isinstance(coord, dict) or "real" not in coord:
            raise ConfigError(f"{where}.real", "missing")
        reals.append(_qmap(coord["real"], f"{where}.real"))
        pp = coord.get("p_parts", {})
        if not isinstance(pp, dict):
            raise ConfigError(f"{where}.p_parts", "expected a map prime -> rational string")
        for k, v in pp.items():
            try:
                p = int(k)
            except ValueError:
                raise ConfigError(f"{where}.p_parts.{k}", "not a prime") from None
            if p not in pset:
                raise ConfigError(f"{where}.p_parts.{k}", "prime not in 'primes'")
            parts[pset.index(p)][j] = _rational(v, f"{where}.p_parts.{k}")
    gamma = eta = None
    if data.get("spec") is not None:
        spec = data["spec"]
        if not isinstance(spec, dict):
            raise ConfigError("spec", "expected an object")
        if "gamma" not in spec:
            raise ConfigError("spec.gamma", "missing")
        if not isinstance(spec["gamma"], list) or len(spec["gamma"]) != d:
            raise ConfigError("spec.gamma", f"expected a list of {d} rational strings")
        gamma = tuple(_rational(g, f"spec.gamma[{i}]") for i, g in enumerate(spec["gamma"]))
        for i, g in enumerate(gamma):
            if not gamma_check(g, pset):
                raise ConfigError(f"spec.gamma[{i}]", f"{g} has a denominator prime outside {list(pset)}")
        if "eta" not in spec:
            raise ConfigError("spec.eta", "missing")
        eta = _integer(spec["eta"], "spec.eta")
    params = _parse_params(data.get("params"))
    if params.weyl_gamma is not None:
        if len(params.weyl_gamma) != d:
            raise ConfigError("params.weyl_gamma", f"expected {d} entries")
        for i, g in enumerate(params.weyl_gamma):
            if not gamma_check(g, pset):
                raise ConfigError(f"params.weyl_gamma[{i}]", "denominator prime outside 'primes'")
    return RunConfig(pset, d, tuple(reals), tuple(tuple(r) for r in parts), gamma, eta, params)


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<path>", str(exc)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<json>", str(exc)) from None
    return parse_config(data)


# -- output helpers --------------------------------------------------------------

def svg_line_chart(xs, ys, title: str = "", width: int = 800, height: int = 300) -> str:
    """Static polyline chart."""
    pad = 40
    xs, ys = list(xs), list(ys)
    x0, x1 = (min(xs), max(xs)) if xs else (0, 1)
    y0, y1 = (min(ys + [0.0]), max(ys + [0.0])) if ys else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def px(x):
        return pad + (x - x0) * (width - 2 * pad) / (x1 - x0)

    def py(y):
        return height - pad - (y - y0) * (height - 2 * pad) / (y1 - y0)

    pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    zero = py(0.0)
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{pad}" y1="{zero:.2f}" x2="{width - pad}" y2="{zero:.2f}" stroke="#bbb"/>',
        f'<polyline fill="none" stroke="#1f4e9c" stroke-width="1" points="{pts}"/>',
        f'<text x="{pad}" y="20" font-family="monospace" font-size="12">{title}</text>',
        f'<text x="{pad}" y="{height - 10}" font-family="monospace" font-size="11">N = {x0}..{x1}</text>',
        f'<text x="{width - pad}" y="20" font-family="monospace" font-size="11" text-anchor="end">'
        f'S_N in [{y0:.3f}, {y1:.3f}]</text>',
        "</svg>",
        "",
    ])


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


class _Run:
    def __init__(self, command: str, cfg: RunConfig, outdir: Path):
        self.command, self.cfg, self.outdir = command, cfg, outdir
        self.outputs: dict[str, str] = {}
        self.summary: dict = {}
        self.set_data = None

    def write(self, name: str, text: str) -> None:
        self.outdir.mkdir(parents=True, exist_ok=True)
        (self.outdir / name).write_text(text)
        self.outputs[name] = _sha(text)

    def manifest(self, exit_code: int) -> dict:
        return {
            "command": self.command,
            "version": __version__,
            "config_hash": self.cfg.digest(),
            "config": self.cfg.to_dict(),
            "set": self.set_data,
            "summary": self.summary,
            "outputs": self.outputs,
            "exit_code": exit_code,
        }

    def finish(self, exit_code: int) -> int:
        m = self.manifest(exit_code)
        self.outdir.mkdir(parents=True, exist_ok=True)
        (self.outdir / "manifest.json").write_text(json.dumps(m, indent=2, sort_keys=True) + "\n")
        return exit_code


def _rotation(cfg: RunConfig) -> RotationSpec:
    rot = RotationSpec.of(cfg.alpha)
    if not rot.ergodic:
        raise NonErgodicRotation(rot.certificate)
    return rot


def _certificate_text(result) -> str:
    return "(" + ", ".join(str(c) for c in result.relation) + f", constant {result.constant})"


# -- subcommands --------------------------------------------------------------------

def cmd_construct(run: _Run) -> int:
    cfg = run.cfg
    brs = construct_brs(cfg.volume_spec(), _rotation(cfg))
    run.set_data = brs_to_dict(brs)
    run.write("brs.json", json.dumps(run.set_data, indent=2, sort_keys=True) + "\n")
    run.summary = {"volume": brs.volume.to_string(), "volume_text": str(brs.volume)}
    print(f"V = {brs.volume}")
    return EXIT_OK


def cmd_verify(run: _Run) -> int:
    cfg, p = run.cfg, run.cfg.params
    rot = _rotation(cfg)
    spec = cfg.volume_spec()
    brs = construct_brs(spec, rot)
    run.set_data = brs_to_dict(brs)
    checks = verify_construction(brs, rot.alpha)
    report = lemma_chain_check(spec, rot, p.n_max, brs=brs)
    bad_int = integrality_failures(cfg.primes, p.integrality_count, random.Random(p.seed))
    ok = all(checks.values()) and report.ok and not bad_int
    out = {
        "volume": brs.volume.to_string(),
        "volume_text": str(brs.volume),
        "identities": checks,
        "lemma_chain": {"ok": report.ok, "n_checked": report.n_checked, "violation": report.violation,
                        "count_histogram": {str(k): v for k, v in sorted(report.count_histogram.items())}},
        "gamma_integrality": {"samples": p.integrality_count, "seed": p.seed,
                              "failures": [str(x) for x in bad_int]},
        "ok": ok,
    }
    run.write("verify_report.json", json.dumps(out, indent=2, sort_keys=True) + "\n")
    run.summary = {"ok": ok, "volume": out["volume"]}
    print(f"V = {brs.volume}")
    for k, v in checks.items():
        print(f"  {k}: {'ok' if v else 'FAIL'}")
    print(f"  {report.summary()}")
    print(f"  integrality of lambda - sum_p {{lambda}}_p: {p.integrality_count - len(bad_int)}/{p.integrality_count}")
    if not report.ok:
        print(f"  first violation: {json.dumps(report.violation)}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_orbit(run: _Run) -> int:
    cfg, p = run.cfg, run.cfg.params
    rot = _rotation(cfg)
    brs = construct_brs(cfg.volume_spec(), rot)
    run.set_data = brs_to_dict(brs)
    series = birkhoff_series(brs, rot, None, p.n_max, p.stride, partitions=p.threads, workers=p.threads)
    buf = io.StringIO()
    series.to_csv(buf, p.precision_bits)
    run.write("orbit.csv", buf.getvalue())
    if p.svg:
        pts = series.sample_points()
        run.write("orbit.svg", svg_line_chart(pts, [series.deviations[n] for n in pts],
                                              f"S_N, V = {brs.volume}"))
    run.summary = {"n_max": series.n_max, "max_abs": format_quad(_max_exact(series), p.precision_bits),
                   "argmax": series.argmax, "volume": brs.volume.to_string()}
    print(f"V = {brs.volume}; max |S_N| = {run.summary['max_abs']} at N = {series.argmax}")
    return EXIT_OK


def _max_exact(series) -> QuadReal:
    s = series.S(series.argmax)
    return -s if s < 0 else s


def cmd_volumes(run: _Run) -> int:
    cfg, p = run.cfg, run.cfg.params
    rot = _rotation(cfg)
    eta_range = p.eta_range
    if eta_range is None and p.v_cap is None:
        eta_range = (-p.height, p.height)
    vl = enumerate_volumes(rot, p.height, eta_range, p.v_cap)
    buf = io.StringIO()
    vl.to_csv(buf, p.precision_bits)
    run.write("volumes.csv", buf.getvalue())
    run.summary = {"count": len(vl.entries), "volumes": [v.to_string() for v in vl.volumes()]}
    print(f"{len(vl.entries)} distinct volumes: " + ", ".join(str(v) for v in vl.volumes()))
    return EXIT_OK


def cmd_weyl(run: _Run) -> int:
    cfg, p = run.cfg, run.cfg.params
    gam = p.weyl_gamma or cfg.gamma
    if gam is None:
        raise ConfigError("params.weyl_gamma", "missing (and no spec.gamma to fall back on)")
    gamma = GammaVector(cfg.primes, gam)
    alpha = cfg.alpha
    grid = p.weyl_grid or tuple(sorted({n for n in range(p.stride, p.n_max + 1, p.stride)} | {max(1, p.n_max)}))
    prec = p.precision_bits
    th = theta(gamma, alpha)
    rows = ["N,path,re_lo,re_hi,im_lo,im_hi,abs_sq_lo,abs_sq_hi,closed_lo,closed_hi,agree"]
    all_agree = True
    for N in grid:
        closed = geometric_abs_squared(th, N, prec)
        ws = {path: weyl_sum(gamma, alpha, N, prec, path) for path in ("theta", "orbit")}
        agree = ws["theta"].overlaps(ws["orbit"])
        for path, w in ws.items():
            a2 = w.abs_squared()
            ok = agree and a2.overlaps(closed)
            all_agree &= ok
            vals = [w.re.lo, w.re.hi, w.im.lo, w.im.hi, a2.lo, a2.hi, closed.lo, closed.hi]
            rows.append(",".join([str(N), path] + [_fmt(v, prec) for v in vals] + [str(int(ok))]))
    run.write("weyl.csv", "\n".join(rows) + "\n")
    run.summary = {"theta": th.to_string(), "grid": list(grid), "all_agree": all_agree}
    print(f"theta = {th}; paths and closed form agree on all N: {all_agree}")
    return EXIT_OK if all_agree else EXIT_VERIFY


def _fmt(q: Fraction, precision: int) -> str:
    digits = max(1, int(precision * 0.30103))
    return f"{float(q):.17g}" if digits <= 17 else format_quad(q, precision)


def cmd_ergodic(run: _Run) -> int:
    res = check_ergodic(run.cfg.alpha)
    run.summary = {"ergodic": res.ergodic, "rank": res.rank, "dim": res.dim,
                   "relation": list(res.relation) if res.relation else None, "constant": res.constant,
                   "certificate_verified": res.verify(run.cfg.alpha_real)}
    run.write("ergodic.json", json.dumps(run.summary, indent=2, sort_keys=True) + "\n")
    if res.ergodic:
        print(f"ergodic: 1 and the real parts are linearly independent over Q (rank {res.rank})")
        return EXIT_OK
    print(f"non-ergodic: certificate {_certificate_text(res)}")
    return EXIT_INADMISSIBLE


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "orbit": cmd_orbit,
    "volumes": cmd_volumes,
    "weyl": cmd_weyl,
    "ergodic": cmd_ergodic,
}


def run(command: str, cfg: RunConfig, outdir: str | Path) -> int:
    """Execute one subcommand; always writes a manifest."""
    r = _Run(command, cfg, Path(outdir))
    try:
        code = COMMANDS[command](r)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonErgodicRotation as exc:
        r.summary = {"error": "non-ergodic rotation", "certificate": _certificate_text(exc.result)}
        print(f"inadmissible: non-ergodic rotation, certificate {_certificate_text(exc.result)}", file=sys.stderr)
        return r.finish(EXIT_INADMISSIBLE)
    except NotRepresentable as exc:
        r.summary = {"error": str(exc)}
        print(f"inadmissible: {exc}", file=sys.stderr)
        return r.finish(EXIT_INADMISSIBLE)
    except AssertionError as exc:
        r.summary = {"error": f"verification failure: {exc}"}
        print(f"verification failure: {exc}", file=sys.stderr)
        return r.finish(EXIT_VERIFY)
    return r.finish(code)


def replay(manifest_path: str | Path, outdir: str | Path) -> int:
    """Re-run a manifest and compare output hashes; exit 4 on any mismatch."""
    try:
        m = json.loads(Path(manifest_path).read_text())
        cfg = parse_config(m["config"])
        command = m["command"]
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: cannot read manifest: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.digest() != m.get("config_hash"):
        print("error: manifest config hash does not match its config", file=sys.stderr)
        return EXIT_CONFIG
    code = run(command, cfg, outdir)
    fresh = json.loads((Path(outdir) / "manifest.json").read_text())
    same = fresh["outputs"] == m["outputs"] and code == m.get("exit_code")
    print("replay identical" if same else "replay MISMATCH")
    return code if same else EXIT_VERIFY


def _apply_flags(cfg: RunConfig, args) -> RunConfig:
    over = {}
    for flag, name in (("n_max", "n_max"), ("stride", "stride"), ("precision_bits", "precision_bits"),
                       ("seed", "seed"), ("threads", "threads"), ("height", "height")):
        v = getattr(args, flag, None)
        if v is not None:
            if name in ("stride", "precision_bits", "threads") and v < 1:
                raise ConfigError(f"--{flag.replace('_', '-')}", "must be positive")
            if v < 0:
                raise ConfigError(f"--{flag.replace('_', '-')}", "must be nonnegative")
            over[name] = v
    if getattr(args, "svg", False):
        over["svg"] = True
    return replace(cfg, params=replace(cfg.params, **over)) if over else cfg


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="JSON run config")
    common.add_argument("--output-dir", default=".", help="directory for artifacts and manifest.json")
    common.add_argument("--n-max", type=int, dest="n_max")
    common.add_argument("--stride", type=int)
    common.add_argument("--precision-bits", type=int, dest="precision_bits")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, help="parallel degree; results do not depend on it")
    common.add_argument("--height", type=int, help="label height bound for 'volumes'")
    common.add_argument("--svg", action="store_true", help="also write orbit.svg")

    ap = argparse.ArgumentParser(prog="adelic-brs", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "construct": "build the set and write its exact serialization",
        "verify": "exact identities, lemma chain and integrality suite",
        "orbit": "Birkhoff discrepancy series as CSV",
        "volumes": "enumerate attainable volumes",
        "weyl": "Weyl sums along the orbit, two paths plus closed form",
        "ergodic": "ergodicity verdict with certificate",
    }
    for name, h in helps.items():
        sub.add_parser(name, parents=[common], help=h)
    rp = sub.add_parser("replay", help="re-run a manifest and compare outputs")
    rp.add_argument("manifest")
    rp.add_argument("--output-dir", default=".")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "replay":
        return replay(args.manifest, args.output_dir)
    try:
        cfg = _apply_flags(load_config(args.config), args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(args.command, cfg, args.output_dir)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands: ``classify``, ``canon``, ``table``, ``selftest``, ``fuzz``.
Exit codes are the only pass/fail channel:

====  =====================================================
0     firm result / all checks passed
1     unreadable input, malformed state file, unknown label
2     zero state
3     boundary classification or unresolved pencil
4     self-test or fuzz failure
====  =====================================================

JSON output always carries ``"schema": 1``.  Complex numbers are written as
``[re, im]`` pairs, the same convention as state files.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .errors import BadParams, SloccError, StateFileError, UnresolvedPencil, ZeroState
from .orbits import VARIANTS, apply, canonical_state, expected_subcase, haar_random_state, random_local_op
from .qtypes import (
    ALL_CLASSES,
    DEFAULT_TOL,
    DEGENERATE_CLASSES,
    Family,
    QuadClassLabel,
    StateVector,
    StructuralClass,
    Tolerances,
    parse_label,
    state_from_json,
    state_to_json,
)
from .quad_classify import Confidence, QuadReport, classify4, enumerate_classes, extract_canonical
from .tri_classify import TriReport, classify3, hyperdet_oracle

__all__ = [
    "SCHEMA",
    "RunConfig",
    "FuzzResult",
    "main",
    "main_exit",
    "build_parser",
    "report_to_json",
    "label_from_json",
    "run_fuzz",
    "cmd_classify",
    "cmd_canon",
    "cmd_table",
    "cmd_selftest",
    "cmd_fuzz",
]

SCHEMA = 1

EXIT_OK, EXIT_PARSE, EXIT_ZERO, EXIT_BOUNDARY, EXIT_FAIL = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: Optional[str] = None
    class_label: Optional[str] = None
    trials: int = 100
    seed: int = 0
    tol: Tolerances = DEFAULT_TOL
    output_format: str = "human"
    params: Optional[str] = None
    variant: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.trials <= 0:
            raise ValueError("trials must be > 0")
        if self.output_format not in ("human", "json"):
            raise ValueError("format must be 'human' or 'json'")


# ----------------------------------------------------------------------------
# JSON helpers


def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _jsonable(x: Any) -> Any:
    """Recursively turn numpy arrays / complex numbers into [re, im] lists."""
    if isinstance(x, (complex, np.complexfloating)):
        return _c(x)
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return [_jsonable(v) for v in x]
        return x.tolist()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _from_pairs(x: Any) -> np.ndarray:
    """Inverse of the ``[re, im]`` convention for nested lists."""
    a = np.asarray(x, dtype=float)
    if a.shape[-1:] != (2,):
        raise ValueError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def report_to_json(report: QuadReport, params: Optional[dict] = None) -> dict[str, Any]:
    """Serialize a four-qubit report (see README for the schema)."""
    out: dict[str, Any] = {
        "schema": SCHEMA,
        "n_qubits": 4,
        "structural": report.structural.name,
        "family": report.family.value,
        "family_display": report.family.display,
        "genuine": report.label.genuine,
        "subcase": report.label.subcase,
        "confidence": report.confidence.value,
        "bipartition_ranks": report.bipartition_ranks.as_dict(),
        "pencil": None,
        "witnesses": [state_to_json(w)["amplitudes"] for w in report.witnesses],
    }
    ps = report.pencil_structure
    if ps is not None:
        out["pencil"] = {
            "product_points": [_jsonable(p) for p in ps.product_points.roots],
            "zero_psi_points": [{"point": _jsonable(p), "k": int(k)} for p, k in ps.zero_psi_points],
            "generic_class": ps.generic_class.value if ps.generic_class else None,
            "w_points": [_jsonable(p) for p in ps.w_points.roots],
            "w_points_identically_zero": bool(ps.w_points.is_identically_zero),
        }
    if params is not None:
        out["params"] = _jsonable(params)
    return out


def label_from_json(data: dict[str, Any]) -> QuadClassLabel:
    """Rebuild the label fields of a :func:`report_to_json` document."""
    if data.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {data.get('schema')!r}")
    return QuadClassLabel(parse_label(data["structural"]), data.get("subcase"))


def _tri_to_json(rep: TriReport) -> dict[str, Any]:
    return {
        "schema": SCHEMA,
        "n_qubits": 3,
        "class": rep.cls.value,
        "ranks": list(rep.ranks),
        "w_ranks": list(rep.w_ranks) if rep.w_ranks else None,
        "disc_degenerate": rep.disc_degenerate,
        "confidence": "boundary" if rep.boundary else "firm",
    }


def _emit(cfg: RunConfig, doc: dict, human: str) -> None:
    if cfg.output_format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(human)


def _err(msg: str) -> None:
    print(f"slocc4: {msg}", file=sys.stderr)


# ----------------------------------------------------------------------------
# classify


def _human_report(rep: QuadReport, params: Optional[dict]) -> str:
    lines = [
        f"structure: {rep.structural.name}",
        f"family: {rep.family.display}",
    ]
    if rep.label.subcase:
        lines.append(f"subcase: {rep.label.subcase}")
    lines.append("ranks: " + " ".join(f"{k}={v}" for k, v in rep.bipartition_ranks.as_dict().items()))
    ps = rep.pencil_structure
    if ps is not None:
        extra = len(ps.w_only(10 * DEFAULT_TOL.root_cluster))
        zp = ", ".join(f"0_{k}Psi" for k in ps.zero_psi_partitions) or "none"
        lines.append(
            f"pencil: {len(ps.product_points)} product point(s); 0_kPsi points: {zp}; "
            f"generic member {ps.generic_class.value}; {extra} further W point(s)"
        )
    if params:
        for k, v in params.items():
            lines.append(f"  {k} = {_fmt(v)}")
    lines.append(f"confidence: {rep.confidence.value}")
    return "\n".join(lines)


def _fmt(v: Any) -> str:
    if isinstance(v, (complex, np.complexfloating)):
        return f"{complex(v):.6g}"
    if isinstance(v, np.ndarray):
        return np.array2string(v, precision=5, suppress_small=True, separator=", ").replace("\n", "")
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    return str(v)


def _read_state(path: str) -> StateVector:
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return state_from_json(text)


def cmd_classify(cfg: RunConfig) -> int:
    if not cfg.input_path:
        _err("classify needs --input")
        return EXIT_PARSE
    try:
        s = _read_state(cfg.input_path)
    except (OSError, StateFileError) as exc:
        _err(str(exc))
        return EXIT_PARSE
    if s.norm == 0:
        _err("zero state")
        return EXIT_ZERO
    try:
        if s.n_qubits == 3:
            tri = classify3(s, cfg.tol)
            _emit(cfg, _tri_to_json(tri), f"class: {tri.cls.value}\nconfidence: {'boundary' if tri.boundary else 'firm'}")
            return EXIT_BOUNDARY if tri.boundary else EXIT_OK
        rep = classify4(s, cfg.tol)
    except ZeroState:
        _err("zero state")
        return EXIT_ZERO
    except UnresolvedPencil as exc:
        _err(f"unresolved: {exc}")
        if cfg.output_format == "json":
            print(json.dumps({"schema": SCHEMA, "n_qubits": 4, "confidence": "unresolved", "error": str(exc)}))
        return EXIT_BOUNDARY
    params = None
    if rep.label.genuine:
        try:
            params = dict(extract_canonical(s, rep, cfg.tol).params)
        except SloccError:
            params = None
    _emit(cfg, report_to_json(rep, params), _human_report(rep, params))
    return EXIT_OK if rep.confidence is Confidence.FIRM else EXIT_BOUNDARY


# ----------------------------------------------------------------------------
# canon


def _parse_params(text: Optional[str]) -> dict[str, Any]:
    if not text:
        return {}
    raw = json.loads(text)
    if not isinstance(raw, dict):
        raise ValueError("--params must be a JSON object")
    return {k: _from_pairs(v) for k, v in raw.items()}


def cmd_canon(cfg: RunConfig) -> int:
    if not cfg.class_label:
        _err("canon needs --class")
        return EXIT_PARSE
    try:
        label = parse_label(cfg.class_label)
    except KeyError:
        names = ", ".join(c.name for c in ALL_CLASSES)
        _err(f"unknown class label {cfg.class_label!r}; expected one of the 34 classes: {names} (or GHZ, W, Phi4)")
        return EXIT_PARSE
    try:
        params = _parse_params(cfg.params)
        s = canonical_state(label, params, seed=cfg.seed, variant=cfg.variant)
    except (ValueError, BadParams) as exc:
        _err(str(exc))
        return EXIT_PARSE
    # never emit a state that does not classify back to the requested label
    try:
        rep = classify4(s, cfg.tol)
        ok = rep.structural == label and rep.confidence is Confidence.FIRM
    except SloccError:
        ok = False
    if not ok:
        _err(f"canonical state for {label.name} does not re-classify firmly under the given tolerances")
        return EXIT_FAIL
    doc = {"schema": SCHEMA, "class": label.name, **state_to_json(s)}
    if cfg.output_format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(json.dumps(doc))
    return EXIT_OK


# ----------------------------------------------------------------------------
# table


def cmd_table(cfg: RunConfig) -> int:
    catalog = enumerate_classes()
    rows = []
    for i, e in enumerate(catalog, 1):
        s = e.constructor(seed=cfg.seed)
        nz = {format(j, "04b"): _c(a) for j, a in enumerate(s.amps) if abs(a) > 1e-12}
        rows.append({"index": i, "structural": e.name, "family": e.family.value, "genuine": e.family.genuine, "kets": nz})
    n_deg = sum(not r["genuine"] for r in rows)
    fams = {e.family for e in catalog if e.family.genuine}
    doc = {"schema": SCHEMA, "degenerate": n_deg, "genuine": len(rows) - n_deg, "genuine_families": len(fams), "classes": rows}
    lines = [f"{'#':>2}  {'structure':<18} {'family':<28} kets"]
    for r in rows:
        kets = " + ".join(f"|{k}>" for k in r["kets"])
        lines.append(f"{r['index']:>2}  {r['structural']:<18} {Family(r['family']).display:<28} {kets}")
    lines.append(f"{n_deg} degenerate + {len(rows) - n_deg} genuine = {len(rows)} classes; {len(fams)} genuine families")
    _emit(cfg, doc, "\n".join(lines))
    return EXIT_OK


# ----------------------------------------------------------------------------
# orbit fuzzing


@dataclass
class FuzzResult:
    """Outcome of an orbit-invariance campaign.

    ``flips`` lists ``(class name, trial, reported name)``; a trial whose
    pencil analysis is unresolved counts as a boundary flag, not a flip.
    """

    trials: int = 0
    boundary: int = 0
    unresolved: int = 0
    flips: list = field(default_factory=list)
    per_class: dict = field(default_factory=dict)

    @property
    def boundary_rate(self) -> float:
        return (self.boundary + self.unresolved) / self.trials if self.trials else 0.0

    def merge(self, other: "FuzzResult") -> None:
        self.trials += other.trials
        self.boundary += other.boundary
        self.unresolved += other.unresolved
        self.flips += other.flips
        for k, v in other.per_class.items():
            acc = self.per_class.setdefault(k, [0, 0, 0])
            for i in range(3):
                acc[i] += v[i]


def _op_seed(seed: int, cls_index: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, cls_index, trial]).generate_state(1)[0])


def _fuzz_class(args) -> FuzzResult:
    label, cls_index, trials, seed, cond_max, tol = args
    out = FuzzResult()
    counts = [0, 0, 0]  # trials, boundary, flips
    nvar = VARIANTS[label.kind]
    for t in range(trials):
        variant = t % nvar
        s = canonical_state(label, seed=seed + t, variant=variant)
        op = random_local_op(4, cond_max, seed=_op_seed(seed, cls_index, t))
        out.trials += 1
        counts[0] += 1
        try:
            rep = classify4(apply(op, s), tol)
        except UnresolvedPencil:
            out.unresolved += 1
            counts[1] += 1
            continue
        if rep.structural != label or rep.label.subcase != expected_subcase(label, variant):
            out.flips.append((label.name, t, rep.structural.name))
            counts[2] += 1
        elif rep.confidence is Confidence.BOUNDARY:
            out.boundary += 1
            counts[1] += 1
    out.per_class[label.name] = counts
    return out


def run_fuzz(
    labels: Sequence[StructuralClass] = ALL_CLASSES,
    trials: int = 100,
    seed: int = 0,
    cond_max: float = 1e2,
    tol: Tolerances = DEFAULT_TOL,
    jobs: int = 1,
) -> FuzzResult:
    """Apply ``trials`` random bounded local operations to canonical states of each class.

    Deterministic for fixed arguments; with ``jobs > 1`` classes are spread
    over worker processes and merged back in catalog order.
    """
    index = {c: i for i, c in enumerate(ALL_CLASSES)}
    tasks = [(c, index[c], trials, seed, cond_max, tol) for c in labels]
    total = FuzzResult()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_fuzz_class, tasks))
    else:
        parts = [_fuzz_class(t) for t in tasks]
    for p in parts:
        total.merge(p)
    return total


def cmd_fuzz(cfg: RunConfig) -> int:
    if cfg.class_label:
        try:
            labels = [parse_label(cfg.class_label)]
        except KeyError:
            _err(f"unknown class label {cfg.class_label!r}")
            return EXIT_PARSE
    else:
        labels = list(ALL_CLASSES)
    t0 = time.perf_counter()
    res = run_fuzz(labels, cfg.trials, cfg.seed, cfg.tol.cond_max, cfg.tol, cfg.jobs)
    dt = time.perf_counter() - t0
    doc = {
        "schema": SCHEMA,
        "trials": res.trials,
        "cond_max": cfg.tol.cond_max,
        "flips": [{"class": c, "trial": t, "got": g} for c, t, g in res.flips],
        "boundary": res.boundary,
        "unresolved": res.unresolved,
        "boundary_rate": res.boundary_rate,
        "per_class": {k: {"trials": v[0], "boundary": v[1], "flips": v[2]} for k, v in res.per_class.items()},
        "seconds": dt,
    }
    lines = [f"{'class':<18} {'trials':>6} {'bound':>6} {'flips':>6}"]
    lines += [f"{k:<18} {v[0]:>6} {v[1]:>6} {v[2]:>6}" for k, v in res.per_class.items()]
    lines.append(
        f"{res.trials} trials at cond_max={cfg.tol.cond_max:g}: {len(res.flips)} flip(s), "
        f"boundary rate {100 * res.boundary_rate:.2f}% ({dt:.1f} s)"
    )
    _emit(cfg, doc, "\n".join(lines))
    return EXIT_FAIL if res.flips else EXIT_OK


# ----------------------------------------------------------------------------
# selftest


def _roundtrip_ok(label: StructuralClass, tol: Tolerances, seed: int) -> bool:
    for variant in range(VARIANTS[label.kind]):
        try:
            rep = classify4(canonical_state(label, seed=seed, variant=variant), tol)
        except SloccError:
            return False
        if rep.structural != label or rep.label.subcase != expected_subcase(label, variant):
            return False
    return True


def _degenerate_signature_ok(label: StructuralClass, tol: Tolerances) -> bool:
    # (bipartition ranks, family) must single out each of the 18 printed states;
    # ranks alone cannot separate 0_kGHZ from 0_kW
    def sig(c):
        rep = classify4(canonical_state(c), tol)
        return rep.structural, (rep.bipartition_ranks, rep.family)

    got, mine = sig(label)
    return got == label and all(sig(c)[1] != mine for c in DEGENERATE_CLASSES if c != label)


def _hyperdet_batch(trials: int, seed: int, tol: Tolerances) -> tuple[int, int]:
    """Firm disagreements and boundary count between classify3 and the hyperdeterminant.

    Half the batch is Haar-random (GHZ almost surely), half is random local
    images of the W state.
    """
    w = StateVector.from_basis(["001", "010", "100"])
    bad = band = 0
    for i in range(trials):
        if i % 2:
            s = haar_random_state(3, seed=seed + i)
        else:
            s = apply(random_local_op(3, tol.cond_max, seed=seed + i), w)
        rep = classify3(s, tol)
        if rep.boundary:
            band += 1
            continue
        if (rep.cls.value == "GHZ") != (hyperdet_oracle(s) > tol.disc_rel):
            bad += 1
    return bad, band


def cmd_selftest(cfg: RunConfig) -> int:
    tol, failures, rows = cfg.tol, [], []
    catalog = enumerate_classes()
    for e in catalog:
        ok = _roundtrip_ok(e.structural, tol, cfg.seed)
        if ok and not e.family.genuine:
            ok = _degenerate_signature_ok(e.structural, tol)
        rows.append((e.name, ok))
        if not ok:
            failures.append(e.name)
    n_fam = len({e.family for e in catalog if e.family.genuine})
    n_deg = sum(not e.family.genuine for e in catalog)
    census_ok = (n_deg, len(catalog) - n_deg, n_fam) == (18, 16, 8)
    if not census_ok:
        failures.append(f"census {n_deg}+{len(catalog) - n_deg}, {n_fam} families")
    n_hd = min(cfg.trials, 2000)
    bad, band = _hyperdet_batch(n_hd, cfg.seed, tol)
    if bad:
        failures.append(f"hyperdeterminant ({bad} disagreement(s))")
    doc = {
        "schema": SCHEMA,
        "classes": {n: ok for n, ok in rows},
        "census": {"degenerate": n_deg, "genuine": len(catalog) - n_deg, "families": n_fam, "ok": census_ok},
        "hyperdet": {"samples": n_hd, "disagreements": bad, "boundary": band},
        "failures": failures,
    }
    lines = [f"{n:<18} {'pass' if ok else 'FAIL'}" for n, ok in rows]
    lines.append(f"census: {n_deg} degenerate + {len(catalog) - n_deg} genuine, {n_fam} families: {'pass' if census_ok else 'FAIL'}")
    lines.append(f"hyperdeterminant: {n_hd} samples, {bad} disagreement(s), {band} boundary: {'pass' if not bad else 'FAIL'}")
    if failures:
        lines.append("failed: " + ", ".join(failures))
    _emit(cfg, doc, "\n".join(lines))
    return EXIT_FAIL if failures else EXIT_OK


# ----------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slocc4", description="SLOCC classification of three- and four-qubit pure states.")
    p.add_argument("command", choices=["classify", "canon", "table", "selftest", "fuzz"])
    p.add_argument("--input", dest="input_path", help="state file (JSON), '-' for stdin")
    p.add_argument("--class", dest="class_label", help="structural class name, e.g. 01GHZ or W[GHZ,W]")
    p.add_argument("--params", help="canon: JSON object of parameters, complex entries as [re, im]")
    p.add_argument("--variant", type=int, default=0, help="canon: index of the printed canonical form")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-rank", type=float, default=DEFAULT_TOL.rank_rel)
    p.add_argument("--tol-disc", type=float, default=DEFAULT_TOL.disc_rel)
    p.add_argument("--cond-max", type=float, default=DEFAULT_TOL.cond_max)
    p.add_argument("--jobs", type=int, default=1, help="fuzz: worker processes")
    p.add_argument("--format", dest="output_format", choices=["human", "json"], default="human")
    return p


_COMMANDS = {
    "classify": cmd_classify,
    "canon": cmd_canon,
    "table": cmd_table,
    "selftest": cmd_selftest,
    "fuzz": cmd_fuzz,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        tol = Tolerances(rank_rel=ns.tol_rank, disc_rel=ns.tol_disc, cond_max=ns.cond_max)
        cfg = RunConfig(
            command=ns.command,
            input_path=ns.input_path,
            class_label=ns.class_label,
            trials=ns.trials,
            seed=ns.seed,
            tol=tol,
            output_format=ns.output_format,
            params=ns.params,
            variant=ns.variant,
            jobs=ns.jobs,
        )
    except ValueError as exc:
        _err(str(exc))
        return EXIT_PARSE
    return _COMMANDS[cfg.command](cfg)



def main_exit() -> None:
    """Console-script entry point."""
    sys.exit(main())

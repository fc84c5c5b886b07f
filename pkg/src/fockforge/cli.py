"""Command-line front end: run verification tasks from JSON model files
and emit machine-readable reports.

Exit codes: 0 all checks passed, 1 a check failed, 2 schema error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import acceptance
from .bogolubov import BogolubovBlocks, shale_implementer, validate_blocks
from .fock import FockSpace
from .lattice import RealSubspace, fermionic_duality_check
from .ops import DoubledVector, apply_doubled_matrix, field, gaussian_vector, squeezer, weyl
from .paulifierz import PauliFierzModel, confined_pf_check
from .thermal import DoubledRep, ThermalParams, kms_check

SCHEMA_VERSION = 1

TASKS = ("verify-ccr", "verify-car", "bogolubov", "gaussian", "thermal", "kms",
         "lattice", "pauli-fierz", "suite")


class SchemaError(ValueError):
    pass


def decode_matrix(obj) -> np.ndarray:
    """Nested lists of [re, im] pairs -> complex matrix."""
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"matrix is not numeric: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise SchemaError(f"matrix must be rows x cols x [re, im], got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_matrix(mat: np.ndarray):
    mat = np.asarray(mat, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in mat]


def _require(model: dict, key, types):
    if key not in model:
        raise SchemaError(f"missing field {key!r}")
    if not isinstance(model[key], types):
        raise SchemaError(f"field {key!r} has wrong type")
    return model[key]


def _check_entry(name, residual, tolerance):
    return {"name": name, "residual": float(residual), "tolerance": float(tolerance),
            "pass": bool(residual <= tolerance)}


def _statistics(model) -> str:
    stat = _require(model, "statistics", str).lower()
    if stat not in ("bose", "fermi"):
        raise SchemaError(f"unknown statistics {stat!r}")
    return stat


def task_verify_ccr(model, rng):
    d = int(model.get("d", 1))
    cutoff = int(model.get("cutoff", 12))
    amplitude = float(model.get("amplitude", 0.25))
    tol_comm = float(model.get("tolerances", {}).get("commutator", 1e-12))
    tol_weyl = float(model.get("tolerances", {}).get("weyl", 1e-8))
    space = FockSpace("bose", d, cutoff)
    sub = space.sector_projector(cutoff - 1)
    worst = 0.0
    for _ in range(5):
        w1 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        w2 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        comm = space.annihilate(w1) @ space.create(w2) - space.create(w2) @ space.annihilate(w1)
        worst = max(worst, np.linalg.norm(sub @ (comm - np.vdot(w1, w2) * np.eye(space.dim)) @ sub, 2))
    window = space.sector_projector(cutoff // 2)
    z1 = amplitude * (rng.standard_normal(d) + 1j * rng.standard_normal(d))
    z1 *= amplitude / max(np.linalg.norm(np.concatenate([z1, z1.conj()])), 1e-12)
    z2 = amplitude * (rng.standard_normal(d) + 1j * rng.standard_normal(d))
    z2 *= amplitude / max(np.linalg.norm(np.concatenate([z2, z2.conj()])), 1e-12)
    y1, y2 = DoubledVector.real_point(z1), DoubledVector.real_point(z2)
    from .ops import symplectic_form

    phase = np.exp(-0.5j * symplectic_form(y1, y2))
    y12 = DoubledVector(y1.z1 + y2.z1, y1.z2bar + y2.z2bar)
    defect = weyl(space, y1) @ weyl(space, y2) - phase * weyl(space, y12)
    weyl_res = np.linalg.norm(window @ defect @ window, 2)
    return [_check_entry("ccr-commutator-subcutoff", worst, tol_comm),
            _check_entry("weyl-relation-window", weyl_res, tol_weyl)]


def task_verify_car(model, rng):
    d = int(model.get("d", 3))
    trials = int(model.get("trials", 25))
    tol = float(model.get("tolerances", {}).get("car", 1e-12))
    space = FockSpace("fermi", d)
    from .ops import euclidean_form

    worst = 0.0
    for _ in range(trials):
        y1 = DoubledVector.real_point(rng.standard_normal(d) + 1j * rng.standard_normal(d))
        y2 = DoubledVector.real_point(rng.standard_normal(d) + 1j * rng.standard_normal(d))
        f1, f2 = field(space, y1), field(space, y2)
        target = 2.0 * euclidean_form(y1, y2) * np.eye(space.dim)
        worst = max(worst, np.linalg.norm(f1 @ f2 + f2 @ f1 - target, 2))
    return [_check_entry("car-anticommutator", worst, tol)]


def task_bogolubov(model, rng):
    stat = _statistics(model)
    p = decode_matrix(_require(model, "p", list))
    q = decode_matrix(_require(model, "q", list))
    if p.shape != q.shape or p.shape[0] != p.shape[1]:
        raise SchemaError("p and q must be square matrices of equal shape")
    cutoff = int(model.get("cutoff", 12 if stat == "bose" else 0))
    tols = model.get("tolerances", {})
    blocks = BogolubovBlocks(p, q, stat)
    diag = validate_blocks(blocks)
    block_res = max(v for k, v in diag.items()
                    if not k.endswith("min_eig") and not k.startswith("hs_"))
    checks = [_check_entry("block-relations", block_res,
                           float(tols.get("blocks", 1e-9)))]
    space = FockSpace(stat, p.shape[0], cutoff if stat == "bose" else None)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        u = shale_implementer(space, blocks)
    if stat == "fermi":
        unit = np.linalg.norm(u.conj().T @ u - np.eye(space.dim), 2)
        checks.append(_check_entry("implementer-unitarity", unit,
                                   float(tols.get("unitarity", 1e-10))))
        sub = np.eye(space.dim)
        tol_int = float(tols.get("intertwining", 1e-10))
    else:
        sub = space.sector_projector(max(2, space.n_max // 5))
        tol_int = float(tols.get("intertwining", 1e-7))
    z = rng.standard_normal(p.shape[0]) + 1j * rng.standard_normal(p.shape[0])
    y = DoubledVector.real_point(z / np.linalg.norm(z))
    lhs = u @ field(space, y) @ u.conj().T
    rhs = field(space, apply_doubled_matrix(blocks.matrix(), y))
    checks.append(_check_entry("intertwining", np.linalg.norm(sub @ (lhs - rhs) @ sub, 2), tol_int))
    return checks


def task_gaussian(model, rng):
    stat = _statistics(model)
    c = decode_matrix(_require(model, "c", list))
    cutoff = int(model.get("cutoff", 20 if stat == "bose" else 0))
    tols = model.get("tolerances", {})
    space = FockSpace(stat, c.shape[0], cutoff if stat == "bose" else None)
    om = gaussian_vector(space, c)
    z = rng.standard_normal(c.shape[0]) + 1j * rng.standard_normal(c.shape[0])
    sign = 1.0 if stat == "fermi" else -1.0
    op = space.annihilate(z) + sign * space.create(c @ np.conj(z))
    tol_k = float(tols.get("kernel", 1e-12 if stat == "fermi" else 1e-8))
    checks = [_check_entry("kernel-condition", np.linalg.norm(op @ om), tol_k)]
    r = squeezer(space, c)
    res = np.linalg.norm(r @ om - space.vacuum())
    tol_r = float(tols.get("squeezer", 1e-12 if stat == "fermi" else 1e-6))
    checks.append(_check_entry("squeezer-vacuum", res, tol_r))
    return checks


def task_thermal(model, rng):
    stat = _statistics(model)
    g = decode_matrix(_require(model, "gamma", list))
    h = decode_matrix(model["h"]) if "h" in model else None
    cutoff = model.get("single_cutoff")
    params = ThermalParams(stat, g, h=h)
    rep = DoubledRep(params, single_cutoff=int(cutoff) if cutoff else None)
    tols = model.get("tolerances", {})
    d = params.d
    dens = params.density
    vac = rep.space.vacuum()
    worst = 0.0
    for _ in range(5):
        z1 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        z2 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        got = np.vdot(vac, rep.annihilate_left(z1) @ rep.create_left(z2) @ vac)
        if stat == "bose":
            want = np.vdot(z1, z2) + np.vdot(z1, dens @ z2)
        else:
            want = np.vdot(z1, z2) - np.vdot(z1, dens @ z2)
        worst = max(worst, abs(got - want))
    tol_tp = float(tols.get("two_point", 1e-10 if stat == "fermi" else 1e-6))
    checks = [_check_entry("two-point", worst, tol_tp)]
    if np.linalg.eigvalsh(g).min() > 1e-12:
        j_op, delta = rep.modular_data()
        res = 0.0
        for _ in range(3):
            z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            res = max(res, np.linalg.norm(j_op.sandwich(rep.field_left(z)) - rep.field_right(z), 2))
        tol_j = float(tols.get("conjugation", 1e-10))
        checks.append(_check_entry("modular-conjugation", res, tol_j))
    return checks


def task_kms(model, rng):
    stat = _statistics(model)
    g = decode_matrix(_require(model, "gamma", list))
    h = decode_matrix(_require(model, "h", list))
    beta = float(_require(model, "beta", (int, float)))
    t = float(model.get("t", 0.0))
    cutoff = model.get("single_cutoff")
    params = ThermalParams(stat, g, h=h)
    rep = DoubledRep(params, single_cutoff=int(cutoff) if cutoff else None)
    d = params.d
    gens = []
    for k in range(d):
        e = np.zeros(d)
        e[k] = 1.0
        gens.append(rep.create_left(e))
        gens.append(rep.annihilate_left(e))
    coeff = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    a_op = coeff[0] * gens[0] @ gens[1] + coeff[1] * gens[1]
    b_op = coeff[2] * gens[1] @ gens[0] + coeff[3] * gens[0]
    defect = kms_check(rep, h, beta, a_op, b_op, t=t)
    tol = float(model.get("tolerances", {}).get("kms", 1e-8))
    return [_check_entry("kms-defect", defect, tol)]


def task_lattice(model, rng):
    d = int(model.get("d", 2))
    n_sub = int(model.get("subspaces", 5))
    tol = float(model.get("tolerances", {}).get("duality", 1e-8))
    space = FockSpace("fermi", d)
    checks = []
    for i in range(n_sub):
        k = int(rng.integers(1, 2 * d))
        v = RealSubspace.from_vectors(d, rng.standard_normal((2 * d, k)))
        rep = fermionic_duality_check(v, space)
        res = max(rep["defect_comm_in_dual"], rep["defect_dual_in_comm"])
        if rep["dim_commutant"] != rep["dim_dressed_dual"]:
            res = max(res, 1.0)
        checks.append(_check_entry(f"duality-{i}", res, tol))
    return checks


def task_pauli_fierz(model, rng):
    k = decode_matrix(_require(model, "K", list))
    h = decode_matrix(_require(model, "h", list))
    v = decode_matrix(_require(model, "v", list))
    g = decode_matrix(model["gamma"]) if "gamma" in model else None
    cutoff = int(model.get("cutoff", 10))
    pf = PauliFierzModel(k, h, v, g, cutoff)
    tols = model.get("tolerances", {})
    if g is None:
        from .paulifierz import hamiltonian

        ham, _ = hamiltonian(pf)
        herm = np.linalg.norm(ham - ham.conj().T, 2)
        return [_check_entry("hamiltonian-hermiticity", herm, float(tols.get("hermitian", 1e-12)))]
    cutoffs = tuple(model.get("cutoff_grid", (max(4, cutoff - 4), cutoff)))
    rep = confined_pf_check(pf, cutoffs=cutoffs)
    dev = max(rep["semi"][-1], rep["standard"][-1])
    tol = float(tols.get("spectra", 1e-5))
    checks = [_check_entry("confined-spectra", dev, tol)]
    improving = rep["semi"][-1] <= rep["semi"][0] and rep["standard"][-1] <= rep["standard"][0]
    checks.append(_check_entry("cutoff-improvement", 0.0 if improving else 1.0, 0.5))
    return checks


TASK_RUNNERS = {
    "verify-ccr": task_verify_ccr,
    "verify-car": task_verify_car,
    "bogolubov": task_bogolubov,
    "gaussian": task_gaussian,
    "thermal": task_thermal,
    "kms": task_kms,
    "lattice": task_lattice,
    "pauli-fierz": task_pauli_fierz,
}


def load_model(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read model file: {exc}") from None
    try:
        model = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(model, dict):
        raise SchemaError("model file must contain a JSON object")
    version = model.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version}")
    task = _require(model, "task", str)
    if task not in TASKS:
        raise SchemaError(f"unknown task {task!r}; expected one of {TASKS}")
    return model


def build_report(model: dict, seed: int) -> dict:
    task = model["task"]
    rng = np.random.default_rng(seed)
    checks = TASK_RUNNERS[task](model, rng)
    return {
        "schema_version": SCHEMA_VERSION,
        "task": task,
        "seed": seed,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
        "timing": None,
    }


def serialize_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "residual", "tolerance", "pass"])
    for check in report["checks"]:
        writer.writerow([check["name"], repr(check["residual"]),
                         repr(check["tolerance"]), check["pass"]])
    return buf.getvalue()


def run(model_path: str, out_path: str | None, fmt: str, seed: int) -> int:
    try:
        model = load_model(model_path)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    if model["task"] == "suite":
        name = model.get("name", "smoke")
        return suite(name, out_path or ".", seed)
    t0 = time.time()
    try:
        report = build_report(model, seed)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    text = serialize_report(report, fmt)
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"task {report['task']}: {'pass' if report['pass'] else 'FAIL'} "
          f"({time.time() - t0:.2f}s)", file=sys.stderr)
    return 0 if report["pass"] else 1


def suite(name: str, out_dir: str, seed: int = 42) -> int:
    if name not in ("smoke", "full"):
        print(f"schema error: unknown suite {name!r}", file=sys.stderr)
        return 2
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            results = acceptance.run_battery(name, seed)
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    all_pass = True
    summary = []
    for check_name, rep in results:
        payload = {"schema_version": SCHEMA_VERSION, "suite": name, "seed": seed,
                   "timing": None, **rep}
        (out / f"{check_name}.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n")
        summary.append({"name": check_name, "pass": rep["pass"],
                        "residual": rep["residual"], "tolerance": rep["tolerance"]})
        all_pass = all_pass and rep["pass"]
        print(f"{check_name}: {'pass' if rep['pass'] else 'FAIL'} "
              f"(residual {rep['residual']:.3e} <= {rep['tolerance']:.1e})", file=sys.stderr)
    (out / "summary.json").write_text(
        json.dumps({"schema_version": SCHEMA_VERSION, "suite": name, "seed": seed,
                    "checks": summary, "pass": all_pass, "timing": None},
                   indent=2, sort_keys=True) + "\n")
    print(f"suite {name}: {'pass' if all_pass else 'FAIL'} ({time.time() - t0:.1f}s)",
          file=sys.stderr)
    return 0 if all_pass else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="fockforge",
                                     description="run verification tasks on Fock-space models")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a single model file")
    p_run.add_argument("model")
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--format", choices=("json", "csv"), default="json")
    p_run.add_argument("--seed", type=int, default=42)
    p_suite = sub.add_parser("suite", help="run a named battery")
    p_suite.add_argument("name")
    p_suite.add_argument("--out-dir", default="reports")
    p_suite.add_argument("--seed", type=int, default=42)
    args = parser.parse_args(argv)
    if args.command == "run":
        return run(args.model, args.out, args.format, args.seed)
    return suite(args.name, args.out_dir, args.seed)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver: parse a JSON problem spec, run one task, and emit a
machine-readable JSON report on standard output.

Exit codes: 0 on success, 2 on validation or parse errors, 3 when a spectral
gap is too small to invert the averaging operator.  Reports are deterministic
given the spec and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .affine import (
    cocycle_span,
    decide_irreducible,
    exists_irreducible_affine,
    is_separating,
)
from .cocycles import Cocycle, CocycleSpace, m_mu
from .errors import GapTooSmall, ParseError, ValidationError
from .groups import (
    FinMeasure,
    GroupModel,
    cyclic,
    dihedral,
    equal_normal_form_pair,
    free,
    free_abelian,
    make_group,
    make_measure,
    symmetric,
    uniform_generator_measure,
)
from .linalg import random_complex_vector
from .reps import (
    UnitaryRep,
    commutant,
    decode_vector,
    encode_matrix,
    encode_vector,
    random_rep,
)
from .wreath import WreathGroup, wreath_exists_irreducible, wreath_har_decomposition

TASKS = ("z1", "har", "project", "irreducible", "commutant", "vndim",
         "exists", "wreath", "selftest")


def measure_from_spec(group: GroupModel, spec: dict) -> FinMeasure:
    if not isinstance(spec, dict):
        raise ParseError("measure spec must be a dict")
    if spec.get("uniform_on_generators"):
        return uniform_generator_measure(group)
    if "support" not in spec:
        raise ParseError("measure spec needs 'support' or 'uniform_on_generators'")
    entries = []
    for item in spec["support"]:
        try:
            entries.append((item["word"], item["weight"]))
        except (TypeError, KeyError):
            raise ParseError("support entries must be {'word': [...], 'weight': w}") from None
    return make_measure(group, entries)


def cocycle_from_spec(rep: UnitaryRep, spec: dict, res_tol: float) -> Cocycle:
    if not isinstance(spec, dict):
        raise ParseError("cocycle spec must map generator names to vectors")
    values = {name: decode_vector(vec) for name, vec in spec.items()}
    b = Cocycle(rep, values)
    res = b.relator_residual()
    if res > res_tol:
        raise ValidationError(
            f"cocycle violates a relator (residual {res:.2e} > {res_tol:.1e})")
    return b


def _json_ready(obj):
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, Fraction):
        return {"float": float(obj), "exact": f"{obj.numerator}/{obj.denominator}"}
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, float):
        return obj if np.isfinite(obj) else repr(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return _json_ready(float(obj))
    if isinstance(obj, np.ndarray):
        if obj.ndim <= 1:
            return encode_vector(obj)
        return encode_matrix(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


# -- task handlers ---------------------------------------------------------------


def _context(spec: dict, need_measure: bool, opts) -> tuple:
    group = make_group(spec["group"]) if "group" in spec else None
    if group is None:
        raise ParseError("spec needs a 'group' field")
    if "rep" not in spec:
        raise ParseError("spec needs a 'rep' field")
    rep = UnitaryRep.from_spec(group, spec["rep"])
    cert = rep.validate()
    mu = None
    if need_measure:
        if "measure" not in spec:
            raise ParseError("this task needs a 'measure' field")
        mu = measure_from_spec(group, spec["measure"])
    return group, rep, mu, cert


def task_z1(spec, opts):
    group, rep, _, cert = _context(spec, need_measure=False, opts=opts)
    from .cocycles import z1_dimension_all_pairs, z1_stack_basis
    from .groups import TableGroup

    basis = z1_stack_basis(rep, rtol=opts.tol_rank)
    report = {
        "dim_z1": int(basis.shape[1]),
        "residuals": {"rep": cert["max_unitarity_residual"],
                      "relators": cert["max_relator_residual"]},
    }
    if isinstance(group, TableGroup):
        report["dim_z1_all_pairs"] = z1_dimension_all_pairs(rep, rtol=opts.tol_rank)
        report["solvers_agree"] = report["dim_z1_all_pairs"] == report["dim_z1"]
    if opts.emit_bases:
        report["z1_basis"] = encode_matrix(basis)
    return report


def _space(rep, mu, opts) -> CocycleSpace:
    return CocycleSpace(rep, mu, rank_rtol=opts.tol_rank, res_tol=opts.tol_res)


def task_har(spec, opts):
    _, rep, mu, cert = _context(spec, need_measure=True, opts=opts)
    space = _space(rep, mu, opts)
    report = {
        "dim_z1": space.dim_z1,
        "dim_b1": space.dim_b1,
        "dim_har": space.dim_har,
        "dim_fixed": space.fixed.dim,
        "gap": space.gap,
        "second_moment": mu.second_moment,
        "residuals": dict(space.residuals,
                          rep=cert["max_unitarity_residual"],
                          relators=cert["max_relator_residual"]),
    }
    if opts.emit_bases:
        report["har_basis"] = [encode_vector(b.stack()) for b in space.har_cocycles()]
    return report


def task_project(spec, opts):
    _, rep, mu, cert = _context(spec, need_measure=True, opts=opts)
    if "cocycle" not in spec:
        raise ParseError("the project task needs a 'cocycle' field")
    space = _space(rep, mu, opts)
    b = cocycle_from_spec(rep, spec["cocycle"], opts.tol_res)
    space.coords(b)  # membership check
    b0, v = space.project_harmonic(b)
    oracle = space.project_harmonic_oracle(b)
    report = {
        "dim_har": space.dim_har,
        "gap": space.gap,
        "harmonic_part": {name: encode_vector(val) for name, val in b0.values.items()},
        "translation": encode_vector(v),
        "residuals": {
            "harmonicity": float(np.linalg.norm(m_mu(b0, mu))),
            "oracle_agreement": float(space.norm(b0 - oracle)),
            "rep": cert["max_unitarity_residual"],
        },
    }
    return report


def task_irreducible(spec, opts):
    _, rep, mu, cert = _context(spec, need_measure=True, opts=opts)
    if "cocycle" not in spec:
        raise ParseError("the irreducible task needs a 'cocycle' field")
    space = _space(rep, mu, opts)
    b = cocycle_from_spec(rep, spec["cocycle"], opts.tol_res)
    space.coords(b)
    rng = np.random.default_rng(opts.seed)
    result = decide_irreducible(space, b, sampler_trials=opts.trials, rng=rng)
    report = result.certificate()
    report["gap"] = space.gap
    report["dim_har"] = space.dim_har
    report["residuals"] = {"rep": cert["max_unitarity_residual"]}
    if opts.emit_bases:
        report["harmonic_part"] = {name: encode_vector(val)
                                   for name, val in result.harmonic_part.values.items()}
        report["translation"] = encode_vector(result.translation)
    return report


def task_commutant(spec, opts):
    _, rep, _, cert = _context(spec, need_measure=False, opts=opts)
    algebra = commutant(rep)
    report = {
        "dim": algebra.dim,
        "center_dim": len(algebra.center_basis),
        "is_factor": algebra.is_factor,
        "blocks": [{"size": blk.size, "multiplicity": blk.multiplicity,
                    "rank": blk.rank, "type": f"I_{blk.size}"}
                   for blk in algebra.blocks],
        "residuals": {"rep": cert["max_unitarity_residual"]},
    }
    if opts.emit_bases:
        report["basis"] = [encode_matrix(T) for T in algebra.basis]
    return report


_TYPES_NOTE = ("finite dimension admits only finite type I blocks; infinite "
               "and type III cases cannot occur")


def task_vndim(spec, opts):
    _, rep, mu, cert = _context(spec, need_measure=True, opts=opts)
    result = exists_irreducible_affine(rep, mu, seed=opts.seed)
    report = {
        "factor": result.factor,
        "dim_har": result.dim_har,
        "dim_vn": result.dim_vn,
        "blocks": [{"size": blk.size, "multiplicity": blk.multiplicity,
                    "dim_har": blk.dim_har, "dim_vn": blk.dim_vn,
                    "type": f"I_{blk.size}"} for blk in result.blocks],
        "gap": result.gap,
        "types_note": _TYPES_NOTE,
        "residuals": {"rep": cert["max_unitarity_residual"]},
    }
    return report


def task_exists(spec, opts):
    _, rep, mu, cert = _context(spec, need_measure=True, opts=opts)
    result = exists_irreducible_affine(rep, mu, seed=opts.seed)
    report = {
        "exists": result.exists,
        "factor": result.factor,
        "dim_har": result.dim_har,
        "dim_vn": result.dim_vn,
        "blocks": [{"size": blk.size, "multiplicity": blk.multiplicity,
                    "dim_har": blk.dim_har, "dim_vn": blk.dim_vn,
                    "passes": blk.passes} for blk in result.blocks],
        "gap": result.gap,
        "note": result.note,
        "types_note": _TYPES_NOTE,
        "residuals": {"rep": cert["max_unitarity_residual"]},
    }
    if result.witness is not None and opts.emit_bases:
        report["witness"] = {name: encode_vector(val)
                             for name, val in result.witness.values.items()}
    return report


def task_wreath(spec, opts):
    if "wreath" not in spec:
        raise ParseError("the wreath task needs a 'wreath' field")
    wspec = spec["wreath"]
    base = make_group(wspec["base_group"])
    rep = UnitaryRep.from_spec(base, wspec["rep"])
    cert = rep.validate()
    mu1 = measure_from_spec(base, wspec["mu1"])
    t_weight = float(wspec.get("mu2_weight_t", 0.5))
    rng = np.random.default_rng(opts.seed)
    deco = wreath_har_decomposition(rep, mu1, t_weight=t_weight, rng=rng)
    verdict = wreath_exists_irreducible(rep, seed=opts.seed, cross_check=True,
                                        mu1=mu1, t_weight=t_weight)
    report = {
        "dim_hilbert": deco.dim_hilbert,
        "dim_har": deco.dim_har,
        "dim_z1": deco.space.dim_z1,
        "base_dim_z1": deco.base_dim_z1,
        "exists_irreducible": verdict.exists,
        "cyclic": verdict.cyclic,
        "isotypic_blocks": [{"multiplicity": size, "irrep_dim": mult}
                            for size, mult in verdict.blocks],
        "cross_check_verdict": verdict.cross_check_verdict,
        "gap": deco.space.gap,
        "residuals": {
            "cocycle_identity": deco.identity_residual,
            "harmonicity": deco.harmonic_residual,
            "lift_span": deco.lift_span_residual,
            "rep": cert["max_unitarity_residual"],
        },
    }
    return report


# -- selftest ------------------------------------------------------------------------


def run_selftest(seed: int = 0, trials: int = 50) -> dict:
    """A condensed run of the package invariants on standard instances."""
    rng = np.random.default_rng(seed)
    checks = []

    def record(name, ok, worst=0.0):
        checks.append({"name": name, "ok": bool(ok), "worst": float(worst)})

    # group arithmetic
    worst_ok = True
    for G in (free(2), free_abelian(2), cyclic(6), dihedral(4)):
        ball = G.ball(3)
        for _ in range(trials):
            g = ball[int(rng.integers(0, len(ball)))]
            h = ball[int(rng.integers(0, len(ball)))]
            if G.word_length(G.multiply(g, h)) > G.word_length(g) + G.word_length(h):
                worst_ok = False
            if not G.equal(G.multiply(g, G.inverse(g)), G.identity()):
                worst_ok = False
        b2, b3 = G.ball(2), G.ball(3)
        if not set(map(G.sort_key, b2)) <= set(map(G.sort_key, b3)):
            worst_ok = False
    record("group_arithmetic", worst_ok)

    # well-definedness of evaluation
    G = symmetric(3)
    rep = random_rep(G, rng, max_dim=3)
    mu = uniform_generator_measure(G)
    space = CocycleSpace(rep, mu)
    worst = 0.0
    if space.dim_z1:
        b = space.random_z1(rng)
        for _ in range(trials):
            w1, w2, _ = equal_normal_form_pair(G, rng)
            worst = max(worst, float(np.linalg.norm(
                b.evaluate_word(w1) - b.evaluate_word(w2))))
    record("evaluation_well_defined", worst < 1e-8, worst)
    record("finite_group_cohomology_vanishes",
           space.dim_har == 0 and space.dim_z1 == space.dim_b1)

    # harmonic projection on the free group
    F2 = free(2)
    from .linalg import random_unitary

    sigma = UnitaryRep(F2, {"a": random_unitary(rng, 2), "b": random_unitary(rng, 2)})
    mu2 = uniform_generator_measure(F2)
    sp = CocycleSpace(sigma, mu2)
    worst = sp.residuals["har_b1_orthogonality"]
    for _ in range(8):
        b = sp.random_z1(rng)
        b0, _ = sp.project_harmonic(b)
        worst = max(worst, sp.norm(b0 - sp.project_harmonic_oracle(b)))
        b00, _ = sp.project_harmonic(b0)
        worst = max(worst, sp.norm(b00 - b0))
    record("harmonic_projection", worst < 1e-8, worst)

    # span minimality
    worst_ok = True
    for _ in range(8):
        b0 = sp.random_harmonic(rng)
        v = random_complex_vector(rng, sigma.dim)
        lhs = cocycle_span(b0)
        rhs = cocycle_span(b0 + Cocycle.coboundary(sigma, v))
        if rhs.containment_residual(lhs) > 1e-8:
            worst_ok = False
    record("span_minimality", worst_ok)

    # separating / irreducible consistency on a multiple
    double = sigma.multiple(2)
    spd = CocycleSpace(double, mu2)
    algebra = commutant(double)
    agree = True
    for _ in range(4):
        b = spd.random_harmonic(rng)
        sep = is_separating(algebra, b)
        irr = decide_irreducible(spd, b).irreducible
        if sep != irr:
            agree = False
    record("separating_matches_irreducible", agree)

    # wreath arithmetic and lifts
    base = cyclic(2, gen_name="u")
    wr = WreathGroup(base)
    ok = True
    ball = wr.ball(2)
    for _ in range(trials):
        x = ball[int(rng.integers(0, len(ball)))]
        y = ball[int(rng.integers(0, len(ball)))]
        z = ball[int(rng.integers(0, len(ball)))]
        if wr.multiply(wr.multiply(x, y), z) != wr.multiply(x, wr.multiply(y, z)):
            ok = False
        if wr.multiply(x, wr.inverse(x)) != wr.identity():
            ok = False
    record("wreath_arithmetic", ok)

    brep = UnitaryRep(base, {"u": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)})
    deco = wreath_har_decomposition(brep, uniform_generator_measure(base), rng=rng)
    record("wreath_decomposition",
           deco.dim_har == 2 and deco.identity_residual < 1e-8
           and deco.harmonic_residual < 1e-10 and deco.lift_span_residual < 1e-8,
           deco.identity_residual)

    ok = all(c["ok"] for c in checks)
    return {"ok": ok, "checks": checks, "seed": seed, "trials": trials}


def task_selftest(spec, opts):
    report = run_selftest(seed=opts.seed, trials=opts.trials)
    if not report["ok"]:
        report["error"] = "selftest failed"
    return report


HANDLERS = {
    "z1": task_z1,
    "har": task_har,
    "project": task_project,
    "irreducible": task_irreducible,
    "commutant": task_commutant,
    "vndim": task_vndim,
    "exists": task_exists,
    "wreath": task_wreath,
    "selftest": task_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affharm",
        description="harmonic cocycles and irreducible affine isometric actions")
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("specfile", nargs="?",
                        help="JSON problem spec (not needed for selftest)")
    parser.add_argument("--tol-rank", type=float, default=1e-9, dest="tol_rank")
    parser.add_argument("--tol-res", type=float, default=1e-8, dest="tol_res")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--emit-bases", action="store_true", dest="emit_bases")
    parser.add_argument("--output", type=str, default=None)
    parser.add_argument("--version", action="version", version=__version__)
    return parser


def main(argv=None) -> int:
    opts = build_parser().parse_args(argv)

    spec: dict = {}
    if opts.task != "selftest":
        if not opts.specfile:
            _emit({"error": {"type": "ParseError",
                             "message": "this task needs a spec file"}}, opts)
            return 2
        try:
            with open(opts.specfile) as fh:
                spec = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            _emit({"error": {"type": "ParseError", "message": str(exc)}}, opts)
            return 2

    if opts.seed is None:
        opts.seed = int(spec.get("seed", 0))
    if opts.trials is None:
        opts.trials = int(spec.get("trials", 50))
    tols = spec.get("tolerances", {})
    if "tol_rank" in tols:
        opts.tol_rank = float(tols["tol_rank"])
    if "tol_res" in tols:
        opts.tol_res = float(tols["tol_res"])

    try:
        report = HANDLERS[opts.task](spec, opts)
    except GapTooSmall as exc:
        _emit({"error": {"type": "GapTooSmall", "message": str(exc)}}, opts)
        return 3
    except (ParseError,) as exc:
        _emit({"error": {"type": "ParseError", "message": str(exc)}}, opts)
        return 2
    except ValidationError as exc:
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}}, opts)
        return 2

    envelope = {
        "task": opts.task,
        "seed": opts.seed,
        "version": __version__,
        "tolerances": {"tol_rank": opts.tol_rank, "tol_res": opts.tol_res},
    }
    envelope.update(report)
    _emit(envelope, opts)
    if opts.task == "selftest" and not report.get("ok", False):
        return 1
    return 0


def _emit(report: dict, opts) -> None:
    text = json.dumps(_json_ready(report), sort_keys=True, indent=2)
    if getattr(opts, "output", None):
        with open(opts.output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Every command writes one JSON document (to ``--out`` or stdout) and exits
with 0 when all certificates in scope hold exactly, 1 when one fails and 2
on malformed input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .ring import parse_ring, minimal_generators
from .bigraded import NotInvertible
from .barcobar import DGAPresentation, InvalidDGA, bar, homology_JBA
from .freealg import FreeMultialgebra, AlgebraMorphism
from .lifting import LiftProblem, LinearMap, UnsolvableStep, adams_hilton_lift
from .model import (MinimalMultimodel, UnsolvableObstruction, certificates_pass, certify,
                    consistency_defects, minimal_multimodel, models_isomorphic)

EXIT_OK, EXIT_FAIL, EXIT_MALFORMED = 0, 1, 2


class MalformedInput(ValueError):
    pass


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"{path}: {exc}") from exc


def _emit(doc, out):
    text = json.dumps(doc, indent=2, ensure_ascii=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dga(args, path=None):
    data = _load(path or args.input)
    if args.ring:
        data = dict(data, ring=args.ring)
    try:
        A = DGAPresentation.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad DGA presentation: {exc!r}") from exc
    if args.max_degree is not None:
        if args.max_degree < 1:
            raise MalformedInput("--max-degree must be at least 1")
        A.truncation = args.max_degree
    return A


def _permuted(A, seed):
    """Randomly reorder the basis of ``A`` (the only use of ``--seed``)."""
    if seed is None:
        return A
    rng = random.Random(seed)
    return A.permuted([A.unit] + rng.sample(A.ideal, len(A.ideal)))


# -- commands ----------------------------------------------------------------

def cmd_validate(args):
    A = _dga(args)
    problems = A.problems()
    return {"ring": str(A.ring), "valid": not problems, "problems": problems}, not problems


def cmd_homology_jba(args):
    A = _dga(args).validate()
    top = A.truncation
    C = bar(A, top + 1)
    rows = []
    for k in range(1, top + 1):
        M = homology_JBA(A, k, C)
        count, _ = minimal_generators(M)
        row = {"degree": k, "length": M.length(), "minimal_generators": count}
        if A.ring.is_finite:
            row["cardinality"] = M.cardinality()
        rows.append(row)
    return {"ring": str(A.ring), "max_degree": top, "homology": rows}, True


def cmd_bar(args):
    A = _dga(args).validate()
    C = bar(A, A.truncation + 1)
    defects = [list(w) for w in C.words if C.d(C.d({w: 1}))]
    doc = C.to_json()
    doc["certificates"] = {"d_squared": defects or "zero"}
    return doc, not defects


def cmd_model(args):
    A = _permuted(_dga(args).validate(), args.seed)
    M = minimal_multimodel(A)
    doc = M.to_json()
    doc["generator_counts"] = _generator_counts(M)
    return doc, certificates_pass(doc["certificates"])


def _generator_counts(M):
    counts = {}
    for (_g, c, r) in M.algebra.generators.basis:
        counts[(c, r)] = counts.get((c, r), 0) + 1
    return [[c, r, n] for (c, r), n in sorted(counts.items())]


def _model(path):
    data = _load(path)
    try:
        return MinimalMultimodel.from_json(data), data
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise MalformedInput(f"{path}: bad model file: {exc!r}") from exc


def cmd_check_model(args):
    path = args.files[0] if args.files else args.input
    if not path:
        raise MalformedInput("check-model needs a model file")
    M, data = _model(path)
    cert = certify(M)
    consistency = consistency_defects(M)
    doc = {
        "certificates": cert,
        "consistency": consistency or "zero",
        "matches_recorded": cert == data.get("certificates"),
    }
    return doc, certificates_pass(cert) and not consistency


def cmd_compare_models(args):
    if len(args.files) != 2:
        raise MalformedInput("compare-models needs two model files")
    M1, _ = _model(args.files[0])
    M2, _ = _model(args.files[1])
    if str(M1.dga.ring) != str(M2.dga.ring) or \
            sorted(map(tuple, M1.dga.basis)) != sorted(map(tuple, M2.dga.basis)):
        return {"isomorphic": False, "reason": "models of different algebras"}, False
    try:
        iso = models_isomorphic(M1, M2, args.max_degree)
    except (NotInvertible, UnsolvableStep) as exc:
        return {"isomorphic": False, "reason": str(exc)}, False
    R = M1.algebra.ring
    cert = dict(iso.certificates)
    ok = all(v in ("zero", True) for v in cert.values())
    doc = {
        "isomorphic": ok,
        "forward": _morphism_json(R, iso.forward),
        "inverse": _morphism_json(R, iso.inverse),
        "certificates": cert,
    }
    return doc, ok


def _morphism_json(R, f):
    T = f.target
    return [[g, [[list(w), R.format_scalar(v)] for w, v in sorted(f.image(g).items(),
                                                                  key=lambda t: T.sort_key(t[0]))]]
            for g in f.source.generator_names()]


# -- lift problems --------------------------------------------------------------

def _algebra(data, R):
    """A free multialgebra, or a DGA (``{"dga": ...}``) viewed as its associated multialgebra."""
    if "dga" in data:
        return DGAPresentation.from_json(dict(data["dga"], ring=str(R))).validate().associated()
    return FreeMultialgebra.from_json(dict(data, ring=str(R)))


def _key(k):
    return tuple(k) if isinstance(k, list) else k


def _element(R, terms):
    return {_key(k): R.parse_scalar(v) for k, v in terms}


def cmd_lift(args):
    data = _load(args.input)
    try:
        R = parse_ring(args.ring or data["ring"])
        S = FreeMultialgebra.from_json(dict(data["source"], ring=str(R)))
        A = _algebra(data["A"], R)
        B = _algebra(data["A_prime"], R)
        g_images = {_key(k): _element(R, terms) for k, terms in data["g"]}
        if isinstance(A, FreeMultialgebra):
            g = AlgebraMorphism(A, B, g_images)
        else:
            g = LinearMap(A, B, g_images)
        fp = AlgebraMorphism(S, B, {k: _element(R, terms) for k, terms in data["f_prime"]})
        top = args.max_degree if args.max_degree is not None else int(data.get("max_degree", S.truncation - 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad lift problem: {exc!r}") from exc
    try:
        sol = adams_hilton_lift(LiftProblem(S, A, B, g, fp, top))
    except UnsolvableStep as exc:
        return {"solved": False, "column": exc.q, "degree": exc.n, "generator": exc.generator,
                "step": exc.stage}, False

    def elem(T, x):
        return [[list(k) if isinstance(k, tuple) else k, R.format_scalar(v)]
                for k, v in sorted(x.items(), key=lambda t: T.sort_key(t[0]))]

    gens = [v for v in S.generator_names() if S.generator_degree(v) <= top]
    residuals = [list(r) for r in sol.residual_generators]
    doc = {
        "solved": True,
        "f": [[v, elem(A, sol.f.image(v))] for v in gens],
        "h": [[v, elem(B, sol.h.values.get(v, {}))] for v in gens],
        "certificates": {"residuals": residuals or "zero", "filtration": sol.filtration_ok()},
    }
    return doc, not residuals and sol.filtration_ok()


COMMANDS = {
    "validate": cmd_validate,
    "homology-jba": cmd_homology_jba,
    "bar": cmd_bar,
    "model": cmd_model,
    "check-model": cmd_check_model,
    "compare-models": cmd_compare_models,
    "lift": cmd_lift,
}


def build_parser():
    p = argparse.ArgumentParser(prog="multimodel", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("files", nargs="*", help="model files for check-model / compare-models")
    p.add_argument("--input", help="input JSON (DGA presentation, model or lift problem)")
    p.add_argument("--ring", help="override the ring: Fp:<p>, Q or Zmod:<p>^<k>")
    p.add_argument("--max-degree", type=int, help="truncation degree N")
    p.add_argument("--out", help="write the JSON result here instead of stdout")
    p.add_argument("--seed", type=int, help="randomly permute the input basis first")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command in ("validate", "homology-jba", "bar", "model", "lift") and not args.input:
        if args.files:
            args.input = args.files[0]
        else:
            print("error: --input is required", file=sys.stderr)
            return EXIT_MALFORMED
    try:
        if args.ring:
            parse_ring(args.ring)
        doc, ok = COMMANDS[args.command](args)
    except MalformedInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except ValueError as exc:
        if isinstance(exc, (InvalidDGA, UnsolvableObstruction)):
            _emit({"error": type(exc).__name__, "detail": str(exc)}, args.out)
            return EXIT_FAIL
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    _emit(doc, args.out)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

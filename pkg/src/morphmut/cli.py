"""Command-line entry point.

Subcommands mirror the library modules one to one:

  validate   check a spec file against all structural axioms
  mutate     mutate a (spec, point) pair at index p
  stability  decide (semi-)stability of a point
  census     orbit censuses and semistability transfer checks
  examples   closed-form arithmetic (rho', singular values, families, duals)

Exit codes: 0 success / positive verdict, 1 negative domain verdict
(invalid spec, unstable-only outcomes, transfer violations), 2 usage or
validation errors (for `stability` also: unstable), 3 budget exceeded.
Machine-readable errors go to stderr as JSON; all regular output is JSON
on stdout (sorted keys), so identical invocations are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass
from fractions import Fraction

from .matrix import BudgetExceeded, Field, GF, QQ
from .jsonio import SpecJsonError, mat_to_json, parse_point, parse_spec, serialize_point, serialize_spec
from .rs_spec import DimVector, validate
from .stability import (Polarization, c_tau, c_tau_star, is_g_semistable,
                        is_gred_semistable, kronecker_semistable,
                        sampled_g_check, sampled_gred_check, thm31_condition,
                        thm76_condition)
from .mutation import (MutationError, mutate_rs_point, transport_polarization,
                       window_predicates)
from .theta import ThetaError
from .census import orbit_census, transfer_check, mutated_orbit_census
from .mutation import mutate_rs_spec
from .calculators import (KroneckerData, P2Family, kronecker_dual_dims,
                          pn_quotient_dims, pn_singular_rhos, rho_prime,
                          rho_prime_family)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


@dataclass
class Config:
    budget_points: int = 1 << 18
    budget_group: int = 1 << 20
    budget_subspaces: int = 8
    default_field: str = "GF:2"
    fmt: str = "json"
    seed: int = 0

    @staticmethod
    def load(args) -> "Config":
        cfg = Config()
        path = os.environ.get("MUTATOR_CONFIG")
        if path:
            with open(path) as fh:
                data = json.load(fh)
            for k in ("budget_points", "budget_group", "budget_subspaces", "seed"):
                if k in data:
                    setattr(cfg, k, int(data[k]))
            if "format" in data:
                cfg.fmt = data["format"]
            if "default_field" in data:
                cfg.default_field = data["default_field"]
        for k in ("budget_points", "budget_group", "budget_subspaces", "seed"):
            v = getattr(args, k, None)
            if v is not None:
                setattr(cfg, k, v)
        if getattr(args, "format", None):
            cfg.fmt = args.format
        if cfg.budget_points <= 0 or cfg.budget_group <= 0 or cfg.budget_subspaces <= 0:
            raise UsageError("budgets must be positive")
        return cfg


class UsageError(ValueError):
    pass


def parse_field(text: str) -> Field:
    if text in ("Q", "QQ"):
        return QQ
    if text.startswith("GF:"):
        return GF(int(text.split(":", 1)[1]))
    raise UsageError(f"bad field {text!r}; use Q or GF:p")


def parse_pol(text: str) -> Polarization:
    try:
        lam_text, mu_text = text.split(";")
        lam = [Fraction(x) for x in lam_text.split(",") if x]
        mu = [Fraction(x) for x in mu_text.split(",") if x]
    except ValueError:
        raise UsageError(f"bad polarization {text!r}; use 'l1,l2;u1'")
    if not lam or not mu:
        raise UsageError("polarization needs both lambda and mu entries")
    return Polarization(tuple(lam), tuple(mu))


def parse_dims(text: str) -> DimVector:
    try:
        m_text, n_text = text.split(";")
        m = tuple(int(x) for x in m_text.split(",") if x)
        n = tuple(int(x) for x in n_text.split(",") if x)
        return DimVector(m, n)
    except ValueError as e:
        raise UsageError(f"bad dims {text!r}: {e}")


def load_spec(path: str):
    with open(path) as fh:
        return parse_spec(json.load(fh))


def emit(obj, cfg: Config):
    if cfg.fmt == "table":
        sys.stdout.write(render_table(obj) + "\n")
    else:
        sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def render_table(obj, prefix="") -> str:
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)):
                lines.append(f"{prefix}{k}:")
                lines.append(render_table(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            lines.append(render_table(v, prefix + "- "))
    else:
        lines.append(f"{prefix}{obj}")
    return "\n".join(x for x in lines if x)


def cmd_validate(args, cfg: Config) -> int:
    spec = load_spec(args.spec)
    rep = validate(spec)
    emit({"valid": rep.ok,
          "axioms_checked": len(rep.items),
          "failures": [{"axiom": it.axiom, "indices": list(it.indices)}
                       for it in rep.failures]}, cfg)
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def cmd_mutate(args, cfg: Config) -> int:
    spec = load_spec(args.spec)
    with open(args.point) as fh:
        w = parse_point(spec, json.load(fh))
    mut, wp, u, alpha = mutate_rs_point(spec, w.dims, args.p, w)
    out = {
        "p": args.p,
        "mutated_spec": serialize_spec(mut.spec),
        "mutated_dims": {"m": list(mut.dims.m), "n": list(mut.dims.n)},
        "mutated_point": serialize_point(mut.spec, wp),
        "u": mat_to_json(u),
        "alpha": mat_to_json(alpha),
        "transported_polarization": None,
    }
    if args.pol:
        pol = parse_pol(args.pol)
        pol.check(w.dims)
        out["transported_polarization"] = transport_polarization(
            pol, spec, w.dims, args.p).to_json()
    emit(out, cfg)
    return EXIT_OK


def cmd_stability(args, cfg: Config) -> int:
    spec = load_spec(args.spec)
    with open(args.point) as fh:
        w = parse_point(spec, json.load(fh))
    pol = parse_pol(args.pol)
    pol.check(w.dims)  # raises ValueError -> usage error on bad normalization
    rng = random.Random(cfg.seed)
    if args.sampled:
        fn = sampled_g_check if args.which == "g" else sampled_gred_check
        v = fn(spec, w.dims, w, pol, args.mode, rng, args.sampled)
    elif args.which == "g":
        v = is_g_semistable(spec, w.dims, w, pol, args.mode,
                            cfg.budget_subspaces, cfg.budget_group)
    else:
        v = is_gred_semistable(spec, w.dims, w, pol, args.mode,
                               cfg.budget_subspaces)
    emit(v.to_json(), cfg)
    return v.exit_code()


def cmd_census(args, cfg: Config) -> int:
    spec = load_spec(args.spec)
    dims = parse_dims(args.dims)
    if args.mode == "orbits":
        rep = orbit_census(spec, dims, args.p, cfg.budget_points)
        out = rep.to_json()
        out["sha256"] = rep.sha256()
        if args.with_mutated:
            mut = mutate_rs_spec(spec, dims, args.p)
            repm = mutated_orbit_census(mut, cfg.budget_points)
            out["mutated"] = repm.to_json()
            out["mutated"]["sha256"] = repm.sha256()
            out["orbit_counts_equal"] = rep.orbit_count == repm.orbit_count
        emit(out, cfg)
        return EXIT_OK
    if not args.pol:
        raise UsageError("census --mode transfer needs --pol")
    pol = parse_pol(args.pol)
    rep = transfer_check(spec, dims, args.p, pol,
                         cfg.budget_points, cfg.budget_group)
    out = rep.to_json()
    out["sha256"] = rep.sha256()
    emit(out, cfg)
    return EXIT_OK if not rep.violations else EXIT_NEGATIVE


def cmd_examples(args, cfg: Config) -> int:
    if args.what == "rho-prime":
        fam = P2Family(args.m1, args.m2, args.n, Fraction(args.rho))
        emit({"rho": str(fam.rho), "rho_prime": str(rho_prime(fam)),
              "mutated_source": 3 * args.m1 + 6 * args.m2 - args.n}, cfg)
        return EXIT_OK
    if args.what == "singular-rhos":
        g, s, c = pn_quotient_dims(args.n)
        emit({"n": args.n,
              "singular_rhos": [str(x) for x in pn_singular_rhos(args.n)],
              "quotient_count": c,
              "generic_dimension": str(g),
              "special_dimension": str(s)}, cfg)
        return EXIT_OK
    if args.what == "family":
        out = rho_prime_family(args.id, args.m, Fraction(args.eps))
        emit({k: (str(v) if isinstance(v, Fraction) else v)
              for k, v in out.items()}, cfg)
        return EXIT_OK
    if args.what == "kronecker-dual":
        k = KroneckerData(args.q, args.m, args.n)
        d = kronecker_dual_dims(k)
        emit({"q": d.q, "m": d.m, "n": d.n}, cfg)
        return EXIT_OK
    raise UsageError(f"unknown examples subcommand {args.what!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="morphmut")
    ap.add_argument("--format", choices=["json", "table"], default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--budget-points", dest="budget_points", type=int, default=None)
    ap.add_argument("--budget-group", dest="budget_group", type=int, default=None)
    ap.add_argument("--budget-subspaces", dest="budget_subspaces", type=int, default=None)
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("validate", help="check a spec file")
    v.add_argument("spec")

    m = sub.add_parser("mutate", help="mutate a spec + point at index p")
    m.add_argument("--p", type=int, default=0)
    m.add_argument("--pol", default=None)
    m.add_argument("spec")
    m.add_argument("point")

    st = sub.add_parser("stability", help="decide (semi-)stability of a point")
    st.add_argument("--pol", required=True)
    st.add_argument("--mode", choices=["semi", "stable"], default="semi")
    st.add_argument("--which", choices=["g", "gred"], default="g")
    st.add_argument("--sampled", type=int, default=0,
                    help="sample count for infinite fields (witness search only)")
    st.add_argument("spec")
    st.add_argument("point")

    c = sub.add_parser("census", help="orbit census / transfer check")
    c.add_argument("--mode", choices=["orbits", "transfer"], default="orbits")
    c.add_argument("--p", type=int, default=0)
    c.add_argument("--pol", default=None)
    c.add_argument("--dims", required=True, help="'m1,m2;n1,n2'")
    c.add_argument("--with-mutated", action="store_true",
                   help="also census the mutated side and compare orbit counts")
    c.add_argument("spec")

    e = sub.add_parser("examples", help="closed-form arithmetic")
    esub = e.add_subparsers(dest="what", required=True)
    rp = esub.add_parser("rho-prime")
    rp.add_argument("--m1", type=int, required=True)
    rp.add_argument("--m2", type=int, required=True)
    rp.add_argument("--n", type=int, required=True)
    rp.add_argument("--rho", required=True)
    sr = esub.add_parser("singular-rhos")
    sr.add_argument("--n", type=int, required=True)
    fa = esub.add_parser("family")
    fa.add_argument("--id", required=True)
    fa.add_argument("--m", type=int, required=True)
    fa.add_argument("--eps", default="1/100")
    kd = esub.add_parser("kronecker-dual")
    kd.add_argument("--q", type=int, required=True)
    kd.add_argument("--m", type=int, required=True)
    kd.add_argument("--n", type=int, required=True)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        cfg = Config.load(args)
        if args.cmd == "validate":
            return cmd_validate(args, cfg)
        if args.cmd == "mutate":
            return cmd_mutate(args, cfg)
        if args.cmd == "stability":
            return cmd_stability(args, cfg)
        if args.cmd == "census":
            return cmd_census(args, cfg)
        if args.cmd == "examples":
            return cmd_examples(args, cfg)
        raise UsageError(f"unknown command {args.cmd!r}")
    except BudgetExceeded as e:
        sys.stderr.write(json.dumps({"error": str(e), "kind": "budget"}) + "\n")
        return EXIT_BUDGET
    except (UsageError, SpecJsonError, MutationError, ThetaError, ValueError) as e:
        sys.stderr.write(json.dumps({"error": str(e), "kind": "usage"}) + "\n")
        return EXIT_USAGE
    except OSError as e:
        sys.stderr.write(json.dumps({"error": str(e), "kind": "io"}) + "\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

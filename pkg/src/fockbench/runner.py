"""Scenario execution: build the objects, run the declared checks,
emit a deterministic JSON report, and replay recorded violations.

Ideal lattices and truncated Fock modules are cached (in memory, and
on disk under ``cache_dir`` when given) keyed by a content hash of the
declaration plus bounds, so hot and cold runs produce identical reports.
"""

from __future__ import annotations

import hashlib
import json
import os
import pickle
import time
from fractions import Fraction
from itertools import product as iproduct

from . import __version__
from .scalars import QQi
from .monoid import enumerate_ball, ResourceCapError
from .ideals import ideal_lattice, is_right_lcm_up_to
from .fock import (ProductSystemSpec, TruncatedFock, OpWord,
                   check_product_system_axioms, FiberStabilityError)
from .reps import FockRep, ShiftPowerRep, ExplicitRep
from .covariance import (PASS, VIOLATION, INCONCLUSIVE, Verdict,
                         check_rep_axioms, check_T_conditions, check_nica,
                         check_compact_alignment, wick_normal_form,
                         check_fock_covariance, check_kernel_inclusion)
from .crossed import (FiniteGroup, GaugeAction, CrossedRep,
                      check_crossed_axioms, check_expectation,
                      check_core_identity)
from .scenario import split_check, NEEDS_LCM, parse_matrix

ERROR = "error"
EXIT_OF_STATUS = {PASS: 0, VIOLATION: 1, INCONCLUSIVE: 2, ERROR: 3}


def jsonable(v):
    """Recursively coerce verdict payloads to stable JSON types."""
    if isinstance(v, QQi):
        return [f"{v.re.numerator}/{v.re.denominator}",
                f"{v.im.numerator}/{v.im.denominator}"]
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, (set, frozenset)):
        return sorted((jsonable(x) for x in v), key=repr)
    if isinstance(v, range):
        return list(v)
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return repr(v)


class Runner:
    """Holds the lazily built, cached objects for one scenario."""

    def __init__(self, scenario, cache_dir=None):
        self.sc = scenario
        self.cache_dir = cache_dir
        self.spec = scenario.make_monoid()
        self.backend = scenario.backend()
        self._mem = {}
        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)

    # -- caching --------------------------------------------------------

    def _hash(self, *parts):
        h = hashlib.sha256()
        for p in parts:
            h.update(json.dumps(p, sort_keys=True, default=str).encode())
        return h.hexdigest()[:24]

    def _cached(self, key, build):
        if key in self._mem:
            return self._mem[key]
        if self.cache_dir:
            path = os.path.join(self.cache_dir, key + ".pkl")
            if os.path.exists(path):
                with open(path, "rb") as fh:
                    obj = pickle.load(fh)
                self._mem[key] = obj
                return obj
        obj = build()
        self._mem[key] = obj
        if self.cache_dir:
            path = os.path.join(self.cache_dir, key + ".pkl")
            with open(path, "wb") as fh:
                pickle.dump(obj, fh)
        return obj

    # -- lazily built objects -------------------------------------------

    def ball_at(self, T):
        key = "ball-" + self._hash(self.sc.monoid_cfg, T,
                                   self.sc.bounds["ball_cap"])
        return self._cached(
            key, lambda: enumerate_ball(self.spec, T,
                                        self.sc.bounds["ball_cap"]))

    def system(self):
        ps = self.sc.product_system
        if ps == "X_P":
            return ProductSystemSpec.scalar_case(self.spec, self.backend)
        errors = []
        coeff = [parse_matrix(m, self.backend, "coeff", errors)
                 for m in ps.get("coeff_gens", [])]
        fibers = {}
        for payload, mats in ps["fiber_gens"]:
            g = self.spec.payload_from_json(payload)
            fibers[g] = [parse_matrix(m, self.backend, "fiber", errors)
                         for m in mats]
        if errors:
            raise ValueError(f"bad product system matrices: {errors}")
        if not coeff:
            ident = [[self.backend.one if i == j else self.backend.zero
                      for j in range(ps["dim"])] for i in range(ps["dim"])]
            coeff = [ident]
        return ProductSystemSpec(self.spec, ps["dim"], coeff, fibers,
                                 self.backend)

    def fock_at(self, T):
        key = "fock-" + self._hash(self.sc.monoid_cfg,
                                   self.sc.product_system,
                                   self.sc.bounds["backend"], T,
                                   self.sc.bounds["ball_cap"])
        return self._cached(
            key, lambda: TruncatedFock(self.system(), T,
                                       cap=self.sc.bounds["ball_cap"],
                                       ball=self.ball_at(T)))

    def lattice_at(self, T):
        key = "lattice-" + self._hash(self.sc.monoid_cfg, T,
                                      self.sc.bounds["max_pairs"],
                                      self.sc.bounds["ball_cap"])
        letters = [self.spec.identity] + self.spec.generators
        return self._cached(
            key, lambda: ideal_lattice(self.spec, letters,
                                       self.sc.bounds["max_pairs"],
                                       self.ball_at(T)))

    def rep_cfg(self, name):
        for cfg in self.sc.representations:
            if cfg.get("name") == name:
                return cfg
        raise KeyError(f"no representation named {name!r}")

    def make_rep(self, name, T):
        cfg = self.rep_cfg(name)
        ball = self.ball_at(T)
        kind = cfg["kind"]
        if kind == "fock":
            return FockRep(self.fock_at(T)), ball
        if kind == "shift-power":
            powers = {self.spec.payload_from_json(p): int(k)
                      for p, k in cfg["powers"]}
            return ShiftPowerRep(self.spec, ball, powers,
                                 cfg.get("size", 24), self.backend), ball
        mats = {}
        errors = []
        for payload, rows in cfg["matrices"]:
            g = self.spec.payload_from_json(payload)
            mats[g] = parse_matrix(rows, self.backend, "m", errors)
        return ExplicitRep(self.spec, ball, mats, self.backend), ball

    def action(self):
        a = self.sc.action
        group = FiniteGroup.cyclic(a["order"])
        chars = {self.spec.payload_from_json(p): int(k)
                 for p, k in a["characters"]}
        L = max(self.sc.bounds["L"], self.sc.bounds["L_big"])
        return group, chars, GaugeAction(group, self.spec,
                                         self.ball_at(L), chars,
                                         self.backend)

    def crossed_at(self, T):
        group, chars, _ = self.action()
        ball = self.ball_at(T)
        act = GaugeAction(group, self.spec, ball, chars, self.backend)
        return CrossedRep(self.fock_at(T), act), ball

    # -- checks ---------------------------------------------------------

    def lcm_gate(self, check):
        """Structural prerequisite: these checks need a right-LCM monoid."""
        v = is_right_lcm_up_to(self.spec, min(self.sc.bounds["L"], 8),
                               self.sc.bounds["ball_cap"])
        if v.status == "no":
            return Verdict(check, ERROR, {
                "reason": "monoid is not right LCM on this ball; the "
                          "check's alignment prerequisites fail "
                          "structurally",
                "witness": jsonable(v.to_json(self.spec)),
                "suggestion": "use T-conditions / fock-covariance instead",
            })
        return None

    def run_check(self, entry):
        base, repname = split_check(entry)
        b = self.sc.bounds
        L, L_big, W = b["L"], b["L_big"], b["W"]
        if base in NEEDS_LCM:
            gate = self.lcm_gate(entry)
            if gate is not None:
                return gate

        if base == "right-lcm":
            v = is_right_lcm_up_to(self.spec, L, b["ball_cap"],
                                   self.ball_at(L))
            status = {"yes": PASS, "yes-ball": PASS,
                      "no": VIOLATION}[v.status]
            out = v.to_json(self.spec, self.ball_at(L))
            wit = [{"kind": "pair-nonprincipal", **out.pop("witness")}] \
                if "witness" in out else []
            return Verdict(entry, status, out, wit)

        if base == "fock-axioms":
            ok, failures = check_product_system_axioms(self.fock_at(L))
            return Verdict(entry, PASS if ok else VIOLATION,
                           {"ball_radius": L}, failures)

        if base == "rep-axioms":
            rep, ball = self.make_rep(repname, L)
            v = check_rep_axioms(rep, self.spec, ball,
                                 fock=self.fock_at(L))
            return v.rename(entry)

        if base == "T-conditions":
            rep, ball = self.make_rep(repname, L)
            v = check_T_conditions(rep, self.spec, ball,
                                   max_pairs=b["max_pairs"],
                                   max_union=b["max_union"])
            return v.rename(entry)

        if base == "nica":
            rep, ball = self.make_rep(repname, L)
            v = check_nica(rep, self.spec, ball, self.fock_at(L))
            return v.rename(entry)

        if base == "compact-alignment":
            v = check_compact_alignment(self.fock_at(L), self.spec,
                                        self.ball_at(L))
            return v.rename(entry)

        if base == "wick":
            return self.wick_check(entry, L, W)

        if base == "fock-covariance":
            v = check_fock_covariance(
                lambda T: self.make_rep(repname, T), self.spec,
                max_pairs=b["max_pairs"], radius=L, step=L_big - L,
                cap=b["ball_cap"])
            return v.rename(entry)

        if base == "kernel-inclusion":
            v = check_kernel_inclusion(
                lambda T: self.make_rep(repname, T),
                lambda T: (FockRep(self.fock_at(T)), self.ball_at(T)),
                self.spec, max_pairs=b["max_pairs"],
                radius=L, step=L_big - L)
            return v.rename(entry)

        if base == "crossed-axioms":
            cr, ball = self.crossed_at(L)
            return check_crossed_axioms(cr, ball,
                                        sample_limit=200).rename(entry)

        if base == "core-identity":
            cr, ball = self.crossed_at(L)
            return check_core_identity(cr, self.spec, ball,
                                       self.lattice_at(L)).rename(entry)

        if base == "expectation-faithful":
            cr, ball = self.crossed_at(L)
            return check_expectation(cr, ball, samples=100,
                                     seed=b["seed"]).rename(entry)

        if base == "crossed-covariance":
            v = check_fock_covariance(
                lambda T: self.crossed_at(T), self.spec,
                max_pairs=b["max_pairs"], radius=L, step=L_big - L,
                cap=b["ball_cap"])
            return v.rename(entry)

        return Verdict(entry, ERROR, {"reason": f"unknown check {base!r}"})

    def wick_check(self, entry, L, W, word_cap=5000):
        """Normal-form termination and evaluation agreement on words of
        length <= W over the signed generators."""
        spec = self.spec
        fock = self.fock_at(L)
        lam = FockRep(fock)
        letters = [(g, s) for g in spec.generators for s in (+1, -1)]
        witnesses = []
        checked = unknown = empty_interior = 0
        queue = [()]
        for _ in range(W):
            queue = [w + (l,) for w in queue for l in letters]
            for factors in queue:
                if checked + unknown >= word_cap:
                    break
                nf = wick_normal_form(factors, spec)
                if nf[0] == "unknown":
                    unknown += 1
                    continue
                lhs = OpWord([(x, s, 0) for x, s in factors])
                cols = lam.interior_cols(lhs)
                try:
                    if nf[0] == "zero":
                        rhs_m = None
                    else:
                        rhs = OpWord([(nf[1], +1, 0), (nf[2], -1, 0)])
                        cols &= lam.interior_cols(rhs)
                        rhs_m = lam.eval(rhs)
                except KeyError:
                    unknown += 1
                    continue
                if not cols:
                    empty_interior += 1
                    continue
                checked += 1
                diff = lam.eval(lhs) if rhs_m is None \
                    else lam.eval(lhs) - rhs_m
                if not diff.restrict(cols=cols).is_zero():
                    witnesses.append({
                        "kind": "wick-mismatch",
                        "word": [[spec.payload_to_json(x), s]
                                 for x, s in factors],
                        "normal_form": jsonable(nf)})
        details = {"checked": checked, "unresolved_joins": unknown,
                   "empty_interiors": empty_interior,
                   "word_length": W, "ball_radius": L}
        if witnesses:
            return Verdict(entry, VIOLATION, details, witnesses)
        if empty_interior or checked == 0:
            details["reason"] = ("some normal forms could not be compared "
                                 "on a nonempty interior at this "
                                 "truncation")
            return Verdict(entry, INCONCLUSIVE, details)
        return Verdict(entry, PASS, details)


def run_scenario(scenario, cache_dir=None, include_timing=False):
    """Execute the declared checks in order; returns the report dict."""
    runner = Runner(scenario, cache_dir)
    checks = []
    timing = {}
    worst = 0
    for entry in scenario.checks:
        t0 = time.perf_counter()
        try:
            v = runner.run_check(entry)
        except (ResourceCapError, FiberStabilityError) as exc:
            v = Verdict(entry, ERROR,
                        {"reason": type(exc).__name__, "cap": str(exc)})
        timing[entry] = round(time.perf_counter() - t0, 3)
        checks.append(jsonable(v.to_json()))
        worst = max(worst, EXIT_OF_STATUS.get(v.status, 3))
    report = {
        "schema": 1,
        "scenario": scenario.doc,
        "scenario_hash": hashlib.sha256(
            scenario.canonical_json().encode()).hexdigest(),
        "environment": {"version": __version__,
                        "backend": scenario.bounds["backend"],
                        "bounds": jsonable(scenario.bounds)},
        "checks": checks,
        "exit_code": worst,
    }
    if include_timing:
        report["timing"] = timing
    return report


def report_bytes(report):
    """The canonical serialized form (timing excluded by design)."""
    body = {k: v for k, v in report.items() if k != "timing"}
    return (json.dumps(body, sort_keys=True, indent=2) + "\n").encode()


def replay_report(report, check=None, cache_dir=None):
    """Re-run the recorded checks (all violations, or one named check)
    against a fresh runner; returns (all_match, results)."""
    from .scenario import parse_scenario
    scenario = parse_scenario(report["scenario"])
    runner = Runner(scenario, cache_dir)
    targets = []
    for rec in report["checks"]:
        if check is not None:
            if rec["check"] == check:
                targets.append(rec)
        elif rec["status"] == VIOLATION:
            targets.append(rec)
    results = []
    ok = True
    for rec in targets:
        v = runner.run_check(rec["check"])
        same = (v.status == rec["status"])
        ok = ok and same
        results.append({"check": rec["check"], "recorded": rec["status"],
                        "replayed": v.status, "match": same})
    return ok, results

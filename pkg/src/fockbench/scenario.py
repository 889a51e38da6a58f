"""Scenario files: JSON declarations of monoid, system, reps and checks.

Schema (``"schema": 1``):

    {
      "schema": 1,
      "name": "n2-nica",
      "monoid": {"family": "lattice_cone", "k": 2},
      "product_system": "X_P",            # or explicit fiber matrices
      "representations": [
        {"name": "left-regular", "kind": "fock"},
        {"name": "shift", "kind": "shift-power",
         "powers": [[2, 2], [3, 3]], "size": 24}
      ],
      "action": {"group": "cyclic", "order": 2,
                 "characters": [[[1, 0], 1], [[0, 1], 0]]},
      "bounds": {"L": 8, "L_big": 10, "W": 4, "backend": "exact",
                 "tolerance": 1e-9, "ball_cap": 5000, "seed": 7,
                 "max_pairs": 2, "max_union": 3},
      "checks": ["right-lcm", "nica:left-regular", "fock-covariance:shift"]
    }

Checks taking a representation use a ``check:repname`` suffix.  Payloads
in powers/characters/matrices use each family's JSON payload form;
scalar entries are ints, floats, "num/den" strings or [re, im] pairs.
"""

from __future__ import annotations

import json

from .monoid import spec_from_config, FAMILIES
from .scalars import EXACT, FloatBackend, scalar_from_json

SCHEMA_VERSION = 1

CHECKS_PLAIN = {
    "right-lcm", "fock-axioms", "compact-alignment", "wick",
    "crossed-axioms", "core-identity", "expectation-faithful",
    "crossed-covariance",
}
CHECKS_WITH_REP = {
    "rep-axioms", "T-conditions", "nica", "fock-covariance", "kernel-inclusion",
}
# checks that presuppose a right-LCM monoid
NEEDS_LCM = {"nica", "compact-alignment", "wick"}
NEEDS_ACTION = {"crossed-axioms", "core-identity", "expectation-faithful",
                "crossed-covariance"}

DEFAULT_BOUNDS = {
    "L": 8, "L_big": None, "W": 4, "backend": "exact",
    "tolerance": 1e-9, "ball_cap": 5000, "seed": 7,
    "max_pairs": 2, "max_union": 3,
}


class ScenarioError(Exception):
    """Validation failure; ``errors`` is a list of (path, message)."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{p}: {m}" for p, m in self.errors))


class Scenario:
    def __init__(self, doc, warnings=None):
        self.doc = doc
        self.name = doc.get("name", "unnamed")
        self.monoid_cfg = doc["monoid"]
        self.product_system = doc.get("product_system", "X_P")
        self.representations = doc.get("representations", [])
        self.action = doc.get("action")
        self.bounds = dict(DEFAULT_BOUNDS)
        self.bounds.update(doc.get("bounds", {}))
        if self.bounds["L_big"] is None:
            self.bounds["L_big"] = self.bounds["L"] + 2
        self.checks = list(doc["checks"])
        self.warnings = warnings or []

    def backend(self):
        if self.bounds["backend"] == "exact":
            return EXACT
        return FloatBackend(tolerance=self.bounds["tolerance"])

    def make_monoid(self):
        return spec_from_config(self.monoid_cfg)

    def canonical_json(self):
        return json.dumps(self.doc, sort_keys=True, separators=(",", ":"))


def split_check(entry):
    """'nica:left-regular' -> ('nica', 'left-regular')."""
    if ":" in entry:
        base, rep = entry.split(":", 1)
        return base, rep
    return entry, None


def parse_matrix(rows, backend, path, errors):
    if not isinstance(rows, list) or not rows or \
            not all(isinstance(r, list) for r in rows):
        errors.append((path, "matrix must be a non-empty list of rows"))
        return None
    width = len(rows[0])
    out = []
    for i, r in enumerate(rows):
        if len(r) != width:
            errors.append((f"{path}[{i}]", "ragged rows"))
            return None
        try:
            out.append([scalar_from_json(v, backend) for v in r])
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            errors.append((f"{path}[{i}]", f"bad scalar: {exc}"))
            return None
    return out


def _validate_rep(rep, i, spec, backend, errors):
    path = f"representations[{i}]"
    if "name" not in rep:
        errors.append((path, "missing name"))
    kind = rep.get("kind")
    if kind not in ("fock", "shift-power", "explicit"):
        errors.append((path + ".kind", f"unknown kind {kind!r}"))
        return
    if kind == "shift-power":
        if not isinstance(rep.get("powers"), list):
            errors.append((path + ".powers",
                           "expected [[payload, power], ...]"))
        else:
            for j, pair in enumerate(rep["powers"]):
                try:
                    spec.payload_from_json(pair[0])
                    int(pair[1])
                except (TypeError, ValueError, IndexError):
                    errors.append((f"{path}.powers[{j}]", "bad entry"))
        if not isinstance(rep.get("size", 24), int):
            errors.append((path + ".size", "size must be an int"))
    if kind == "explicit":
        mats = rep.get("matrices")
        if not isinstance(mats, list):
            errors.append((path + ".matrices",
                           "expected [[payload, matrix], ...]"))
            return
        dims = set()
        for j, pair in enumerate(mats):
            try:
                spec.payload_from_json(pair[0])
            except (TypeError, ValueError, IndexError):
                errors.append((f"{path}.matrices[{j}]", "bad payload"))
                continue
            m = parse_matrix(pair[1], backend,
                             f"{path}.matrices[{j}]", errors)
            if m is not None:
                dims.add((len(m), len(m[0])))
        if len(dims) > 1:
            errors.append((path + ".matrices",
                           f"inconsistent dimensions {sorted(dims)}"))


def parse_scenario(doc):
    """Validate a scenario document; returns Scenario or raises
    ScenarioError with a list of (path, message) entries.  Soft issues
    (satisfiable-only-maybe prerequisites) land in scenario.warnings."""
    errors = []
    warnings = []
    if not isinstance(doc, dict):
        raise ScenarioError([("$", "document must be a JSON object")])
    if doc.get("schema") != SCHEMA_VERSION:
        errors.append(("schema", f"expected {SCHEMA_VERSION}"))
    mon = doc.get("monoid")
    spec = None
    if not isinstance(mon, dict) or "family" not in mon:
        errors.append(("monoid", "missing family declaration"))
    elif mon["family"] not in FAMILIES:
        errors.append(("monoid.family",
                       f"unknown family {mon['family']!r}; "
                       f"known: {sorted(FAMILIES)}"))
    else:
        try:
            spec = spec_from_config(mon)
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(("monoid", str(exc)))

    bounds = dict(DEFAULT_BOUNDS)
    bounds.update(doc.get("bounds", {}))
    for k in ("L", "W", "ball_cap", "seed", "max_pairs", "max_union"):
        if not isinstance(bounds.get(k), int) or bounds[k] < 0:
            errors.append((f"bounds.{k}", "expected a nonnegative int"))
    if bounds["backend"] not in ("exact", "float"):
        errors.append(("bounds.backend", "expected 'exact' or 'float'"))
    backend = EXACT if bounds["backend"] != "float" else \
        FloatBackend(tolerance=bounds.get("tolerance", 1e-9))

    ps = doc.get("product_system", "X_P")
    if ps != "X_P":
        if not isinstance(ps, dict) or "dim" not in ps \
                or "fiber_gens" not in ps:
            errors.append(("product_system",
                           "expected 'X_P' or {dim, coeff_gens, fiber_gens}"))
        else:
            for j, m in enumerate(ps.get("coeff_gens", [])):
                parse_matrix(m, backend,
                             f"product_system.coeff_gens[{j}]", errors)
            for j, pair in enumerate(ps["fiber_gens"]):
                for jj, m in enumerate(pair[1]):
                    parse_matrix(
                        m, backend,
                        f"product_system.fiber_gens[{j}][{jj}]", errors)

    rep_names = set()
    reps = doc.get("representations", [])
    if spec is not None:
        for i, rep in enumerate(reps):
            _validate_rep(rep, i, spec, backend, errors)
            rep_names.add(rep.get("name"))

    action = doc.get("action")
    if action is not None:
        if action.get("group") != "cyclic" or \
                not isinstance(action.get("order"), int):
            errors.append(("action", "expected {'group': 'cyclic', "
                           "'order': n, 'characters': [...]}"))
        elif bounds["backend"] == "exact" and 4 % action["order"] != 0 \
                and action["order"] != 1:
            errors.append(("action.order",
                           f"order {action['order']} characters are not "
                           "exact; use the float backend"))

    checks = doc.get("checks")
    if not isinstance(checks, list) or not checks:
        errors.append(("checks", "expected a non-empty list"))
        checks = []
    for i, entry in enumerate(checks):
        base, rep = split_check(entry)
        if base in CHECKS_WITH_REP:
            if rep is None:
                errors.append((f"checks[{i}]",
                               f"{base} needs a ':repname' suffix"))
            elif rep not in rep_names:
                errors.append((f"checks[{i}]",
                               f"unknown representation {rep!r}"))
        elif base in CHECKS_PLAIN:
            if rep is not None and base != "wick":
                errors.append((f"checks[{i}]",
                               f"{base} does not take a representation"))
            if base in NEEDS_ACTION and action is None:
                errors.append((f"checks[{i}]",
                               f"{base} needs an 'action' declaration"))
        else:
            errors.append((f"checks[{i}]", f"unknown check {base!r}"))
        if base in NEEDS_LCM and spec is not None and \
                not _plausibly_right_lcm(spec):
            warnings.append(
                f"checks[{i}]: {base} presupposes a right-LCM monoid; "
                f"{spec.name} fails a small-ball principality probe and "
                "will produce a structural error at run time")

    if errors:
        raise ScenarioError(errors)
    return Scenario(doc, warnings)


def _plausibly_right_lcm(spec, probe_radius=6):
    from .ideals import is_right_lcm_up_to
    try:
        return is_right_lcm_up_to(spec, probe_radius).status != "no"
    except Exception:
        return True


def load_scenario(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError([("$", f"invalid JSON: {exc}")])
    return parse_scenario(doc)

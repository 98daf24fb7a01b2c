#!/usr/bin/env python3
"""External MILP backend using scipy.optimize.milp (HiGHS).

Usage, as a SOLVER_CMD template:

    python3 tools/scipy_milp_adapter.py {model} {solution} {timeout}

Reads the LP subset written by propvote (docs/lp_format.md) and writes a
solution file. Exit status: 0 solved, 3 time limit, 4 infeasible, 2 error.
"""

import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

SECTIONS = {
    "maximize": "obj", "maximise": "obj", "max": "obj",
    "subject to": "rows", "such that": "rows", "st": "rows", "s.t.": "rows",
    "bounds": "bounds", "binary": "binary", "binaries": "binary",
    "general": "general", "generals": "general", "end": "end",
}
TERM = re.compile(r"([+-])?\s*(\d+)?\s*([A-Za-z_][A-Za-z0-9_.]*)")


class Model:
    def __init__(self):
        self.names = []
        self.index = {}
        self.lower = []
        self.upper = []
        self.objective = {}
        self.rows = []  # (terms, sense, rhs)

    def var(self, name):
        if name not in self.index:
            self.index[name] = len(self.names)
            self.names.append(name)
            self.lower.append(0.0)
            self.upper.append(np.inf)
        return self.index[name]


def parse_terms(model, text):
    terms = {}
    text = text.strip()
    pos = 0
    while pos < len(text):
        match = TERM.match(text, pos)
        if not match:
            raise ValueError("cannot parse terms: " + text)
        sign, coef, name = match.groups()
        value = int(coef) if coef else 1
        if sign == "-":
            value = -value
        v = model.var(name)
        terms[v] = terms.get(v, 0) + value
        pos = match.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return terms


def parse_lp(text):
    model = Model()
    section = None
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in SECTIONS:
            section = SECTIONS[key]
            continue
        if key in ("minimize", "minimise", "min"):
            raise ValueError("only maximization is supported")
        if section == "obj":
            model.objective = parse_terms(model, line.split(":", 1)[-1])
        elif section == "rows":
            _, body = line.split(":", 1)
            match = re.match(r"(.*?)(<=|>=|=)\s*(-?\d+)\s*$", body)
            if not match:
                raise ValueError("cannot parse row: " + line)
            model.rows.append((parse_terms(model, match.group(1)), match.group(2), int(match.group(3))))
        elif section == "bounds":
            parts = re.split(r"\s*(<=|>=|=)\s*", line)
            if len(parts) == 5:
                v = model.var(parts[2])
                model.lower[v], model.upper[v] = float(parts[0]), float(parts[4])
            elif len(parts) == 3:
                v = model.var(parts[0])
                if parts[1] == "<=":
                    model.upper[v] = float(parts[2])
                elif parts[1] == ">=":
                    model.lower[v] = float(parts[2])
                else:
                    model.lower[v] = model.upper[v] = float(parts[2])
            else:
                raise ValueError("cannot parse bound: " + line)
        elif section in ("binary", "general"):
            for name in line.split():
                v = model.var(name)
                if section == "binary":
                    model.lower[v], model.upper[v] = 0.0, 1.0
        else:
            raise ValueError("content outside a section: " + line)
    return model


def main(argv):
    if len(argv) != 4:
        print(__doc__, file=sys.stderr)
        return 2
    model_path, solution_path, timeout = argv[1:]
    with open(model_path) as handle:
        model = parse_lp(handle.read())
    n = len(model.names)
    c = np.zeros(n)
    for v, coef in model.objective.items():
        c[v] = -coef  # milp minimizes
    constraints = []
    if model.rows:
        a = np.zeros((len(model.rows), n))
        lo = np.full(len(model.rows), -np.inf)
        hi = np.full(len(model.rows), np.inf)
        for r, (terms, sense, rhs) in enumerate(model.rows):
            for v, coef in terms.items():
                a[r, v] = coef
            if sense in ("<=", "="):
                hi[r] = rhs
            if sense in (">=", "="):
                lo[r] = rhs
        constraints.append(LinearConstraint(a, lo, hi))
    options = {}
    if timeout != "none":
        options["time_limit"] = max(float(timeout), 1e-3)
    result = milp(c, constraints=constraints, integrality=np.ones(n),
                  bounds=Bounds(np.array(model.lower), np.array(model.upper)), options=options)
    maximize = any(coef != 0 for coef in model.objective.values())
    with open(solution_path, "w") as out:
        if result.x is None:
            out.write("status %s\n" % ("infeasible" if result.status == 2 else "timeout"))
        else:
            status = "timeout" if result.status == 1 else ("optimal" if maximize else "feasible")
            out.write("status %s\n" % status)
            values = [int(round(x)) for x in result.x]
            if maximize:
                out.write("objective %d\n" % sum(coef * values[v] for v, coef in model.objective.items()))
            for name, value in zip(model.names, values):
                out.write("%s %d\n" % (name, value))
    if result.status == 0:
        return 0
    if result.status == 1:
        return 3
    if result.status == 2:
        return 4
    print(result.message, file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main(sys.argv))

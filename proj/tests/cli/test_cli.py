#!/usr/bin/env python3
"""End-to-end checks of the propvote command-line tool.

usage: test_cli.py PROPVOTE_BINARY DATA_DIR TOOLS_DIR [--update-golden]
"""

import csv
import io
import json
import math
import os
import statistics
import subprocess
import sys
import tempfile
import unittest

BINARY, DATA, TOOLS = sys.argv[1:4]
UPDATE_GOLDEN = "--update-golden" in sys.argv
TEN_VOTERS = os.path.join(DATA, "ten_voters.pb")
GOLDEN = os.path.join(DATA, "golden")


def run(*args, check=True, env=None):
    result = subprocess.run([BINARY, *map(str, args)], capture_output=True, text=True, env=env)
    if check and result.returncode != 0:
        raise AssertionError("%s failed (%d): %s" % (args, result.returncode, result.stderr))
    return result


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def write_pb(path, num_projects, votes, vote_type="approval"):
    with open(path, "w") as out:
        out.write("META\nkey;value\nvote_type;%s\nbudget;%d\n" % (vote_type, num_projects))
        out.write("PROJECTS\nproject_id;cost\n")
        for p in range(1, num_projects + 1):
            out.write("%d;1\n" % p)
        out.write("VOTES\nvoter_id;vote\n")
        for i, vote in enumerate(votes):
            out.write("%d;%s\n" % (i + 1, ",".join(map(str, vote))))


def scipy_available():
    try:
        import scipy.optimize  # noqa: F401
        return True
    except ImportError:
        return False


class Golden(unittest.TestCase):
    """Outputs for the fixture are pinned; timings are stripped first."""

    def compare(self, name, text):
        path = os.path.join(GOLDEN, name)
        if UPDATE_GOLDEN:
            with open(path, "w") as out:
                out.write(text)
        with open(path) as handle:
            self.assertEqual(handle.read(), text, "golden file " + name)

    def test_check(self):
        out = run("check", "--input", TEN_VOTERS, "--k-policy", "explicit:5", "--axiom", "ejrp",
                  "--committee", "c1,c3,c4,c5,c7", check=False)
        self.assertEqual(out.returncode, 1)
        self.compare("check_ejrp.json", out.stdout)

    def test_ksweep(self):
        self.compare("ksweep.csv", run("ksweep", "--input", TEN_VOTERS, "--accept", 300, "--seed", 5).stdout)

    def test_fractions(self):
        doc = json.loads(run("fractions", "--input", TEN_VOTERS, "--k-policy", "explicit:5",
                             "--accept", 500, "--min-avg-ballot", 0).stdout)
        for instance in doc["instances"]:
            instance.pop("path")
        self.compare("fractions.json", json.dumps(doc, indent=2) + "\n")

    def test_importance(self):
        self.compare("importance_jr.csv", run("importance", "--input", TEN_VOTERS, "--k-policy", "explicit:5",
                                              "--accept", 500, "--min-avg-ballot", 0,
                                              "--max-ejrp-fraction", 1).stdout)

    def test_ilp(self):
        doc = json.loads(run("ilp", "--input", TEN_VOTERS, "--k-policy", "explicit:5", "--problem", "diff-jr").stdout)
        doc.pop("wall_seconds")
        self.compare("ilp_diff_jr.json", json.dumps(doc, indent=2) + "\n")


class Commands(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def test_check_verdicts(self):
        ok = run("check", "--input", TEN_VOTERS, "--k-policy", "explicit:5", "--committee", "c1,c2,c3,c4,c6",
                 "--axiom", "ejrp")
        self.assertTrue(json.loads(ok.stdout)["satisfied"])
        bad = run("check", "--input", TEN_VOTERS, "--k-policy", "explicit:5", "--committee", "c2,c3,c4,c8,c9",
                  check=False)
        doc = json.loads(bad.stdout)
        self.assertFalse(doc["satisfied"])
        self.assertEqual(doc["witness"], {"candidate": "c5", "ell": 1, "group": ["v5", "v6", "v7"]})
        self.assertEqual(run("check", "--input", TEN_VOTERS, "--committee", "c42", check=False).returncode, 2)

    def test_ksweep_empty_ballots(self):
        path = os.path.join(self.dir, "empty.pb")
        write_pb(path, 4, [[], [], []])
        table = rows(run("ksweep", "--input", path, "--accept", 50).stdout)
        self.assertEqual(len(table), 8)
        for row in table:
            self.assertEqual(float(row["fraction"]), 1.0)
            self.assertEqual(float(row["exact_fraction"]), 1.0)
            self.assertEqual(row["status"], "ok")

    def test_ksweep_timeout_rows_are_flagged(self):
        path = os.path.join(self.dir, "hard.pb")
        # A unanimous candidate makes JR at k = 1 hold only for {1}.
        write_pb(path, 12, [[1]] * 6)
        table = rows(run("ksweep", "--input", path, "--accept", 100000, "--axiom", "jr",
                         "--timeout", 0.01).stdout)
        self.assertEqual(table[0]["status"], "timeout")
        self.assertEqual(table[0]["fraction"], "")

    def test_correlate(self):
        path = os.path.join(self.dir, "m.csv")
        x = [1.0, 2.0, 4.0, 7.0, 11.0]
        y = [2.0, 1.0, 5.0, 4.0, 9.0]
        with open(path, "w") as out:
            out.write("label,x,same,neg,y\n")
            for i, (a, b) in enumerate(zip(x, y)):
                out.write("r%d,%s,%s,%s,%s\n" % (i, a, a, -a, b))
        table = {(r["measure_a"], r["measure_b"]): r for r in rows(run("correlate", "--input", path).stdout)}
        self.assertAlmostEqual(float(table[("x", "same")]["pearson"]), 1.0, places=12)
        self.assertAlmostEqual(float(table[("x", "neg")]["pearson"]), -1.0, places=12)
        self.assertAlmostEqual(float(table[("x", "y")]["pearson"]), statistics.correlation(x, y), places=9)
        self.assertNotIn(("label", "x"), table)

    def test_importance_feeds_correlate(self):
        out = os.path.join(self.dir, "imp.csv")
        run("importance", "--input", TEN_VOTERS, "--k-policy", "explicit:5", "--accept", 300,
            "--min-avg-ballot", 0, "--max-ejrp-fraction", 1, "--out", out)
        with open(out) as handle:
            table = rows(handle.read())
        self.assertEqual(len(table), 9)
        for row in table:
            self.assertLessEqual(float(row["power_fraction"]), float(row["prevalence"]))
        pairs = rows(run("correlate", "--input", out).stdout)
        self.assertEqual({(r["measure_a"], r["measure_b"]) for r in pairs},
                         {("approval_score", "prevalence"), ("approval_score", "power_fraction"),
                          ("prevalence", "power_fraction")})

    def test_filters_report_exclusions(self):
        result = run("fractions", "--input", TEN_VOTERS, "--k-policy", "explicit:5", "--accept", 50)
        doc = json.loads(result.stdout)
        self.assertIn("excluded", doc["instances"][0])
        self.assertIn("excluded", result.stderr)
        capped = run("rules-overlap", "--input", TEN_VOTERS, "--k-policy", "explicit:5", "--accept", 200,
                     "--min-avg-ballot", 0, "--max-ejrp-fraction", 0.01)
        self.assertEqual(rows(capped.stdout), [])
        self.assertIn("EJR+ fraction", capped.stderr)

    def test_rules_overlap(self):
        table = rows(run("rules-overlap", "--input", TEN_VOTERS, "--k-policy", "explicit:5", "--accept", 300,
                         "--min-avg-ballot", 0, "--max-ejrp-fraction", 1).stdout)
        self.assertEqual(len(table), 9)
        for row in table:
            self.assertTrue(0.0 <= float(row["overlap"]) <= 1.0)
            self.assertEqual(len(row["rule_committee"].split()), 5)
        by = {(r["rule"], r["measure"]): r for r in table}
        self.assertEqual(by[("mes", "approval_score")]["measure_committee"], "c1 c2 c3 c5 c6")

    def test_gen_and_parallel_determinism(self):
        args = ["gen", "--model", "resampling", "--voters", 30, "--candidates", 10, "--count", 3,
                "--p", 0.4, "--phi", 0.5, "--seed", 7]
        a, b = os.path.join(self.dir, "a"), os.path.join(self.dir, "b")
        run(*args, "--out", a)
        run(*args, "--out", b)
        names = sorted(os.listdir(a))
        self.assertEqual(len(names), 3)
        for name in names:
            self.assertEqual(open(os.path.join(a, name)).read(), open(os.path.join(b, name)).read())
        run("gen", "--model", "euclidean", "--voters", 30, "--candidates", 10, "--radius", 0.3,
            "--dim", 1, "--seed", 7, "--out", a)
        base = ["fractions", "--input", a, "--k-policy", "half", "--accept", 100, "--min-avg-ballot", 0,
                "--seed", 3]
        serial = run(*base, "--jobs", 1).stdout
        self.assertEqual(serial, run(*base, "--jobs", 4).stdout)
        self.assertEqual(len(json.loads(serial)["instances"]), 4)

    def test_distance_modes(self):
        sampled = json.loads(run("distance", "--input", TEN_VOTERS, "--k-policy", "explicit:5", "--accept", 300,
                                 "--min-avg-ballot", 0).stdout)["instances"][0]
        self.assertGreater(sampled["normalized_avg_distance"], 0)
        exact = json.loads(run("distance", "--input", TEN_VOTERS, "--k-policy", "explicit:5", "--mode", "max_ilp",
                               "--axiom", "ejrp", "--min-avg-ballot", 0).stdout)["instances"][0]
        self.assertEqual(exact["status"], "optimal")
        self.assertEqual(exact["max_distance"], 4)

    def test_ilp_problems(self):
        base = ["ilp", "--input", TEN_VOTERS, "--k-policy", "explicit:5"]
        doc = json.loads(run(*base, "--problem", "jr-not-ejrp").stdout)
        self.assertEqual(doc["status"], "feasible")
        self.assertGreaterEqual(doc["witness"]["ell"], 2)
        doc = json.loads(run(*base, "--problem", "pcand-jr", "--required", "c8,c9", "--quotient").stdout)
        self.assertEqual(doc["status"], "feasible")
        self.assertTrue({"c8", "c9"} <= set(doc["committee"]))
        doc = json.loads(run(*base, "--problem", "jr-not-ejrp", "--timeout", 0).stdout)
        self.assertEqual(doc["status"], "timeout")
        self.assertEqual(run(*base, "--problem", "pcand-jr", "--required", "c1,c2,c3,c4,c5,c6",
                             check=False).returncode, 2)

    def test_lp_solve_protocol(self):
        lp = os.path.join(self.dir, "m.lp")
        sol = os.path.join(self.dir, "m.sol")
        with open(lp, "w") as out:
            out.write("Maximize\n obj: 0 x\nSubject To\n lo: x >= 1\n hi: x <= 0\nBinary\n x\nEnd\n")
        self.assertEqual(run("lp-solve", lp, sol, check=False).returncode, 4)
        with open(sol) as handle:
            self.assertEqual(handle.read().split()[:2], ["status", "infeasible"])
        run("ilp", "--input", TEN_VOTERS, "--k-policy", "explicit:5", "--problem", "diff-jr", "--write-lp", lp)
        self.assertEqual(run("lp-solve", lp, sol).returncode, 0)
        with open(sol) as handle:
            self.assertIn("objective 4", handle.read())

    @unittest.skipUnless(scipy_available(), "scipy not installed")
    def test_scipy_backend_agrees(self):
        env = dict(os.environ)
        env["SOLVER_CMD"] = "%s %s {model} {solution} {timeout}" % (
            sys.executable, os.path.join(TOOLS, "scipy_milp_adapter.py"))
        inputs = [TEN_VOTERS]
        gen_dir = os.path.join(self.dir, "gen")
        run("gen", "--model", "resampling", "--voters", 7, "--candidates", 8, "--k", 3, "--count", 4,
            "--p", 0.3, "--phi", 0.6, "--seed", 11, "--out", gen_dir)
        inputs += [os.path.join(gen_dir, f) for f in sorted(os.listdir(gen_dir))]
        problems = [("jr-not-ejrp", []), ("diff-jr", []), ("diff-ejrp", []), ("pcand-jr", ["--required", "1,2"]),
                    ("pcand-ejrp", ["--required", "1,2"])]
        for path in inputs:
            required_fix = path == TEN_VOTERS
            for problem, extra in problems:
                if required_fix and extra:
                    extra = ["--required", "c8,c9"]
                for quotient in ([], ["--quotient"]):
                    base = ["ilp", "--input", path, "--k-policy", "explicit:5" if required_fix else "budget-avg-cost",
                            "--problem", problem, *extra, *quotient]
                    ours = json.loads(run(*base).stdout)
                    theirs = json.loads(run(*base, "--backend", "external", env=env).stdout)
                    label = "%s %s %s" % (os.path.basename(path), problem, quotient)
                    self.assertEqual(ours["status"], theirs["status"], label)
                    self.assertEqual(ours["objective"], theirs["objective"], label)


if __name__ == "__main__":
    unittest.main(argv=[sys.argv[0], "-v"])

#!/usr/bin/env python3
"""End-to-end checks of the CLI: exit-code contract, output determinism, and
the documented worked-instance values."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

CLI = sys.argv[1]
failures = []


def run(*args, cwd=None):
    return subprocess.run([CLI, *args], capture_output=True, text=True, cwd=cwd)


def check(name, cond, detail=""):
    if cond:
        print(f"ok   {name}")
    else:
        failures.append(name)
        print(f"FAIL {name} {detail}")


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    trivial = tmp / "trivial.json"
    trivial.write_text(json.dumps({"n": 3, "k": 1, "a": [[1.0], [1.0], [1.0]]}))
    malformed = tmp / "malformed.json"
    malformed.write_text("{ not json")
    noncoprime = tmp / "noncoprime.json"
    noncoprime.write_text(json.dumps({"n": 4, "k": 1, "a": [[1.0]] * 4}))
    negative = tmp / "negative.json"
    negative.write_text(json.dumps({"n": 3, "k": 1, "a": [[1.0], [-1.0], [1.0]]}))
    stiff = tmp / "stiff.json"
    stiff.write_text(json.dumps({"n": 3, "k": 1, "a": [[0.02], [3.0], [3.0]]}))

    # spectral: worked instance values and determinism
    r1 = run("spectral", str(trivial))
    check("spectral exit 0", r1.returncode == 0, r1.stderr)
    out = json.loads(r1.stdout)
    terms = {(t["i"], t["j"]): t["r"] for t in out["curve"]["terms"]}
    expected = {(0, 3): -1.0, (1, 0): 1.0, (1, 1): 3.0, (2, 0): 1.0}
    check("spectral curve terms",
          set(terms) == set(expected) and
          all(abs(terms[ij] - expected[ij]) < 1e-10 for ij in expected),
          str(terms))
    check("spectral floquet root",
          abs(out["floquetRoots"][0]["re"] + 1.0) < 1e-10 and
          abs(out["floquetRoots"][0]["im"]) < 1e-10)
    r2 = run("spectral", str(trivial))
    check("spectral deterministic bytes", r1.stdout == r2.stdout)

    check("malformed json exits 2", run("spectral", str(malformed)).returncode == 2)
    check("non-coprime exits 4", run("spectral", str(noncoprime)).returncode == 4)
    check("unknown option exits 2", run("spectral", "--bogus").returncode == 2)

    # series
    r = run("series", str(trivial), "--order", "3")
    check("series exit 0", r.returncode == 0, r.stderr)
    s = json.loads(r.stdout)
    check("series e = (1,0,0)",
          abs(s["e"][0] - 1.0) < 1e-12 and abs(s["e"][1]) < 1e-12 and abs(s["e"][2]) < 1e-12)
    check("series w1 = -3", abs(s["w"][0] + 3.0) < 1e-12)
    check("series e_{k+1} flagged ok", s["eKPlusOneOk"] is True)
    check("series order 0 exits 2", run("series", str(trivial), "--order", "0").returncode == 2)
    check("series negative leading exits 4",
          run("series", str(negative), "--order", "2").returncode == 4)

    # flow: constant operator, zero drift, deterministic files
    r = run("flow", str(trivial), "--flow", "xi", "--t", "0.2", "--dt", "0.01",
            "--out", str(tmp / "run1"))
    check("flow exit 0", r.returncode == 0, r.stderr)
    drift = json.loads(r.stdout)
    check("flow zero drift", drift["maxDrift"] < 1e-14, str(drift["maxDrift"]))
    check("flow trajectory file", (tmp / "run1_trajectory.csv").exists())
    check("flow monitor file", (tmp / "run1_monitors.csv").exists())
    run("flow", str(trivial), "--flow", "xi", "--t", "0.2", "--dt", "0.01",
        "--out", str(tmp / "run2"))
    check("flow deterministic files",
          (tmp / "run1_trajectory.csv").read_bytes() == (tmp / "run2_trajectory.csv").read_bytes())
    check("flow boundary crossing exits 5",
          run("flow", str(stiff), "--flow", "eta", "--t", "1", "--dt", "0.05",
              "--scheme", "euler").returncode == 5)

    # frame roundtrip through files
    r = run("frame", "from-op", str(trivial))
    check("frame from-op exit 0", r.returncode == 0, r.stderr)
    (tmp / "frame.json").write_text(r.stdout)
    r = run("frame", "to-op", str(tmp / "frame.json"))
    check("frame to-op exit 0", r.returncode == 0, r.stderr)
    op = json.loads(r.stdout)
    check("frame roundtrip is real", op["isReal"] is True)
    back = op["operator"]["a"]
    check("frame roundtrip recovers the operator",
          all(abs(back[i][0] - 1.0) < 1e-9 for i in range(3)), str(back))

    # hamiltonian check
    r = run("check", "hamiltonian", str(trivial), "--chart", "phi-k1", "--which", "hminus",
            "--flow", "xi")
    check("check hamiltonian exit 0", r.returncode == 0, r.stderr)
    h = json.loads(r.stdout)
    check("check hamiltonian deviation", h["maxDeviation"] <= 1e-9, str(h))
    check("check hamiltonian calibration fields", h["sigma"] == -1 and h["scale"] == "1")

    # verify: byte-identical reports across runs, calibrate agrees with frozen
    v1 = run("verify", "--seed", "42")
    v2 = run("verify", "--seed", "42")
    check("verify exit 0", v1.returncode == 0, v1.stderr)
    check("verify deterministic bytes", v1.stdout == v2.stdout)
    check("verify report passed", json.loads(v1.stdout)["passed"] is True)
    c = run("verify", "--calibrate")
    check("calibrate exit 0", c.returncode == 0, c.stderr)
    check("calibrate agrees with frozen table", json.loads(c.stdout)["allAgree"] is True)

print()
if failures:
    print(f"{len(failures)} CLI check(s) failed: {failures}")
    sys.exit(1)
print("all CLI checks passed")

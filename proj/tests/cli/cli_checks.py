#!/usr/bin/env python3
"""Exercises the fthsim binary: exit codes, output files, determinism."""

import csv
import filecmp
import json
import os
import subprocess
import sys
import tempfile

BIN = sys.argv[1]
DATA = sys.argv[2]
CONFIG = sys.argv[3]
failures = []


def run(*args, env=None):
    return subprocess.run([BIN, *args], capture_output=True, text=True, env=env, timeout=300)


def check(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + (f" ({detail})" if detail and not cond else ""))
    if not cond:
        failures.append(name)


with tempfile.TemporaryDirectory() as tmp:
    r = run("experiment-manip")
    check("missing --seed is a usage error", r.returncode == 1, r.returncode)

    r = run("simulate-force", "--clearance", "-1", "--out-dir", tmp)
    check("negative clearance is rejected", r.returncode in (1, 2), r.returncode)

    bad = os.path.join(tmp, "bad.cfg")
    with open(bad, "w") as f:
        f.write("bogus.key = 1\n")
    r = run("simulate-force", "--config", bad, "--out-dir", tmp)
    check("unknown config key is a usage error", r.returncode == 1 and "bogus.key" in r.stderr, r.stderr)

    r = run("fit-force", "--input", os.path.join(DATA, "published_force.csv"), "--out-dir", tmp, "--format", "json")
    check("fit-force runs", r.returncode == 0, r.stderr)
    if r.returncode == 0:
        with open(os.path.join(tmp, "force_fit.json")) as f:
            text = f.read()
        for v in ("8.93", "8.5", "7.7", "6.6"):
            check(f"fit-force reports {v} N", v in text)

    a, b = os.path.join(tmp, "a"), os.path.join(tmp, "b")
    for d in (a, b):
        r = run("experiment-manip", "--seed", "7", "--condition", "both", "--out-dir", d)
        check("experiment-manip runs", r.returncode == 0, r.stderr)
    for name in ("manip_trials.csv", "manip_summary.json"):
        check(f"{name} is byte-identical across runs",
              filecmp.cmp(os.path.join(a, name), os.path.join(b, name), shallow=False))
    with open(os.path.join(a, "manip_trials.csv")) as f:
        rows = list(csv.DictReader(f))
    check("30 manipulation trials written", len(rows) == 30, len(rows))
    summary = json.load(open(os.path.join(a, "manip_summary.json")))
    check("summary has a stats block", "stats" in summary)

    c = os.path.join(tmp, "c")
    r = run("experiment-manip", "--seed", "7", "--condition", "both", "--out-dir", c, "--config", CONFIG)
    check("default config file matches built-in defaults",
          r.returncode == 0 and filecmp.cmp(os.path.join(a, "manip_trials.csv"), os.path.join(c, "manip_trials.csv"),
                                            shallow=False), r.stderr)

    r = run("plot", "--input", os.path.join(a, "manip_trials.csv"), "--output", os.path.join(tmp, "m.svg"),
            "--metric", "indentation")
    check("plot renders manip trials", r.returncode == 0 and open(os.path.join(tmp, "m.svg")).read().startswith("<svg"))

    r = run("experiment-thermal", "--seed", "3", "--subjects", "2", "--out-dir", os.path.join(tmp, "t"))
    check("experiment-thermal runs", r.returncode == 0, r.stderr)
    with open(os.path.join(tmp, "t", "thermal_trials.csv")) as f:
        rows = list(csv.DictReader(f))
    check("36 thermal trials written", len(rows) == 36, len(rows))
    ok = all(abs(float(x["heating_s"]) + float(x["identify_s"]) + float(x["record_s"]) - float(x["duration_s"])) < 1e-6
             for x in rows)
    check("trial duration equals its phases", ok)

    r = run("simulate-thermal", "--out-dir", os.path.join(tmp, "s"))
    check("simulate-thermal runs", r.returncode == 0 and "time_to_target" in r.stdout, r.stderr)

    env = dict(os.environ, FTH_UDP_PORT="0", FTH_GATEWAY_PORT="0", FTH_CLOCK="stepped")
    r = run("serve", "--run-for", "0.3", env=env)
    check("serve honours env overrides", r.returncode == 0 and "clock=stepped" in r.stdout, r.stdout + r.stderr)

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)

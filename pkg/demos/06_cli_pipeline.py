"""A complete command-line session in a scratch directory.

Each call below is what one would type as ``helidiag <args>``; here the
entry point is called in-process so the demo needs no shell.  The final
``report`` step reads every JSON file written earlier and evaluates the
helicity criteria against the measured exponents.

Run:  python demos/06_cli_pipeline.py [output-dir]
"""
# %%
import json
import sys
import tempfile
from pathlib import Path

from helidiag.cli import main

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="helidiag-"))


def helidiag(*args):
    argv = [str(a) for a in args] + ["--out-dir", str(out)]
    print("$ helidiag " + " ".join(argv))
    code = main(argv)
    print(f"  -> exit {code}\n")
    return code


# %% Fields
helidiag("synth", "--besov", "alpha=1/3", "variant=cN", "seed=3", "--n", 256, "--name", "grad_theta")
helidiag("synth", "--kind", "abc", "--dim", 3, "--n", 32, "--name", "abc")
helidiag("synth", "--kind", "band-limited", "--n", 128, "--kmax", 3, "--name", "theta")

# %% Measurements
helidiag("analyze-besov", "--field", out / "grad_theta.fld", "--alpha", "1/3", "--p", 1.5,
         "--time", 3, "--quantity", "grad_theta", "--name", "grad_theta")
helidiag("helicity", "--field", out / "abc.fld", "--name", "abc")
helidiag("commutator-scan", "--pair", "alpha=1/3", "beta=1/3", "dim=2", "n=256", "variant=cN",
         "--eps0", 0.7, "--ratio", 1.25, "--count", 8)
helidiag("defect-scan", "--system", "sqg", "--field", out / "theta.fld",
         "--eps0", 0.75, "--ratio", 1.25, "--count", 8)
helidiag("run-solver", "--system", "sqg2d", "--init", "band-limited", "--n", 32,
         "--dt", 0.01, "--t-end", 0.2, "--record-every", 5)

# %% Report
helidiag("report", "--input", out)
rep = json.loads((out / "report.json").read_text())
print("files written:", sorted(p.name for p in out.iterdir() if p.is_file()))
print("sqg clause:", next(c["verdict"] for c in rep["clauses"] if c["theorem"] == "sqg"))

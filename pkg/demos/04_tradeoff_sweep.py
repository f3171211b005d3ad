"""Sweeping the knobs on a cipher S-box: quantum cost versus garbage.

The four knobs are swept over a grid and each (cost, garbage) outcome is
collected; the mutually non-dominated points form the trade-off curve.
The same sweep is available from the command line:

    esopsyn sweep --in bench:present_sbox --report present.csv
"""

import itertools

from esopsyn import benchmarks, synthesize
from esopsyn.cli import pareto_points
from esopsyn.optimize import OptimizeParams

sbox = benchmarks.get("present_sbox")
print("function: the 4-bit PRESENT S-box", benchmarks.PRESENT_SBOX)

results = {}
for t, c, k, p in itertools.product((3, 4), (0, 1), range(8), (0, 1)):
    params = OptimizeParams(t, bool(c), k, bool(p))
    _, rep = synthesize(sbox, params)
    results[params.tckp()] = (rep.quantum_cost, rep.garbage_count,
                              rep.gate_count)

print(f"\nswept {len(results)} parameter combinations")
distinct = sorted({v for v in results.values()})
print("distinct (qc, garbage, gates) outcomes:")
for qc, garbage, gates in distinct:
    tags = [t for t, v in results.items() if v == (qc, garbage, gates)]
    print(f"  qc={qc:>3} garbage={garbage:>2} gates={gates:>2}  "
          f"e.g. TCKP {tags[0]}")

front = pareto_points([(qc, g) for qc, g, _ in results.values()])
print("\nnon-dominated (qc, garbage) points:", front)
print("lower cost comes at the price of more garbage lines and the")
print("other way around; which end matters depends on the target machine.")

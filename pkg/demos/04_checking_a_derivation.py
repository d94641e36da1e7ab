"""Check a shipped derivation: each step is applied syntactically and its
semantic action is verified on every coend class.

The lens reduction turns the lens shape into a view/update pair over a
cartesian oracle; the checker confirms well-definedness, bijectivity of
the invertible steps, and the final class counts.
"""

from coendcheck.demos import run_demo

report = run_demo("lens_reduction")
print(report.text())
assert report.ok

"""Revenue deficiency versus sample size for the two estimators.

Uses fewer repetitions than the acceptance run so it finishes in seconds;
expect the fitted slopes to wobble by a few hundredths around the full-size
values (about -0.67 for uniform ERM, about -0.51 for the scheduled markets).
"""

from kmarkets import (
    PowerSimulated,
    deficiency_curve,
    fit_rate,
    kmarkets_strategy,
    uniform_strategy,
)

SPEC = PowerSimulated()
SIZES = [2 ** e for e in range(7, 15)]
REPS = 200
SEED = 1729

for strategy in (uniform_strategy(), kmarkets_strategy(schedule="theory")):
    curve = deficiency_curve(SPEC, strategy, SIZES, REPS, SEED)
    print(f"-- strategy {strategy.tag} --")
    print("     n   mean deficiency   std error")
    for pt in curve:
        print(f"{pt.n:6d}   {pt.mean_deficiency:.6f}        {pt.std_error:.6f}")
    fit = fit_rate(curve)
    print(f"log-log slope {fit.slope:.4f}  (r^2 {fit.r_squared:.4f})")
    print()

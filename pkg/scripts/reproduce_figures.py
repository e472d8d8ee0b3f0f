"""Write the CSV for every shipped figure preset into a directory.

    python scripts/reproduce_figures.py [outdir]
"""

import pathlib
import sys
import time

from lambda_metrology import sweep


def main(outdir: str = "figures") -> None:
    out = pathlib.Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name in sweep.preset_names():
        t0 = time.perf_counter()
        result = sweep.run_sweep(sweep.load_preset(name))
        with open(out / f"{name}.csv", "w", newline="\n") as fh:
            sweep.emit_csv(result, fh)
        undefined = sum(result.warnings.values())
        print(f"{name:7s} {len(result.rows):5d} rows  {len(result.header):3d} cols  "
              f"{undefined:4d} empty cells  {time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    main(*sys.argv[1:2])

#!/usr/bin/env python3
"""Emit the 8(5,3) explicit Runge-Kutta coefficient module.

The coefficients are Hairer's DOP853 values (Hairer, Norsett, Wanner,
"Solving Ordinary Differential Equations I", 2nd ed., appendix).  They
are taken here from scipy's published transcription at generation time
and written out as a static module so the simulator does not import
scipy internals at runtime.  Run from the repository root:

    python3 tools/gen_dop853_tableau.py > src/dcnetsim/solvers/_dop853_tables.py
"""

import numpy as np
from scipy.integrate._ivp import dop853_coefficients as dc

N_STAGES = dc.N_STAGES  # 12 stages for the propagating solution


def fmt(a):
    return np.array2string(
        np.asarray(a),
        separator=", ",
        floatmode="unique",
        threshold=10_000,
        max_line_width=79,
    )


def main():
    a = dc.A[:N_STAGES, :N_STAGES]
    b = dc.B
    c = dc.C[:N_STAGES]
    e5 = dc.E5
    e3 = dc.E3
    assert a.shape == (12, 12) and b.shape == (12,) and c.shape == (12,)
    assert e5.shape == (13,) and e3.shape == (13,)
    # the extra slot aligns the error weights with a 13-row stage array
    # whose last row is the derivative at the step end; neither estimate
    # of this pair uses it
    assert e5[-1] == 0.0 and e3[-1] == 0.0
    assert abs(e5.sum()) < 1e-14 and abs(e3.sum()) < 1e-14
    print('"""Coefficients of the order 8(5,3) Runge-Kutta pair (DOP853).')
    print()
    print("Generated by tools/gen_dop853_tableau.py; do not edit by hand.")
    print('"""')
    print()
    print("import numpy as np")
    print()
    print(f"N_STAGES = {N_STAGES}")
    print()
    print(f"A = np.array({fmt(a)})")
    print()
    print(f"B = np.array({fmt(b)})")
    print()
    print(f"C = np.array({fmt(c)})")
    print()
    print(f"E5 = np.array({fmt(e5)})")
    print()
    print(f"E3 = np.array({fmt(e3)})")


if __name__ == "__main__":
    main()

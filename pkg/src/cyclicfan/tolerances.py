"""Default numeric tolerances and caps.

All equality checks in the package are relative: a residual r is accepted
when r <= eps * scale with scale = max(1, magnitudes involved).  EPS_SIGN
guards sign/zero decisions, EPS_EQ guards residual assertions.  Both are
overridable per call and from the CLI.
"""

EPS_SIGN = 1e-9
EPS_EQ = 1e-7

# Entries grow like alpha(p)^depth; 24 keeps double precision meaningful
# for the matrices exercised at desk scale.
DEPTH_CAP = 24


def scale_of(*values):
    """max(1, |v|...) over scalars and array entries, for relative checks."""
    s = 1.0
    for v in values:
        a = abs(v) if isinstance(v, (int, float)) else abs(v).max()
        if a > s:
            s = float(a)
    return s

"""Independent transcriptions used as test oracles."""

import math

def expanded_l4es(rho, al, d1, d2, d3, d4):
    """L_4^ES for m = 2, f = rho, h = sin written out in alpha and its derivatives."""
    s, c = math.sin(al), math.cos(al)
    r = rho
    return (
        s**2 * c**6 / (2 * r**7) - 4 * s**2 * c**4 / r**7 + 8 * s**2 * c**2 / r**7 + 2 * d1 * s * c**5 / r**6
        - 3 * d1 * s**3 * c**3 / r**6 - 7 * d1 * s * c**3 / r**6 + 12 * d1 * s**3 * c / r**6 - 4 * d1 * s * c / r**6
        + d1**2 / (2 * r**5) + 9 * d1**2 * s**4 / (2 * r**5) - 3 * d1**2 * s**2 / r**5 + 2 * d1**2 * c**4 / r**5
        + 2 * d1**2 * c**2 / r**5
        + 4 * d1**2 * s**2 * c**4 / r**5 + d1**2 * s**4 * c**2 / (2 * r**5) - 22 * d1**2 * s**2 * c**2 / r**5
        + 4 * d1**3 * s * c / r**4
        - 2 * d2 * s * c**5 / r**5 + 7 * d2 * s * c**3 / r**5 - 4 * d2 * s**3 * c / r**5 + 4 * d2 * s * c / r**5
        + 8 * d1**3 * s * c**3 / r**4 - 13 * d1**3 * s**3 * c / r**4 + d1**4 * s**2 / (2 * r**3)
        + 8 * d1**4 * s**2 * c**2 / r**3
        + d2 * s**3 * c**3 / r**5 - d1 * d2 / r**4 - 3 * d1 * d2 * s**4 / r**4 + 4 * d1 * d2 * s**2 / r**4
        - 4 * d1 * d2 * c**4 / r**4 - 4 * d1 * d2 * c**2 / r**4
        + 8 * d1 * d2 * s**2 * c**2 / r**4 - 8 * d1**2 * d2 * s * c**3 / r**3 - 4 * d1**2 * d2 * s * c / r**3
        + d2**2 / (2 * r**3) + d2**2 * s**4 / (2 * r**3) - d2**2 * s**2 / r**3 + 2 * d2**2 * c**4 / r**3
        + 2 * d2**2 * c**2 / r**3
        - 2 * d2**2 * s**2 * c**2 / r**3 + 3 * d1**2 * d2 * s**3 * c / r**3 + d1**3 * d2 * s**2 / r**2
        + d1**2 * d2**2 * s**2 / (2 * r)
        + 2 * d3 * s * c**3 / r**4 - 8 * d3 * s * c / r**4 + 2 * d3**2 / r - 2 * d3 * d2 / r**2
        + 2 * d3 * d2 * s**2 / r**2
        - 4 * d3 * d2 * c**2 / r**2 + 2 * d3 * d1 / r**3 - 6 * d3 * d1 * s**2 / r**3 + 4 * d3 * d1 * c**2 / r**3
        + 8 * d3 * d1**2 * s * c / r**2
        + d4 * s * c**3 / r**3 - 4 * d4 * s * c / r**3 + 0.5 * d4**2 * r + 2 * d3 * d4 - d4 * d2 / r
        + d4 * d2 * s**2 / r
        - 2 * d4 * d2 * c**2 / r + d4 * d1 / r**2 - 3 * d4 * d1 * s**2 / r**2 + 2 * d4 * d1 * c**2 / r**2
        + 4 * d4 * d1**2 * s * c / r
    )

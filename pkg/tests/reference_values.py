"""Reference values used by the tests."""

# acceptance probabilities of the two mixing-law samplers, CTS(c=1, l=0.5)
ACCEPTANCE = {
    (0.25, 0.5): (0.1739, 0.7568),
    (0.25, 1e-1): (0.3473, 0.4521),
    (0.25, 1e-2): (0.5780, 0.1338),
    (0.25, 1e-4): (0.8098, 0.0059),
    (0.5, 0.5): (0.3671, 0.8284),
    (0.5, 1e-1): (0.5745, 0.5798),
    (0.5, 1e-2): (0.7697, 0.2457),
    (0.5, 1e-4): (0.8738, 0.0279),
    (0.75, 0.5): (0.6180, 0.9091),
    (0.75, 1e-1): (0.7681, 0.7556),
    (0.75, 1e-2): (0.8718, 0.4822),
    (0.75, 1e-4): (0.9050, 0.1583),
}

# mean KS and CVM p-values of lattice samples (n=5000) against the target,
# symmetric CTS(1, 0.5) and PT(1, 1); keyed by (family, alpha, a)
PVALUES = {
    ("CTS", 0.25, 1e-2): (0.2620, 0.4019),
    ("CTS", 0.25, 1e-4): (0.4722, 0.4643),
    ("PT", 0.25, 1e-2): (0.3797, 0.4506),
    ("PT", 0.25, 1e-4): (0.5142, 0.5057),
    ("CTS", 0.5, 1e-2): (0.2221, 0.3773),
    ("CTS", 0.5, 1e-4): (0.4644, 0.4626),
    ("PT", 0.5, 1e-2): (0.3918, 0.4664),
    ("PT", 0.5, 1e-4): (0.4805, 0.4887),
    ("CTS", 0.75, 1e-2): (0.0564, 0.0800),
    ("CTS", 0.75, 1e-4): (0.5113, 0.5125),
    ("PT", 0.75, 1e-2): (0.3484, 0.4026),
    ("PT", 0.75, 1e-4): (0.4886, 0.4853),
}

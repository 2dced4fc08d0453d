"""Published Monte Carlo reference values: (AE, bias, MSE) per parameter, and CPs."""

PARAMS = ("beta10", "beta11", "beta12", "sigma", "a", "b")

# TABLE1[(censoring, n)] = rows of (AE, bias, MSE) in PARAMS order
TABLE1 = {
    (0.0, 100): [(2.9621, -0.0379, 0.0599), (2.4958, -0.0042, 0.0226), (1.9025, 0.0025, 0.0070),
                 (0.2898, -0.0102, 0.0087), (0.4598, -0.0402, 0.0202), (1.0057, 0.1057, 0.1968)],
    (0.0, 250): [(2.9776, -0.0224, 0.0292), (2.4969, -0.0031, 0.0082), (1.8997, -0.0003, 0.0027),
                 (0.2940, -0.0060, 0.0042), (0.4719, -0.0281, 0.0065), (0.9646, 0.0646, 0.1006)],
    (0.0, 500): [(2.9882, -0.0118, 0.0168), (2.4990, -0.0010, 0.0033), (1.9025, 0.0025, 0.0013),
                 (0.2967, -0.0033, 0.0022), (0.4872, -0.0128, 0.0037), (0.9325, 0.0325, 0.0567)],
    (0.1, 100): [(2.9387, -0.0613, 0.0617), (2.4934, -0.0066, 0.0258), (1.9017, 0.0017, 0.0074),
                 (0.3021, 0.0021, 0.0088), (0.4687, -0.0313, 0.0228), (1.0497, 0.1497, 0.2115)],
    (0.1, 250): [(2.9660, -0.0340, 0.0309), (2.4977, -0.0023, 0.0099), (1.9014, 0.0014, 0.0030),
                 (0.2974, -0.0026, 0.0041), (0.4697, -0.0303, 0.0069), (0.9870, 0.0870, 0.1060)],
    (0.1, 500): [(2.9868, -0.0132, 0.0184), (2.4995, -0.0005, 0.0039), (1.9026, 0.0026, 0.0015),
                 (0.2964, -0.0036, 0.0025), (0.4856, -0.0144, 0.0039), (0.9369, 0.0369, 0.0621)],
    (0.3, 100): [(2.9078, -0.0922, 0.0785), (2.4884, -0.0116, 0.0379), (1.8956, -0.0044, 0.0113),
                 (0.3166, 0.0166, 0.0119), (0.4718, -0.0282, 0.0351), (1.1274, 0.2274, 0.2771)],
    (0.3, 250): [(2.9498, -0.0502, 0.0338), (2.4960, -0.0040, 0.0133), (1.8996, -0.0004, 0.0040),
                 (0.3021, 0.0021, 0.0043), (0.4664, -0.0336, 0.0097), (1.0185, 0.1185, 0.1198)],
    (0.3, 500): [(2.9802, -0.0198, 0.0228), (2.4986, -0.0014, 0.0057), (1.9020, 0.0020, 0.0020),
                 (0.2967, -0.0033, 0.0029), (0.4813, -0.0187, 0.0049), (0.9519, 0.0519, 0.0764)],
}

# CP at 0% censoring for n = 100, 250, 500
TABLE2_ZERO = {
    100: (0.953, 0.917, 0.922, 0.909, 0.839, 0.961),
    250: (0.951, 0.934, 0.928, 0.926, 0.891, 0.948),
    500: (0.953, 0.967, 0.935, 0.949, 0.914, 0.951),
}


def table1_mismatches(ae, bias, mse, ref, scale=1.0):
    """Cells outside +-0.02 (AE, bias) and +-50% relative (MSE), tolerances multiplied by ``scale``."""
    bad = []
    for name, e, bi, m, (re, rb, rm) in zip(PARAMS, ae, bias, mse, ref):
        if abs(e - re) > 0.02 * scale:
            bad.append(f"AE({name})={e:.4f} vs {re}")
        if abs(bi - rb) > 0.02 * scale:
            bad.append(f"bias({name})={bi:.4f} vs {rb}")
        if abs(m - rm) > 0.5 * scale * rm:
            bad.append(f"MSE({name})={m:.4f} vs {rm}")
    return bad
